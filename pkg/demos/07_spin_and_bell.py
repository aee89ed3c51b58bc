"""Spin from sphere geometry, and what the correlations can violate.

The half-integer generators differ from the angular-momentum ones by
multiplicative terms singular at the poles; on a pole-free collocation grid
they reproduce the spin-1/2 eigenstructure and reduce to the Pauli matrices.
The singlet's correlation function then breaks the CHSH bound at 2 sqrt 2
while every product state stays below 2.
"""

import numpy as np

from protomech import spin

grid = spin.SphereGrid(64, 64)
print(f"Sphere quadrature: solid angle = {grid.solid_angle():.12f} "
      f"(4 pi = {4 * np.pi:.12f})")

L = spin.build_L(grid, hbar=1.0)
Y = spin.spherical_harmonic(grid, 3, 2)
r3 = np.max(np.abs(L[2].apply(Y) - 2.0 * Y))
rc = np.max(np.abs(spin.casimir_apply(L, Y) - 12.0 * Y))
print(f"\nY_3^2 under the angular generators: L3 residual {r3:.1e}, "
      f"L.L residual {rc:.1e}")

S = spin.build_S(grid, hbar=1.0)
plus, minus = spin.spin_half_states(grid)
print("\nHalf-integer sector:")
print(f"  S3|+> eigen-residual {np.max(np.abs(S[2].apply(plus) - 0.5 * plus)):.1e}")
print(f"  S.S|+> eigen-residual "
      f"{np.max(np.abs(spin.casimir_apply(S, plus) - 0.75 * plus)):.1e}")
blocks = spin.pauli_reduce(S, grid)
print("  reduced 2x2 blocks (2/hbar scaled):")
for i, b in enumerate(blocks):
    print(f"    sigma_{i + 1} error {np.max(np.abs(2 * b - spin.PAULI[i])):.1e}")

print("\nCHSH at the standard coplanar settings 0, pi/2, pi/4, 3 pi/4:")
z, xv = np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0])
ang = lambda t: np.cos(t) * z + np.sin(t) * xv
a, ap, b, bp = ang(0), ang(np.pi / 2), ang(np.pi / 4), ang(3 * np.pi / 4)
singlet = spin.singlet_state()
chsh = spin.bell_lhs(
    spin.correlation(singlet, a, b), spin.correlation(singlet, a, bp),
    spin.correlation(singlet, ap, bp), spin.correlation(singlet, ap, b))
print(f"  singlet: {chsh:.12f}  (2 sqrt 2 = {2 * np.sqrt(2):.12f})")

rng = np.random.default_rng(0)
worst = 0.0
for _ in range(1000):
    va, vb = rng.normal(size=3), rng.normal(size=3)
    st = spin.product_state(va / np.linalg.norm(va), vb / np.linalg.norm(vb))
    worst = max(worst, spin.bell_lhs(
        spin.correlation(st, a, b), spin.correlation(st, a, bp),
        spin.correlation(st, ap, bp), spin.correlation(st, ap, b)))
print(f"  1000 random product states: max {worst:.6f}  (never above 2)")
