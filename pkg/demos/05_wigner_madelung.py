"""The classical-quantum bridge: Wigner fields and Madelung hydrodynamics.

The Wigner field of a Gaussian is a positive phase-space Gaussian with the
state's densities as marginals; a superposition turns it negative between
the branches.  The Madelung split of the same state carries a quantum
stress whose divergence balances the potential force exactly for the ground
state, and for quadratic Hamiltonians the Wigner field evolves along the
classical flow to roundoff.
"""

import numpy as np

from protomech.grids import PeriodicGrid, ScalarField, CovectorField
from protomech.hamiltonians import CanonicalHamiltonian
from protomech.quantum import WaveFunction, schrodinger_step
from protomech import bridge

grid = PeriodicGrid([(128, 20.0)], origins=[-10.0])
x = grid.axis_coordinates(0)
psi = WaveFunction.normalized(grid, np.exp(-x**2 / 2), hbar=1.0)

w = bridge.wigner_transform(psi)
X, P = w.meshes()
closed = np.exp(-X**2 - P**2) / np.pi
print("Ground-state Wigner field:")
print(f"  closed-form max error {np.max(np.abs(w.values - closed)):.2e}")
print(f"  x-marginal error {np.max(np.abs(w.position_marginal() - np.abs(psi.values.values) ** 2)):.2e}")
print(f"  minimum value {w.values.min():+.2e} (non-negative Gaussian)")

cat = WaveFunction.normalized(
    grid, np.exp(-((x - 3) ** 2) / 2) + np.exp(-((x + 3) ** 2) / 2), hbar=1.0)
wcat = bridge.wigner_transform(cat)
print(f"\nTwo separated Gaussians: min W = {wcat.values.min():+.3f} "
      "(interference fringes go negative)")

print("\nMadelung split of the ground state:")
fields = bridge.madelung_decompose(psi)
print(f"  momentum field max {np.max(np.abs(fields.p_bar.components[0])):.1e}"
      " (real state carries none)")
center = np.argmin(np.abs(x))
ratio = fields.stress_q[0][0][center] / fields.rho_bar.values[center]
print(f"  quantum stress / density = {ratio:+.6f} "
      "(the constant -hbar w / 2 of the ground state)")

print("\nQuadratic flows move Wigner classically (L1 distance):")
H = CanonicalHamiltonian(
    grid, scalar_potential=ScalarField(grid, 0.5 * x**2),
    grad_potential=CovectorField(grid, [x]))
pdf0 = bridge.wigner_to_pdf(w)
for t, d in bridge.classical_limit_compare(psi, pdf0, H, [1.0, 5.0], 0.01):
    print(f"  t = {t:4.1f}: L1 = {d:.2e}")
