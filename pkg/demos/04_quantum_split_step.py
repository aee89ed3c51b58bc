"""Quantum reduction: operator assembly and the two equivalent pictures.

The canonical operator 1/2 (p + A) h (p + A) + U is assembled with spectral
momentum; its harmonic spectrum is equally spaced from hbar w / 2.  The same
split factors drive the wave function and, two-sided, the density matrix,
so a pure state and its outer product never separate.
"""

import numpy as np

from protomech.grids import PeriodicGrid, ScalarField, CovectorField
from protomech.hamiltonians import CanonicalHamiltonian
from protomech.quantum import (
    WaveFunction, DensityMatrix, build_hamiltonian,
    schrodinger_step, liouville_step_quantum, duality_check, Observable,
)

grid = PeriodicGrid([(128, 20.0)], origins=[-10.0])
x = grid.axis_coordinates(0)
H = CanonicalHamiltonian(
    grid,
    scalar_potential=ScalarField(grid, 0.5 * x**2),
    grad_potential=CovectorField(grid, [x]),
)
Hop = build_hamiltonian(H, grid, hbar=1.0)
evals = np.linalg.eigvalsh(Hop.matrix())
print("Harmonic spectrum from dense diagonalization:")
print("  ", np.round(evals[:5], 9), " (exact n + 1/2)")

print("\nCoherent state: <x>(t) follows cos t")
psi = WaveFunction.normalized(grid, np.exp(-((x - 1.0) ** 2) / 2), hbar=1.0)
dt = 5e-4
t = 0.0
for target in (0.5, 1.5, np.pi):
    while t + dt <= target + 1e-12:
        psi = schrodinger_step(psi, H, dt)
        t += dt
    xm = float(np.sum(x * np.abs(psi.values.values) ** 2) * grid.spacings[0])
    print(f"  t = {t:.4f}: <x> = {xm:+.8f}  cos t = {np.cos(t):+.8f}")

print("\nPure state vs density matrix over t = 1 (same split factors):")
g64 = PeriodicGrid([(64, 20.0)], origins=[-10.0])
x64 = g64.axis_coordinates(0)
H64 = CanonicalHamiltonian(
    g64, scalar_potential=ScalarField(g64, 0.5 * x64**2),
    grad_potential=CovectorField(g64, [x64]))
phi = WaveFunction.normalized(g64, np.exp(-((x64 - 1.0) ** 2) / 2), hbar=1.0)
rho = DensityMatrix.from_wavefunction(phi)
for _ in range(1000):
    phi = schrodinger_step(phi, H64, 1e-3)
    rho = liouville_step_quantum(rho, H64, 1e-3)
outer = DensityMatrix.from_wavefunction(phi)
print(f"  max entry difference {np.max(np.abs(rho.entries - outer.entries)):.2e}")

print("\nObservable/functional duality through the Wigner field:")
psig = WaveFunction.normalized(g64, np.exp(-x64**2 / 2), hbar=1.0)
rg = DensityMatrix.from_wavefunction(psig)
p2 = Observable(g64, 1.0, [(np.full(64, 0.5), 2)])
print(f"  residual for the squared momentum: {duality_check(rg, p2):.2e}")
