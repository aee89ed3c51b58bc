"""Classical reduction: trajectories, Liouville transport, and the bracket.

The Liouville solver advects a phase-space density along the exact backward
characteristics of the leapfrog map, one Fourier shear per kick and drift,
so a harmonic oscillator rotates an off-center Gaussian rigidly.
"""

import numpy as np

from protomech.grids import PeriodicGrid
from protomech.hamiltonians import SeparableHamiltonian
from protomech.classical import (
    TrajectoryState, PhaseSpacePDF, PhaseFunction,
    canonical_step, liouville_step, poisson_bracket, expectation,
)

H = SeparableHamiltonian(lambda p: 0.5 * p**2, lambda q: 0.5 * q**2,
                         d_kinetic=lambda p: p, d_potential=lambda q: q)

print("Leapfrog closes the harmonic orbit:")
s = TrajectoryState(1.0, 0.0)
steps = 6300
for _ in range(steps):
    s = canonical_step(s, H, 2 * np.pi / steps)
print(f"  after one period: q = {s.q[0]:+.9f}, p = {s.p[0]:+.2e}")

print("\nAn off-center Gaussian in phase space, one quarter period:")
grid = PeriodicGrid([(128, 16.0), (128, 16.0)], origins=[-8.0, -8.0])
X, P = grid.meshes()
rho = np.exp(-((X - 2.0) ** 2 + P**2) / 2.0)
rho /= rho.sum() * grid.cell_volume
pdf = PhaseSpacePDF(grid, rho)
nsteps = 1571
for _ in range(nsteps):
    pdf = liouville_step(pdf, H, 1e-3)
tau = nsteps * 1e-3
i, j = np.unravel_index(np.argmax(pdf.values), pdf.values.shape)
print(f"  density peak now at (x, p) = ({X[i, j]:+.3f}, {P[i, j]:+.3f}); "
      f"the rotated center is ({2 * np.cos(tau):+.3f}, {-2 * np.sin(tau):+.3f})")
print(f"  mass drift {abs(pdf.values.sum() * grid.cell_volume - 1):.1e}")
print(f"  energy expectation {expectation(pdf, 0.5 * (X**2 + P**2)):.6f}")

print("\nThe bracket convention puts {x, p} = -1:")
bgrid = PeriodicGrid([(16, 4.0), (16, 4.0)], origins=[-2.0, -2.0])
xf = PhaseFunction(lambda x, p: x + 0 * p,
                   dx=lambda x, p: [np.ones_like(x)],
                   dp=lambda x, p: [np.zeros_like(x)])
pf = PhaseFunction(lambda x, p: p + 0 * x,
                   dx=lambda x, p: [np.zeros_like(x)],
                   dp=lambda x, p: [np.ones_like(x)])
print(f"  {{x, p}} = {poisson_bracket(xf, pf, bgrid).values[0, 0]:+.1f}")
