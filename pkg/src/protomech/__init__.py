"""protomech: a numerical geometric-mechanics kit on periodic grids.

The package certifies, by direct computation, the equivalences between
Lie-Poisson dynamics, classical Liouville transport, Schrodinger / quantum
Liouville evolution, Madelung hydrodynamics and the Wigner phase-space
picture, together with the spin-operator algebra, Bell-correlation bounds,
grand-canonical occupation laws and semidirect-product fluid systems.

Modules
-------
grids        periodic grids, fields, spectral calculus, CSV/JSON round trips
hamiltonians canonical / separable / general Hamiltonian containers
synchro      unit-modulus phase transport and the emergence measure
classical    canonical trajectories, Liouville transport, Poisson bracket
quantum      operator assembly, split-step evolution, duality checks
bridge       Wigner fields, Madelung hydrodynamics, classical-limit compare
liepoisson   semidirect-product generators and coadjoint transport
spin         sphere-grid spin operators, Pauli reduction, CHSH correlations
thermo       grand potential and entropy maximization
fluids       compressible Lie-Poisson fluid and 2D incompressible Euler
cli          the `protomech` experiment runner
"""

from . import grids, hamiltonians, synchro, classical, quantum, bridge, \
    liepoisson, spin, thermo, fluids

__version__ = "0.1.0"

__all__ = [
    "grids", "hamiltonians", "synchro", "classical", "quantum", "bridge",
    "liepoisson", "spin", "thermo", "fluids",
]
