"""Quantum reduction: operator assembly, split-step Schrodinger evolution,
density-matrix (quantum Liouville) evolution, and the observable/functional
duality checks.

Conventions
-----------
* Wave functions are physical samples psi(x_i) with integral norm 1; density
  matrices and operator matrices act on the orthonormal node basis
  (coefficients sqrt(dx) psi(x_i)), so traces are plain matrix traces.
* The constant symmetric metric of a canonical Hamiltonian carries the
  inverse mass: a mass-m particle uses h = 1/m.
* Observables are sums of anticommutators [f_n, p^n]_+ of a coefficient
  function with a power of the spectral momentum operator.
"""

from __future__ import annotations

import numpy as np

from .grids import PeriodicGrid, ScalarField, integrate, spectral_derivative
from .hamiltonians import CanonicalHamiltonian

__all__ = [
    "QuantumError",
    "IntegrationFault",
    "WaveFunction",
    "DensityMatrix",
    "Observable",
    "build_hamiltonian",
    "schrodinger_step",
    "liouville_step_quantum",
    "heisenberg_expectation_check",
    "commutation_check",
    "duality_check",
    "thermal_density_matrix",
]

DENSE_LIMIT = 512


class QuantumError(ValueError):
    pass


class IntegrationFault(RuntimeError):
    """Norm or trace drifted beyond tolerance during propagation."""


class WaveFunction:
    """Complex field psi on a periodic grid with unit integral norm."""

    def __init__(self, values: ScalarField, hbar: float, mass: float = 1.0):
        norm = integrate(np.abs(values.values) ** 2, values.grid)
        if abs(norm - 1.0) > 1e-9:
            raise QuantumError(f"wave function norm {norm!r} is not 1")
        self.values = values
        self.hbar = float(hbar)
        self.mass = float(mass)

    @property
    def grid(self) -> PeriodicGrid:
        return self.values.grid

    @classmethod
    def normalized(cls, grid, raw, hbar, mass=1.0):
        raw = np.asarray(raw, dtype=complex)
        norm = np.sqrt(integrate(np.abs(raw) ** 2, grid))
        return cls(ScalarField(grid, raw / norm), hbar, mass)

    def norm(self) -> float:
        return float(integrate(np.abs(self.values.values) ** 2, self.grid))

    def node_vector(self) -> np.ndarray:
        """Coefficients in the orthonormal node basis."""
        return self.values.values.reshape(-1) * np.sqrt(self.grid.cell_volume)


class DensityMatrix:
    """Hermitian unit-trace operator on the node basis.

    ``signed=True`` admits signed mixtures (negative spectral weight);
    otherwise eigenvalues must be non-negative up to 1e-9.
    """

    def __init__(self, entries, grid=None, signed=False, hbar=None, check=True):
        entries = np.asarray(entries, dtype=complex)
        n = entries.shape[0]
        if entries.shape != (n, n):
            raise QuantumError("density matrix must be square")
        if n > DENSE_LIMIT:
            raise QuantumError(f"dense density matrices capped at {DENSE_LIMIT}")
        if check:
            herm = np.max(np.abs(entries - entries.conj().T))
            if herm > 1e-10:
                raise QuantumError(f"non-Hermitian density matrix ({herm:.2e})")
            tr = complex(np.trace(entries)).real
            if abs(tr - 1.0) > 1e-9:
                raise QuantumError(f"trace {tr!r} is not 1")
            if not signed:
                lo = float(np.linalg.eigvalsh(entries)[0])
                if lo < -1e-9:
                    raise QuantumError(f"negative eigenvalue {lo:.2e} in unsigned mixture")
        self.entries = entries
        self.grid = grid
        self.signed = signed
        self.hbar = hbar

    @property
    def dim(self):
        return self.entries.shape[0]

    @classmethod
    def from_wavefunction(cls, psi: WaveFunction):
        u = psi.node_vector()
        return cls(np.outer(u, u.conj()), grid=psi.grid, hbar=psi.hbar, check=False)

    def expectation(self, operator) -> float:
        mat = operator if isinstance(operator, np.ndarray) else operator
        val = complex(np.trace(self.entries @ mat))
        return val.real


def _momentum_diagonal(grid, hbar, power):
    k = grid.wavenumbers(0)
    n = grid.shape[0]
    if power % 2 == 1 and n % 2 == 0:
        k = k.copy()
        k[n // 2] = 0.0
    return (hbar * k) ** power


def momentum_matrix(grid, hbar, power=1):
    """Dense spectral momentum operator (or a power of it) in the node basis."""
    if grid.ndim != 1:
        raise QuantumError("dense operator assembly is one-dimensional")
    n = grid.shape[0]
    if n > DENSE_LIMIT:
        raise QuantumError(f"dense operators capped at {DENSE_LIMIT} points")
    diag = _momentum_diagonal(grid, hbar, power)
    return np.fft.ifft(diag[:, None] * np.fft.fft(np.eye(n), axis=0), axis=0)


class Observable:
    """Ordered anticommutator terms (coefficient field, momentum power)."""

    def __init__(self, grid: PeriodicGrid, hbar: float, terms):
        self.grid = grid
        self.hbar = float(hbar)
        self.terms = [(np.asarray(f, dtype=complex).reshape(-1), int(n))
                      for f, n in terms]
        for f, n in self.terms:
            if f.size != grid.npoints:
                raise QuantumError("coefficient field does not match the grid")
            if n < 0:
                raise QuantumError("momentum powers must be non-negative")
        self._matrix = None

    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            n = self.grid.shape[0]
            out = np.zeros((n, n), dtype=complex)
            for f, power in self.terms:
                fmat = np.diag(f)
                pmat = momentum_matrix(self.grid, self.hbar, power) \
                    if power > 0 else np.eye(n)
                out += fmat @ pmat + pmat @ fmat
            herm = np.max(np.abs(out - out.conj().T))
            if herm > 1e-10:
                raise QuantumError(f"assembled observable is not Hermitian ({herm:.2e})")
            self._matrix = out
        return self._matrix

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Matrix-free action on node-basis coefficients."""
        values = np.asarray(values, dtype=complex).reshape(-1)
        out = np.zeros_like(values)
        for f, power in self.terms:
            def pn(v):
                if power == 0:
                    return v
                diag = _momentum_diagonal(self.grid, self.hbar, power)
                return np.fft.ifft(diag * np.fft.fft(v))
            out += f * pn(values) + pn(f * values)
        return out

    def max_degree(self):
        return max((n for _, n in self.terms), default=0)


def build_hamiltonian(H: CanonicalHamiltonian, grid: PeriodicGrid,
                      hbar: float) -> Observable:
    """Symmetric-ordering operator 1/2 (p+A) h (p+A) + U as an Observable.

    Restricted to one dimension for dense work; the metric is the scalar
    inverse mass.
    """
    if grid.ndim != 1:
        raise QuantumError("build_hamiltonian currently assembles 1-d operators")
    if H.grid != grid:
        raise QuantumError("Hamiltonian fields live on a different grid")
    h = float(H.metric[0, 0])
    a = H.gauge_values(0).reshape(-1)
    u = H.potential_values().reshape(-1)
    terms = [
        (np.full(grid.npoints, h / 4.0), 2),
        (h * a / 2.0, 1),
        ((u + 0.5 * h * a**2) / 2.0, 0),
    ]
    return Observable(grid, hbar, terms)


def _split_phases(H: CanonicalHamiltonian, grid, hbar, dt):
    """Half-potential and full-kinetic phase factors of the Strang splitting.

    The gauge field must be constant for the kinetic factor to be diagonal
    in Fourier space.
    """
    a = H.gauge_values(0)
    a0 = float(np.mean(a))
    if np.max(np.abs(a - a0)) > 1e-12:
        raise QuantumError("split-step requires a constant gauge potential")
    h = float(H.metric[0, 0])
    u = H.potential_values()
    k = grid.wavenumbers(0)
    kinetic = 0.5 * h * (hbar * k + a0) ** 2
    vhalf = np.exp(-0.5j * dt * u / hbar)
    kfull = np.exp(-1j * dt * kinetic / hbar)
    return vhalf, kfull


def schrodinger_step(psi: WaveFunction, H: CanonicalHamiltonian,
                     dt: float) -> WaveFunction:
    """Strang split step: half potential, full kinetic, half potential."""
    grid = psi.grid
    vhalf, kfull = _split_phases(H, grid, psi.hbar, dt)
    values = psi.values.values
    values = vhalf * values
    values = np.fft.ifftn(kfull * np.fft.fftn(values))
    values = vhalf * values
    out = ScalarField(grid, values)
    norm = integrate(np.abs(values) ** 2, grid)
    if abs(norm - 1.0) > 1e-8:
        raise IntegrationFault(f"norm drifted to {norm!r}")
    new = WaveFunction.__new__(WaveFunction)
    new.values = out
    new.hbar = psi.hbar
    new.mass = psi.mass
    return new


def liouville_step_quantum(rho: DensityMatrix, H: CanonicalHamiltonian,
                           dt: float, hbar=None) -> DensityMatrix:
    """Two-sided split propagation rho -> U rho U+ with the same factors
    as :func:`schrodinger_step`."""
    if rho.grid is None:
        raise QuantumError("density matrix carries no grid")
    hbar = rho.hbar if hbar is None else hbar
    if hbar is None:
        raise QuantumError("hbar required")
    grid = rho.grid
    vhalf, kfull = _split_phases(H, grid, hbar, dt)
    vhalf = vhalf.reshape(-1)
    kfull = kfull.reshape(-1)
    m = rho.entries
    # left multiplication by U
    m = vhalf[:, None] * m
    m = np.fft.ifft(kfull[:, None] * np.fft.fft(m, axis=0), axis=0)
    m = vhalf[:, None] * m
    # right multiplication by U+
    m = m * vhalf.conj()[None, :]
    m = np.fft.fft(kfull.conj()[None, :] * np.fft.ifft(m, axis=1), axis=1)
    m = m * vhalf.conj()[None, :]
    tr = complex(np.trace(m)).real
    if abs(tr - 1.0) > 1e-8:
        raise IntegrationFault(f"trace drifted to {tr!r}")
    return DensityMatrix(m, grid=grid, signed=rho.signed, hbar=hbar, check=False)


def dense_propagator(Hop: Observable, t: float) -> np.ndarray:
    """exp(-i H t / hbar) from a dense eigendecomposition."""
    mat = Hop.matrix()
    evals, vecs = np.linalg.eigh(mat)
    return (vecs * np.exp(-1j * evals * t / Hop.hbar)) @ vecs.conj().T


def heisenberg_expectation_check(rho0: DensityMatrix, Hop: Observable,
                                 Fop: Observable, t: float) -> float:
    """|<rho_0 F~_t> - <rho_t F>| for the two pictures of the same motion."""
    U = dense_propagator(Hop, t)
    F = Fop.matrix()
    f_heis = U.conj().T @ F @ U
    lhs = complex(np.trace(rho0.entries @ f_heis)).real
    rho_t = U @ rho0.entries @ U.conj().T
    rhs = complex(np.trace(rho_t @ F)).real
    return abs(lhs - rhs)


def _band_projector(grid, keep):
    n = grid.shape[0]
    mask = np.abs(np.fft.fftfreq(n) * n) <= keep
    return np.fft.ifft(mask[:, None] * np.fft.fft(np.eye(n), axis=0), axis=0)


def commutation_check(grid: PeriodicGrid, f: ScalarField, hbar: float,
                      keep=None) -> float:
    """Residual of [p, f]_- = (hbar/i) df/dx on the resolved band.

    Both sides are restricted to Fourier modes |m| <= keep (default N/3),
    where the discrete identity is exact for band-limited f; modes that
    wrap past the Nyquist frequency under multiplication by f are excluded.
    """
    if grid.ndim != 1:
        raise QuantumError("commutation check is one-dimensional")
    n = grid.shape[0]
    keep = n // 3 if keep is None else int(keep)
    P = _band_projector(grid, keep)
    pmat = momentum_matrix(grid, hbar, 1)
    fdiag = np.diag(f.values.reshape(-1).astype(complex))
    lhs = pmat @ fdiag - fdiag @ pmat
    grad = spectral_derivative(f.values, grid, 0)
    rhs = (hbar / 1j) * np.diag(grad.reshape(-1).astype(complex))
    diff = P @ (lhs - rhs) @ P
    return float(np.max(np.abs(diff)))


def observable_symbol(F: Observable, x_mesh, p_mesh):
    """Phase-space symbol of a degree <= 2 observable.

    The anticommutator [f, p^n]_+ carries the symbol 2 f p^n for n <= 1 and
    2 f p^2 - hbar^2 f'' / 2 for n = 2; higher powers are unsupported.
    """
    if F.max_degree() > 2:
        raise QuantumError("symbols are implemented for momentum degree <= 2")
    grid = F.grid
    out = np.zeros(np.broadcast(x_mesh, p_mesh).shape)
    for coeff, nn in F.terms:
        fvals = coeff.real
        fx = np.interp(
            np.mod(x_mesh - grid.origins[0], grid.lengths[0]),
            grid.axis_coordinates(0) - grid.origins[0], fvals, period=grid.lengths[0],
        )
        out = out + 2.0 * fx * p_mesh**nn
        if nn == 2:
            d2 = spectral_derivative(
                spectral_derivative(fvals, grid, 0), grid, 0)
            d2x = np.interp(
                np.mod(x_mesh - grid.origins[0], grid.lengths[0]),
                grid.axis_coordinates(0) - grid.origins[0], d2, period=grid.lengths[0],
            )
            out = out - 0.5 * F.hbar**2 * d2x
    return out


def duality_check(rho: DensityMatrix, F: Observable) -> float:
    """|<rho F> - integral of the Wigner field against the symbol of F|."""
    from . import bridge

    lhs = rho.expectation(F.matrix())
    w = bridge.wigner_of_density(rho)
    x_mesh, p_mesh = w.meshes()
    symbol = observable_symbol(F, x_mesh, p_mesh)
    rhs = float(np.sum(w.values * symbol) * w.cell_area)
    return abs(lhs - rhs)


def thermal_density_matrix(Hop: Observable, beta: float,
                           grid=None) -> DensityMatrix:
    """Gibbs state exp(-beta H)/Z, commuting with H by construction."""
    mat = Hop.matrix()
    evals, vecs = np.linalg.eigh(mat)
    w = np.exp(-beta * (evals - evals.min()))
    w /= w.sum()
    entries = (vecs * w) @ vecs.conj().T
    return DensityMatrix(entries, grid=grid or Hop.grid, hbar=Hop.hbar, check=False)


def write_wavefunction_csv(psi: WaveFunction, path: str):
    """Columns (index, re, im)."""
    vals = psi.values.values.reshape(-1)
    with open(path, "w") as fh:
        fh.write("index,re,im\n")
        for i, v in enumerate(vals):
            fh.write(f"{i},{v.real:.17g},{v.imag:.17g}\n")


def read_wavefunction_csv(path: str, grid, hbar, mass=1.0) -> WaveFunction:
    raw = np.genfromtxt(path, delimiter=",", names=True)
    vals = (np.asarray(raw["re"]) + 1j * np.asarray(raw["im"]))
    return WaveFunction(ScalarField(grid, vals.reshape(grid.shape)),
                        hbar, mass)


def write_density_csv(rho: DensityMatrix, path: str):
    """Triplets (i, j, re, im), row-major over the dense entries."""
    n = rho.dim
    with open(path, "w") as fh:
        fh.write("i,j,re,im\n")
        for i in range(n):
            for j in range(n):
                v = rho.entries[i, j]
                fh.write(f"{i},{j},{v.real:.17g},{v.imag:.17g}\n")


def read_density_csv(path: str, grid=None, hbar=None,
                     signed=False) -> DensityMatrix:
    raw = np.genfromtxt(path, delimiter=",", names=True)
    n = int(np.max(raw["i"])) + 1
    entries = np.zeros((n, n), dtype=complex)
    entries[raw["i"].astype(int), raw["j"].astype(int)] = \
        raw["re"] + 1j * raw["im"]
    return DensityMatrix(entries, grid=grid, hbar=hbar, signed=signed)
