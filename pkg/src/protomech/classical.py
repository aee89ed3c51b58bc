"""Classical reduction: canonical trajectories, phase-space Liouville
transport, the Poisson bracket, and invariant-charge checks.

Phase-space grids put the position axes first and the momentum axes second;
momentum boxes are finite and treated as periodic, with a monitor that flags
probability mass creeping toward the box edge.

The bracket follows the convention

    {A, B} = dA/dp_j dB/dx^j - dB/dp_j dA/dx^j,

so {x, p} = -1 and the Liouville equation reads d rho/dt = {rho, H}.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .grids import (
    PeriodicGrid,
    ScalarField,
    GridError,
    integrate,
    spectral_derivative,
    spline_interpolate,
)
from .hamiltonians import SeparableHamiltonian, GeneralHamiltonian, _fd_gradient

__all__ = [
    "ConfigurationError",
    "TruncationError",
    "TrajectoryState",
    "PhaseSpacePDF",
    "PhaseFunction",
    "canonical_step",
    "liouville_step",
    "poisson_bracket",
    "check_charge_invariance",
    "expectation",
    "momentum_box",
]

BOUNDARY_CELLS = 3
BOUNDARY_MASS_LIMIT = 1e-6


class ConfigurationError(ValueError):
    """The Hamiltonian does not expose what the integrator needs."""


class TruncationError(RuntimeError):
    """Probability mass reached the momentum box boundary."""


@dataclass
class TrajectoryState:
    """A single phase-space point (q, p) at time t."""

    q: np.ndarray
    p: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.q = np.atleast_1d(np.asarray(self.q, dtype=float))
        self.p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if self.q.shape != self.p.shape:
            raise ConfigurationError("q and p must have matching shapes")
        if not (np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.p))):
            raise ConfigurationError("non-finite trajectory components")


def canonical_step(s: TrajectoryState, H, dt: float) -> TrajectoryState:
    """One step of dp/dt = -dH/dx, dx/dt = dH/dp.

    Separable Hamiltonians get the Strang-split leapfrog (kick-drift-kick);
    general ones with analytic partials get the implicit midpoint rule.
    Both are symplectic.  Works on arrays of points as well as single ones.
    """
    if isinstance(H, SeparableHamiltonian):
        p_half = s.p - 0.5 * dt * np.asarray(H.dV(s.q))
        q_new = s.q + dt * np.asarray(H.dT(p_half))
        p_new = p_half - 0.5 * dt * np.asarray(H.dV(q_new))
        return TrajectoryState(q_new, p_new, s.t + dt)
    if isinstance(H, GeneralHamiltonian):
        if H._dp is None or H._dx is None:
            raise ConfigurationError(
                "implicit midpoint needs analytic dH/dp and dH/dx; "
                "supply them or use a SeparableHamiltonian"
            )
        q_new, p_new = s.q.copy(), s.p.copy()
        for _ in range(100):
            qm, pm = 0.5 * (s.q + q_new), 0.5 * (s.p + p_new)
            q_next = s.q + dt * np.asarray(H.dp(qm, pm))
            p_next = s.p - dt * np.asarray(H.dx(qm, pm))
            delta = max(np.max(np.abs(q_next - q_new)),
                        np.max(np.abs(p_next - p_new)))
            q_new, p_new = q_next, p_next
            if delta < 1e-14:
                break
        else:
            raise ConfigurationError("implicit midpoint did not converge")
        return TrajectoryState(q_new, p_new, s.t + dt)
    raise ConfigurationError(f"unsupported Hamiltonian type {type(H).__name__}")


class PhaseSpacePDF:
    """Probability density on a phase-space grid (x axes, then p axes).

    Values are non-negative up to interpolation noise and integrate to one.
    ``boundary_mass()`` reports the fraction of |rho| within three cells of
    the momentum box edge.
    """

    def __init__(self, grid: PeriodicGrid, values, check=True):
        if grid.ndim % 2 != 0:
            raise GridError("phase-space grids need an even number of axes")
        values = np.asarray(values, dtype=float)
        if values.shape != grid.shape:
            raise GridError("values shape does not match grid")
        if check:
            floor = -1e-10 * max(values.max(initial=0.0), 1.0)
            if values.min() < floor:
                raise GridError(f"negative density {values.min():.3e}")
            total = integrate(values, grid)
            if abs(total - 1.0) > 1e-8:
                raise GridError(f"density integrates to {total!r}, not 1")
        self.grid = grid
        self.values = values

    @property
    def dof(self):
        return self.grid.ndim // 2

    def boundary_mass(self) -> float:
        d = self.dof
        mass = 0.0
        absv = np.abs(self.values)
        for j in range(d):
            ax = d + j
            sl_lo = [slice(None)] * self.grid.ndim
            sl_hi = [slice(None)] * self.grid.ndim
            sl_lo[ax] = slice(0, BOUNDARY_CELLS)
            sl_hi[ax] = slice(-BOUNDARY_CELLS, None)
            mass += absv[tuple(sl_lo)].sum() + absv[tuple(sl_hi)].sum()
        return float(mass * self.grid.cell_volume)

    def copy(self):
        return PhaseSpacePDF(self.grid, self.values.copy(), check=False)


def momentum_box(mean: float, std: float, points: int):
    """Momentum axis covering mean +- 8 standard deviations."""
    return (points, 16.0 * std), mean - 8.0 * std


def _shift_along_axis(values, grid, axis, amounts):
    """Translate values along one periodic axis: out(s) = in(s - amount).

    ``amounts`` must broadcast against the full array shape.  The shift is
    a Fourier phase twist, exact for band-limited data and sum-preserving
    to roundoff.
    """
    n = grid.shape[axis]
    k = grid.wavenumbers(axis)
    shape = [1] * grid.ndim
    shape[axis] = n
    coeffs = np.fft.fft(values, axis=axis)
    out = np.fft.ifft(
        coeffs * np.exp(-1j * k.reshape(shape) * np.asarray(amounts)), axis=axis
    )
    return out.real


def _per_axis(result, d):
    return [np.asarray(c) for c in (result if isinstance(result, (list, tuple))
                                    else [result])][:d]


def liouville_step(pdf: PhaseSpacePDF, H, dt: float) -> PhaseSpacePDF:
    """Advect the density along the canonical flow for one step.

    For separable Hamiltonians the transport follows the backward
    characteristics of the leapfrog map exactly: each kick and drift is a
    shear, applied as an exact Fourier translation along one axis, so the
    total mass is conserved to roundoff.  General Hamiltonians fall back to
    semi-Lagrangian interpolation along backward canonical_step
    characteristics.
    """
    grid = pdf.grid
    d = pdf.dof
    meshes = grid.meshes()
    x = meshes[0] if d == 1 else meshes[:d]
    p = meshes[d] if d == 1 else meshes[d:]

    if isinstance(H, SeparableHamiltonian):
        dv = _per_axis(H.dV(x), d)
        vel = _per_axis(H.dT(p), d)
        values = pdf.values
        for j in range(d):
            values = _shift_along_axis(values, grid, d + j, -0.5 * dt * dv[j])
        for j in range(d):
            values = _shift_along_axis(values, grid, j, dt * vel[j])
        for j in range(d):
            values = _shift_along_axis(values, grid, d + j, -0.5 * dt * dv[j])
    else:
        q = np.stack([m.reshape(-1) for m in meshes[:d]])
        pp = np.stack([m.reshape(-1) for m in meshes[d:]])
        feet = canonical_step(TrajectoryState(q, pp), H, -dt)
        pts = np.concatenate([feet.q, feet.p], axis=0)
        values = spline_interpolate(pdf.values, grid, pts).reshape(grid.shape)

    out = PhaseSpacePDF(grid, values, check=False)
    bmass = out.boundary_mass()
    if bmass > BOUNDARY_MASS_LIMIT:
        raise TruncationError(
            f"{bmass:.3e} of the density sits within {BOUNDARY_CELLS} cells "
            f"of the momentum boundary"
        )
    if bmass > 0.1 * BOUNDARY_MASS_LIMIT:
        warnings.warn(
            f"density approaching the momentum boundary (band mass {bmass:.2e})",
            RuntimeWarning,
        )
    return out


class PhaseFunction:
    """Phase-space observable A(x, p) with optional analytic partials.

    ``fn(x, p)`` takes lists of per-axis coordinate arrays (single arrays in
    one dimension) and is vectorized; ``dx`` and ``dp`` return per-axis
    partial derivative lists.  Missing partials fall back to central
    finite differences.
    """

    def __init__(self, fn, dx=None, dp=None):
        self.fn = fn
        self._dx = dx
        self._dp = dp

    def value(self, x, p):
        return self.fn(x, p)

    def dx(self, x, p):
        if self._dx is not None:
            out = self._dx(x, p)
        else:
            out = _fd_gradient(lambda xx: self.fn(xx, p), x)
        return out if isinstance(out, (list, tuple)) else [out]

    def dp(self, x, p):
        if self._dp is not None:
            out = self._dp(x, p)
        else:
            out = _fd_gradient(lambda pp: self.fn(x, pp), p)
        return out if isinstance(out, (list, tuple)) else [out]


def _phase_partials(values, grid):
    """Spectral (dA/dx_j, dA/dp_j) pairs of a gridded phase-space field."""
    d = grid.ndim // 2
    dx = [spectral_derivative(values, grid, j) for j in range(d)]
    dp = [spectral_derivative(values, grid, d + j) for j in range(d)]
    return dx, dp


def poisson_bracket(A, B, grid: PeriodicGrid) -> ScalarField:
    """{A, B} = dA/dp_j dB/dx^j - dB/dp_j dA/dx^j on a phase-space grid.

    Accepts gridded fields (spectral derivatives; inputs should be
    band-limited) or :class:`PhaseFunction` objects (pointwise partials).
    """
    if grid.ndim % 2 != 0:
        raise GridError("phase-space grids need an even number of axes")
    d = grid.ndim // 2

    def partials(obj):
        if isinstance(obj, PhaseFunction):
            meshes = grid.meshes()
            x = meshes[0] if d == 1 else meshes[:d]
            p = meshes[d] if d == 1 else meshes[d:]
            shape = grid.shape
            dxs = [np.broadcast_to(np.asarray(c, dtype=float), shape)
                   for c in obj.dx(x, p)]
            dps = [np.broadcast_to(np.asarray(c, dtype=float), shape)
                   for c in obj.dp(x, p)]
            return dxs, dps
        values = obj.values if isinstance(obj, ScalarField) else np.asarray(obj)
        if values.shape != grid.shape:
            raise GridError("field shape does not match the phase-space grid")
        return _phase_partials(values, grid)

    adx, adp = partials(A)
    bdx, bdp = partials(B)
    out = np.zeros(grid.shape)
    for j in range(d):
        out += adp[j] * bdx[j] - bdp[j] * adx[j]
    return ScalarField(grid, out)


def check_charge_invariance(H, Q, grid: PeriodicGrid) -> float:
    """max |{H, Q}| over the grid; zero identifies an invariant charge."""
    return float(np.max(np.abs(poisson_bracket(H, Q, grid).values)))


def expectation(pdf: PhaseSpacePDF, F) -> float:
    """Phase-space quadrature of rho times an observable."""
    grid = pdf.grid
    if isinstance(F, PhaseFunction):
        d = pdf.dof
        meshes = grid.meshes()
        x = meshes[0] if d == 1 else meshes[:d]
        p = meshes[d] if d == 1 else meshes[d:]
        values = np.broadcast_to(np.asarray(F.value(x, p), dtype=float), grid.shape)
    elif isinstance(F, ScalarField):
        values = F.values
    else:
        values = np.broadcast_to(np.asarray(F, dtype=float), grid.shape)
    return integrate(pdf.values * values, grid)


def write_pdf_csv(pdf: PhaseSpacePDF, path: str):
    """Snapshot with coordinate columns (x..., p..., rho)."""
    grid = pdf.grid
    d = pdf.dof
    meshes = [m.reshape(-1) for m in grid.meshes()]
    rho = pdf.values.reshape(-1)
    names = [f"x{j}" for j in range(d)] + [f"p{j}" for j in range(d)] + ["rho"]
    with open(path, "w") as fh:
        fh.write(",".join(names) + "\n")
        for row in range(grid.npoints):
            cells = ["%.17g" % m[row] for m in meshes] + ["%.17g" % rho[row]]
            fh.write(",".join(cells) + "\n")


def write_trajectory_csv(states, H, path: str):
    """Trajectory log with columns (t, q..., p..., H)."""
    with open(path, "w") as fh:
        first = states[0]
        d = first.q.size
        names = ["t"] + [f"q{j}" for j in range(d)] + \
            [f"p{j}" for j in range(d)] + ["H"]
        fh.write(",".join(names) + "\n")
        for s in states:
            if isinstance(H, SeparableHamiltonian):
                energy = float(np.sum(H.kinetic(s.p)) + np.sum(H.potential(s.q)))
            else:
                energy = float(np.sum(H.value(s.q, s.p)))
            cells = ["%.17g" % s.t] + ["%.17g" % v for v in s.q] + \
                ["%.17g" % v for v in s.p] + ["%.17g" % energy]
            fh.write(",".join(cells) + "\n")
