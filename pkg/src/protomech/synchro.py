"""Synchronicity transport: the unit-modulus phase field, its momentum map,
and the coupled advection of the signed emergence measure.

The state is a pair (eta, mu) on a periodic grid.  The momentum map

    p = Re( -i hbar_bar  eta^{-1} d eta ),        hbar_bar = hbar / 2,

ties the phase gradient to canonical momentum, so the double-angle plane wave
eta = exp(2ikx) carries momentum hbar*k exactly.  A Hamiltonian H(x, p)
closes the system: the velocity field is dH/dp evaluated on p(eta), eta is
carried along the backward characteristics while accumulating the Legendre
phase L = v.p - H, and mu obeys the continuity equation in flux form.
"""

from __future__ import annotations

import logging

import numpy as np

from .grids import (
    PeriodicGrid,
    ScalarField,
    CovectorField,
    VectorField,
    spectral_derivative,
    fourier_interpolate,
    spline_interpolate,
    integrate,
)
from .hamiltonians import CanonicalHamiltonian

__all__ = [
    "InvalidStateError",
    "StepSizeError",
    "EvaluationError",
    "DivisionDomainError",
    "SynchronicityState",
    "momentum_map",
    "velocity_field",
    "step",
    "energy_functional",
    "emergence_frequency",
]

log = logging.getLogger(__name__)

MODULUS_TOL = 1e-9
RENORM_LIMIT = 1e-8


class InvalidStateError(ValueError):
    """The phase field drifted off the unit circle beyond tolerance."""


class StepSizeError(ValueError):
    def __init__(self, dt, admissible):
        super().__init__(
            f"dt={dt:g} violates the transport CFL bound; "
            f"largest admissible dt is {admissible:g}"
        )
        self.admissible = admissible


class EvaluationError(ValueError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class DivisionDomainError(ValueError):
    def __init__(self, points):
        super().__init__(
            f"emergence frequency undefined where nu vanishes but mu does not "
            f"({len(points)} grid points, first few: {points[:5]})"
        )
        self.points = points


class SynchronicityState:
    """Phase field eta (|eta| = 1), emergence density mu, and hbar.

    ``mu`` is the density of the signed emergence measure with respect to the
    grid volume; its integral is conserved by :func:`step`.
    """

    def __init__(self, eta: ScalarField, mu: ScalarField, hbar: float):
        if eta.grid != mu.grid:
            raise InvalidStateError("eta and mu live on different grids")
        if hbar <= 0:
            raise InvalidStateError("hbar must be positive")
        dev = np.max(np.abs(np.abs(eta.values) - 1.0))
        if dev > MODULUS_TOL:
            raise InvalidStateError(
                f"|eta| deviates from 1 by {dev:.3e} (tolerance {MODULUS_TOL:g})"
            )
        self.eta = eta
        self.mu = mu
        self.hbar = float(hbar)
        self.renorm_correction = 0.0

    @property
    def grid(self) -> PeriodicGrid:
        return self.eta.grid

    @property
    def hbar_bar(self) -> float:
        return self.hbar / 2.0

    def total_measure(self) -> float:
        return integrate(self.mu)


def momentum_map(state: SynchronicityState) -> CovectorField:
    """p = -i hbar_bar eta^{-1} d eta, returned real after a residue check."""
    grid = state.grid
    eta = state.eta.values
    comps = []
    for ax in range(grid.ndim):
        d = spectral_derivative(eta, grid, ax)
        raw = -1j * state.hbar_bar * d / eta
        residue = np.max(np.abs(raw.imag))
        scale = max(1.0, np.max(np.abs(raw.real)))
        if residue > 1e-9 * scale:
            raise InvalidStateError(
                f"momentum map has imaginary residue {residue:.3e} on axis {ax}"
            )
        comps.append(raw.real)
    return CovectorField(grid, comps)


def velocity_field(H, p: CovectorField) -> VectorField:
    """v^j(x) = dH/dp_j evaluated at (x, p(x))."""
    grid = p.grid
    if isinstance(H, CanonicalHamiltonian):
        if H.grid != grid:
            raise EvaluationError("Hamiltonian and momentum grids differ")
        comps = H.dp_on_grid(p)
    else:
        comps = H.dp(grid.meshes(), p.components)
        comps = [np.broadcast_to(np.asarray(c, dtype=float), grid.shape)
                 for c in comps]
    for ax, c in enumerate(comps):
        if not np.all(np.isfinite(c)):
            bad = int(np.argmin(np.isfinite(c).reshape(-1)))
            raise EvaluationError(
                f"non-finite velocity component {ax} at flat index {bad}", bad
            )
    return VectorField(grid, comps)


def _hamiltonian_values(H, grid, p: CovectorField):
    if isinstance(H, CanonicalHamiltonian):
        return H.value_on_grid(p)
    return np.broadcast_to(
        np.asarray(H.value(grid.meshes(), p.components), dtype=float), grid.shape
    )


def _cfl_admissible(v: VectorField, grid):
    bound = np.inf
    for ax in range(grid.ndim):
        vmax = np.max(np.abs(v.components[ax]))
        if vmax > 0:
            bound = min(bound, 0.5 * grid.spacings[ax] / vmax)
    return bound


def _backward_feet(vcomps, grid, tau):
    """RK4 backward characteristics of the frozen velocity field.

    Returns the foot points and a midpoint estimate of each characteristic
    (second-order accurate, enough for the phase quadrature).
    """
    pts = np.stack([m.reshape(-1) for m in grid.meshes()])

    def rhs(x):
        return -np.stack([spline_interpolate(c, grid, x) for c in vcomps])

    k1 = rhs(pts)
    k2 = rhs(pts + 0.5 * tau * k1)
    k3 = rhs(pts + 0.5 * tau * k2)
    k4 = rhs(pts + tau * k3)
    feet = pts + (tau / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return feet, 0.5 * (pts + feet)


def _transport_eta(state, v: VectorField, p: CovectorField, H, tau):
    """Semi-Lagrangian step of eta with the Legendre phase accumulated
    at the characteristic midpoint."""
    grid = state.grid
    feet, midfeet = _backward_feet(v.components, grid, tau)
    eta_foot = fourier_interpolate(state.eta.values, grid, feet)
    vdotp = sum(v.components[ax] * p.components[ax] for ax in range(grid.ndim))
    lagrangian = vdotp - _hamiltonian_values(H, grid, p)
    l_mid = fourier_interpolate(lagrangian, grid, midfeet)
    phase = np.exp(1j * tau * l_mid / state.hbar_bar)
    return (eta_foot * phase).reshape(grid.shape)


def _flux_increment(mu_values, v: VectorField, grid):
    """-div(mu v) with spectral derivatives; integrates to exactly zero."""
    out = np.zeros(grid.shape)
    for ax in range(grid.ndim):
        out -= spectral_derivative(mu_values * v.components[ax], grid, ax)
    return out


def step(state: SynchronicityState, H, dt: float) -> SynchronicityState:
    """Advance (eta, mu) by one midpoint-corrected semi-Lagrangian step.

    eta is renormalized to unit modulus afterwards; the correction magnitude
    is logged and must stay below 1e-8.
    """
    grid = state.grid
    p0 = momentum_map(state)
    v0 = velocity_field(H, p0)
    admissible = _cfl_admissible(v0, grid)
    if dt > admissible:
        raise StepSizeError(dt, admissible)

    # predictor: half step with fields frozen at t
    eta_half = _transport_eta(state, v0, p0, H, 0.5 * dt)
    eta_half /= np.abs(eta_half)
    mu_half = state.mu.values + 0.5 * dt * _flux_increment(state.mu.values, v0, grid)
    half = SynchronicityState(
        ScalarField(grid, eta_half), ScalarField(grid, mu_half), state.hbar
    )

    # corrector: full step with midpoint fields
    p_mid = momentum_map(half)
    v_mid = velocity_field(H, p_mid)
    eta_new = _transport_eta(state, v_mid, p_mid, H, dt)
    modulus = np.abs(eta_new)
    correction = float(np.max(np.abs(modulus - 1.0)))
    if correction >= RENORM_LIMIT:
        raise InvalidStateError(
            f"unit-modulus drift {correction:.3e} exceeds {RENORM_LIMIT:g} in one step"
        )
    log.debug("synchro step renormalization correction %.3e", correction)
    eta_new = eta_new / modulus

    mu_mid = state.mu.values + 0.5 * dt * _flux_increment(state.mu.values, v_mid, grid)
    mu_new = state.mu.values + dt * _flux_increment(mu_mid, v_mid, grid)

    out = SynchronicityState(
        ScalarField(grid, eta_new), ScalarField(grid, mu_new), state.hbar
    )
    out.renorm_correction = correction
    return out


def energy_functional(state: SynchronicityState, H) -> float:
    """Integral of mu(x) H(x, p(eta)(x)) over the torus."""
    p = momentum_map(state)
    values = _hamiltonian_values(H, state.grid, p)
    return integrate(state.mu.values * values, state.grid)


def emergence_frequency(state: SynchronicityState, nu: ScalarField) -> ScalarField:
    """Pointwise ratio f = mu / nu; f may be negative (signed emergence)."""
    if nu.grid != state.grid:
        raise InvalidStateError("nu lives on a different grid")
    mu = state.mu.values
    nv = nu.values
    mu_scale = np.max(np.abs(mu)) if mu.size else 0.0
    bad = (nv == 0.0) & (np.abs(mu) > 1e-14 * max(mu_scale, 1.0))
    if np.any(bad):
        raise DivisionDomainError([tuple(ix) for ix in np.argwhere(bad)])
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.where(nv != 0.0, mu / np.where(nv != 0.0, nv, 1.0), 0.0)
    return ScalarField(state.grid, f)


def write_state_csv(state: SynchronicityState, path: str):
    """Snapshot with columns (index..., eta_re, eta_im, mu) plus dims header."""
    import json
    import os

    grid = state.grid
    idx = np.indices(grid.shape).reshape(grid.ndim, -1)
    eta = state.eta.values.reshape(-1)
    mu = state.mu.values.reshape(-1)
    with open(path, "w") as fh:
        fh.write(",".join([f"i{ax}" for ax in range(grid.ndim)]
                          + ["eta_re", "eta_im", "mu"]) + "\n")
        for row in range(grid.npoints):
            cells = [str(int(idx[ax][row])) for ax in range(grid.ndim)]
            cells += ["%.17g" % eta[row].real, "%.17g" % eta[row].imag,
                      "%.17g" % mu[row]]
            fh.write(",".join(cells) + "\n")
    meta = {"dims": [[n, length] for n, length in grid.dims],
            "origins": list(grid.origins), "hbar": state.hbar}
    with open(os.path.splitext(path)[0] + ".json", "w") as fh:
        json.dump(meta, fh, indent=1)


def read_state_csv(path: str) -> SynchronicityState:
    import json
    import os

    with open(os.path.splitext(path)[0] + ".json") as fh:
        meta = json.load(fh)
    grid = PeriodicGrid([tuple(d) for d in meta["dims"]],
                        origins=meta.get("origins"))
    raw = np.genfromtxt(path, delimiter=",", names=True)
    eta = (np.asarray(raw["eta_re"]) + 1j * np.asarray(raw["eta_im"]))
    mu = np.asarray(raw["mu"])
    return SynchronicityState(
        ScalarField(grid, eta.reshape(grid.shape)),
        ScalarField(grid, mu.reshape(grid.shape)), meta["hbar"])
