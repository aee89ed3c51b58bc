"""Semidirect-product fluid dynamics on the torus: the isentropic
compressible system (mass/entropy/momentum conservation laws with the
thermodynamic pressure law) and 2D incompressible Euler in
vorticity-streamfunction form.

Both solvers are pseudo-spectral with 2/3-rule dealiasing and RK4 in time;
the conservative flux forms keep total mass and entropy at roundoff.
"""

from __future__ import annotations

import numpy as np

from .grids import (
    PeriodicGrid,
    ScalarField,
    CovectorField,
    VectorField,
    GridError,
    integrate,
    spectral_derivative,
)

__all__ = [
    "FluidError",
    "PositivityFault",
    "InternalEnergy",
    "CompressibleState",
    "IncompressibleState2D",
    "pressure",
    "sound_speed",
    "compressible_step",
    "project_divergence_free",
    "euler_step_2d",
    "polytropic_energy",
]


class FluidError(ValueError):
    pass


class PositivityFault(RuntimeError):
    """Density lost positivity and step-halving retries ran out."""


class InternalEnergy:
    """Specific internal energy U(rho, sigma) with its partial derivatives."""

    def __init__(self, value, d_rho, d_sigma):
        self.value = value
        self.d_rho = d_rho
        self.d_sigma = d_sigma


def polytropic_energy(k: float, gamma: float) -> InternalEnergy:
    """U = k rho^(gamma-1) / (gamma-1), giving the pressure P = k rho^gamma."""
    if gamma <= 1.0:
        raise FluidError("polytropic exponent must exceed 1")
    return InternalEnergy(
        value=lambda rho, sigma: k * rho ** (gamma - 1.0) / (gamma - 1.0),
        d_rho=lambda rho, sigma: k * rho ** (gamma - 2.0),
        d_sigma=lambda rho, sigma: np.zeros_like(rho),
    )


class CompressibleState:
    """Mass density, entropy density and momentum density on one grid."""

    def __init__(self, rho: ScalarField, sigma: ScalarField, m: CovectorField,
                 internal_energy: InternalEnergy):
        if rho.grid != sigma.grid or rho.grid != m.grid:
            raise FluidError("state components live on different grids")
        if np.any(rho.values <= 0):
            raise FluidError("mass density must be positive everywhere")
        self.rho = rho
        self.sigma = sigma
        self.m = m
        self.internal_energy = internal_energy

    @property
    def grid(self):
        return self.rho.grid

    def velocity(self) -> VectorField:
        return VectorField(self.grid,
                           [c / self.rho.values for c in self.m.components])

    def totals(self):
        return integrate(self.rho), integrate(self.sigma), \
            [integrate(c, self.grid) for c in self.m.components]

    def energy(self) -> float:
        """Hamiltonian: kinetic plus internal energy."""
        kinetic = np.zeros(self.grid.shape)
        for c in self.m.components:
            kinetic += 0.5 * c**2 / self.rho.values
        internal = self.rho.values * self.internal_energy.value(
            self.rho.values, self.sigma.values)
        return integrate(kinetic + internal, self.grid)


def pressure(rho: ScalarField, sigma: ScalarField,
             U: InternalEnergy) -> ScalarField:
    """P = rho (rho dU/drho + sigma dU/dsigma), the first-law-consistent law."""
    r, s = rho.values, sigma.values
    p = r * (r * U.d_rho(r, s) + s * U.d_sigma(r, s))
    return ScalarField(rho.grid, np.asarray(p, dtype=float) + np.zeros_like(r))


def sound_speed(state: CompressibleState) -> np.ndarray:
    """sqrt(dP/drho) at frozen sigma, by a small central difference."""
    r, s = state.rho.values, state.sigma.values
    U = state.internal_energy
    eps = 1e-6

    def p_of(rr):
        return rr * (rr * U.d_rho(rr, s) + s * U.d_sigma(rr, s))

    dp = (p_of(r * (1 + eps)) - p_of(r * (1 - eps))) / (2 * eps * r)
    return np.sqrt(np.maximum(dp, 0.0))


def _dealias_mask(grid):
    masks = []
    for ax in range(grid.ndim):
        n = grid.shape[ax]
        modes = np.abs(np.fft.fftfreq(n) * n)
        masks.append(modes <= n // 3)
    out = masks[0]
    for m in masks[1:]:
        out = np.multiply.outer(out, m)
    return out


def _dealias(values, grid, mask):
    return np.real(np.fft.ifftn(np.fft.fftn(values) * mask))


def _compressible_rate(rho, sigma, m, grid, U, mask):
    v = [c / rho for c in m]
    p = rho * (rho * U.d_rho(rho, sigma) + sigma * U.d_sigma(rho, sigma))
    drho = np.zeros(grid.shape)
    dsig = np.zeros(grid.shape)
    for j in range(grid.ndim):
        drho -= spectral_derivative(_dealias(rho * v[j], grid, mask), grid, j)
        dsig -= spectral_derivative(_dealias(sigma * v[j], grid, mask), grid, j)
    dm = []
    for k in range(grid.ndim):
        acc = -spectral_derivative(_dealias(p, grid, mask), grid, k)
        for j in range(grid.ndim):
            acc -= spectral_derivative(_dealias(v[j] * m[k], grid, mask), grid, j)
        dm.append(acc)
    return drho, dsig, dm


def compressible_step(state: CompressibleState, dt: float,
                      max_retries: int = 8) -> CompressibleState:
    """RK4 conservative-flux step of the (rho, sigma, m) system.

    The CFL guard uses max(|v| + sound speed).  If the density loses
    positivity, the step is rejected and retried as two half steps, up to
    ``max_retries`` halvings.
    """
    grid = state.grid
    v = state.velocity()
    c = sound_speed(state)
    for ax in range(grid.ndim):
        speed = float(np.max(np.abs(v.components[ax]) + c))
        if speed > 0 and dt > 0.5 * grid.spacings[ax] / speed:
            raise FluidError(
                f"dt={dt:g} violates the acoustic CFL bound "
                f"{0.5 * grid.spacings[ax] / speed:g} on axis {ax}")
    mask = _dealias_mask(grid)
    U = state.internal_energy
    rho = state.rho.values
    sig = state.sigma.values
    m = [comp for comp in state.m.components]

    def rate(r, s, mm):
        return _compressible_rate(r, s, mm, grid, U, mask)

    k1 = rate(rho, sig, m)
    k2 = rate(rho + 0.5 * dt * k1[0], sig + 0.5 * dt * k1[1],
              [m[j] + 0.5 * dt * k1[2][j] for j in range(grid.ndim)])
    k3 = rate(rho + 0.5 * dt * k2[0], sig + 0.5 * dt * k2[1],
              [m[j] + 0.5 * dt * k2[2][j] for j in range(grid.ndim)])
    k4 = rate(rho + dt * k3[0], sig + dt * k3[1],
              [m[j] + dt * k3[2][j] for j in range(grid.ndim)])
    rho_new = rho + (dt / 6) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
    sig_new = sig + (dt / 6) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    m_new = [m[j] + (dt / 6) * (k1[2][j] + 2 * k2[2][j] + 2 * k3[2][j] + k4[2][j])
             for j in range(grid.ndim)]
    if np.any(rho_new <= 0):
        if max_retries <= 0:
            raise PositivityFault("density positivity lost; retries exhausted")
        half = compressible_step(state, dt / 2, max_retries - 1)
        return compressible_step(half, dt / 2, max_retries - 1)
    return CompressibleState(
        ScalarField(grid, rho_new), ScalarField(grid, sig_new),
        CovectorField(grid, m_new), U)


def _deriv_wavenumbers(grid):
    """Wavenumber meshes with the Nyquist mode zeroed, matching the
    derivative convention used across the package."""
    ks = []
    for ax in range(grid.ndim):
        k = grid.wavenumbers(ax)
        n = grid.shape[ax]
        if n % 2 == 0:
            k = k.copy()
            k[n // 2] = 0.0
        ks.append(k)
    return list(np.meshgrid(*ks, indexing="ij"))


def project_divergence_free(v: VectorField) -> VectorField:
    """Spectral Helmholtz projection v - grad(theta), exactly idempotent."""
    grid = v.grid
    ks = _deriv_wavenumbers(grid)
    k2 = sum(k**2 for k in ks)
    k2 = np.where(k2 == 0.0, 1.0, k2)
    hats = [np.fft.fftn(c) for c in v.components]
    kdotv = sum(k * h for k, h in zip(ks, hats))
    out = []
    for k, h in zip(ks, hats):
        proj = h - k * kdotv / k2
        out.append(np.real(np.fft.ifftn(proj)) if np.isrealobj(v.components[0])
                   else np.fft.ifftn(proj))
    return VectorField(grid, out)


class IncompressibleState2D:
    """Scalar vorticity on a square torus with a zero-mean streamfunction."""

    def __init__(self, omega: ScalarField):
        grid = omega.grid
        if grid.ndim != 2:
            raise FluidError("incompressible states are two-dimensional")
        mean = integrate(omega) / grid.volume
        if abs(mean) > 1e-10 * max(1.0, np.max(np.abs(omega.values))):
            raise FluidError(f"vorticity must have zero mean (got {mean!r})")
        self.omega = omega

    @property
    def grid(self):
        return self.omega.grid

    def streamfunction(self) -> ScalarField:
        """psi with laplacian(psi) = omega and zero mean."""
        grid = self.grid
        ks = grid.wavenumber_meshes()
        k2 = sum(k**2 for k in ks)
        inv = np.where(k2 == 0.0, 0.0, -1.0 / np.where(k2 == 0.0, 1.0, k2))
        hat = np.fft.fftn(self.omega.values) * inv
        return ScalarField(grid, np.real(np.fft.ifftn(hat)))

    def velocity(self) -> VectorField:
        """u = (-d_psi/dy, d_psi/dx), divergence-free by construction."""
        psi = self.streamfunction().values
        grid = self.grid
        ux = -spectral_derivative(psi, grid, 1)
        uy = spectral_derivative(psi, grid, 0)
        return VectorField(grid, [ux, uy])

    def kinetic_energy(self) -> float:
        u = self.velocity()
        return 0.5 * integrate(u.components[0] ** 2 + u.components[1] ** 2,
                               self.grid)

    def enstrophy(self) -> float:
        return 0.5 * integrate(self.omega.values ** 2, self.grid)


def euler_step_2d(state: IncompressibleState2D, dt: float) -> IncompressibleState2D:
    """RK4 pseudo-spectral step of d omega/dt = -u . grad omega."""
    grid = state.grid
    mask = _dealias_mask(grid)
    u = state.velocity()
    for ax in range(2):
        vmax = float(np.max(np.abs(u.components[ax])))
        if vmax > 0 and dt > 0.5 * grid.spacings[ax] / vmax:
            raise FluidError(
                f"dt={dt:g} violates the CFL bound "
                f"{0.5 * grid.spacings[ax] / vmax:g} on axis {ax}")
    ks = grid.wavenumber_meshes()
    k2 = sum(k**2 for k in ks)
    inv = np.where(k2 == 0.0, 0.0, -1.0 / np.where(k2 == 0.0, 1.0, k2))

    def rate(w):
        hat = np.fft.fftn(w) * inv
        psi = np.real(np.fft.ifftn(hat))
        ux = -spectral_derivative(psi, grid, 1)
        uy = spectral_derivative(psi, grid, 0)
        wx = spectral_derivative(w, grid, 0)
        wy = spectral_derivative(w, grid, 1)
        return -_dealias(ux * wx + uy * wy, grid, mask)

    w = state.omega.values
    k1 = rate(w)
    k2_ = rate(w + 0.5 * dt * k1)
    k3 = rate(w + 0.5 * dt * k2_)
    k4 = rate(w + dt * k3)
    w_new = w + (dt / 6) * (k1 + 2 * k2_ + 2 * k3 + k4)
    return IncompressibleState2D(ScalarField(grid, w_new))


def write_diagnostics_csv(rows, path: str):
    """Time series with columns (t, energy, enstrophy, mass, entropy).

    Entries that do not apply to a given system are written as zero.
    """
    with open(path, "w") as fh:
        fh.write("t,energy,enstrophy,mass,entropy\n")
        for row in rows:
            fh.write(",".join("%.17g" % v for v in row) + "\n")
