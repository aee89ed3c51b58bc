"""Semidirect-product generators (vector field, function), their bracket, the
functional-to-generator map, and the coadjoint transport of the emergence
momentum J = (momentum density, density).

The generator induced by a functional F is

    F_hat = (D_rho F, F - p . D_rho F),

whose pairing with J returns the functional value identically (the
null-Lagrangian property).  The coadjoint action follows the duality
convention <ad*_V J, W> = -<J, [V, W]>, so the transport equations

    d rho / dt = -d_j (v^j rho),
    d (rho p_k) / dt = -d_j (v^j rho p_k) - rho p_j d_k v^j + rho d_k L

with v = dH/dp and L = p.v - H read dJ/dt = -ad*_{H_hat} J.
"""

from __future__ import annotations

import warnings

import numpy as np

from .grids import (
    PeriodicGrid,
    ScalarField,
    CovectorField,
    VectorField,
    integrate,
    spectral_derivative,
    GridError,
)
from .hamiltonians import CanonicalHamiltonian

__all__ = [
    "LiePoissonError",
    "Generator",
    "EmergenceMomentum",
    "bracket",
    "pairing",
    "ad_star",
    "generator_from_functional",
    "lie_poisson_step",
    "custom_generator_step",
    "LocalFunctional",
    "DerivativeFunctional",
]


class LiePoissonError(ValueError):
    pass


class Generator:
    """Element (v, U) of the semidirect-product algebra."""

    def __init__(self, v: VectorField, U: ScalarField):
        if v.grid != U.grid:
            raise LiePoissonError("generator parts live on different grids")
        self.v = v
        self.U = U

    @property
    def grid(self):
        return self.v.grid


class EmergenceMomentum:
    """State J = (rho p, rho); the density integrates to one and may be
    signed, and the momentum density vanishes wherever the density does."""

    def __init__(self, momentum_density: CovectorField, density: ScalarField,
                 check=True):
        if momentum_density.grid != density.grid:
            raise LiePoissonError("J components live on different grids")
        if check:
            total = integrate(density)
            if abs(total - 1.0) > 1e-9:
                raise LiePoissonError(f"density integrates to {total!r}, not 1")
            zero = np.abs(density.values) < 1e-14 * np.max(np.abs(density.values))
            for c in momentum_density.components:
                if np.any(np.abs(c[zero]) > 1e-12 * max(np.max(np.abs(c)), 1.0)):
                    raise LiePoissonError(
                        "momentum density must vanish where the density does")
        self.momentum_density = momentum_density
        self.density = density

    @property
    def grid(self):
        return self.density.grid

    def momentum_field(self) -> CovectorField:
        """Pointwise p = (rho p) / rho, zero where the density vanishes.

        Transport is best conditioned for densities bounded away from zero;
        in near-vanishing regions the ratio is noise-dominated and masked.
        """
        rho = self.density.values
        mask = np.abs(rho) > 1e-13 * np.max(np.abs(rho))
        safe = np.where(mask, rho, 1.0)
        comps = [np.where(mask, c / safe, 0.0)
                 for c in self.momentum_density.components]
        return CovectorField(self.grid, comps)

    def copy(self):
        return EmergenceMomentum(self.momentum_density.copy(),
                                 self.density.copy(), check=False)


def bracket(V1: Generator, V2: Generator) -> Generator:
    """([v1, v2], v1 U2 - v2 U1); the function part is abelian."""
    if V1.grid != V2.grid:
        raise LiePoissonError("generators live on different grids")
    grid = V1.grid
    d = grid.ndim
    v1, v2 = V1.v.components, V2.v.components
    comm = []
    for j in range(d):
        acc = np.zeros(grid.shape)
        for k in range(d):
            acc += v1[k] * spectral_derivative(v2[j], grid, k)
            acc -= v2[k] * spectral_derivative(v1[j], grid, k)
        comm.append(acc)
    scalar = np.zeros(grid.shape)
    for k in range(d):
        scalar += v1[k] * spectral_derivative(V2.U.values, grid, k)
        scalar -= v2[k] * spectral_derivative(V1.U.values, grid, k)
    return Generator(VectorField(grid, comm), ScalarField(grid, scalar))


def pairing(J: EmergenceMomentum, G: Generator) -> float:
    """Natural pairing <J, (v, U)> = integral of (rho p . v + rho U)."""
    if J.grid != G.grid:
        raise LiePoissonError("pairing across different grids")
    grid = J.grid
    total = J.density.values * G.U.values
    for k in range(grid.ndim):
        total = total + J.momentum_density.components[k] * G.v.components[k]
    return integrate(total, grid)


def ad_star(V: Generator, J: EmergenceMomentum) -> EmergenceMomentum:
    """Coadjoint action fixed by <ad*_V J, W> = -<J, [V, W]> for all W."""
    grid = J.grid
    d = grid.ndim
    v, U = V.v.components, V.U.values
    rho = J.density.values
    m = J.momentum_density.components
    dm = []
    for k in range(d):
        acc = rho * spectral_derivative(U, grid, k)
        for j in range(d):
            acc += spectral_derivative(v[j] * m[k], grid, j)
            acc += m[j] * spectral_derivative(v[j], grid, k)
        dm.append(acc)
    drho = np.zeros(grid.shape)
    for j in range(d):
        drho += spectral_derivative(rho * v[j], grid, j)
    return EmergenceMomentum(CovectorField(grid, dm), ScalarField(grid, drho),
                             check=False)


class LocalFunctional:
    """F(J) = integral rho F(x, p) for a pointwise phase function.

    ``value``/``dp`` take the coordinate meshes and the momentum component
    list, vectorized.
    """

    def __init__(self, value, dp):
        self.value = value
        self.dp = dp


class DerivativeFunctional(LocalFunctional):
    """Local functional with first-order momentum-gradient dependence:
    F(x, p, grad p), carrying dF/d(d_i p_j) as ``d_gradp``."""

    def __init__(self, value, dp, d_gradp):
        super().__init__(value, dp)
        self.d_gradp = d_gradp


def _functional_pieces(F, grid, p: CovectorField):
    meshes = grid.meshes()
    x = meshes[0] if grid.ndim == 1 else meshes
    pc = p.components[0] if grid.ndim == 1 else p.components
    if isinstance(F, CanonicalHamiltonian):
        return F.value_on_grid(p), F.dp_on_grid(p), None
    values = np.broadcast_to(np.asarray(F.value(x, pc), dtype=float), grid.shape)
    dp = F.dp(x, pc)
    dp = [np.broadcast_to(np.asarray(c, dtype=float), grid.shape)
          for c in (dp if isinstance(dp, (list, tuple)) else [dp])]
    dgrad = None
    if isinstance(F, DerivativeFunctional):
        gradp = [[spectral_derivative(p.components[j], grid, i)
                  for j in range(grid.ndim)] for i in range(grid.ndim)]
        dgrad = F.d_gradp(x, pc, gradp)
    return values, dp, dgrad


def generator_from_functional(F, J: EmergenceMomentum) -> Generator:
    """Generator (D_rho F, F - p . D_rho F) of a functional of degree <= 1
    in momentum derivatives.

    Points where the density vanishes contribute zero to the divergence
    correction; their count is reported via a warning.  The null-Lagrangian
    pairing identity is verified on return.
    """
    grid = J.grid
    p = J.momentum_field()
    values, dp, dgrad = _functional_pieces(F, grid, p)
    rho = J.density.values
    mask = np.abs(rho) > 1e-14 * np.max(np.abs(rho))
    v = [c.copy() for c in dp]
    if dgrad is not None:
        masked = int(np.sum(~mask))
        if masked:
            warnings.warn(f"divergence correction masked at {masked} points "
                          f"with vanishing density", RuntimeWarning)
        safe = np.where(mask, rho, 1.0)
        for j in range(grid.ndim):
            corr = np.zeros(grid.shape)
            for i in range(grid.ndim):
                corr += spectral_derivative(rho * dgrad[i][j], grid, i)
            v[j] = v[j] - np.where(mask, corr / safe, 0.0)
    pdotv = sum(p.components[k] * v[k] for k in range(grid.ndim))
    gen = Generator(VectorField(grid, v), ScalarField(grid, values - pdotv))
    lhs = pairing(J, gen)
    rhs = integrate(rho * values, grid)
    if abs(lhs - rhs) > 1e-8 * max(1.0, abs(rhs)):
        raise LiePoissonError(
            f"null-Lagrangian pairing violated: {lhs!r} vs {rhs!r}")
    return gen


def _transport_rate(J: EmergenceMomentum, H):
    """(d rho/dt, d m/dt) of the Lie-Poisson flow for Hamiltonian H."""
    grid = J.grid
    d = grid.ndim
    rho = J.density.values
    m = J.momentum_density.components
    p = J.momentum_field()
    hvals, dh, _ = _functional_pieces(H, grid, p)
    lagr = sum(p.components[k] * dh[k] for k in range(d)) - hvals
    drho = np.zeros(grid.shape)
    for j in range(d):
        drho -= spectral_derivative(dh[j] * rho, grid, j)
    dm = []
    for k in range(d):
        acc = rho * spectral_derivative(lagr, grid, k)
        for j in range(d):
            acc -= spectral_derivative(dh[j] * m[k], grid, j)
            acc -= m[j] * spectral_derivative(dh[j], grid, k)
        dm.append(acc)
    return drho, dm, dh


def _cfl_check(dh, grid, dt, support):
    for ax in range(grid.ndim):
        vmax = float(np.max(np.abs(np.where(support, dh[ax], 0.0))))
        if vmax > 0 and dt > 0.5 * grid.spacings[ax] / vmax:
            raise LiePoissonError(
                f"dt={dt:g} violates the CFL bound "
                f"{0.5 * grid.spacings[ax] / vmax:g} on axis {ax}")


def lie_poisson_step(J: EmergenceMomentum, H, dt: float) -> EmergenceMomentum:
    """RK4 step of the coadjoint transport in conservative form.

    The density flux form conserves the total emergence measure to roundoff;
    a sign flip of the density at finite amplitude is flagged.
    """
    grid = J.grid
    _, _, dh0 = _transport_rate(J, H)
    rho0 = J.density.values
    support = np.abs(rho0) > 1e-13 * np.max(np.abs(rho0))
    _cfl_check(dh0, grid, dt, support)

    def rate(state):
        drho, dm, _ = _transport_rate(state, H)
        return drho, dm

    def advance(state, k, factor):
        drho, dm = k
        return EmergenceMomentum(
            CovectorField(grid, [state.momentum_density.components[j]
                                 + factor * dm[j] for j in range(grid.ndim)]),
            ScalarField(grid, state.density.values + factor * drho),
            check=False,
        )

    k1 = rate(J)
    k2 = rate(advance(J, k1, dt / 2))
    k3 = rate(advance(J, k2, dt / 2))
    k4 = rate(advance(J, k3, dt))
    rho_new = J.density.values + (dt / 6) * (
        k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
    m_new = [
        J.momentum_density.components[j] + (dt / 6) * (
            k1[1][j] + 2 * k2[1][j] + 2 * k3[1][j] + k4[1][j])
        for j in range(grid.ndim)
    ]
    scale = np.max(np.abs(J.density.values))
    flipped = (np.sign(rho_new) != np.sign(J.density.values)) & \
        (np.abs(J.density.values) > 1e-3 * scale) & \
        (np.abs(rho_new) > 1e-3 * scale)
    if np.any(flipped):
        warnings.warn(
            f"density changed sign at {int(np.sum(flipped))} grid points in "
            f"one step", RuntimeWarning)
    return EmergenceMomentum(CovectorField(grid, m_new),
                             ScalarField(grid, rho_new), check=False)


def custom_generator_step(J: EmergenceMomentum, rule, dt: float) -> EmergenceMomentum:
    """RK4 step of a user update rule J -> (delta m, delta rho).

    Normalization is re-checked but not enforced; rules are free to model
    dissipative or phenomenological dynamics.
    """
    grid = J.grid

    def rate(state):
        dm, drho = rule(state)
        dm = [np.asarray(c) for c in dm]
        drho = np.asarray(drho)
        if drho.shape != grid.shape or any(c.shape != grid.shape for c in dm):
            raise LiePoissonError("update rule returned mismatched grids")
        return dm, drho

    def advance(state, k, factor):
        dm, drho = k
        return EmergenceMomentum(
            CovectorField(grid, [state.momentum_density.components[j]
                                 + factor * dm[j] for j in range(grid.ndim)]),
            ScalarField(grid, state.density.values + factor * drho),
            check=False,
        )

    k1 = rate(J)
    k2 = rate(advance(J, k1, dt / 2))
    k3 = rate(advance(J, k2, dt / 2))
    k4 = rate(advance(J, k3, dt))
    rho_new = J.density.values + (dt / 6) * (
        k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    m_new = [
        J.momentum_density.components[j] + (dt / 6) * (
            k1[0][j] + 2 * k2[0][j] + 2 * k3[0][j] + k4[0][j])
        for j in range(grid.ndim)
    ]
    out = EmergenceMomentum(CovectorField(grid, m_new),
                            ScalarField(grid, rho_new), check=False)
    total = integrate(out.density)
    if abs(total - 1.0) > 1e-9:
        warnings.warn(f"custom rule drifted the normalization to {total!r}",
                      RuntimeWarning)
    return out


def energy_functional(J: EmergenceMomentum, H) -> float:
    """F_H(J) = integral rho H(x, p)."""
    p = J.momentum_field()
    values, _, _ = _functional_pieces(H, J.grid, p)
    return integrate(J.density.values * values, J.grid)


def write_momentum_csv(J: EmergenceMomentum, path: str):
    """Snapshot with columns (x..., rho, rho_p...)."""
    grid = J.grid
    meshes = [m.reshape(-1) for m in grid.meshes()]
    rho = J.density.values.reshape(-1)
    mcomps = [c.reshape(-1) for c in J.momentum_density.components]
    names = [f"x{j}" for j in range(grid.ndim)] + ["rho"] + \
        [f"rho_p{j}" for j in range(grid.ndim)]
    with open(path, "w") as fh:
        fh.write(",".join(names) + "\n")
        for row in range(grid.npoints):
            cells = ["%.17g" % m[row] for m in meshes]
            cells.append("%.17g" % rho[row])
            cells += ["%.17g" % c[row] for c in mcomps]
            fh.write(",".join(cells) + "\n")
