"""Classical-quantum bridge: Wigner fields, Madelung hydrodynamics, phase
space moments, and the classical-limit comparison.

The Wigner field of a state on an N-point grid lives on N position nodes
times 2N momentum values at half-mode spacing pi*hbar/L, computed from the
correlation kernel on a spectrally upsampled grid; the construction is exact
for band-limited states and its marginals reproduce the position and
momentum densities.
"""

from __future__ import annotations

import numpy as np

from .grids import PeriodicGrid, ScalarField, CovectorField, VectorField, \
    GridError, integrate, spectral_derivative
from .hamiltonians import CanonicalHamiltonian, SeparableHamiltonian
from .classical import PhaseSpacePDF, liouville_step
from .quantum import WaveFunction, DensityMatrix, schrodinger_step

__all__ = [
    "BridgeError",
    "NodeDomainError",
    "WignerField",
    "MadelungFields",
    "wigner_transform",
    "wigner_of_density",
    "momentum_density",
    "madelung_decompose",
    "hydrodynamic_residual",
    "classical_moments",
    "classical_limit_compare",
    "wigner_to_pdf",
]


class BridgeError(ValueError):
    pass


class NodeDomainError(ValueError):
    """A wave-function node fell inside the requested evaluation set."""

    def __init__(self, nodes):
        super().__init__(f"{len(nodes)} node points in the evaluation set "
                         f"(first few: {nodes[:5]})")
        self.nodes = nodes


class WignerField:
    """Real phase-space density W(x, p) with unit integral."""

    def __init__(self, x, p, values, hbar):
        self.x = np.asarray(x, dtype=float)
        self.p = np.asarray(p, dtype=float)
        values = np.asarray(values)
        if values.shape != (self.x.size, self.p.size):
            raise BridgeError("Wigner values shape mismatch")
        self.values = values
        self.hbar = float(hbar)

    @property
    def dx(self):
        return float(self.x[1] - self.x[0])

    @property
    def dp(self):
        return float(self.p[1] - self.p[0])

    @property
    def cell_area(self):
        return self.dx * self.dp

    def meshes(self):
        return np.meshgrid(self.x, self.p, indexing="ij")

    def total(self):
        return float(self.values.sum() * self.cell_area)

    def position_marginal(self):
        return self.values.sum(axis=1) * self.dp

    def momentum_marginal(self):
        return self.values.sum(axis=0) * self.dx


def _pad_spectrum_axis(F, axis):
    """Zero-pad FFT coefficients to double length along one axis,
    splitting the Nyquist coefficient symmetrically for even sizes."""
    n = F.shape[axis]
    half = n // 2
    shape = list(F.shape)
    shape[axis] = 2 * n
    big = np.zeros(shape, dtype=complex)

    def put(dst, src, factor=1.0):
        d = [slice(None)] * F.ndim
        s = [slice(None)] * F.ndim
        d[axis], s[axis] = dst, src
        big[tuple(d)] = factor * F[tuple(s)]

    if n % 2 == 0:
        put(slice(0, half), slice(0, half))
        put(slice(2 * n - half + 1, 2 * n), slice(half + 1, n))
        put(half, half, 0.5)
        put(2 * n - half, half, 0.5)
    else:
        put(slice(0, half + 1), slice(0, half + 1))
        put(slice(2 * n - half, 2 * n), slice(half + 1, n))
    return big


def _upsample_1d(values):
    """Band-limited interpolation onto a doubled grid."""
    return np.fft.ifft(_pad_spectrum_axis(np.fft.fft(values), 0)) * 2.0


def _wigner_from_correlation(corr, grid, hbar, window=True):
    """Assemble W from A[i, m] = K(x_i + s h/2, x_i - s h/2), s = m mod 2n.

    With the momentum grid p_j = (j - n) pi hbar / L the transform reduces
    to one FFT of the sign-twisted correlation:
    W[:, j] = (h / 2 pi hbar) fft((-1)^m A)[j].

    ``window`` restricts the correlation to |y| <= L/2, which removes the
    antipodal interference image the periodized state would otherwise put
    at half a box length from the physical support.  It changes nothing,
    to spectral accuracy, for states localized well inside the box.
    """
    n = grid.shape[0]
    h = grid.spacings[0]
    length = grid.lengths[0]
    s_signed = ((np.arange(2 * n) + n) % (2 * n)) - n
    if window:
        corr = corr * (np.abs(s_signed) <= n // 2)[None, :]
    phase_m = (-1.0) ** np.arange(2 * n)
    w = (h / (2.0 * np.pi * hbar)) * np.fft.fft(corr * phase_m[None, :], axis=1)
    residual = np.max(np.abs(w.imag))
    if residual > 1e-10 * max(1.0, np.max(np.abs(w.real))):
        raise BridgeError(f"Wigner field has imaginary residue {residual:.2e}")
    dp = np.pi * hbar / length
    p = (np.arange(2 * n) - n) * dp
    return WignerField(grid.axis_coordinates(0), p, w.real, hbar)


def wigner_transform(psi: WaveFunction) -> WignerField:
    """Wigner field of a pure state; marginals match the state's densities."""
    if psi.grid.ndim != 1:
        raise BridgeError("Wigner transform is one-dimensional")
    if abs(psi.norm() - 1.0) > 1e-9:
        raise BridgeError("wave function must be normalized")
    n = psi.grid.shape[0]
    fine = _upsample_1d(psi.values.values)
    i2 = 2 * np.arange(n)
    s_signed = ((np.arange(2 * n) + n) % (2 * n)) - n  # s(m) = m mod 2n, signed
    plus = (i2[:, None] + s_signed[None, :]) % (2 * n)
    minus = (i2[:, None] - s_signed[None, :]) % (2 * n)
    corr = fine[plus] * np.conj(fine[minus])
    return _wigner_from_correlation(corr, psi.grid, psi.hbar)


def wigner_of_density(rho: DensityMatrix) -> WignerField:
    """Wigner field of a (possibly mixed) density matrix."""
    if rho.grid is None or rho.hbar is None:
        raise BridgeError("density matrix needs grid and hbar for a Wigner field")
    grid = rho.grid
    n = grid.shape[0]
    kernel = rho.entries / grid.cell_volume  # physical kernel K(x, x')
    big = _pad_spectrum_axis(_pad_spectrum_axis(np.fft.fft2(kernel), 0), 1)
    fine = np.fft.ifft2(big) * 4.0
    i2 = 2 * np.arange(n)
    s_signed = ((np.arange(2 * n) + n) % (2 * n)) - n
    plus = (i2[:, None] + s_signed[None, :]) % (2 * n)
    minus = (i2[:, None] - s_signed[None, :]) % (2 * n)
    corr = fine[plus, minus]
    return _wigner_from_correlation(corr, grid, rho.hbar)


def momentum_density(psi: WaveFunction, p_values) -> np.ndarray:
    """|psi tilde(p)|^2 with psi tilde(p) = (2 pi hbar)^{-1/2} int psi e^{-ipx/hbar}."""
    x = psi.grid.axis_coordinates(0)
    dx = psi.grid.spacings[0]
    phases = np.exp(-1j * np.outer(np.asarray(p_values), x) / psi.hbar)
    tilde = phases @ psi.values.values * dx / np.sqrt(2.0 * np.pi * psi.hbar)
    return np.abs(tilde) ** 2


class MadelungFields:
    """Density, momentum, velocity and quantum stress of a wave function.

    ``valid`` marks the evaluation set (points safely away from nodes).
    ``stress_q[i][j]`` holds the tensor component T^{qi}_j.
    """

    def __init__(self, rho_bar, p_bar, v_bar, stress_q, valid):
        self.rho_bar = rho_bar
        self.p_bar = p_bar
        self.v_bar = v_bar
        self.stress_q = stress_q
        self.valid = valid


def _node_mask(values, rel=1e-6):
    amp = np.abs(values)
    return amp >= rel * amp.max()


def madelung_decompose(psi: WaveFunction, H: CanonicalHamiltonian = None,
                       eval_mask=None) -> MadelungFields:
    """Split psi into density rho = R^2, momentum hbar dS, velocity and the
    quantum stress tensor.

    The phase derivative is taken through psi^{-1} d psi, never by global
    unwrapping.  Points within the node threshold are excluded from the
    valid set; supplying an ``eval_mask`` that touches a node raises
    :class:`NodeDomainError`.
    """
    grid = psi.grid
    values = psi.values.values
    valid = _node_mask(values)
    if eval_mask is not None:
        eval_mask = np.asarray(eval_mask, dtype=bool)
        bad = eval_mask & ~valid
        if np.any(bad):
            raise NodeDomainError([tuple(ix) for ix in np.argwhere(bad)])
        valid = eval_mask
    rho = np.abs(values) ** 2
    hbar, mass = psi.hbar, psi.mass
    safe = np.where(valid, values, 1.0)
    p_comps = []
    for ax in range(grid.ndim):
        d = spectral_derivative(values, grid, ax)
        p_comps.append(np.where(valid, hbar * (d / safe).imag, 0.0))
    v_comps = []
    for ax in range(grid.ndim):
        a = H.gauge_values(ax) if H is not None else 0.0
        v_comps.append(p_comps[ax] / mass - a)
    drho = [spectral_derivative(rho, grid, ax) for ax in range(grid.ndim)]
    safe_rho = np.where(valid, rho, 1.0)
    stress = []
    for i in range(grid.ndim):
        row = []
        for j in range(grid.ndim):
            dd = spectral_derivative(drho[j], grid, i)
            t = (hbar**2 / (4.0 * mass)) * (dd - drho[i] * drho[j] / safe_rho)
            row.append(np.where(valid, t, 0.0))
        stress.append(row)
    return MadelungFields(
        ScalarField(grid, rho),
        CovectorField(grid, p_comps),
        VectorField(grid, v_comps),
        stress,
        valid,
    )


def _collar(mask, cells=2):
    """Shrink the valid set by a few cells around its complement."""
    out = mask.copy()
    for ax in range(mask.ndim):
        for shift in range(1, cells + 1):
            out &= np.roll(mask, shift, axis=ax)
            out &= np.roll(mask, -shift, axis=ax)
    return out


def hydrodynamic_residual(psi_series, H: CanonicalHamiltonian, dt: float):
    """Max-norm residuals of the continuity and momentum equations.

    Time derivatives are centered differences over the supplied series of
    states (uniform spacing dt); the momentum balance carries the quantum
    stress divergence on its right side.  Returns (res_continuity,
    res_momentum) measured on the common valid set minus a two-cell collar.
    """
    if len(psi_series) < 3:
        raise BridgeError("need at least three snapshots for time derivatives")
    grid = psi_series[0].grid
    fields = [madelung_decompose(p, H) for p in psi_series]
    valid = fields[0].valid.copy()
    for f in fields[1:]:
        valid &= f.valid
    valid = _collar(valid)
    if not np.any(valid):
        raise NodeDomainError([])
    if H.grad_potential is not None:
        du = H.grad_potential.components
    else:
        du = [spectral_derivative(H.potential_values(), grid, ax)
              for ax in range(grid.ndim)]
    res_c = 0.0
    res_m = 0.0
    for k in range(1, len(fields) - 1):
        fm, f0, fp = fields[k - 1], fields[k], fields[k + 1]
        drho_dt = (fp.rho_bar.values - fm.rho_bar.values) / (2 * dt)
        flux = np.zeros(grid.shape)
        for i in range(grid.ndim):
            flux += spectral_derivative(
                f0.rho_bar.values * f0.v_bar.components[i], grid, i)
        res_c = max(res_c, np.max(np.abs((drho_dt + flux)[valid])))
        for j in range(grid.ndim):
            mom_dt = (fp.rho_bar.values * fp.p_bar.components[j]
                      - fm.rho_bar.values * fm.p_bar.components[j]) / (2 * dt)
            conv = np.zeros(grid.shape)
            tdiv = np.zeros(grid.shape)
            for i in range(grid.ndim):
                conv += spectral_derivative(
                    f0.rho_bar.values * f0.v_bar.components[i]
                    * f0.p_bar.components[j], grid, i)
                tdiv += spectral_derivative(f0.stress_q[i][j], grid, i)
            gauge = np.zeros(grid.shape)
            if H.vector_potential is not None:
                for i in range(grid.ndim):
                    gauge += f0.rho_bar.values * f0.v_bar.components[i] * \
                        spectral_derivative(H.gauge_values(i), grid, j)
            resid = mom_dt + conv + f0.rho_bar.values * du[j] + gauge - tdiv
            res_m = max(res_m, np.max(np.abs(resid[valid])))
    return float(res_c), float(res_m)


def classical_moments(pdf: PhaseSpacePDF, H):
    """Momentum-space moments of a phase-space density.

    Returns (rho_bar, p_bar, v_bar, stress_cl) over the position axis, with
    p_bar, v_bar masked to zero where rho_bar vanishes.  The stress is
    T^i_j = -integral (v_bar^i - dH/dp_i) rho (p_bar_j - p_j) dp,
    the centered covariance flux of the moment hierarchy.
    """
    if pdf.dof != 1:
        raise BridgeError("classical moments implemented for one dof")
    grid = pdf.grid
    x_mesh, p_mesh = grid.meshes()
    dp = grid.spacings[1]
    rho = pdf.values
    rho_bar = rho.sum(axis=1) * dp
    mask = rho_bar > 1e-14 * rho_bar.max()
    safe = np.where(mask, rho_bar, 1.0)
    p_bar = np.where(mask, (rho * p_mesh).sum(axis=1) * dp / safe, 0.0)
    if isinstance(H, SeparableHamiltonian):
        u = np.broadcast_to(np.asarray(H.dT(p_mesh)), grid.shape)
    else:
        u = np.broadcast_to(np.asarray(H.dp(x_mesh, p_mesh)[0]), grid.shape)
    v_bar = np.where(mask, (rho * u).sum(axis=1) * dp / safe, 0.0)
    centered_u = u - v_bar[:, None]
    centered_p = p_mesh - p_bar[:, None]
    stress = -np.where(mask, (centered_u * rho * centered_p).sum(axis=1) * dp, 0.0)
    return rho_bar, p_bar, v_bar, stress


def wigner_to_pdf(w: WignerField) -> PhaseSpacePDF:
    """Reinterpret a non-negative Wigner field as a classical density."""
    if w.values.min() < -1e-12 * max(w.values.max(), 1.0):
        raise BridgeError(
            f"Wigner field attains {w.values.min():.3e}; classical densities "
            f"must be non-negative"
        )
    nx, npts = w.values.shape
    grid = PeriodicGrid(
        [(nx, nx * w.dx), (npts, npts * w.dp)],
        origins=[w.x[0], w.p[0]],
    )
    values = np.clip(w.values, 0.0, None)
    values = values / (values.sum() * grid.cell_volume)
    return PhaseSpacePDF(grid, values)


class _GridForce:
    """Per-node force lookup for grid-sampled potentials (exact at nodes)."""

    def __init__(self, grid, dv_values):
        self.origin = grid.origins[0]
        self.h = grid.spacings[0]
        self.n = grid.shape[0]
        self.dv = np.asarray(dv_values).reshape(-1)

    def __call__(self, x):
        idx = np.rint((np.asarray(x) - self.origin) / self.h).astype(int) % self.n
        return self.dv[idx]


def separable_counterpart(H: CanonicalHamiltonian) -> SeparableHamiltonian:
    """Classical T(p) + V(q) matching a 1-d canonical Hamiltonian."""
    h = float(H.metric[0, 0])
    a = H.gauge_values(0)
    a0 = float(np.mean(a))
    if np.max(np.abs(a - a0)) > 1e-12:
        raise BridgeError("classical counterpart needs a constant gauge")
    if H.grad_potential is not None:
        dv = _GridForce(H.grid, H.grad_potential.components[0])
    else:
        dv = _GridForce(H.grid, spectral_derivative(
            H.potential_values(), H.grid, 0))
    u_field = _GridForce(H.grid, H.potential_values())
    return SeparableHamiltonian(
        kinetic=lambda p: 0.5 * h * (p + a0) ** 2,
        potential=u_field,
        d_kinetic=lambda p: h * (p + a0),
        d_potential=dv,
    )


def classical_limit_compare(psi0: WaveFunction, pdf0: PhaseSpacePDF,
                            H: CanonicalHamiltonian, times, dt: float):
    """Evolve the state quantum-mechanically and the density classically,
    returning the L1 distance between the Wigner field and the classical
    density at each requested time.

    ``pdf0`` must be the (rescaled, non-negative) initial Wigner field; both
    solvers share the step size so quadratic Hamiltonians agree to roundoff.
    """
    w0 = wigner_transform(psi0)
    if pdf0.grid.shape != w0.values.shape:
        raise BridgeError("pdf grid does not match the Wigner grid")
    if np.min(pdf0.values) < -1e-12:
        raise BridgeError("classical density must be non-negative")
    Hcl = separable_counterpart(H)
    times = list(times)
    out = []
    psi = psi0
    pdf = pdf0
    t = 0.0
    area = w0.cell_area
    for target in times:
        steps = int(round((target - t) / dt))
        for _ in range(steps):
            psi = schrodinger_step(psi, H, dt)
            pdf = liouville_step(pdf, Hcl, dt)
        t += steps * dt
        w = wigner_transform(psi)
        dist = float(np.sum(np.abs(w.values - pdf.values)) * area)
        out.append((t, dist))
    return out


def write_wigner_csv(w: WignerField, path: str):
    """Phase-space snapshot with columns (x, p, W)."""
    with open(path, "w") as fh:
        fh.write("x,p,W\n")
        for i, xv in enumerate(w.x):
            for j, pv in enumerate(w.p):
                fh.write(f"{xv:.17g},{pv:.17g},{w.values[i, j]:.17g}\n")


def write_residual_series_csv(rows, path: str):
    """Time series with columns (t, res_continuity, res_momentum)."""
    with open(path, "w") as fh:
        fh.write("t,res_continuity,res_momentum\n")
        for t, rc, rm in rows:
            fh.write(f"{t:.17g},{rc:.17g},{rm:.17g}\n")
