"""Angular-momentum and half-integer-spin operators on a sphere grid, their
Pauli reduction, and Bell/CHSH correlation evaluation.

The collocation grid is Gauss-Legendre in cos(theta) (no node touches a
pole) times a uniform azimuthal grid on the double cover phi in [0, 4 pi),
so half-integer waves e^{i phi / 2} are periodic and differentiate exactly
under the FFT.  Inner products divide the azimuthal weight by two, giving
the usual sphere measure.

The three integer-spin generators are first-order differential operators

    L1 = (hbar/i)(-sin phi d_theta - cot theta cos phi d_phi)
    L2 = (hbar/i)( cos phi d_theta - cot theta sin phi d_phi)
    L3 = (hbar/i) d_phi

and the half-integer generators add the multiplicative terms
(hbar/2) cos phi / sin theta, (hbar/2) sin phi / sin theta and the gauge
derivatives hbar (L_j s).
"""

from __future__ import annotations

import numpy as np

try:
    from scipy.special import sph_harm_y
except ImportError:  # older scipy spells it sph_harm(m, l, az, polar)
    from scipy.special import sph_harm

    def sph_harm_y(l, m, theta, phi):
        return sph_harm(m, l, phi, theta)

__all__ = [
    "SpinError",
    "SphereGrid",
    "AngularOperator",
    "SpinorState",
    "build_L",
    "build_S",
    "spin_half_states",
    "half_integer_state",
    "spherical_harmonic",
    "pauli_reduce",
    "correlation",
    "bell_lhs",
    "singlet_state",
    "product_state",
    "PAULI",
]


class SpinError(ValueError):
    pass


class SphereGrid:
    """Gauss-Legendre colatitude nodes times a uniform double-cover azimuth."""

    def __init__(self, n_theta=64, n_phi=64):
        if n_theta < 16:
            raise SpinError("need at least 16 colatitude nodes")
        if n_phi < 32:
            raise SpinError("need at least 32 azimuthal nodes")
        x, w = np.polynomial.legendre.leggauss(int(n_theta))
        order = np.argsort(np.arccos(x))
        self.theta = np.arccos(x)[order]
        self.theta_weights = w[order]
        self.n_theta = int(n_theta)
        self.n_phi = int(n_phi)
        self.phi = np.arange(n_phi) * (4.0 * np.pi / n_phi)
        self.phi_weight = (4.0 * np.pi / n_phi) / 2.0  # double cover halved
        self._dtheta = _theta_derivative_matrix(self.theta)

    @property
    def shape(self):
        return (self.n_theta, self.n_phi)

    def meshes(self):
        return np.meshgrid(self.theta, self.phi, indexing="ij")

    def weights(self):
        return self.theta_weights[:, None] * self.phi_weight * \
            np.ones(self.n_phi)[None, :]

    def solid_angle(self):
        return float(self.weights().sum())

    def inner(self, f, g):
        """Sphere inner product <f, g> with the quadrature weights."""
        return complex(np.sum(np.conj(f) * g * self.weights()))

    def d_theta(self, f):
        return self._dtheta @ f

    def d_phi(self, f):
        n = self.n_phi
        k = 2.0 * np.pi * np.fft.fftfreq(n, d=4.0 * np.pi / n)
        if n % 2 == 0:
            k = k.copy()
            k[n // 2] = 0.0
        return np.fft.ifft(1j * k[None, :] * np.fft.fft(f, axis=1), axis=1)


def _theta_derivative_matrix(theta, width=13):
    """Local polynomial differentiation weights on the (non-uniform) nodes."""
    n = theta.size
    width = min(width, n)
    mat = np.zeros((n, n))
    for i in range(n):
        lo = max(0, min(i - width // 2, n - width))
        idx = np.arange(lo, lo + width)
        dt = theta[idx] - theta[i]
        scale = np.max(np.abs(dt))
        V = np.vander(dt / scale, width, increasing=True)
        e1 = np.zeros(width)
        e1[1] = 1.0 / scale
        mat[i, idx] = np.linalg.solve(V.T, e1)
    return mat


class AngularOperator:
    """(hbar/i)(a_theta d_theta + a_phi d_phi) + multiplicative part."""

    def __init__(self, grid: SphereGrid, hbar, coeff_theta, coeff_phi,
                 multiplicative=None, gauge=None):
        self.grid = grid
        self.hbar = float(hbar)
        shape = grid.shape
        self.coeff_theta = np.broadcast_to(np.asarray(coeff_theta), shape) \
            if coeff_theta is not None else None
        self.coeff_phi = np.broadcast_to(np.asarray(coeff_phi), shape) \
            if coeff_phi is not None else None
        self.multiplicative = np.zeros(shape) if multiplicative is None \
            else np.broadcast_to(np.asarray(multiplicative), shape)
        self.gauge = gauge

    def apply(self, f):
        f = np.asarray(f, dtype=complex)
        out = self.multiplicative * f
        fac = self.hbar / 1j
        if self.coeff_theta is not None:
            out = out + fac * self.coeff_theta * self.grid.d_theta(f)
        if self.coeff_phi is not None:
            out = out + fac * self.coeff_phi * self.grid.d_phi(f)
        return out

    def hermiticity_residual(self, test_functions):
        """max |<f, A g> - <A f, g>| over pairs of the supplied functions."""
        worst = 0.0
        acted = [self.apply(f) for f in test_functions]
        for i, f in enumerate(test_functions):
            for j, g in enumerate(test_functions):
                lhs = self.grid.inner(f, acted[j])
                rhs = self.grid.inner(acted[i], g)
                worst = max(worst, abs(lhs - rhs))
        return worst


def _gauge_field(grid, gauge):
    if gauge is None:
        return np.zeros(grid.shape)
    if callable(gauge):
        th, ph = grid.meshes()
        return np.asarray(gauge(th, ph), dtype=float)
    return np.broadcast_to(np.asarray(gauge, dtype=float), grid.shape)


def build_L(grid: SphereGrid, hbar: float):
    """The three integer-spin generators as angular operators."""
    th, ph = grid.meshes()
    cot = np.cos(th) / np.sin(th)
    L1 = AngularOperator(grid, hbar, -np.sin(ph), -cot * np.cos(ph))
    L2 = AngularOperator(grid, hbar, np.cos(ph), -cot * np.sin(ph))
    L3 = AngularOperator(grid, hbar, None, np.ones(grid.shape))
    return L1, L2, L3


def build_S(grid: SphereGrid, hbar: float, gauge=None):
    """The three half-integer generators with their gauge contributions.

    The multiplicative gauge terms are hbar times the real differential
    parts acting on the gauge function.
    """
    th, ph = grid.meshes()
    s = _gauge_field(grid, gauge)
    cot = np.cos(th) / np.sin(th)
    inv_sin = 1.0 / np.sin(th)
    ds_th = grid.d_theta(s).real
    ds_ph = grid.d_phi(s).real
    m1 = 0.5 * hbar * np.cos(ph) * inv_sin + hbar * (
        -np.sin(ph) * ds_th - cot * np.cos(ph) * ds_ph)
    m2 = 0.5 * hbar * np.sin(ph) * inv_sin + hbar * (
        np.cos(ph) * ds_th - cot * np.sin(ph) * ds_ph)
    m3 = hbar * ds_ph
    S1 = AngularOperator(grid, hbar, -np.sin(ph), -cot * np.cos(ph), m1, gauge=s)
    S2 = AngularOperator(grid, hbar, np.cos(ph), -cot * np.sin(ph), m2, gauge=s)
    S3 = AngularOperator(grid, hbar, None, np.ones(grid.shape), m3, gauge=s)
    return S1, S2, S3


def casimir_apply(ops, f):
    """Sum of squares of the three operators applied to f."""
    out = np.zeros_like(np.asarray(f, dtype=complex))
    for op in ops:
        out = out + op.apply(op.apply(f))
    return out


def spherical_harmonic(grid: SphereGrid, l, m):
    th, ph = grid.meshes()
    return sph_harm_y(l, m, th, ph)


def spin_half_states(grid: SphereGrid, gauge=None):
    """The spin-1/2 eigenfunctions |+> and |-> on the double cover."""
    th, ph = grid.meshes()
    s = _gauge_field(grid, gauge)
    plus = np.exp(-1j * s) * np.exp(0.5j * ph) * np.cos(0.5 * th) / \
        np.sqrt(2.0 * np.pi)
    minus = np.exp(-1j * s) * np.exp(-0.5j * ph) * np.sin(0.5 * th) / \
        np.sqrt(2.0 * np.pi)
    return plus, minus


def half_integer_state(grid: SphereGrid, l, m, gauge=None):
    """The (l + 1/2, m + 1/2) eigenfunction, normalized by quadrature."""
    if not (-l - 1 <= m <= l):
        raise SpinError(f"m={m} out of range for l={l}")
    th, ph = grid.meshes()
    s = _gauge_field(grid, gauge)
    up = np.exp(-1j * s) * np.exp(0.5j * ph) * np.cos(0.5 * th)
    dn = np.exp(-1j * s) * np.exp(-0.5j * ph) * np.sin(0.5 * th)
    f = np.sqrt((l + m + 1.0) / (2 * l + 1.0)) * up * sph_harm_y(l, m, th, ph)
    if m + 1 <= l:
        f = f + np.sqrt((l - m) / (2 * l + 1.0)) * dn * \
            sph_harm_y(l, m + 1, th, ph)
    norm = np.sqrt(grid.inner(f, f).real)
    return f / norm


class SpinorState:
    """Coefficients over a declared orthonormal family of sphere functions."""

    def __init__(self, grid: SphereGrid, coefficients, basis):
        coefficients = np.asarray(coefficients, dtype=complex)
        if len(basis) != coefficients.size:
            raise SpinError("one coefficient per basis function required")
        nrm = float(np.sum(np.abs(coefficients) ** 2))
        if abs(nrm - 1.0) > 1e-10:
            raise SpinError(f"coefficient norm {nrm!r} is not 1")
        self.grid = grid
        self.coefficients = coefficients
        self.basis = list(basis)

    def field(self):
        out = np.zeros(self.grid.shape, dtype=complex)
        for c, b in zip(self.coefficients, self.basis):
            out = out + c * b
        return out


def gram_projected_block(ops, basis, grid: SphereGrid):
    """Matrix blocks G^{-1} <b_i | op | b_j> of operators on a small basis."""
    nb = len(basis)
    gram = np.array([[grid.inner(bi, bj) for bj in basis] for bi in basis])
    cond = np.linalg.cond(gram)
    if cond > 1e6:
        raise SpinError(f"basis Gram matrix ill-conditioned (cond={cond:.1e})")
    blocks = []
    single = isinstance(ops, AngularOperator)
    for op in [ops] if single else ops:
        m = np.array([[grid.inner(bi, op.apply(bj)) for bj in basis]
                      for bi in basis])
        blocks.append(np.linalg.solve(gram, m))
    return blocks[0] if single else blocks


def pauli_reduce(S_ops, grid: SphereGrid):
    """2x2 blocks of the spin operators over {|+>, |->}; equals
    (hbar/2) sigma_j for the standard gauge-consistent states."""
    gauge = getattr(S_ops[0], "gauge", None)
    plus, minus = spin_half_states(grid, gauge)
    return gram_projected_block(list(S_ops), [plus, minus], grid)


# ---------------------------------------------------------------------------
# two-spin correlations and the CHSH combination

PAULI = (
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)


def _direction_operator(direction):
    direction = np.asarray(direction, dtype=float)
    if direction.shape != (3,) or abs(np.linalg.norm(direction) - 1.0) > 1e-9:
        raise SpinError("measurement directions must be unit 3-vectors")
    return sum(direction[i] * PAULI[i] for i in range(3))


def singlet_state():
    """Density matrix of the two-spin singlet."""
    v = np.zeros(4, dtype=complex)
    v[1] = 1.0 / np.sqrt(2.0)
    v[2] = -1.0 / np.sqrt(2.0)
    return np.outer(v, v.conj())


def product_state(bloch_a, bloch_b):
    """Pure product state from two Bloch vectors."""

    def qubit(n):
        n = np.asarray(n, dtype=float)
        return 0.5 * (np.eye(2, dtype=complex) + sum(
            n[i] * PAULI[i] for i in range(3)))

    return np.kron(qubit(bloch_a), qubit(bloch_b))


def correlation(rho, alpha, beta) -> float:
    """P(alpha, beta) = <rho (alpha.sigma x 1)(1 x beta.sigma)>."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise SpinError("two-spin states are 4x4 density matrices")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise SpinError("state must be Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-9:
        raise SpinError("state must have unit trace")
    op = np.kron(_direction_operator(alpha), np.eye(2)) @ \
        np.kron(np.eye(2), _direction_operator(beta))
    value = complex(np.trace(rho @ op)).real
    return float(np.clip(value, -1.0, 1.0))


def bell_lhs(p_ab, p_abp, p_apbp, p_apb) -> float:
    """|P(a,b) - P(a,b')| + |P(a',b') + P(a',b)|."""
    return abs(p_ab - p_abp) + abs(p_apbp + p_apb)
