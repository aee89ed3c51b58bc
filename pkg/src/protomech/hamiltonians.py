"""Hamiltonian containers used across the kit.

Three flavors cover everything in scope:

* :class:`CanonicalHamiltonian` -- H(x,p) = 1/2 h^{ij} (p_i+A_i)(p_j+A_j) + U(x)
  with a constant symmetric metric and grid-sampled fields.  This is the class
  behind the quantum operator assembly and the synchronicity velocity field.
* :class:`SeparableHamiltonian` -- H(q,p) = T(p) + V(q) given as callables,
  the workhorse for trajectory integration and phase-space transport.
* :class:`GeneralHamiltonian` -- an arbitrary H(x,p) callable with optional
  analytic partials and a finite-difference fallback.
"""

from __future__ import annotations

import numpy as np

from .grids import ScalarField, CovectorField, GridError

__all__ = [
    "CanonicalHamiltonian",
    "SeparableHamiltonian",
    "GeneralHamiltonian",
    "cosine_well",
]


class CanonicalHamiltonian:
    """Canonical form 1/2 h^{ij}(p_i+A_i)(p_j+A_j) + U on a periodic grid.

    Parameters
    ----------
    grid : PeriodicGrid
    metric : (ndim, ndim) array, symmetric positive-definite
        The constant inverse-mass matrix h^{ij}.
    vector_potential : CovectorField or None
        A_i(x); None means zero.
    scalar_potential : ScalarField or None
        U(x); None means zero.
    grad_potential : CovectorField or None
        Optional analytic gradient of U, used where a spectral gradient of a
        torus-periodized potential would ring.
    """

    def __init__(self, grid, metric=None, vector_potential=None,
                 scalar_potential=None, grad_potential=None):
        self.grid = grid
        n = grid.ndim
        metric = np.eye(n) if metric is None else np.asarray(metric, dtype=float)
        if metric.shape != (n, n):
            raise GridError(f"metric shape {metric.shape} does not match grid dim {n}")
        if not np.allclose(metric, metric.T, atol=1e-12):
            raise GridError("metric must be symmetric")
        if np.any(np.linalg.eigvalsh(metric) <= 0):
            raise GridError("metric must be positive-definite")
        self.metric = metric
        if vector_potential is not None and vector_potential.grid != grid:
            raise GridError("vector potential lives on a different grid")
        if scalar_potential is not None and scalar_potential.grid != grid:
            raise GridError("scalar potential lives on a different grid")
        self.vector_potential = vector_potential
        self.scalar_potential = scalar_potential
        self.grad_potential = grad_potential

    # -- grid-sampled pieces -------------------------------------------------

    def potential_values(self):
        if self.scalar_potential is None:
            return np.zeros(self.grid.shape)
        return self.scalar_potential.values

    def gauge_values(self, axis):
        if self.vector_potential is None:
            return np.zeros(self.grid.shape)
        return self.vector_potential.components[axis]

    def shifted_momentum(self, p: CovectorField):
        return [p.components[i] + self.gauge_values(i) for i in range(self.grid.ndim)]

    def value_on_grid(self, p: CovectorField):
        """H(x, p(x)) on the grid."""
        q = self.shifted_momentum(p)
        total = self.potential_values().astype(float).copy()
        for i in range(self.grid.ndim):
            for j in range(self.grid.ndim):
                total = total + 0.5 * self.metric[i, j] * q[i] * q[j]
        return total

    def dp_on_grid(self, p: CovectorField):
        """Velocity components v^j = h^{jk}(p_k + A_k) on the grid."""
        q = self.shifted_momentum(p)
        return [sum(self.metric[j, k] * q[k] for k in range(self.grid.ndim))
                for j in range(self.grid.ndim)]


class SeparableHamiltonian:
    """H(q, p) = T(p) + V(q) with vectorized callables.

    ``d_kinetic`` and ``d_potential`` return, per axis, dT/dp_j and dV/dq_j.
    When omitted they fall back to central finite differences with step
    1e-6 times the argument scale.
    """

    def __init__(self, kinetic, potential, d_kinetic=None, d_potential=None):
        self.kinetic = kinetic
        self.potential = potential
        self._dT = d_kinetic
        self._dV = d_potential

    separable = True

    def value(self, q, p):
        return self.kinetic(p) + self.potential(q)

    def dT(self, p):
        if self._dT is not None:
            return self._dT(p)
        return _fd_gradient(self.kinetic, p)

    def dV(self, q):
        if self._dV is not None:
            return self._dV(q)
        return _fd_gradient(self.potential, q)

    def dp(self, q, p):
        return self.dT(p)

    def dx(self, q, p):
        return self.dV(q)


class GeneralHamiltonian:
    """Arbitrary H(x, p) with caller-supplied or finite-difference partials."""

    separable = False

    def __init__(self, evaluator, momentum_partial=None, position_partial=None,
                 fd_scale=1.0):
        self.evaluator = evaluator
        self._dp = momentum_partial
        self._dx = position_partial
        self.fd_scale = float(fd_scale)

    def value(self, x, p):
        return self.evaluator(x, p)

    def dp(self, x, p):
        if self._dp is not None:
            return self._dp(x, p)
        return _fd_gradient(lambda pp: self.evaluator(x, pp), p, self.fd_scale)

    def dx(self, x, p):
        if self._dx is not None:
            return self._dx(x, p)
        return _fd_gradient(lambda xx: self.evaluator(xx, p), x, self.fd_scale)

    def check_partials(self, x, p, tol=1e-4):
        """Compare supplied partials against finite differences."""
        ok = True
        if self._dp is not None:
            fd = _fd_gradient(lambda pp: self.evaluator(x, pp), p, self.fd_scale)
            ok &= all(np.allclose(a, b, atol=tol, rtol=tol)
                      for a, b in zip(self._dp(x, p), fd))
        if self._dx is not None:
            fd = _fd_gradient(lambda xx: self.evaluator(xx, p), x, self.fd_scale)
            ok &= all(np.allclose(a, b, atol=tol, rtol=tol)
                      for a, b in zip(self._dx(x, p), fd))
        return ok


def _fd_gradient(fn, args, scale=1.0):
    """Central differences component-wise, step 1e-6 times the scale.

    ``args`` is either a single scalar/array (1-d case, returns one array)
    or a list of per-axis arrays (returns a list of arrays).
    """
    single = not isinstance(args, (list, tuple))
    arrs = [np.asarray(args, dtype=float)] if single \
        else [np.asarray(a, dtype=float) for a in args]
    h = 1e-6 * scale
    grads = []
    for i in range(len(arrs)):
        plus, minus = list(arrs), list(arrs)
        plus[i] = arrs[i] + h
        minus[i] = arrs[i] - h
        fp = fn(plus[0]) if single else fn(plus)
        fm = fn(minus[0]) if single else fn(minus)
        grads.append((np.asarray(fp) - np.asarray(fm)) / (2 * h))
    return grads[0] if single else grads


def cosine_well(grid, axis=0, curvature=1.0):
    """Smooth torus-periodic stand-in for a harmonic well along one axis.

    U(x) = curvature * (L/2pi)^2 * (1 - cos(2 pi x / L)), which matches
    curvature * x^2 / 2 near the bottom and is C-infinity on the circle.
    Returns the potential field and its analytic gradient field.
    """
    L = grid.lengths[axis]
    w = 2.0 * np.pi / L
    x = grid.meshes()[axis]
    u = curvature / w**2 * (1.0 - np.cos(w * x))
    du = [np.zeros(grid.shape) for _ in range(grid.ndim)]
    du[axis] = curvature / w * np.sin(w * x)
    return ScalarField(grid, u), CovectorField(grid, du)
