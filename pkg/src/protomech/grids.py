"""Periodic grids and the spectral calculus shared by every solver.

All geometry is a flat torus with a constant diagonal metric: each axis is a
circle of declared length, sampled uniformly.  Fields are plain numpy arrays
living on such a grid, and derivatives, integrals and transforms are the exact
operations on the trigonometric interpolant.
"""

from __future__ import annotations

import json
import os

import numpy as np

__all__ = [
    "GridError",
    "PeriodicGrid",
    "ScalarField",
    "CovectorField",
    "VectorField",
    "spectral_derivative",
    "spectral_gradient",
    "divergence",
    "integrate",
    "forward_transform",
    "inverse_transform",
    "spectral_power",
    "fourier_interpolate",
    "write_field_csv",
    "read_field_csv",
]


class GridError(ValueError):
    """Invalid grid construction or a field/grid mismatch."""


class PeriodicGrid:
    """Uniform sampling of a flat torus.

    Parameters
    ----------
    dims : sequence of (point_count, length) pairs
        One pair per axis.  Point counts must be at least 8 and lengths
        positive; the spacing of axis ``i`` is ``length / point_count``.
    origins : sequence of floats, optional
        Coordinate of the first sample per axis (default 0), so momentum
        boxes and centered position boxes come out naturally.
    """

    def __init__(self, dims, origins=None):
        dims = [(int(n), float(length)) for n, length in dims]
        for n, length in dims:
            if n < 8:
                raise GridError(f"point count {n} below the minimum of 8")
            if not np.isfinite(length) or length <= 0.0:
                raise GridError(f"axis length {length} must be positive")
        self.dims = tuple(dims)
        if origins is None:
            origins = [0.0] * len(dims)
        if len(origins) != len(dims):
            raise GridError("one origin per axis required")
        self.origins = tuple(float(o) for o in origins)

    @property
    def ndim(self):
        return len(self.dims)

    @property
    def shape(self):
        return tuple(n for n, _ in self.dims)

    @property
    def lengths(self):
        return tuple(length for _, length in self.dims)

    @property
    def spacings(self):
        return tuple(length / n for n, length in self.dims)

    @property
    def npoints(self):
        return int(np.prod(self.shape))

    @property
    def cell_volume(self):
        return float(np.prod(self.spacings))

    @property
    def volume(self):
        return float(np.prod(self.lengths))

    def axis_coordinates(self, axis):
        n, length = self.dims[axis]
        return self.origins[axis] + np.arange(n) * (length / n)

    def meshes(self):
        """Coordinate arrays of the full grid, one per axis ('ij' indexing)."""
        axes = [self.axis_coordinates(i) for i in range(self.ndim)]
        return list(np.meshgrid(*axes, indexing="ij"))

    def wavenumbers(self, axis):
        n, length = self.dims[axis]
        return 2.0 * np.pi * np.fft.fftfreq(n, d=length / n)

    def wavenumber_meshes(self):
        ks = [self.wavenumbers(i) for i in range(self.ndim)]
        return list(np.meshgrid(*ks, indexing="ij"))

    def __eq__(self, other):
        return (isinstance(other, PeriodicGrid) and self.dims == other.dims
                and self.origins == other.origins)

    def __hash__(self):
        return hash((self.dims, self.origins))

    def __repr__(self):
        return f"PeriodicGrid({list(self.dims)}, origins={list(self.origins)})"


class ScalarField:
    """Per-point values (real or complex) on a periodic grid."""

    def __init__(self, grid, values):
        values = np.asarray(values)
        if values.shape != grid.shape:
            raise GridError(
                f"field shape {values.shape} does not match grid shape {grid.shape}"
            )
        self.grid = grid
        self.values = values

    @classmethod
    def from_function(cls, grid, fn):
        return cls(grid, np.asarray(fn(*grid.meshes())) + np.zeros(grid.shape))

    def copy(self):
        return ScalarField(self.grid, self.values.copy())

    def __repr__(self):
        return f"ScalarField(grid={self.grid}, dtype={self.values.dtype})"


class _ComponentField:
    def __init__(self, grid, components):
        components = [np.asarray(c) for c in components]
        if len(components) != grid.ndim:
            raise GridError(
                f"{len(components)} components given for a {grid.ndim}-d grid"
            )
        for c in components:
            if c.shape != grid.shape:
                raise GridError("component shape does not match grid shape")
        self.grid = grid
        self.components = components

    def copy(self):
        return type(self)(self.grid, [c.copy() for c in self.components])


class CovectorField(_ComponentField):
    """One lowered component array per axis (momenta, 1-forms)."""


class VectorField(_ComponentField):
    """One raised component array per axis (velocities)."""


def _check_finite(values, what):
    if not np.all(np.isfinite(values)):
        raise GridError(f"non-finite values in {what}")


def spectral_derivative(values, grid, axis):
    """Exact derivative of the trigonometric interpolant along one axis.

    The Nyquist mode (present for even point counts) has no well-defined
    odd derivative and is dropped, which keeps real fields real.
    """
    values = np.asarray(values)
    n = grid.shape[axis]
    k = grid.wavenumbers(axis)
    if n % 2 == 0:
        k = k.copy()
        k[n // 2] = 0.0
    shape = [1] * values.ndim
    shape[axis] = n
    coeffs = np.fft.fft(values, axis=axis)
    out = np.fft.ifft(1j * k.reshape(shape) * coeffs, axis=axis)
    if np.isrealobj(values):
        return out.real
    return out


def spectral_gradient(f: ScalarField) -> CovectorField:
    """Gradient of a scalar field, component by component in Fourier space."""
    _check_finite(f.values, "spectral_gradient input")
    comps = [spectral_derivative(f.values, f.grid, ax) for ax in range(f.grid.ndim)]
    return CovectorField(f.grid, comps)


def divergence(v: VectorField) -> ScalarField:
    total = np.zeros(v.grid.shape, dtype=v.components[0].dtype)
    for ax, comp in enumerate(v.components):
        total = total + spectral_derivative(comp, v.grid, ax)
    return ScalarField(v.grid, total)


def integrate(f, grid=None):
    """Trapezoid-on-torus integral: plain sum times the cell volume."""
    if isinstance(f, ScalarField):
        values, grid = f.values, f.grid
    else:
        values = np.asarray(f)
        if grid is None:
            raise GridError("integrate needs a grid when given a bare array")
    _check_finite(values, "integrate input")
    total = values.sum() * grid.cell_volume
    if np.isrealobj(values):
        return float(total)
    return complex(total)


def forward_transform(f: ScalarField) -> np.ndarray:
    """Fourier coefficients, normalized so e^{ikx} maps to 1 at mode k."""
    return np.fft.fftn(f.values) / f.grid.npoints


def inverse_transform(coeffs, grid) -> ScalarField:
    coeffs = np.asarray(coeffs)
    if coeffs.shape != grid.shape:
        raise GridError(
            f"coefficient shape {coeffs.shape} does not match grid {grid.shape}"
        )
    return ScalarField(grid, np.fft.ifftn(coeffs * grid.npoints))


def spectral_power(coeffs, grid):
    """Parseval pairing: equals integrate(|f|^2) for coeffs = forward_transform(f)."""
    return float(grid.volume * np.sum(np.abs(coeffs) ** 2))


def _axis_eval_matrix(grid, axis, targets):
    """Evaluation matrix of the axis interpolant at arbitrary coordinates.

    Columns are unit-modulus powers e^{i m dk t} built by cumulative
    multiplication (one exp per target, not one per entry).  The Nyquist
    column (even point counts) is evaluated as a cosine so that real data
    interpolates to real values.
    """
    n, length = grid.dims[axis]
    dk = 2.0 * np.pi / length
    t = np.asarray(targets, dtype=float) - grid.origins[axis]
    w = np.exp(1j * dk * t)
    half = n // 2
    mat = np.empty((t.size, n), dtype=complex)
    mat[:, 0] = 1.0
    powers = np.multiply.accumulate(
        np.broadcast_to(w[:, None], (t.size, half)), axis=1
    )
    mat[:, 1:half + 1] = powers
    # negative frequencies are conjugates of the positive ones
    mat[:, half + 1:] = np.conj(powers[:, n - half - 2::-1])
    if n % 2 == 0:
        mat[:, half] = powers[:, half - 1].real  # cos(k_nyq t)
    return mat / n


def fourier_interpolate(values, grid, points, coeffs=None):
    """Evaluate the trigonometric interpolant at scattered points.

    ``points`` has shape (ndim, npts).  Exact for band-limited data.
    ``coeffs`` may carry a precomputed ``np.fft.fftn(values)`` to amortize
    repeated interpolation of the same field.
    """
    values = np.asarray(values)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[0] != grid.ndim:
        raise GridError("points must have one row per grid axis")
    if coeffs is None:
        coeffs = np.fft.fftn(values)
    mats = [_axis_eval_matrix(grid, ax, points[ax]) for ax in range(grid.ndim)]
    if grid.ndim == 1:
        out = mats[0] @ coeffs
    elif grid.ndim == 2:
        out = np.einsum("ma,ab,mb->m", mats[0], coeffs, mats[1])
    else:
        raise NotImplementedError("fourier_interpolate supports 1-d and 2-d grids")
    if np.isrealobj(values):
        return out.real
    return out


def spline_interpolate(values, grid, points, order=5):
    """Periodic spline interpolation at scattered points (C-speed path).

    Less accurate than :func:`fourier_interpolate` but much cheaper; used
    where the result feeds a position rather than a field value.
    """
    from scipy.ndimage import map_coordinates

    points = np.atleast_2d(np.asarray(points, dtype=float))
    coords = [(points[ax] - grid.origins[ax]) / grid.spacings[ax]
              for ax in range(grid.ndim)]
    values = np.asarray(values)
    if np.iscomplexobj(values):
        re = map_coordinates(values.real, coords, order=order, mode="grid-wrap")
        im = map_coordinates(values.imag, coords, order=order, mode="grid-wrap")
        return re + 1j * im
    return map_coordinates(values, coords, order=order, mode="grid-wrap")


# ---------------------------------------------------------------------------
# serialization: flat CSV with index columns plus a JSON header for the dims

_FMT = "%.17g"


def _header_path(path):
    base, _ = os.path.splitext(path)
    return base + ".json"


def write_field_csv(field, path):
    """Flat CSV (index columns + value columns) plus a JSON dims header.

    Values are written with 17 significant digits, which round-trips IEEE
    doubles exactly.
    """
    grid = field.grid
    if isinstance(field, ScalarField):
        arrays = [field.values]
        names = ["value"]
    else:
        arrays = field.components
        names = [f"c{i}" for i in range(len(arrays))]
    complex_data = any(np.iscomplexobj(a) for a in arrays)
    columns = []
    header = [f"i{ax}" for ax in range(grid.ndim)]
    idx = np.indices(grid.shape).reshape(grid.ndim, -1)
    for ax in range(grid.ndim):
        columns.append(idx[ax])
    for name, arr in zip(names, arrays):
        flat = np.asarray(arr).reshape(-1)
        if complex_data:
            header += [name + "_re", name + "_im"]
            columns.append(flat.real)
            columns.append(flat.imag)
        else:
            header.append(name)
            columns.append(flat)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in range(grid.npoints):
            parts = []
            for col in columns:
                v = col[row]
                parts.append(str(int(v)) if np.issubdtype(type(v), np.integer) else _FMT % v)
            fh.write(",".join(parts) + "\n")
    meta = {
        "dims": [[n, length] for n, length in grid.dims],
        "origins": list(grid.origins),
        "kind": "scalar" if isinstance(field, ScalarField) else "components",
        "complex": bool(complex_data),
        "columns": names,
    }
    with open(_header_path(path), "w") as fh:
        json.dump(meta, fh, indent=1)


def read_field_csv(path):
    with open(_header_path(path)) as fh:
        meta = json.load(fh)
    grid = PeriodicGrid([tuple(d) for d in meta["dims"]],
                        origins=meta.get("origins"))
    raw = np.genfromtxt(path, delimiter=",", names=True)
    names = meta["columns"]
    arrays = []
    for name in names:
        if meta["complex"]:
            arr = raw[name + "_re"] + 1j * raw[name + "_im"]
        else:
            arr = raw[name]
        arrays.append(np.asarray(arr).reshape(grid.shape))
    if meta["kind"] == "scalar":
        return ScalarField(grid, arrays[0])
    return CovectorField(grid, arrays)
