"""Spectral calculus and serialization checks for the grid layer."""

import numpy as np
import pytest
from scipy.integrate import quad

from protomech.grids import (
    PeriodicGrid,
    ScalarField,
    CovectorField,
    GridError,
    spectral_gradient,
    integrate,
    forward_transform,
    inverse_transform,
    spectral_power,
    fourier_interpolate,
    write_field_csv,
    read_field_csv,
)


def grid1d(n=64, length=2 * np.pi):
    return PeriodicGrid([(n, length)])


def fd4_derivative(values, h):
    """Fourth-order central differences on a periodic array (oracle)."""
    return (np.roll(values, 2) - 8 * np.roll(values, 1)
            + 8 * np.roll(values, -1) - np.roll(values, -2)) / (12 * h)


def test_grid_validation():
    with pytest.raises(GridError):
        PeriodicGrid([(4, 1.0)])
    with pytest.raises(GridError):
        PeriodicGrid([(16, -1.0)])
    with pytest.raises(GridError):
        PeriodicGrid([(16, 1.0)], origins=[0.0, 0.0])


def test_gradient_of_constant_is_zero():
    g = grid1d()
    f = ScalarField(g, np.full(64, 3.7))
    assert np.max(np.abs(spectral_gradient(f).components[0])) == 0.0


def test_gradient_band_limited_exact():
    g = grid1d()
    x = g.axis_coordinates(0)
    f = ScalarField(g, np.sin(x))
    grad = spectral_gradient(f).components[0]
    assert np.max(np.abs(grad - np.cos(x))) < 1e-12


def test_gradient_matches_fd4_on_gaussian():
    g = grid1d(128)
    x = g.axis_coordinates(0)
    vals = np.exp(-((x - np.pi) ** 2))
    grad = spectral_gradient(ScalarField(g, vals)).components[0]
    oracle = fd4_derivative(vals, g.spacings[0])
    # the budget covers the fd4 truncation plus the e^{-pi^2} wrap tail of
    # this particular bump, which does not vanish with h
    assert np.max(np.abs(grad - oracle)) < 1e-4


def test_gradient_fd4_fourth_order_scaling():
    # on a bump with negligible wrap tails the disagreement is pure fd4
    # truncation and shrinks 16x per grid doubling
    errs = []
    for n in (64, 128):
        g = grid1d(n)
        x = g.axis_coordinates(0)
        vals = np.exp(-((x - np.pi) ** 2) / (2 * 0.5**2))
        grad = spectral_gradient(ScalarField(g, vals)).components[0]
        errs.append(np.max(np.abs(grad - fd4_derivative(vals, g.spacings[0]))))
    assert errs[0] / errs[1] > 12.0


def test_gradient_rejects_nonfinite():
    g = grid1d()
    vals = np.zeros(64)
    vals[3] = np.nan
    with pytest.raises(GridError):
        spectral_gradient(ScalarField(g, vals))


def test_integrate_constant_gives_volume():
    g = PeriodicGrid([(32, 3.0), (16, 5.0)])
    f = ScalarField(g, np.ones(g.shape))
    assert abs(integrate(f) - 15.0) < 1e-12


def test_integrate_periodic_mean_zero():
    g = grid1d()
    x = g.axis_coordinates(0)
    assert abs(integrate(ScalarField(g, np.sin(x)))) < 1e-14


def test_integrate_matches_quadrature_oracle():
    g = grid1d(128)
    x = g.axis_coordinates(0)
    f = np.exp(-((x - np.pi) ** 2) / (2 * 0.3**2))
    torus = integrate(ScalarField(g, f))
    ref, _ = quad(lambda t: np.exp(-((t - np.pi) ** 2) / (2 * 0.3**2)),
                  0.0, 2 * np.pi, epsabs=1e-13)
    assert abs(torus - ref) < 1e-10


def test_transform_round_trip():
    rng = np.random.default_rng(0)
    g = grid1d()
    f = ScalarField(g, rng.normal(size=64) + 1j * rng.normal(size=64))
    back = inverse_transform(forward_transform(f), g)
    assert np.max(np.abs(back.values - f.values)) < 1e-12


def test_transform_impulse_flat_spectrum():
    g = grid1d(32)
    vals = np.zeros(32)
    vals[0] = 1.0
    coeffs = forward_transform(ScalarField(g, vals))
    assert np.max(np.abs(np.abs(coeffs) - 1.0 / 32)) < 1e-14


def test_transform_plane_wave_single_mode():
    g = grid1d(32)
    x = g.axis_coordinates(0)
    coeffs = forward_transform(ScalarField(g, np.exp(1j * 3 * x)))
    assert abs(coeffs[3] - 1.0) < 1e-13
    coeffs[3] = 0.0
    assert np.max(np.abs(coeffs)) < 1e-13


def test_transform_shape_mismatch_rejected():
    g = grid1d(32)
    with pytest.raises(GridError):
        inverse_transform(np.zeros(16), g)


def test_parseval():
    rng = np.random.default_rng(1)
    g = grid1d(64, 5.0)
    f = ScalarField(g, rng.normal(size=64))
    lhs = integrate(ScalarField(g, np.abs(f.values) ** 2))
    rhs = spectral_power(forward_transform(f), g)
    assert abs(lhs - rhs) < 1e-10


def test_gradient_component_integrates_to_zero():
    rng = np.random.default_rng(2)
    g = grid1d(64)
    f = ScalarField(g, rng.normal(size=64))
    comp = spectral_gradient(f).components[0]
    assert abs(integrate(comp, g)) < 1e-12


def test_fourier_interpolation_exact_band_limited():
    g = PeriodicGrid([(32, 2 * np.pi)])
    x = g.axis_coordinates(0)
    vals = np.sin(3 * x) + np.cos(5 * x)
    pts = np.array([[0.123, 2.7, 5.9]])
    exact = np.sin(3 * pts[0]) + np.cos(5 * pts[0])
    assert np.max(np.abs(fourier_interpolate(vals, g, pts) - exact)) < 1e-13


def test_csv_round_trip_scalar(tmp_path):
    rng = np.random.default_rng(3)
    g = PeriodicGrid([(16, 2.0), (8, 3.0)], origins=[-1.0, 0.0])
    f = ScalarField(g, rng.normal(size=g.shape))
    path = str(tmp_path / "field.csv")
    write_field_csv(f, path)
    back = read_field_csv(path)
    assert back.grid == g
    assert np.array_equal(back.values, f.values)  # bit-exact round trip


def test_csv_round_trip_complex_components(tmp_path):
    rng = np.random.default_rng(4)
    g = PeriodicGrid([(16, 2.0)])
    f = CovectorField(g, [rng.normal(size=16) + 1j * rng.normal(size=16)])
    path = str(tmp_path / "cov.csv")
    write_field_csv(f, path)
    back = read_field_csv(path)
    assert np.array_equal(back.components[0], f.components[0])
