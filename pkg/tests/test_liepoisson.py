"""Semidirect-product bracket, the functional-to-generator map, and the
coadjoint transport of the emergence momentum."""

import numpy as np
import pytest

from protomech.grids import PeriodicGrid, ScalarField, CovectorField, \
    VectorField, integrate, fourier_interpolate
from protomech.hamiltonians import CanonicalHamiltonian, cosine_well
from protomech import liepoisson as lp
from protomech import synchro

L = 2 * np.pi


def make_grid(n=96):
    return PeriodicGrid([(n, L)])


def band_limited(grid, rng, scale=0.4, modes=3):
    x = grid.axis_coordinates(0)
    out = np.zeros(grid.shape)
    for m in range(1, modes + 1):
        out += rng.normal() * np.cos(m * x) + rng.normal() * np.sin(m * x)
    return scale * out


def random_generator(grid, rng):
    return lp.Generator(VectorField(grid, [band_limited(grid, rng)]),
                        ScalarField(grid, band_limited(grid, rng)))


def positive_state(grid, pfield=None):
    x = grid.axis_coordinates(0)
    rho = 1.0 + 0.5 * np.cos(x)
    rho /= rho.sum() * grid.cell_volume
    p = 0.4 + 0.2 * np.sin(x) if pfield is None else pfield
    return lp.EmergenceMomentum(
        CovectorField(grid, [rho * p]), ScalarField(grid, rho)), rho, p


# -- bracket -------------------------------------------------------------------

def test_bracket_antisymmetry():
    grid = make_grid()
    V = random_generator(grid, np.random.default_rng(0))
    z = lp.bracket(V, V)
    assert np.max(np.abs(z.v.components[0])) < 1e-14
    assert np.max(np.abs(z.U.values)) < 1e-14


def test_bracket_known_commutator():
    # v1 = d/dx, v2 = sin(x) d/dx: [v1, v2] = cos(x) d/dx; the scalar parts
    # transport as v1 U2 - v2 U1
    grid = make_grid()
    x = grid.axis_coordinates(0)
    V1 = lp.Generator(VectorField(grid, [np.ones(grid.shape)]),
                      ScalarField(grid, np.cos(x)))
    V2 = lp.Generator(VectorField(grid, [np.sin(x)]),
                      ScalarField(grid, np.sin(2 * x)))
    out = lp.bracket(V1, V2)
    assert np.max(np.abs(out.v.components[0] - np.cos(x))) < 1e-12
    expect_u = 2 * np.cos(2 * x) - np.sin(x) * (-np.sin(x))
    assert np.max(np.abs(out.U.values - expect_u)) < 1e-12


def test_bracket_jacobi_identity():
    grid = make_grid()
    rng = np.random.default_rng(1)
    V1, V2, V3 = (random_generator(grid, rng) for _ in range(3))
    total_v = np.zeros(grid.shape)
    total_u = np.zeros(grid.shape)
    for a, b, c in ((V1, V2, V3), (V2, V3, V1), (V3, V1, V2)):
        term = lp.bracket(lp.bracket(a, b), c)
        total_v += term.v.components[0]
        total_u += term.U.values
    assert np.max(np.abs(total_v)) < 1e-8
    assert np.max(np.abs(total_u)) < 1e-8


# -- generator from functional ----------------------------------------------------

def test_generator_free_hamiltonian():
    grid = make_grid()
    J, rho, p = positive_state(grid)
    gen = lp.generator_from_functional(CanonicalHamiltonian(grid), J)
    assert np.max(np.abs(gen.v.components[0] - p)) < 1e-12
    assert np.max(np.abs(gen.U.values + 0.5 * p**2)) < 1e-12


def test_generator_canonical_expansion():
    # H = h(p+A)^2/2 + U gives (h(p+A), -h p^2/2 + h A^2/2 + U)
    grid = make_grid()
    x = grid.axis_coordinates(0)
    h = 1.7
    A = 0.2 * np.sin(x)
    U = 0.3 * np.cos(x)
    H = CanonicalHamiltonian(
        grid, metric=[[h]],
        vector_potential=CovectorField(grid, [A]),
        scalar_potential=ScalarField(grid, U))
    J, rho, p = positive_state(grid)
    gen = lp.generator_from_functional(H, J)
    assert np.max(np.abs(gen.v.components[0] - h * (p + A))) < 1e-12
    expect_u = -0.5 * h * p**2 + 0.5 * h * A**2 + U
    assert np.max(np.abs(gen.U.values - expect_u)) < 1e-12


def test_generator_constant_functional():
    grid = make_grid()
    J, rho, p = positive_state(grid)
    one = lp.LocalFunctional(lambda x, pp: np.ones_like(pp),
                             lambda x, pp: [np.zeros_like(pp)])
    gen = lp.generator_from_functional(one, J)
    assert np.max(np.abs(gen.v.components[0])) < 1e-14
    assert np.max(np.abs(gen.U.values - 1.0)) < 1e-14


def test_null_lagrangian_pairing_identity():
    grid = make_grid()
    J, rho, p = positive_state(grid)
    U, dU = cosine_well(grid, curvature=0.7)
    H = CanonicalHamiltonian(grid, scalar_potential=U, grad_potential=dU)
    gen = lp.generator_from_functional(H, J)
    lhs = lp.pairing(J, gen)
    rhs = integrate(rho * H.value_on_grid(
        CovectorField(grid, [p])), grid)
    assert abs(lhs - rhs) < 1e-8


def test_gradient_functional_pairing():
    # functional with first-order momentum-gradient dependence still pairs
    # back to its own value (the divergence correction is null under pairing)
    grid = make_grid()
    J, rho, p = positive_state(grid)
    F = lp.DerivativeFunctional(
        value=lambda x, pp: 0.5 * pp**2,
        dp=lambda x, pp: [pp],
        d_gradp=lambda x, pp, gradp: [[0.1 * gradp[0][0]]],
    )
    gen = lp.generator_from_functional(F, J)
    assert abs(lp.pairing(J, gen) - integrate(rho * 0.5 * p**2, grid)) < 1e-8


# -- pairing and coadjoint duality --------------------------------------------------

def test_pairing_normalization_and_zero_cases():
    grid = make_grid()
    J, rho, p = positive_state(grid)
    one = lp.Generator(VectorField(grid, [np.zeros(grid.shape)]),
                       ScalarField(grid, np.ones(grid.shape)))
    assert abs(lp.pairing(J, one) - 1.0) < 1e-12
    J0 = lp.EmergenceMomentum(
        CovectorField(grid, [np.zeros(grid.shape)]), ScalarField(grid, rho))
    vonly = lp.Generator(VectorField(grid, [np.sin(grid.axis_coordinates(0))]),
                         ScalarField(grid, np.zeros(grid.shape)))
    assert abs(lp.pairing(J0, vonly)) < 1e-14


def test_coadjoint_duality():
    grid = make_grid()
    rng = np.random.default_rng(2)
    J, _, _ = positive_state(grid)
    worst = 0.0
    for _ in range(5):
        V1, V2 = random_generator(grid, rng), random_generator(grid, rng)
        lhs = lp.pairing(lp.ad_star(V1, J), V2)
        rhs = lp.pairing(J, lp.bracket(V1, V2))
        worst = max(worst, abs(lhs + rhs))
    assert worst < 1e-7


# -- transport -----------------------------------------------------------------

def test_uniform_transport():
    grid = make_grid()
    x = grid.axis_coordinates(0)
    rho = (1.0 + 0.5 * np.cos(x)) / L
    rho /= rho.sum() * grid.cell_volume
    k0 = 0.8
    J = lp.EmergenceMomentum(CovectorField(grid, [rho * k0]),
                             ScalarField(grid, rho))
    H = CanonicalHamiltonian(grid)
    dt = 2e-3
    for _ in range(400):
        J = lp.lie_poisson_step(J, H, dt)
    t = 400 * dt
    expect = fourier_interpolate(rho, grid, np.array([(x - k0 * t) % L]))
    assert np.max(np.abs(J.density.values - expect)) < 1e-12
    p_now = J.momentum_field().components[0]
    assert np.max(np.abs(p_now - k0)) < 1e-10


def test_mass_conserved_harmonic():
    grid = make_grid()
    U, dU = cosine_well(grid, curvature=1.0)
    H = CanonicalHamiltonian(grid, scalar_potential=U, grad_potential=dU)
    J, _, _ = positive_state(grid)
    for _ in range(1000):
        J = lp.lie_poisson_step(J, H, 1e-3)
    assert abs(integrate(J.density) - 1.0) <= 1e-9


def test_energy_conserved_harmonic():
    grid = make_grid()
    U, dU = cosine_well(grid, curvature=1.0)
    H = CanonicalHamiltonian(grid, scalar_potential=U, grad_potential=dU)
    J, _, _ = positive_state(grid)
    e0 = lp.energy_functional(J, H)
    for _ in range(1000):
        J = lp.lie_poisson_step(J, H, 1e-3)
    assert abs(lp.energy_functional(J, H) - e0) <= 1e-6


def test_cfl_guard():
    grid = make_grid()
    J, _, _ = positive_state(grid)
    with pytest.raises(lp.LiePoissonError):
        lp.lie_poisson_step(J, CanonicalHamiltonian(grid), 1.0)


def synchro_state(grid):
    x = grid.axis_coordinates(0)
    eta = np.exp(2j * (3.0 * x + 0.3 * np.sin(x)))
    mu = 1.0 + 0.6 * np.exp(np.cos(x - np.pi))
    mu /= mu.sum() * grid.cell_volume
    return synchro.SynchronicityState(
        ScalarField(grid, eta), ScalarField(grid, mu), 1.0)


def test_cross_module_one_step_second_order():
    grid = make_grid()
    U, dU = cosine_well(grid, curvature=1.0)
    H = CanonicalHamiltonian(grid, scalar_potential=U, grad_potential=dU)
    st = synchro_state(grid)
    p0 = synchro.momentum_map(st)
    J0 = lp.EmergenceMomentum(
        CovectorField(grid, [st.mu.values * p0.components[0]]),
        ScalarField(grid, st.mu.values))

    def diff(dt):
        s1 = synchro.step(st, H, dt)
        p1 = synchro.momentum_map(s1)
        J1 = lp.lie_poisson_step(J0, H, dt)
        return max(
            float(np.max(np.abs(J1.density.values - s1.mu.values))),
            float(np.max(np.abs(J1.momentum_density.components[0]
                                - s1.mu.values * p1.components[0]))))

    d1, d2 = diff(2e-3), diff(1e-3)
    assert d1 < 1e-6
    assert d1 / max(d2, 1e-300) > 3.5


# -- custom generator rule -----------------------------------------------------

def test_custom_rule_reproduces_coadjoint_transport():
    grid = make_grid()
    U, dU = cosine_well(grid, curvature=1.0)
    H = CanonicalHamiltonian(grid, scalar_potential=U, grad_potential=dU)
    J, _, _ = positive_state(grid)

    def rule(state):
        gen = lp.generator_from_functional(H, state)
        flow = lp.ad_star(gen, state)
        return ([-c for c in flow.momentum_density.components],
                -flow.density.values)

    a = lp.lie_poisson_step(J, H, 1e-3)
    b = lp.custom_generator_step(J, rule, 1e-3)
    assert np.max(np.abs(a.density.values - b.density.values)) < 1e-12
    assert np.max(np.abs(a.momentum_density.components[0]
                         - b.momentum_density.components[0])) < 1e-12


def test_custom_rule_zero_is_identity():
    grid = make_grid()
    J, _, _ = positive_state(grid)
    rule = lambda s: ([np.zeros(grid.shape)], np.zeros(grid.shape))
    out = lp.custom_generator_step(J, rule, 0.1)
    assert np.array_equal(out.density.values, J.density.values)
    assert np.array_equal(out.momentum_density.components[0],
                          J.momentum_density.components[0])


def test_custom_rule_linear_damping():
    grid = make_grid()
    J, _, _ = positive_state(grid)
    gamma = 0.7
    rule = lambda s: ([-gamma * c for c in s.momentum_density.components],
                      np.zeros(grid.shape))
    total0 = integrate(np.abs(J.momentum_density.components[0]), grid)
    for _ in range(500):
        J = lp.custom_generator_step(J, rule, 2e-3)
    total1 = integrate(np.abs(J.momentum_density.components[0]), grid)
    assert abs(total1 / total0 - np.exp(-gamma * 1.0)) < 1e-6
    assert abs(integrate(J.density) - 1.0) < 1e-12


def test_custom_rule_shape_mismatch():
    grid = make_grid()
    J, _, _ = positive_state(grid)
    bad = lambda s: ([np.zeros(3)], np.zeros(grid.shape))
    with pytest.raises(lp.LiePoissonError):
        lp.custom_generator_step(J, bad, 0.01)


def test_momentum_where_density_vanishes_rejected():
    grid = make_grid()
    rho = np.zeros(grid.shape)
    rho[:10] = 1.0
    rho /= rho.sum() * grid.cell_volume
    m = np.ones(grid.shape)
    with pytest.raises(lp.LiePoissonError):
        lp.EmergenceMomentum(CovectorField(grid, [m]), ScalarField(grid, rho))
