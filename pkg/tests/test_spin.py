"""Sphere-grid spin operators, their algebra, and the CHSH correlations."""

import numpy as np
import pytest

from protomech import spin

HBAR = 1.0


@pytest.fixture(scope="module")
def grid():
    return spin.SphereGrid(64, 64)


@pytest.fixture(scope="module")
def Lops(grid):
    return spin.build_L(grid, HBAR)


@pytest.fixture(scope="module")
def Sops(grid):
    return spin.build_S(grid, HBAR)


def test_solid_angle(grid):
    assert abs(grid.solid_angle() - 4 * np.pi) < 1e-10


def test_grid_minimums():
    with pytest.raises(spin.SpinError):
        spin.SphereGrid(8, 64)
    with pytest.raises(spin.SpinError):
        spin.SphereGrid(64, 16)


def test_l3_eigenvalues(grid, Lops):
    _, _, L3 = Lops
    for l in range(5):
        for m in range(-l, l + 1):
            Y = spin.spherical_harmonic(grid, l, m)
            assert np.max(np.abs(L3.apply(Y) - HBAR * m * Y)) < 1e-8


def test_l_casimir(grid, Lops):
    for l in range(5):
        for m in range(-l, l + 1):
            Y = spin.spherical_harmonic(grid, l, m)
            out = spin.casimir_apply(Lops, Y)
            assert np.max(np.abs(out - HBAR**2 * l * (l + 1) * Y)) < 1e-6


def test_l_commutator_on_band_limited(grid, Lops):
    L1, L2, L3 = Lops
    worst = 0.0
    for l in range(5):
        for m in range(-l, l + 1):
            Y = spin.spherical_harmonic(grid, l, m)
            lhs = L1.apply(L2.apply(Y)) - L2.apply(L1.apply(Y))
            worst = max(worst, float(np.max(np.abs(lhs - 1j * HBAR
                                                   * L3.apply(Y)))))
    assert worst < 1e-7


def test_l_hermiticity(grid, Lops):
    basis = [spin.spherical_harmonic(grid, l, m)
             for l in range(4) for m in range(-l, l + 1)]
    for op in Lops:
        assert op.hermiticity_residual(basis) < 1e-8


def test_s3_eigenstates(grid, Sops):
    plus, minus = spin.spin_half_states(grid)
    S3 = Sops[2]
    assert np.max(np.abs(S3.apply(plus) - 0.5 * HBAR * plus)) < 1e-7
    assert np.max(np.abs(S3.apply(minus) + 0.5 * HBAR * minus)) < 1e-7


def test_s_casimir(grid, Sops):
    plus, minus = spin.spin_half_states(grid)
    for state in (plus, minus):
        out = spin.casimir_apply(Sops, state)
        assert np.max(np.abs(out - 0.75 * HBAR**2 * state)) < 1e-6


def test_gauge_shift_leaves_block_invariant(grid, Sops):
    base = spin.pauli_reduce(Sops, grid)
    shifted_ops = spin.build_S(grid, HBAR, gauge=lambda th, ph: 0.0 * th + 0.9)
    shifted = spin.pauli_reduce(shifted_ops, grid)
    for b, s in zip(base, shifted):
        assert np.max(np.abs(b - s)) < 1e-9


def test_smooth_gauge_covariance(grid, Sops):
    base = spin.pauli_reduce(Sops, grid)
    ops = spin.build_S(grid, HBAR,
                       gauge=lambda th, ph: 0.2 * np.cos(th) * np.sin(ph))
    blocks = spin.pauli_reduce(ops, grid)
    for b, s in zip(base, blocks):
        assert np.max(np.abs(b - s)) < 1e-9


def test_pauli_reduction(grid, Sops):
    blocks = spin.pauli_reduce(Sops, grid)
    for i in range(3):
        assert np.max(np.abs(blocks[i] - 0.5 * HBAR * spin.PAULI[i])) < 1e-7


def test_pauli_anticommutators(grid, Sops):
    blocks = spin.pauli_reduce(Sops, grid)
    sigma = [2.0 * b / HBAR for b in blocks]
    for i in range(3):
        for j in range(3):
            anti = sigma[i] @ sigma[j] + sigma[j] @ sigma[i]
            expect = 2.0 * np.eye(2) if i == j else np.zeros((2, 2))
            assert np.max(np.abs(anti - expect)) < 1e-6


def test_su2_algebra_on_blocks(grid, Sops):
    blocks = spin.pauli_reduce(Sops, grid)
    eps = {(0, 1): 2, (1, 2): 0, (2, 0): 1}
    for (i, j), k in eps.items():
        comm = blocks[i] @ blocks[j] - blocks[j] @ blocks[i]
        assert np.max(np.abs(comm - 1j * HBAR * blocks[k])) < 1e-7


def test_s_hermiticity(grid, Sops):
    plus, minus = spin.spin_half_states(grid)
    fam = [plus, minus,
           spin.half_integer_state(grid, 1, 0),
           spin.half_integer_state(grid, 1, -1)]
    for op in Sops:
        assert op.hermiticity_residual(fam) < 1e-8


def test_half_integer_family_casimir(grid, Sops):
    val = HBAR**2 * 1.5 * 2.5  # l = 1: (l + 1/2)(l + 3/2)
    for m in range(-2, 2):
        f = spin.half_integer_state(grid, 1, m)
        out = spin.casimir_apply(Sops, f)
        assert np.max(np.abs(out - val * f)) < 1e-5


def test_half_integer_s3(grid, Sops):
    S3 = Sops[2]
    for m in range(-2, 2):
        f = spin.half_integer_state(grid, 1, m)
        assert np.max(np.abs(S3.apply(f) - HBAR * (m + 0.5) * f)) < 1e-6


def test_spinor_state_norm():
    g = spin.SphereGrid(16, 32)
    plus, minus = spin.spin_half_states(g)
    st = spin.SpinorState(g, [1 / np.sqrt(2), 1j / np.sqrt(2)], [plus, minus])
    field = st.field()
    assert abs(g.inner(field, field).real - 1.0) < 1e-10
    with pytest.raises(spin.SpinError):
        spin.SpinorState(g, [1.0, 0.5], [plus, minus])


# -- correlations ----------------------------------------------------------------

Z = np.array([0.0, 0.0, 1.0])
X = np.array([1.0, 0.0, 0.0])


def coplanar(t):
    return np.cos(t) * Z + np.sin(t) * X


def test_singlet_anticorrelation():
    s = spin.singlet_state()
    assert abs(spin.correlation(s, Z, Z) + 1.0) < 1e-12
    assert abs(spin.correlation(s, X, X) + 1.0) < 1e-12


def test_singlet_perpendicular():
    s = spin.singlet_state()
    assert abs(spin.correlation(s, Z, X)) < 1e-12


def test_product_up_up():
    st = spin.product_state(Z, Z)
    assert abs(spin.correlation(st, Z, Z) - 1.0) < 1e-12


def test_direction_validation():
    with pytest.raises(spin.SpinError):
        spin.correlation(spin.singlet_state(), Z, np.array([0.0, 0.0, 2.0]))


def test_chsh_singlet_violation():
    s = spin.singlet_state()
    a, ap, b, bp = coplanar(0), coplanar(np.pi / 2), coplanar(np.pi / 4), \
        coplanar(3 * np.pi / 4)
    val = spin.bell_lhs(
        spin.correlation(s, a, b), spin.correlation(s, a, bp),
        spin.correlation(s, ap, bp), spin.correlation(s, ap, b))
    assert abs(val - 2 * np.sqrt(2)) < 1e-6
    assert val > 2.0


def test_chsh_product_states_bounded():
    rng = np.random.default_rng(8)
    a, ap, b, bp = coplanar(0), coplanar(np.pi / 2), coplanar(np.pi / 4), \
        coplanar(3 * np.pi / 4)
    worst = 0.0
    for _ in range(1000):
        va, vb = rng.normal(size=3), rng.normal(size=3)
        va /= np.linalg.norm(va)
        vb /= np.linalg.norm(vb)
        st = spin.product_state(va, vb)
        worst = max(worst, spin.bell_lhs(
            spin.correlation(st, a, b), spin.correlation(st, a, bp),
            spin.correlation(st, ap, bp), spin.correlation(st, ap, b)))
    assert worst <= 2.0 + 1e-9


def test_chsh_degenerate_settings():
    s = spin.singlet_state()
    p = spin.correlation(s, Z, coplanar(0.3))
    val = spin.bell_lhs(p, p, p, p)
    assert val <= 2.0 + 1e-12
    assert abs(val - abs(2 * p)) < 1e-12
