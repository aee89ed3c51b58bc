"""Operator assembly, split-step unitarity, and the two quantum pictures."""

import numpy as np
import pytest

from protomech.grids import PeriodicGrid, ScalarField, CovectorField
from protomech.hamiltonians import CanonicalHamiltonian
from protomech import quantum
from protomech.quantum import (
    WaveFunction, DensityMatrix, Observable,
    build_hamiltonian, schrodinger_step, liouville_step_quantum,
    heisenberg_expectation_check, commutation_check, duality_check,
    thermal_density_matrix, momentum_matrix,
)

HBAR = 1.0


def harmonic_setup(n=64, box=20.0):
    grid = PeriodicGrid([(n, box)], origins=[-box / 2])
    x = grid.axis_coordinates(0)
    H = CanonicalHamiltonian(
        grid,
        scalar_potential=ScalarField(grid, 0.5 * x**2),
        grad_potential=CovectorField(grid, [x]),
    )
    return grid, x, H


def coherent(grid, x, x0=1.0):
    return WaveFunction.normalized(grid, np.exp(-((x - x0) ** 2) / 2.0), HBAR)


# -- operator assembly ---------------------------------------------------------

def test_free_spectrum():
    grid = PeriodicGrid([(64, 20.0)], origins=[-10.0])
    Hop = build_hamiltonian(CanonicalHamiltonian(grid), grid, HBAR)
    evals = np.sort(np.linalg.eigvalsh(Hop.matrix()))
    k = np.sort(np.abs(grid.wavenumbers(0)))
    expect = np.sort(0.5 * (HBAR * k) ** 2)
    assert np.max(np.abs(evals - expect)) < 1e-10


def test_harmonic_ground_energy():
    grid, x, H = harmonic_setup(128)
    Hop = build_hamiltonian(H, grid, HBAR)
    evals = np.linalg.eigvalsh(Hop.matrix())
    assert abs(evals[0] - 0.5) < 1e-4
    assert np.max(np.abs(evals[:6] - (np.arange(6) + 0.5))) < 1e-6


def test_constant_gauge_shift_spectrum():
    grid = PeriodicGrid([(64, 20.0)], origins=[-10.0])
    a = 0.37
    A = CovectorField(grid, [np.full(64, a)])
    Hop = build_hamiltonian(
        CanonicalHamiltonian(grid, vector_potential=A), grid, HBAR)
    evals = np.sort(np.linalg.eigvalsh(Hop.matrix()))
    # the linear momentum term follows the odd-derivative convention and
    # drops the Nyquist mode, so build the expected modes the same way
    kfull = grid.wavenumbers(0)
    klin = kfull.copy()
    klin[len(klin) // 2] = 0.0
    expect = np.sort(0.5 * (HBAR * kfull) ** 2 + a * HBAR * klin + 0.5 * a**2)
    assert np.max(np.abs(evals - expect)) < 1e-9


def test_nonsymmetric_metric_rejected():
    grid = PeriodicGrid([(16, 2.0), (16, 2.0)])
    from protomech.grids import GridError
    with pytest.raises(GridError):
        CanonicalHamiltonian(grid, metric=[[1.0, 0.3], [0.0, 1.0]])


def test_momentum_matrix_hermitian():
    grid = PeriodicGrid([(32, 5.0)])
    for power in (1, 2):
        m = momentum_matrix(grid, HBAR, power)
        assert np.max(np.abs(m - m.conj().T)) < 1e-12


# -- schrodinger_step ------------------------------------------------------------

def test_free_plane_wave_phase():
    grid = PeriodicGrid([(64, 2 * np.pi)])
    x = grid.axis_coordinates(0)
    k = 3.0
    psi = WaveFunction.normalized(grid, np.exp(1j * k * x), HBAR)
    H = CanonicalHamiltonian(grid)
    dt = 1e-3
    s = psi
    for _ in range(200):
        s = schrodinger_step(s, H, dt)
    t = 200 * dt
    expect = np.exp(1j * k * x - 0.5j * HBAR * k * k * t)
    expect /= np.sqrt(np.sum(np.abs(expect) ** 2) * grid.cell_volume)
    assert np.max(np.abs(s.values.values - expect)) < 1e-12


def test_coherent_state_tracks_cosine():
    grid, x, H = harmonic_setup(128)
    psi = coherent(grid, x)
    dt = 5e-4
    worst = 0.0
    for k in range(2000):
        psi = schrodinger_step(psi, H, dt)
        if (k + 1) % 200 == 0:
            t = (k + 1) * dt
            xm = float(np.sum(x * np.abs(psi.values.values) ** 2)
                       * grid.spacings[0])
            worst = max(worst, abs(xm - np.cos(t)))
    assert worst < 1e-6


def test_norm_preserved_many_steps():
    grid, x, H = harmonic_setup(64)
    psi = coherent(grid, x)
    for _ in range(10**4):
        psi = schrodinger_step(psi, H, 1e-3)
    assert abs(psi.norm() - 1.0) <= 1e-10


def test_ehrenfest_velocity_matches_momentum_mean():
    grid, x, H = harmonic_setup(128)
    psi = coherent(grid, x)
    dt = 1e-3
    pop = momentum_matrix(grid, HBAR, 1)

    def xmean(p):
        return float(np.sum(x * np.abs(p.values.values) ** 2)
                     * grid.spacings[0])

    def pmean(p):
        u = p.node_vector()
        return float(np.real(np.conj(u) @ (pop @ u)))

    psi1 = schrodinger_step(psi, H, dt)
    psi2 = schrodinger_step(psi1, H, dt)
    dxdt = (xmean(psi2) - xmean(psi)) / (2 * dt)
    assert abs(dxdt - pmean(psi1)) < 5 * dt**2


# -- density matrix / quantum Liouville -------------------------------------------

def test_pure_state_matches_outer_product():
    grid, x, H = harmonic_setup(64)
    psi = coherent(grid, x)
    rho = DensityMatrix.from_wavefunction(psi)
    dt = 1e-3
    for _ in range(500):
        psi = schrodinger_step(psi, H, dt)
        rho = liouville_step_quantum(rho, H, dt)
    outer = DensityMatrix.from_wavefunction(psi)
    assert np.max(np.abs(rho.entries - outer.entries)) < 1e-9


def test_thermal_state_stationary():
    grid, x, H = harmonic_setup(64)
    Hop = build_hamiltonian(H, grid, HBAR)
    rho = thermal_density_matrix(Hop, beta=1.0)
    evolved = rho
    for _ in range(100):
        evolved = liouville_step_quantum(evolved, H, 5e-4)
    assert np.max(np.abs(evolved.entries - rho.entries)) < 1e-9


def test_trace_hermiticity_spectrum_preserved():
    grid, x, H = harmonic_setup(64)
    Hop = build_hamiltonian(H, grid, HBAR)
    rho = thermal_density_matrix(Hop, beta=0.5)
    ev0 = np.linalg.eigvalsh(rho.entries)
    m = rho
    for _ in range(1000):
        m = liouville_step_quantum(m, H, 1e-3)
    assert abs(np.trace(m.entries).real - 1.0) < 1e-9
    assert np.max(np.abs(m.entries - m.entries.conj().T)) < 1e-9
    assert np.max(np.abs(np.linalg.eigvalsh(m.entries) - ev0)) < 1e-8


def test_density_matrix_validation():
    bad = np.eye(4) * 0.25
    bad[0, 1] = 0.5
    with pytest.raises(quantum.QuantumError):
        DensityMatrix(bad)
    signed = np.diag([0.75, 0.75, -0.5])
    with pytest.raises(quantum.QuantumError):
        DensityMatrix(signed)
    DensityMatrix(signed, signed=True)  # signed mixtures are first-class


# -- heisenberg picture ------------------------------------------------------------

def test_heisenberg_commuting_pair():
    grid, x, H = harmonic_setup(64)
    Hop = build_hamiltonian(H, grid, HBAR)
    rho = thermal_density_matrix(Hop, beta=1.0)
    assert heisenberg_expectation_check(rho, Hop, Hop, 0.7) < 1e-10


def test_heisenberg_position_at_pi():
    grid, x, H = harmonic_setup(64)
    Hop = build_hamiltonian(H, grid, HBAR)
    rho = DensityMatrix.from_wavefunction(coherent(grid, x))
    xop = Observable(grid, HBAR, [(x / 2.0, 0)])
    assert heisenberg_expectation_check(rho, Hop, xop, np.pi) < 1e-8


def test_heisenberg_energy_any_time():
    grid, x, H = harmonic_setup(64)
    Hop = build_hamiltonian(H, grid, HBAR)
    rho = DensityMatrix.from_wavefunction(coherent(grid, x))
    for t in (0.3, 2.1, 9.7):
        assert heisenberg_expectation_check(rho, Hop, Hop, t) < 1e-10


# -- commutation and duality ---------------------------------------------------------

def test_commutation_constant():
    grid = PeriodicGrid([(64, 2 * np.pi)])
    f = ScalarField(grid, np.full(64, 2.3))
    assert commutation_check(grid, f, HBAR) < 1e-12


def test_commutation_sine():
    grid = PeriodicGrid([(64, 2 * np.pi)])
    x = grid.axis_coordinates(0)
    f = ScalarField(grid, np.sin(x))
    assert commutation_check(grid, f, HBAR) < 1e-10


def test_commutation_random_band_limited():
    rng = np.random.default_rng(7)
    grid = PeriodicGrid([(96, 2 * np.pi)])
    x = grid.axis_coordinates(0)
    vals = np.zeros(96)
    for m in range(1, 6):
        vals += rng.normal() * np.cos(m * x) + rng.normal() * np.sin(m * x)
    assert commutation_check(grid, ScalarField(grid, vals), HBAR) < 1e-9


def test_duality_identity_momentum_and_square():
    grid, x, H = harmonic_setup(64)
    psi = WaveFunction.normalized(grid, np.exp(-x**2 / 2.0), HBAR)
    rho = DensityMatrix.from_wavefunction(psi)
    n = grid.npoints
    ident = Observable(grid, HBAR, [(np.full(n, 0.5), 0)])
    pop = Observable(grid, HBAR, [(np.full(n, 0.5), 1)])
    p2op = Observable(grid, HBAR, [(np.full(n, 0.5), 2)])
    assert duality_check(rho, ident) < 1e-10
    assert duality_check(rho, pop) < 1e-8
    assert duality_check(rho, p2op) < 1e-6


def test_duality_position_weighted_square():
    # degree-2 observable with a genuine coefficient field exercises the
    # hbar^2 correction in the symbol
    grid, x, H = harmonic_setup(64)
    psi = WaveFunction.normalized(grid, np.exp(-((x - 1.0) ** 2) / 2.0), HBAR)
    rho = DensityMatrix.from_wavefunction(psi)
    coeff = np.exp(-x**2 / 8.0)
    fp2 = Observable(grid, HBAR, [(coeff, 2)])
    assert duality_check(rho, fp2) < 1e-6


def test_duality_degree_cap():
    grid, x, H = harmonic_setup(64)
    rho = DensityMatrix.from_wavefunction(
        WaveFunction.normalized(grid, np.exp(-x**2 / 2.0), HBAR))
    p3 = Observable(grid, HBAR, [(np.full(grid.npoints, 0.5), 3)])
    with pytest.raises(quantum.QuantumError):
        duality_check(rho, p3)
