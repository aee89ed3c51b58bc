"""Round trips and column layouts of the per-module snapshot formats."""

import numpy as np

from protomech.grids import PeriodicGrid, ScalarField, CovectorField
from protomech.hamiltonians import SeparableHamiltonian
from protomech import synchro, classical, quantum, bridge, liepoisson, \
    thermo, fluids


def test_synchro_state_round_trip(tmp_path):
    grid = PeriodicGrid([(32, 2 * np.pi)])
    x = grid.axis_coordinates(0)
    mu = np.exp(np.cos(x))
    mu /= mu.sum() * grid.cell_volume
    state = synchro.SynchronicityState(
        ScalarField(grid, np.exp(2j * (2 * x + 0.1 * np.sin(x)))),
        ScalarField(grid, mu), 1.0)
    path = str(tmp_path / "state.csv")
    synchro.write_state_csv(state, path)
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    assert header == ["i0", "eta_re", "eta_im", "mu"]
    back = synchro.read_state_csv(path)
    assert np.array_equal(back.eta.values, state.eta.values)
    assert np.array_equal(back.mu.values, state.mu.values)
    assert back.hbar == state.hbar


def test_pdf_and_trajectory_csv(tmp_path):
    grid = PeriodicGrid([(16, 4.0), (16, 4.0)], origins=[-2.0, -2.0])
    X, P = grid.meshes()
    rho = np.exp(-(X**2 + P**2))
    rho /= rho.sum() * grid.cell_volume
    pdf = classical.PhaseSpacePDF(grid, rho)
    path = str(tmp_path / "pdf.csv")
    classical.write_pdf_csv(pdf, path)
    raw = np.genfromtxt(path, delimiter=",", names=True)
    assert raw.dtype.names == ("x0", "p0", "rho")
    assert np.array_equal(np.asarray(raw["rho"]).reshape(grid.shape), rho)

    H = SeparableHamiltonian(lambda p: 0.5 * p**2, lambda q: 0.5 * q**2,
                             d_kinetic=lambda p: p, d_potential=lambda q: q)
    states = [classical.TrajectoryState(1.0, 0.0)]
    for _ in range(5):
        states.append(classical.canonical_step(states[-1], H, 0.01))
    tpath = str(tmp_path / "traj.csv")
    classical.write_trajectory_csv(states, H, tpath)
    log = np.genfromtxt(tpath, delimiter=",", names=True)
    assert log.dtype.names == ("t", "q0", "p0", "H")
    assert np.max(np.abs(np.asarray(log["H"]) - 0.5)) < 1e-6


def test_wavefunction_and_density_csv(tmp_path):
    grid = PeriodicGrid([(32, 10.0)], origins=[-5.0])
    x = grid.axis_coordinates(0)
    psi = quantum.WaveFunction.normalized(
        grid, np.exp(-x**2) * np.exp(0.3j * x), 1.0)
    wpath = str(tmp_path / "psi.csv")
    quantum.write_wavefunction_csv(psi, wpath)
    back = quantum.read_wavefunction_csv(wpath, grid, 1.0)
    assert np.array_equal(back.values.values, psi.values.values)

    rho = quantum.DensityMatrix.from_wavefunction(psi)
    dpath = str(tmp_path / "rho.csv")
    quantum.write_density_csv(rho, dpath)
    back_rho = quantum.read_density_csv(dpath, grid=grid, hbar=1.0)
    assert np.array_equal(back_rho.entries, rho.entries)


def test_wigner_and_residual_csv(tmp_path):
    grid = PeriodicGrid([(32, 10.0)], origins=[-5.0])
    x = grid.axis_coordinates(0)
    psi = quantum.WaveFunction.normalized(grid, np.exp(-x**2), 1.0)
    w = bridge.wigner_transform(psi)
    path = str(tmp_path / "wigner.csv")
    bridge.write_wigner_csv(w, path)
    raw = np.genfromtxt(path, delimiter=",", names=True)
    assert raw.dtype.names == ("x", "p", "W")
    assert np.array_equal(np.asarray(raw["W"]).reshape(w.values.shape),
                          w.values)
    rpath = str(tmp_path / "resid.csv")
    bridge.write_residual_series_csv([(0.0, 1e-9, 2e-8)], rpath)
    raw = np.genfromtxt(rpath, delimiter=",", names=True)
    assert raw.dtype.names == ("t", "res_continuity", "res_momentum")


def test_momentum_snapshot_csv(tmp_path):
    grid = PeriodicGrid([(16, 2 * np.pi)])
    x = grid.axis_coordinates(0)
    rho = (1.0 + 0.3 * np.cos(x)) / (2 * np.pi)
    rho /= rho.sum() * grid.cell_volume
    J = liepoisson.EmergenceMomentum(
        CovectorField(grid, [rho * 0.5]), ScalarField(grid, rho))
    path = str(tmp_path / "J.csv")
    liepoisson.write_momentum_csv(J, path)
    raw = np.genfromtxt(path, delimiter=",", names=True)
    assert raw.dtype.names == ("x0", "rho", "rho_p0")
    assert np.array_equal(np.asarray(raw["rho"]), rho)


def test_occupation_sweep_csv(tmp_path):
    path = str(tmp_path / "occ.csv")
    thermo.write_occupation_sweep_csv(
        [(1.0, 0.0, 1.0, "fermi"), (1.0, 0.0, 1.0, "bose"),
         (1.0, 0.0, 1.0, "boltzmann")], path)
    with open(path) as fh:
        header = fh.readline().strip()
        rows = fh.read().strip().splitlines()
    assert header == "beta,mu,E,statistics,n"
    assert len(rows) == 3
    fd = float(rows[0].split(",")[-1])
    assert abs(fd - 1.0 / (np.e + 1.0)) < 1e-14


def test_fluid_diagnostics_csv(tmp_path):
    path = str(tmp_path / "diag.csv")
    fluids.write_diagnostics_csv([(0.0, 1.0, 2.0, 3.0, 4.0)], path)
    raw = np.genfromtxt(path, delimiter=",", names=True)
    assert raw.dtype.names == ("t", "energy", "enstrophy", "mass", "entropy")
