"""Experiment runner: every acceptance experiment is a named subcommand that
reads a JSON config, runs the mapped module pipeline, and writes
machine-readable records (JSON lines + CSV).  Exit status reflects the
aggregate pass flag.

Usage:
    protomech list
    protomech <experiment> [--config cfg.json] [--out DIR] [--seed N]

The environment variable PROTOMECH_THREADS caps worker threads in the
randomized sweeps.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .grids import PeriodicGrid, ScalarField, CovectorField
from .hamiltonians import CanonicalHamiltonian, SeparableHamiltonian, cosine_well
from . import synchro, classical, quantum, bridge, liepoisson, spin, thermo, fluids

__all__ = ["ExperimentConfig", "ResultRecord", "run", "list_experiments", "main"]

_FMT = "%.17g"


class ConfigError(ValueError):
    pass


@dataclass
class ResultRecord:
    """One metric of one experiment; the pass flag is always computed."""

    experiment: str
    metric: str
    value: float
    tolerance: object  # float bound on |value| or (lo, hi) interval
    passed: bool
    wall_time: float

    @staticmethod
    def check(experiment, metric, value, tolerance, wall_time):
        if isinstance(tolerance, (tuple, list)):
            lo, hi = tolerance
            passed = bool(lo <= value <= hi)
        else:
            passed = bool(abs(value) <= tolerance)
        return ResultRecord(experiment, metric, float(value), tolerance,
                            passed, float(wall_time))

    def tolerance_text(self):
        if isinstance(self.tolerance, (tuple, list)):
            return f"[{self.tolerance[0]:g},{self.tolerance[1]:g}]"
        return f"{self.tolerance:g}"


class ExperimentConfig:
    """Validated per-experiment parameters.

    ``schema`` maps field names to (default, low, high); unknown keys and
    out-of-bounds values are rejected with field-level diagnostics.
    """

    def __init__(self, name, schema, overrides=None, seed=0):
        self.name = name
        values = {}
        overrides = dict(overrides or {})
        for key in overrides:
            if key not in schema and key != "seed":
                raise ConfigError(
                    f"{name}: unknown config field {key!r} "
                    f"(known: {sorted(schema)})")
        for field, (default, lo, hi) in schema.items():
            raw = overrides.get(field, default)
            try:
                val = type(default)(raw)
            except (TypeError, ValueError):
                raise ConfigError(
                    f"{name}: field {field!r} must be {type(default).__name__}, "
                    f"got {raw!r}") from None
            if not (lo <= val <= hi):
                raise ConfigError(
                    f"{name}: field {field!r} = {val!r} outside bounds "
                    f"[{lo}, {hi}]")
            values[field] = val
        self.values = values
        self.seed = int(overrides.get("seed", seed))

    def __getitem__(self, key):
        return self.values[key]


def _max_workers():
    raw = os.environ.get("PROTOMECH_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _write_series_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_FMT % v for v in row) + "\n")


# ---------------------------------------------------------------------------
# experiment pipelines


def _exp_synchro_conserve(cfg, outdir):
    n, dt, steps = cfg["points"], cfg["dt"], cfg["steps"]
    grid = PeriodicGrid([(n, 2 * np.pi)])
    x = grid.axis_coordinates(0)
    U, dU = cosine_well(grid, curvature=cfg["curvature"])
    H = CanonicalHamiltonian(grid, scalar_potential=U, grad_potential=dU)
    eta0 = np.exp(2j * (3.0 * x + 0.3 * np.sin(x)))
    mu0 = np.exp(-((x - np.pi) ** 2) / 0.5)
    mu0 /= mu0.sum() * grid.cell_volume
    state = synchro.SynchronicityState(
        ScalarField(grid, eta0), ScalarField(grid, mu0), cfg["hbar"])
    e0 = synchro.energy_functional(state, H)
    m0 = state.total_measure()
    worst_renorm = 0.0
    for _ in range(steps):
        state = synchro.step(state, H, dt)
        worst_renorm = max(worst_renorm, state.renorm_correction)

    # momentum map exactness: eta = e^{2ikx} carries p = hbar k for every
    # mode whose doubled wavenumber stays strictly inside the grid band
    flat_mu = ScalarField(grid, np.full(n, 1.0 / (2 * np.pi)))
    edb = 0.0
    for mode in range(-(n // 4) + 1, n // 4):
        k = mode * 2.0 * np.pi / grid.lengths[0]
        plane = synchro.SynchronicityState(
            ScalarField(grid, np.exp(2j * k * x)), flat_mu, cfg["hbar"])
        p = synchro.momentum_map(plane).components[0]
        edb = max(edb, float(np.max(np.abs(p - cfg["hbar"] * k)))
                  / max(1.0, abs(cfg["hbar"] * k)))
    return [
        ("energy_drift", abs(synchro.energy_functional(state, H) - e0), 1e-6),
        ("measure_drift", abs(state.total_measure() - m0), 1e-9 * abs(m0)),
        ("unit_modulus_correction", worst_renorm, 1e-8),
        ("einstein_de_broglie_rel_error", edb, 1e-12),
    ]


def _exp_classical_liouville(cfg, outdir):
    n, dt = cfg["points"], cfg["dt"]
    grid = PeriodicGrid([(n, 16.0), (n, 16.0)], origins=[-8.0, -8.0])
    X, P = grid.meshes()
    rho0 = np.exp(-((X - 2.0) ** 2 + P**2) / 2.0)
    rho0 /= rho0.sum() * grid.cell_volume
    pdf = classical.PhaseSpacePDF(grid, rho0)
    H = SeparableHamiltonian(lambda p: 0.5 * p**2, lambda q: 0.5 * q**2,
                             d_kinetic=lambda p: p, d_potential=lambda q: q)
    steps = int(round(2 * np.pi / dt))
    for _ in range(steps):
        pdf = classical.liouville_step(pdf, H, dt)
    # characteristics reconstruction: the initial density pulled back along
    # the exact harmonic rotation
    tau = steps * dt
    Xb = np.cos(tau) * X - np.sin(tau) * P
    Pb = np.sin(tau) * X + np.cos(tau) * P
    exact = np.exp(-((Xb - 2.0) ** 2 + Pb**2) / 2.0)
    exact = exact / (np.exp(-((X - 2.0) ** 2 + P**2) / 2.0).sum()
                     * grid.cell_volume)
    mass = pdf.values.sum() * grid.cell_volume
    return [
        ("linf_vs_characteristics", float(np.max(np.abs(pdf.values - exact))),
         1e-3),
        ("mass_drift", abs(mass - 1.0), 1e-9),
    ]


def _quantum_setup(n, box, hbar):
    grid = PeriodicGrid([(n, box)], origins=[-box / 2])
    x = grid.axis_coordinates(0)
    H = CanonicalHamiltonian(
        grid,
        scalar_potential=ScalarField(grid, 0.5 * x**2),
        grad_potential=CovectorField(grid, [x]),
    )
    return grid, x, H


def _exp_quantum_schrodinger(cfg, outdir):
    grid, x, H = _quantum_setup(cfg["points"], cfg["box"], cfg["hbar"])
    Hop = quantum.build_hamiltonian(H, grid, cfg["hbar"])
    evals = np.linalg.eigvalsh(Hop.matrix())
    ground_err = abs(evals[0] - 0.5 * cfg["hbar"])
    psi = quantum.WaveFunction.normalized(
        grid, np.exp(-((x - 1.0) ** 2) / 2.0), cfg["hbar"])
    dt = cfg["dt"]
    steps = int(round(np.pi / dt))
    worst = 0.0
    for k in range(steps):
        psi = quantum.schrodinger_step(psi, H, dt)
        if (k + 1) % max(1, steps // 16) == 0:
            t = (k + 1) * dt
            xm = float(np.sum(x * np.abs(psi.values.values) ** 2)
                       * grid.spacings[0])
            worst = max(worst, abs(xm - np.cos(t)))

    # pure-state density matrix against the Schrodinger outer product
    neq = cfg["dm_points"]
    gridq, xq, Hq = _quantum_setup(neq, cfg["box"], cfg["hbar"])
    psi0 = quantum.WaveFunction.normalized(
        gridq, np.exp(-((xq - 1.0) ** 2) / 2.0), cfg["hbar"])
    rho = quantum.DensityMatrix.from_wavefunction(psi0)
    psiq = psi0
    dm_steps = int(round(np.pi / cfg["dm_dt"]))
    for _ in range(dm_steps):
        psiq = quantum.schrodinger_step(psiq, Hq, cfg["dm_dt"])
        rho = quantum.liouville_step_quantum(rho, Hq, cfg["dm_dt"])
    outer = quantum.DensityMatrix.from_wavefunction(psiq)
    dm_err = float(np.max(np.abs(rho.entries - outer.entries)))
    return [
        ("ground_energy_error", ground_err, 1e-4),
        ("coherent_x_error", worst, 1e-6),
        ("norm_drift", abs(psi.norm() - 1.0), 1e-10),
        ("density_matrix_equivalence", dm_err, 1e-9),
    ]


def _exp_quantum_duality(cfg, outdir):
    grid, x, H = _quantum_setup(cfg["points"], cfg["box"], cfg["hbar"])
    psi = quantum.WaveFunction.normalized(grid, np.exp(-x**2 / 2.0),
                                          cfg["hbar"])
    rho = quantum.DensityMatrix.from_wavefunction(psi)
    n = grid.npoints
    ident = quantum.Observable(grid, cfg["hbar"], [(np.full(n, 0.5), 0)])
    pop = quantum.Observable(grid, cfg["hbar"], [(np.full(n, 0.5), 1)])
    p2op = quantum.Observable(grid, cfg["hbar"], [(np.full(n, 0.5), 2)])
    return [
        ("identity_residual", quantum.duality_check(rho, ident), 1e-10),
        ("momentum_residual", quantum.duality_check(rho, pop), 1e-8),
        ("momentum_sq_residual", quantum.duality_check(rho, p2op), 1e-6),
    ]


def _exp_bridge_wigner(cfg, outdir):
    grid, x, H = _quantum_setup(cfg["points"], cfg["box"], cfg["hbar"])
    hbar = cfg["hbar"]
    psi = quantum.WaveFunction.normalized(grid, np.exp(-x**2 / 2.0), hbar)
    w = bridge.wigner_transform(psi)
    X, P = w.meshes()
    closed = (1.0 / (np.pi * hbar)) * np.exp(-X**2 - P**2 / hbar**2)
    raw = np.exp(-((x - 3.0) ** 2) / 2.0) + np.exp(-((x + 3.0) ** 2) / 2.0)
    wsup = bridge.wigner_transform(
        quantum.WaveFunction.normalized(grid, raw, hbar))
    return [
        ("closed_form_error", float(np.max(np.abs(w.values - closed))), 1e-8),
        ("position_marginal_error",
         float(np.max(np.abs(w.position_marginal()
                             - np.abs(psi.values.values) ** 2))), 1e-8),
        ("momentum_marginal_error",
         float(np.max(np.abs(w.momentum_marginal()
                             - bridge.momentum_density(psi, w.p)))), 1e-8),
        ("superposition_min", float(wsup.values.min()), (-1e9, -1e-6)),
    ]


def _exp_bridge_madelung(cfg, outdir):
    grid, x, H = _quantum_setup(cfg["points"], cfg["box"], cfg["hbar"])

    def residuals(dt):
        psi = quantum.WaveFunction.normalized(
            grid, np.exp(-((x - 1.0) ** 2) / 2.0), cfg["hbar"])
        series = [psi]
        for _ in range(4):
            series.append(quantum.schrodinger_step(series[-1], H, dt))
        return bridge.hydrodynamic_residual(series, H, dt)

    rc1, rm1 = residuals(cfg["dt"])
    rc2, rm2 = residuals(cfg["dt"] / 2.0)
    order = np.log2(max(rm1, 1e-300) / max(rm2, 1e-300))
    return [
        ("continuity_residual", rc1, 1e-5),
        ("momentum_residual", rm1, 1e-5),
        ("dt_convergence_order", order, (1.9, 8.0)),
    ]


def _exp_bridge_limit(cfg, outdir):
    hbar = cfg["hbar"]
    grid, x, H = _quantum_setup(cfg["points"], cfg["box"], hbar)
    psi = quantum.WaveFunction.normalized(grid, np.exp(-x**2 / 2.0), hbar)
    pdf0 = bridge.wigner_to_pdf(bridge.wigner_transform(psi))
    times = [2.0, 6.0, 10.0]
    series = bridge.classical_limit_compare(psi, pdf0, H, times, cfg["dt"])
    harmonic_worst = max(d for _, d in series)
    _write_series_csv(os.path.join(outdir, "bridge-limit-harmonic.csv"),
                      ["t", "l1_distance"], series)

    # the free state spreads to sigma(t) = sqrt(1 + t^2); give it a box wide
    # enough for support and coherence length out to t = 10 (free motion has
    # no kicks, so coarse steps are exact)
    gf = PeriodicGrid([(cfg["free_points"], cfg["free_box"])],
                      origins=[-cfg["free_box"] / 2])
    xf = gf.axis_coordinates(0)
    Hfree = CanonicalHamiltonian(gf)
    psif = quantum.WaveFunction.normalized(gf, np.exp(-xf**2 / 2.0), hbar)
    pdff = bridge.wigner_to_pdf(bridge.wigner_transform(psif))
    free_series = bridge.classical_limit_compare(psif, pdff, Hfree,
                                                 [2.0, 10.0], 2.0)
    free_worst = max(d for _, d in free_series)

    # quartic perturbation: quantum deviation shrinks with hbar
    eps = cfg["quartic_eps"]
    distances = []
    for hb in (1.0, 0.5, 0.25):
        gq = PeriodicGrid([(cfg["points"], cfg["box"])],
                          origins=[-cfg["box"] / 2])
        xq = gq.axis_coordinates(0)
        Uq = ScalarField(gq, 0.5 * xq**2 + eps * xq**4)
        dUq = CovectorField(gq, [xq + 4.0 * eps * xq**3])
        Hq = CanonicalHamiltonian(gq, scalar_potential=Uq, grad_potential=dUq)
        sig = np.sqrt(hb)
        psiq = quantum.WaveFunction.normalized(
            gq, np.exp(-xq**2 / (2 * sig**2)), hb)
        pdfq = bridge.wigner_to_pdf(bridge.wigner_transform(psiq))
        sq = bridge.classical_limit_compare(psiq, pdfq, Hq, [2.0], 2e-3)
        distances.append(sq[-1][1])
    trend = max(distances[1] / distances[0], distances[2] / distances[1])
    return [
        ("harmonic_l1_max", harmonic_worst, 1e-6),
        ("free_l1_max", free_worst, 1e-6),
        ("quartic_hbar_trend", trend, (0.0, 0.999)),
    ]


def _exp_liepoisson_core(cfg, outdir):
    n = cfg["points"]
    grid = PeriodicGrid([(n, 2 * np.pi)])
    x = grid.axis_coordinates(0)
    rng = np.random.default_rng(cfg.seed)
    U, dU = cosine_well(grid, curvature=1.0)
    H = CanonicalHamiltonian(grid, scalar_potential=U, grad_potential=dU)
    rho = (1.0 + 0.5 * np.cos(x)) / (2 * np.pi)
    rho = rho / (rho.sum() * grid.cell_volume)
    pfield = 0.4 + 0.2 * np.sin(x)
    J = liepoisson.EmergenceMomentum(
        CovectorField(grid, [rho * pfield]), ScalarField(grid, rho))
    gen = liepoisson.generator_from_functional(H, J)
    from .grids import integrate as _int
    pair_resid = abs(liepoisson.pairing(J, gen)
                     - _int(rho * H.value_on_grid(
                         CovectorField(grid, [pfield])), grid))

    def rand_gen():
        from .grids import VectorField
        c = np.zeros(n)
        u = np.zeros(n)
        for m in range(1, 4):
            c += rng.normal() * np.cos(m * x) + rng.normal() * np.sin(m * x)
            u += rng.normal() * np.cos(m * x) + rng.normal() * np.sin(m * x)
        return liepoisson.Generator(VectorField(grid, [0.3 * c]),
                                    ScalarField(grid, 0.3 * u))

    duality = 0.0
    for _ in range(5):
        V1, V2 = rand_gen(), rand_gen()
        lhs = liepoisson.pairing(liepoisson.ad_star(V1, J), V2)
        rhs = liepoisson.pairing(J, liepoisson.bracket(V1, V2))
        duality = max(duality, abs(lhs + rhs))

    eta0 = np.exp(2j * (3.0 * x + 0.3 * np.sin(x)))
    mu0 = (1.0 + 0.6 * np.exp(np.cos(x - np.pi)))
    mu0 = mu0 / (mu0.sum() * grid.cell_volume)
    st = synchro.SynchronicityState(
        ScalarField(grid, eta0), ScalarField(grid, mu0), 1.0)
    p0 = synchro.momentum_map(st)
    J0 = liepoisson.EmergenceMomentum(
        CovectorField(grid, [mu0 * p0.components[0]]), ScalarField(grid, mu0))

    def one_step_diff(dt):
        s1 = synchro.step(st, H, dt)
        p1 = synchro.momentum_map(s1)
        J1 = liepoisson.lie_poisson_step(J0, H, dt)
        return max(
            float(np.max(np.abs(J1.density.values - s1.mu.values))),
            float(np.max(np.abs(J1.momentum_density.components[0]
                                - s1.mu.values * p1.components[0]))),
        )

    d1 = one_step_diff(cfg["dt"])
    d2 = one_step_diff(cfg["dt"] / 2.0)
    return [
        ("pairing_identity_residual", pair_resid, 1e-8),
        ("coadjoint_duality_residual", duality, 1e-7),
        ("cross_module_step_ratio", d1 / max(d2, 1e-300), (3.5, 64.0)),
        ("cross_module_step_diff", d1, 1e-6),
    ]


def _exp_spin_eigen(cfg, outdir):
    hbar = cfg["hbar"]
    grid = spin.SphereGrid(cfg["n_theta"], cfg["n_phi"])
    L1, L2, L3 = spin.build_L(grid, hbar)
    l3_res = 0.0
    cas_res = 0.0
    for l in range(5):
        for m in range(-l, l + 1):
            Y = spin.spherical_harmonic(grid, l, m)
            l3_res = max(l3_res, float(np.max(np.abs(
                L3.apply(Y) - hbar * m * Y))))
            cas_res = max(cas_res, float(np.max(np.abs(
                spin.casimir_apply((L1, L2, L3), Y)
                - hbar**2 * l * (l + 1) * Y))))
    S = spin.build_S(grid, hbar)
    plus, minus = spin.spin_half_states(grid)
    s3_res = max(
        float(np.max(np.abs(S[2].apply(plus) - 0.5 * hbar * plus))),
        float(np.max(np.abs(S[2].apply(minus) + 0.5 * hbar * minus))),
    )
    ss_res = max(
        float(np.max(np.abs(spin.casimir_apply(S, plus)
                            - 0.75 * hbar**2 * plus))),
        float(np.max(np.abs(spin.casimir_apply(S, minus)
                            - 0.75 * hbar**2 * minus))),
    )
    blocks = spin.pauli_reduce(S, grid)
    pauli_res = max(
        float(np.max(np.abs(blocks[i] - 0.5 * hbar * spin.PAULI[i])))
        for i in range(3))
    return [
        ("l3_eigen_residual", l3_res, 1e-8),
        ("l_casimir_residual", cas_res, 1e-6),
        ("s3_eigen_residual", s3_res, 1e-7),
        ("s_casimir_residual", ss_res, 1e-6),
        ("pauli_block_residual", pauli_res, 1e-7),
    ]


def _exp_spin_bell(cfg, outdir):
    rng = np.random.default_rng(cfg.seed)
    z = np.array([0.0, 0.0, 1.0])
    xv = np.array([1.0, 0.0, 0.0])

    def direction(t):
        return np.cos(t) * z + np.sin(t) * xv

    a, ap = direction(0.0), direction(np.pi / 2)
    b, bp = direction(np.pi / 4), direction(3 * np.pi / 4)
    singlet = spin.singlet_state()
    chsh = spin.bell_lhs(
        spin.correlation(singlet, a, b), spin.correlation(singlet, a, bp),
        spin.correlation(singlet, ap, bp), spin.correlation(singlet, ap, b))
    rows = [(0.0, np.pi / 4, spin.correlation(singlet, a, b)),
            (0.0, 3 * np.pi / 4, spin.correlation(singlet, a, bp)),
            (np.pi / 2, 3 * np.pi / 4, spin.correlation(singlet, ap, bp)),
            (np.pi / 2, np.pi / 4, spin.correlation(singlet, ap, b))]
    _write_series_csv(os.path.join(outdir, "spin-bell-correlations.csv"),
                      ["alpha_angle", "beta_angle", "P"], rows)

    trials = cfg["product_trials"]
    blochs = rng.normal(size=(trials, 2, 3))
    blochs /= np.linalg.norm(blochs, axis=2, keepdims=True)

    def chunk_max(chunk):
        worst = 0.0
        for va, vb in chunk:
            st = spin.product_state(va, vb)
            val = spin.bell_lhs(
                spin.correlation(st, a, b), spin.correlation(st, a, bp),
                spin.correlation(st, ap, bp), spin.correlation(st, ap, b))
            worst = max(worst, val)
        return worst

    workers = _max_workers()
    chunks = np.array_split(blochs, workers)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            worst = max(pool.map(chunk_max, chunks))
    else:
        worst = chunk_max(blochs)
    return [
        ("singlet_chsh_error", abs(chsh - 2.0 * np.sqrt(2.0)), 1e-6),
        ("product_chsh_max", worst, (0.0, 2.0 + 1e-9)),
    ]


def _exp_thermo_gibbs(cfg, outdir):
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for _ in range(cfg["tables"]):
        rows = [(rng.uniform(-2.0, 3.0), int(rng.integers(0, 4)),
                 int(rng.integers(1, 3))) for _ in range(10)]
        tab = thermo.SpectrumTable(rows)
        beta = rng.uniform(0.1, 10.0)
        mu = rng.uniform(-2.0, 2.0)
        opt = thermo.maximize_entropy(tab, beta, mu)
        gib = thermo.gibbs_state(tab, beta, mu)
        worst = max(worst, float(np.sum(
            np.abs(opt.weights - gib.weights) * tab.degeneracies)))
    fd = thermo.maximize_entropy(thermo.fermionic_mode(1.0), 1.0, 0.0)
    return [
        ("gibbs_l1_worst", worst, 1e-8),
        ("fermi_occupation_error",
         abs(fd.mean_number() - 1.0 / (np.e + 1.0)), 1e-8),
    ]


def _exp_fluid_euler(cfg, outdir):
    n = cfg["points"]
    grid = PeriodicGrid([(n, 2 * np.pi), (n, 2 * np.pi)])
    X, Y = grid.meshes()
    w0 = 2.0 * np.sin(X) * np.sin(Y)
    state = fluids.IncompressibleState2D(ScalarField(grid, w0))
    dt = cfg["dt"]
    steps = int(round(cfg["t_final"] / dt))
    rng = np.random.default_rng(cfg.seed)
    hat = np.zeros((n, n), dtype=complex)
    for _ in range(12):
        kx, ky = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        amp = rng.normal() + 1j * rng.normal()
        hat[kx, ky] = amp
        hat[-kx, -ky] = np.conj(amp)
    wr = np.real(np.fft.ifftn(hat)) * n * n * 0.05
    wr -= wr.mean()
    generic = fluids.IncompressibleState2D(ScalarField(grid, wr))
    e0, z0 = generic.kinetic_energy(), generic.enstrophy()
    diagnostics = []
    tg_worst = 0.0
    for k in range(steps):
        state = fluids.euler_step_2d(state, dt)
        generic = fluids.euler_step_2d(generic, dt)
        if (k + 1) % max(1, steps // 20) == 0:
            tg_worst = max(tg_worst, float(np.max(np.abs(
                state.omega.values - w0))))
            diagnostics.append(((k + 1) * dt, generic.kinetic_energy(),
                                generic.enstrophy(), 0.0, 0.0))
    fluids.write_diagnostics_csv(
        diagnostics, os.path.join(outdir, "fluid-euler-diagnostics.csv"))
    return [
        ("taylor_green_drift", tg_worst, 1e-8),
        ("energy_drift", abs(generic.kinetic_energy() - e0), 1e-6),
        ("enstrophy_drift", abs(generic.enstrophy() - z0), 1e-6),
    ]


def _exp_fluid_compressible(cfg, outdir):
    n = cfg["points"]
    grid = PeriodicGrid([(n, 2 * np.pi)])
    x = grid.axis_coordinates(0)
    U = fluids.polytropic_energy(1.0, 1.4)
    rho0 = 1.0 + 0.2 * np.sin(x) + 0.1 * np.cos(2 * x)
    sig0 = 0.5 + 0.1 * np.cos(x)
    m0 = 0.2 * np.sin(2 * x) * rho0
    state = fluids.CompressibleState(
        ScalarField(grid, rho0), ScalarField(grid, sig0),
        CovectorField(grid, [m0]), U)
    mass0, ent0, _ = state.totals()
    diagnostics = []
    for k in range(cfg["steps"]):
        state = fluids.compressible_step(state, cfg["dt"])
        if (k + 1) % max(1, cfg["steps"] // 20) == 0:
            m_now, s_now, _ = state.totals()
            diagnostics.append(((k + 1) * cfg["dt"], state.energy(), 0.0,
                                m_now, s_now))
    fluids.write_diagnostics_csv(
        diagnostics,
        os.path.join(outdir, "fluid-compressible-diagnostics.csv"))
    mass1, ent1, _ = state.totals()

    # acoustic pulse speed against sqrt(dP/drho)
    ga = PeriodicGrid([(512, 40.0)], origins=[-20.0])
    xa = ga.axis_coordinates(0)
    c_s = float(np.sqrt(1.0 * 1.4 * 1.0 ** 0.4))
    pert = 1e-4 * np.exp(-xa**2 / 0.5)
    rho_p = 1.0 + pert
    pulse = fluids.CompressibleState(
        ScalarField(ga, rho_p), ScalarField(ga, np.zeros(512)),
        CovectorField(ga, [rho_p * c_s * pert]), U)
    T = 6.0
    for _ in range(int(T / 0.01)):
        pulse = fluids.compressible_step(pulse, 0.01)
    peak = float(xa[np.argmax(pulse.rho.values - 1.0)])
    return [
        ("mass_drift", abs(mass1 - mass0), 1e-10),
        ("entropy_drift", abs(ent1 - ent0), 1e-10),
        ("acoustic_speed_rel_error", abs(peak / T - c_s) / c_s, 1e-2),
    ]


# ---------------------------------------------------------------------------
# registry

_COMMON = {"hbar": (1.0, 1e-6, 1e3)}

_REGISTRY = {
    "synchro-conserve": (
        "Energy and emergence-measure conservation of the synchronicity transport",
        "phase-transport conservation laws",
        {"points": (128, 16, 2048), "dt": (5e-4, 1e-7, 0.1),
         "steps": (1000, 1, 10**6), "curvature": (1.0, 0.0, 100.0), **_COMMON},
        _exp_synchro_conserve,
    ),
    "classical-liouville": (
        "Phase-space Liouville transport against the canonical characteristics",
        "classical Liouville equivalence",
        {"points": (128, 16, 512), "dt": (1e-3, 1e-6, 0.1)},
        _exp_classical_liouville,
    ),
    "quantum-schrodinger": (
        "Harmonic spectrum and coherent-state motion of the split-step solver",
        "Schrodinger reduction",
        {"points": (128, 16, 512), "box": (20.0, 4.0, 200.0),
         "dt": (5e-4, 1e-7, 0.1), "dm_points": (64, 16, 512),
         "dm_dt": (1e-3, 1e-7, 0.1), **_COMMON},
        _exp_quantum_schrodinger,
    ),
    "quantum-duality": (
        "Observable/functional duality through the Wigner representation",
        "observable-functional duality",
        {"points": (64, 16, 512), "box": (20.0, 4.0, 200.0), **_COMMON},
        _exp_quantum_duality,
    ),
    "bridge-wigner": (
        "Wigner marginals, Gaussian closed form, and interference negativity",
        "Wigner phase-space representation",
        {"points": (128, 16, 512), "box": (20.0, 4.0, 200.0), **_COMMON},
        _exp_bridge_wigner,
    ),
    "bridge-madelung": (
        "Hydrodynamic residuals of the Madelung decomposition",
        "quantum hydrodynamics with the quantum stress",
        {"points": (256, 16, 1024), "box": (20.0, 4.0, 200.0),
         "dt": (1e-3, 1e-6, 0.1), **_COMMON},
        _exp_bridge_madelung,
    ),
    "bridge-limit": (
        "Quantum-vs-classical phase-space distance and its hbar trend",
        "classical limit of the Wigner flow",
        {"points": (128, 16, 512), "box": (20.0, 4.0, 200.0),
         "dt": (0.01, 1e-6, 0.5), "quartic_eps": (0.05, 0.0, 1.0),
         "free_points": (1024, 64, 4096), "free_box": (240.0, 8.0, 2000.0),
         **_COMMON},
        _exp_bridge_limit,
    ),
    "liepoisson-core": (
        "Null-Lagrangian pairing, coadjoint duality, and the synchro cross-check",
        "Lie-Poisson form of the transport",
        {"points": (96, 16, 1024), "dt": (1e-3, 1e-6, 0.1)},
        _exp_liepoisson_core,
    ),
    "spin-eigen": (
        "Angular and half-integer spin operator eigenstructure and Pauli blocks",
        "spin operator algebra",
        {"n_theta": (64, 16, 256), "n_phi": (64, 32, 512), **_COMMON},
        _exp_spin_eigen,
    ),
    "spin-bell": (
        "Singlet CHSH value and the product-state bound",
        "Bell/CHSH correlation bound",
        {"product_trials": (1000, 1, 10**6)},
        _exp_spin_bell,
    ),
    "thermo-gibbs": (
        "Entropy maximization against closed-form Gibbs weights",
        "grand-canonical occupation laws",
        {"tables": (30, 1, 10**4)},
        _exp_thermo_gibbs,
    ),
    "fluid-euler": (
        "Taylor-Green steadiness and inviscid invariants of 2D Euler",
        "incompressible Euler reduction",
        {"points": (128, 32, 512), "dt": (5e-3, 1e-6, 0.1),
         "t_final": (10.0, 0.1, 100.0)},
        _exp_fluid_euler,
    ),
    "fluid-compressible": (
        "Mass/entropy conservation and the acoustic speed of the compressible system",
        "isentropic conservation laws and pressure law",
        {"points": (128, 32, 1024), "dt": (2e-3, 1e-6, 0.1),
         "steps": (1000, 1, 10**6)},
        _exp_fluid_compressible,
    ),
}


def list_experiments():
    """Static registry dump: (name, description, anchor) rows."""
    return [(name, entry[0], entry[1]) for name, entry in _REGISTRY.items()]


def run(experiment, config=None, outdir=".", seed=0):
    """Run one experiment and write its records; returns the record list."""
    if experiment not in _REGISTRY:
        raise ConfigError(
            f"unknown experiment {experiment!r}; "
            f"known: {', '.join(sorted(_REGISTRY))}")
    description, anchor, schema, fn = _REGISTRY[experiment]
    cfg = ExperimentConfig(experiment, schema, config, seed=seed)
    os.makedirs(outdir, exist_ok=True)
    start = time.perf_counter()
    raw = fn(cfg, outdir)
    elapsed = time.perf_counter() - start
    records = [ResultRecord.check(experiment, metric, value, tol, elapsed)
               for metric, value, tol in raw]
    jsonl = os.path.join(outdir, f"{experiment}-records.jsonl")
    with open(jsonl, "w") as fh:
        for r in records:
            fh.write(json.dumps({
                "experiment": r.experiment, "metric": r.metric,
                "value": r.value,
                "tolerance": list(r.tolerance)
                if isinstance(r.tolerance, (tuple, list)) else r.tolerance,
                "pass": r.passed, "wall_time": r.wall_time,
            }) + "\n")
    csvp = os.path.join(outdir, f"{experiment}-records.csv")
    with open(csvp, "w") as fh:
        fh.write("experiment,metric,value,tolerance,pass,wall_time\n")
        for r in records:
            fh.write(",".join([
                r.experiment, r.metric, _FMT % r.value, r.tolerance_text(),
                str(r.passed), "%.3f" % r.wall_time,
            ]) + "\n")
    return records


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="protomech",
        description="Run the geometric-mechanics acceptance experiments.")
    parser.add_argument("experiment",
                        help="experiment name, or 'list' to enumerate")
    parser.add_argument("--config", default=None,
                        help="JSON file with parameter overrides")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if args.experiment == "list":
        rows = list_experiments()
        width = max(len(r[0]) for r in rows)
        for name, desc, anchor in rows:
            print(f"{name:<{width}}  {desc}  [{anchor}]")
        return 0

    overrides = None
    if args.config:
        try:
            with open(args.config) as fh:
                overrides = json.load(fh)
        except json.JSONDecodeError as exc:
            print(f"config parse error at line {exc.lineno}, column "
                  f"{exc.colno}: {exc.msg}", file=sys.stderr)
            return 2
    try:
        records = run(args.experiment, overrides, args.out, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    width = max(len(r.metric) for r in records)
    for r in records:
        flag = "pass" if r.passed else "FAIL"
        print(f"{r.experiment}  {r.metric:<{width}}  "
              f"value={r.value:.6e}  tol={r.tolerance_text()}  {flag}")
    return 0 if all(r.passed for r in records) else 1


if __name__ == "__main__":
    sys.exit(main())
