"""Grand-canonical statistics: the grand potential, its constrained
stationarization over mixture weights, and the closed-form occupation laws.

The grand potential of a weight assignment over energy/particle-number
levels is

    Omega = (1/beta) <w ln w> + <w E> - mu <w N> + (1/beta)(<w> - 1),

with <.> the degeneracy-weighted sum and the 0 ln 0 = 0 convention.  Its
stationary point on the simplex is the Gibbs assignment
w ~ exp(-beta (E - mu N)), which reduces to the Bose-Einstein, Fermi-Dirac
and (at high temperature) Maxwell-Boltzmann occupations for the matching
level tables.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ThermoError",
    "SpectrumTable",
    "GrandState",
    "grand_potential",
    "entropy",
    "maximize_entropy",
    "gibbs_state",
    "occupation",
    "fermionic_mode",
    "bosonic_mode",
]


class ThermoError(ValueError):
    pass


@dataclass(frozen=True)
class Level:
    energy: float
    number: int
    degeneracy: int = 1


class SpectrumTable:
    """Finite list of (energy, particle number, degeneracy) levels."""

    def __init__(self, rows):
        levels = []
        for row in rows:
            e, n = float(row[0]), int(row[1])
            g = int(row[2]) if len(row) > 2 else 1
            if not np.isfinite(e):
                raise ThermoError("non-finite energy in table")
            if n < 0 or g <= 0:
                raise ThermoError("particle numbers must be >= 0, degeneracies > 0")
            levels.append(Level(e, n, g))
        if not levels:
            raise ThermoError("empty spectrum table")
        levels.sort(key=lambda lv: (lv.number, lv.energy))
        self.levels = levels

    @property
    def energies(self):
        return np.array([lv.energy for lv in self.levels])

    @property
    def numbers(self):
        return np.array([lv.number for lv in self.levels], dtype=float)

    @property
    def degeneracies(self):
        return np.array([lv.degeneracy for lv in self.levels], dtype=float)

    def __len__(self):
        return len(self.levels)


class GrandState:
    """Per-level weights with degeneracy-weighted normalization one."""

    def __init__(self, table: SpectrumTable, weights, beta: float, mu: float):
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (len(table),):
            raise ThermoError("one weight per table row required")
        if np.any(weights < 0):
            raise ThermoError(f"negative weight {weights.min()!r}")
        total = float(np.sum(weights * table.degeneracies))
        if abs(total - 1.0) > 1e-10:
            raise ThermoError(f"weights sum to {total!r}, not 1")
        if beta <= 0:
            raise ThermoError("beta must be positive")
        self.table = table
        self.weights = weights
        self.beta = float(beta)
        self.mu = float(mu)

    def mean_energy(self):
        return float(np.sum(self.weights * self.table.degeneracies
                            * self.table.energies))

    def mean_number(self):
        return float(np.sum(self.weights * self.table.degeneracies
                            * self.table.numbers))


def _xlogx(w):
    out = np.zeros_like(w)
    pos = w > 0
    out[pos] = w[pos] * np.log(w[pos])
    return out


def entropy(state: GrandState) -> float:
    """Mixing entropy -<w ln w>; zero exactly on single-row pure states."""
    return float(-np.sum(state.table.degeneracies * _xlogx(state.weights)))


def grand_potential(state: GrandState, table: SpectrumTable = None) -> float:
    """Omega evaluated on the given weights (0 ln 0 = 0)."""
    table = state.table if table is None else table
    g = table.degeneracies
    w = state.weights
    ln_term = float(np.sum(g * _xlogx(w)))
    total = float(np.sum(g * w))
    return (ln_term / state.beta
            + state.mean_energy()
            - state.mu * state.mean_number()
            + (total - 1.0) / state.beta)


def gibbs_state(table: SpectrumTable, beta: float, mu: float) -> GrandState:
    """Closed-form stationary weights w ~ exp(-beta (E - mu N))."""
    a = -beta * (table.energies - mu * table.numbers)
    a = a - a.max()
    w = np.exp(a)
    w = w / np.sum(w * table.degeneracies)
    return GrandState(table, w, beta, mu)


def maximize_entropy(table: SpectrumTable, beta: float, mu: float,
                     tol=1e-10, max_iter=100_000) -> GrandState:
    """Stationarize the grand potential over the weight simplex.

    Runs exponentiated gradient descent in log-weight coordinates, which
    keeps positivity without projections.  Convergence is declared when the
    simplex-tangent gradient falls below ``tol``; the result matches the
    closed-form Gibbs weights.
    """
    if beta <= 0:
        raise ThermoError("beta must be positive")
    g = table.degeneracies
    cost = table.energies - mu * table.numbers
    log_g = np.log(g)
    theta = np.zeros(len(table))  # log weights, kept normalized
    eta = 0.8
    for _ in range(max_iter):
        m = np.max(theta + log_g)
        theta = theta - (m + np.log(np.sum(np.exp(theta + log_g - m))))
        w = np.exp(theta)
        grad = (theta + 1.0) / beta + cost
        tangent = grad - np.sum(w * g * grad)
        if np.max(np.abs(tangent)) <= tol:
            return GrandState(table, w, beta, mu)
        theta = theta - eta * beta * tangent
    raise ThermoError(f"entropy maximization did not converge in {max_iter} "
                      f"iterations (beta={beta}, mu={mu})")


def occupation(mode_energy: float, beta: float, mu: float,
               statistics: str) -> float:
    """Single-mode occupation for 'fermi', 'bose' or 'boltzmann' statistics."""
    x = beta * (mode_energy - mu)
    if statistics in ("fermi", "fermi-dirac"):
        return float(1.0 / (np.exp(x) + 1.0))
    if statistics in ("bose", "bose-einstein"):
        if mode_energy <= mu:
            raise ThermoError(
                f"bosonic occupation diverges for E={mode_energy} <= mu={mu}")
        return float(1.0 / (np.exp(x) - 1.0))
    if statistics in ("boltzmann", "maxwell-boltzmann"):
        return float(np.exp(-x))
    raise ThermoError(f"unknown statistics {statistics!r}")


def fermionic_mode(energy: float) -> SpectrumTable:
    """Occupation table {0, 1} of a single fermionic mode."""
    return SpectrumTable([(0.0, 0), (float(energy), 1)])


def bosonic_mode(energy: float, n_max: int = 40) -> SpectrumTable:
    """Single bosonic mode truncated at n_max quanta.

    The truncation error of any Gibbs average is bounded by the geometric
    tail exp(-beta (E - mu) n_max) / (1 - ratio).
    """
    return SpectrumTable([(float(energy) * n, n) for n in range(n_max + 1)])


def write_occupation_sweep_csv(rows, path: str):
    """Sweep with columns (beta, mu, E, statistics, n)."""
    with open(path, "w") as fh:
        fh.write("beta,mu,E,statistics,n\n")
        for beta, mu, e, stat in rows:
            n = occupation(e, beta, mu, stat)
            fh.write(f"{beta:.17g},{mu:.17g},{e:.17g},{stat},{n:.17g}\n")
