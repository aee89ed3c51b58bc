"""Occupation laws from constrained entropy maximization.

Stationarizing the grand potential over mixture weights reproduces the
Gibbs assignment, and the right level tables turn it into the Fermi-Dirac
and Bose-Einstein occupations, meeting Maxwell-Boltzmann at high
temperature.
"""

import numpy as np

from protomech import thermo

print("Single fermionic mode, E = 1, beta = 1, mu = 0:")
fd = thermo.maximize_entropy(thermo.fermionic_mode(1.0), beta=1.0, mu=0.0)
print(f"  occupation from the optimizer {fd.mean_number():.10f}")
print(f"  closed form 1/(e + 1)        {1 / (np.e + 1):.10f}")

print("\nSingle bosonic mode truncated at 40 quanta:")
be = thermo.maximize_entropy(thermo.bosonic_mode(1.0, 40), beta=1.0, mu=0.0)
print(f"  occupation {be.mean_number():.10f}  "
      f"(1/(e - 1) = {1 / (np.e - 1):.10f})")

print("\nOptimizer against the closed form on a random 10-level table:")
rng = np.random.default_rng(1)
rows = [(rng.uniform(-2, 3), int(rng.integers(0, 4)),
         int(rng.integers(1, 3))) for _ in range(10)]
table = thermo.SpectrumTable(rows)
opt = thermo.maximize_entropy(table, beta=2.3, mu=0.4)
gibbs = thermo.gibbs_state(table, beta=2.3, mu=0.4)
l1 = float(np.sum(np.abs(opt.weights - gibbs.weights) * table.degeneracies))
print(f"  L1 distance {l1:.2e}")
print(f"  grand potential at the optimum {thermo.grand_potential(opt):+.8f}")

print("\nHigh-temperature limit, beta (E - mu) = 7:")
n_fd = thermo.occupation(7.0, 1.0, 0.0, "fermi")
n_mb = thermo.occupation(7.0, 1.0, 0.0, "boltzmann")
print(f"  Fermi-Dirac {n_fd:.8e} vs Maxwell-Boltzmann {n_mb:.8e} "
      f"(relative gap {abs(n_fd - n_mb) / n_mb:.2e})")

print("\nZero-temperature limit on a gapped table:")
cold = thermo.maximize_entropy(
    thermo.SpectrumTable([(0.0, 0), (1.0, 0), (2.0, 1)]), beta=1e3, mu=0.0)
print(f"  weights {np.round(cold.weights, 10)}")
