"""Worst-case reweighted risk and why plain 0-1 risk is enough to rank models.

An adversary may reweight the samples with any nonnegative, mean-one vector
whose chi-square divergence from uniform stays within delta.  For 0/1
losses the worst case has a closed form, checked here against a projected
gradient ascent solver that knows nothing about it, and ranking models by
plain risk is the same as ranking them by worst-case risk until the latter
saturates at 1.
"""

import numpy as np

from npcl import (
    AdvRiskSpec,
    adversarial_risk_numeric,
    check_monotonicity,
    empirical_adversarial_risk,
)

rng = np.random.default_rng(0)

losses = np.zeros(40)
losses[:10] = 1.0  # plain risk 0.25
print("plain risk 0.25; worst case as the budget grows:")
print(f"{'delta':>8} {'closed form':>12} {'solver':>12}")
for delta in (0.0, 0.01, 0.1, 0.5, 1.0, 3.0, 10.0):
    spec = AdvRiskSpec(delta)
    cf = empirical_adversarial_risk(losses, spec)
    nm = adversarial_risk_numeric(losses, spec)
    print(f"{delta:8.2f} {cf:12.6f} {nm:12.6f}")
print("saturates at 1 once delta reaches (1 - p) / p = 3")

print()
print("order preservation between plain and worst-case risk:")
for delta in (0.01, 0.1, 1.0):
    spec = AdvRiskSpec(delta)
    vectors = []
    for _ in range(20):
        v = np.zeros(30)
        v[rng.choice(30, size=int(rng.integers(0, 31)), replace=False)] = 1.0
        vectors.append(v)
    report = check_monotonicity(vectors, spec)
    print(f"  delta={delta}: {report.pairs_checked} ordered pairs, "
          f"{len(report.violations)} violations")
