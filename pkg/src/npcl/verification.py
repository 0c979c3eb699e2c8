"""Runnable check suites for the library's core guarantees.

Each suite returns ``CheckResult`` rows; the CLI renders them as a
pass/fail table.  The suites are sized to finish in seconds while still
exercising the same properties the full test suite pins down:

* selector: the O(n log n) kernel matches exhaustive enumeration, and the
  optimum satisfies the prefix-sum identities
* bounds: the objective values interleave as
  0-1 total <= whole-set <= partitioned <= plain sum (both families)
* gradients: analytic loss gradients match central finite differences
  through the MLP
* adversarial: closed-form worst-case risk matches the projected-ascent
  solver, and the plain/worst-case order relationship holds
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .adversarial import (
    AdvRiskSpec,
    adversarial_risk_numeric,
    check_monotonicity,
    empirical_adversarial_risk,
)
from .losses import BaseLoss
from .net import MlpParams, grad_check
from .objectives import BatchPartition, MarginBatch, batched_objective, curriculum_objective
from .selection import ThresholdMode, brute_force_optimize, partial_optimize

__all__ = ["CheckResult", "run_suites", "SUITES"]


@dataclass
class CheckResult:
    suite: str
    name: str
    ok: bool
    detail: str = ""


def _dyadic(rng, n, high=4.0):
    return rng.integers(0, int(high * 1024) + 1, size=n) / 1024.0


def selector_suite(rng):
    mismatches = 0
    identity_failures = 0
    trials = 300
    for _ in range(trials):
        n = int(rng.integers(1, 13))
        losses = _dyadic(rng, n)
        c = float(rng.uniform(0, 2 * n))
        fast = partial_optimize(losses, c)
        exact = brute_force_optimize(losses, c)
        if fast.objective != exact.objective:
            mismatches += 1
        t = fast.selected_count
        l_t = fast.prefix_sums[t - 1] if t > 0 else 0.0
        if l_t > c + 1.0 - t:
            identity_failures += 1
        if t < n and not (
            fast.prefix_sums[t] > c - t and fast.prefix_sums[t] > max(l_t, c - t)
        ):
            identity_failures += 1
    return [
        CheckResult("selector", "sort-kernel matches brute force", mismatches == 0,
                    f"{trials - mismatches}/{trials} instances"),
        CheckResult("selector", "optimum prefix-sum identities", identity_failures == 0,
                    f"{trials - identity_failures}/{trials} instances"),
    ]


def bounds_suite(rng):
    chain_failures = 0
    reduction_failures = 0
    trials = 300
    for _ in range(trials):
        n = 64
        margins = rng.integers(-3 * 1024, 3 * 1024 + 1, size=n) / 1024.0
        batch = MarginBatch.from_margins(margins)
        m = int(rng.choice([4, 8, 16]))
        perm = rng.permutation(n)
        part = BatchPartition([perm[i : i + m] for i in range(0, n, m)])
        j, j_hat = batch.zero_one_total, batch.loss_total
        q, _ = curriculum_objective(batch, ThresholdMode.full_q())
        q_hat, _ = batched_objective(batch, part, ThresholdMode.full_q())
        e, _ = curriculum_objective(batch, ThresholdMode.full_e())
        e_hat, _ = batched_objective(batch, part, ThresholdMode.full_e())
        if not (j <= q <= q_hat <= j_hat and j <= 2 * e <= 2 * e_hat <= 2 * j_hat and e <= q):
            chain_failures += 1
        vf, _ = curriculum_objective(batch, ThresholdMode.npcl_fixed(0.0))
        va, _ = curriculum_objective(batch, ThresholdMode.npcl_adaptive(0.0))
        if vf != e or va != q:
            reduction_failures += 1
    return [
        CheckResult("bounds", "bound chains interleave", chain_failures == 0,
                    f"{trials - chain_failures}/{trials} batches"),
        CheckResult("bounds", "zero-prior modes reduce to full modes", reduction_failures == 0,
                    f"{trials - reduction_failures}/{trials} batches"),
    ]


def gradients_suite(rng):
    worst = 0.0
    trials = 25
    kinds = [BaseLoss.hinge(), BaseLoss.soft(), BaseLoss.weighted(0.5)]
    for trial in range(trials):
        params = MlpParams.init([3, 6, 4], seed=int(rng.integers(0, 2**31)))
        x = rng.normal(0.0, 2.0, size=(3, 3))
        y = rng.integers(0, 4, size=3)
        worst = max(worst, grad_check(params, x, y, kinds[trial % len(kinds)]))
    return [
        CheckResult("gradients", "backprop matches finite differences", worst < 1e-5,
                    f"max relative error {worst:.2e}"),
    ]


def adversarial_suite(rng):
    worst = 0.0
    trials = 120
    for _ in range(trials):
        n = int(rng.integers(2, 40))
        losses = np.zeros(n)
        k = int(rng.integers(0, n + 1))
        losses[rng.choice(n, size=k, replace=False)] = 1.0
        spec = AdvRiskSpec(float(rng.uniform(0.0, 2.0)))
        worst = max(
            worst,
            abs(empirical_adversarial_risk(losses, spec) - adversarial_risk_numeric(losses, spec)),
        )
    violation_pairs = 0
    for delta in (0.01, 0.1, 1.0):
        spec = AdvRiskSpec(delta)
        for _ in range(60):
            n = int(rng.integers(2, 30))
            pair = []
            for _ in range(2):
                v = np.zeros(n)
                v[rng.choice(n, size=int(rng.integers(0, n + 1)), replace=False)] = 1.0
                pair.append(v)
            if not check_monotonicity(pair, spec).ok:
                violation_pairs += 1
    return [
        CheckResult("adversarial", "closed form matches solver", worst < 1e-6,
                    f"max disagreement {worst:.2e}"),
        CheckResult("adversarial", "risk order preserved", violation_pairs == 0,
                    f"{violation_pairs} violating pairs"),
    ]


SUITES = {
    "selector": selector_suite,
    "bounds": bounds_suite,
    "gradients": gradients_suite,
    "adversarial": adversarial_suite,
}


def run_suites(names=None, seed=0):
    """Run the named suites (all by default) and collect their results."""
    rng = np.random.default_rng(seed)
    results = []
    for name in names or SUITES:
        results.extend(SUITES[name](rng))
    return results
