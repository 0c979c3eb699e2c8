"""Worst-case reweighted 0-1 risk under a chi-square divergence budget.

For 0/1 per-sample losses with mean ``p`` and budget ``delta``, the
worst case over weights ``r`` with ``mean(r) = 1``, ``r >= 0`` and
``mean((r - 1)^2) <= delta`` is

    min(1, p + sqrt(delta * p * (1 - p)))

Derivation sketch: averaging the weights within the loss-1 group and
within the loss-0 group preserves the objective and the mean constraint
and (by convexity) only loosens the quadratic one, so a two-level weight
vector is optimal.  With ``a`` on the k loss-1 samples, the mean
constraint fixes the other level, the quadratic constraint reduces to
``(a - 1)^2 p / (1 - p) <= delta``, and the objective ``p * a`` is
maximized at the boundary, capped where the loss-0 weights hit zero.
The cap binds exactly when ``p >= 1 / (1 + delta)``, where the risk
saturates at 1.

``adversarial_risk_numeric`` ignores all of that and maximizes over the
full n-dimensional weight set by projected gradient ascent, with the
projection computed from its own KKT system.  The two routes validate
each other; the closed form is what the fast API returns.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "AdvRiskSpec",
    "empirical_adversarial_risk",
    "adversarial_risk_numeric",
    "project_chi_square_ball",
    "check_monotonicity",
    "MonotonicityReport",
]


@dataclass(frozen=True)
class AdvRiskSpec:
    delta: float
    divergence: str = "chi-square"

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("divergence budget must be nonnegative")
        if self.divergence != "chi-square":
            raise ValueError(f"unsupported divergence {self.divergence!r}")


def _check_losses01(losses01):
    l = np.asarray(losses01, dtype=np.float64)
    if l.ndim != 1 or l.size == 0:
        raise ValueError("need a non-empty 1-D loss vector")
    if not np.all((l == 0.0) | (l == 1.0)):
        raise ValueError("losses must be 0/1 valued")
    return l


def empirical_adversarial_risk(losses01, spec: AdvRiskSpec):
    """Closed-form worst-case risk; equals the plain risk at delta = 0."""
    l = _check_losses01(losses01)
    p = float(l.mean())
    if p in (0.0, 1.0):
        return p
    return min(1.0, p + np.sqrt(spec.delta * p * (1.0 - p)))


def project_chi_square_ball(w, delta):
    """Euclidean projection onto {r : mean(r)=1, r>=0, mean((r-1)^2) <= delta}.

    KKT: with multiplier ``lam >= 0`` on the quadratic constraint and ``mu``
    on the mean, the projection is ``r = max(0, (w + lam - mu) / (1 + lam))``.
    For fixed ``lam``, ``mu`` solves ``sum(max(0, w + lam - mu)) = n`` exactly
    via the sorted-prefix formula; ``lam`` is then bisected until the
    quadratic constraint is tight (or ``lam = 0`` already satisfies it).
    """
    w = np.asarray(w, dtype=np.float64)
    n = w.size
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if delta == 0.0:
        return np.ones(n)

    w_sorted = np.sort(w)[::-1]
    cumsum = np.cumsum(w_sorted)

    def solve_mu(lam):
        # largest k active entries: mu = ((cumsum_k + k*lam) - n*(1+lam)) / k,
        # valid when the k-th sorted value stays above the cut
        shifted = w_sorted + lam
        ks = np.arange(1, n + 1)
        mu_candidates = (cumsum + ks * lam - n * (1.0 + lam)) / ks
        valid = shifted - mu_candidates > 0
        k = int(np.max(np.flatnonzero(valid))) + 1
        return mu_candidates[k - 1]

    def r_of(lam):
        mu = solve_mu(lam)
        return np.maximum(0.0, (w + lam - mu) / (1.0 + lam))

    def excess(lam):
        r = r_of(lam)
        return float(np.mean((r - 1.0) ** 2)) - delta

    if excess(0.0) <= 0:
        return r_of(0.0)
    lo, hi = 0.0, max(1.0, float(np.max(np.abs(w))))
    while excess(hi) > 0:
        hi *= 4.0
        if hi > 1e14:
            break
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
    return r_of(hi)


def adversarial_risk_numeric(losses01, spec: AdvRiskSpec, max_step=1e8, polish=6):
    """Worst-case risk by projected gradient ascent over the weight set.

    The objective ``mean(r * l)`` is linear, so projected steps along ``l``
    with geometrically growing length walk to the boundary maximizer; the
    step is capped so the projection arithmetic keeps its precision, and a
    few fixed-length steps at the cap polish the active face.
    """
    l = _check_losses01(losses01)
    n = l.size
    if spec.delta == 0.0 or l.sum() in (0.0, n):
        return float(l.mean())

    r = np.ones(n)
    best = float(np.mean(r * l))
    step = 1.0
    grow = int(np.ceil(np.log2(max_step) / 2.0))
    for k in range(grow + polish):
        r = project_chi_square_ball(r + step * l, spec.delta)
        best = max(best, float(np.mean(r * l)))
        if k < grow:
            step = min(step * 4.0, max_step)
    return best


@dataclass
class MonotonicityReport:
    """Outcome of the pairwise order check between plain and worst-case risk."""

    delta: float
    pairs_checked: int
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def check_monotonicity(loss_vectors, spec: AdvRiskSpec):
    """Verify the plain/worst-case order relationship over all ordered pairs.

    Unsaturated side: when the worst-case risk of ``a`` is below 1, the
    plain risks and worst-case risks of ``a`` and ``b`` must be ordered the
    same way.  Saturated side: when ``a`` saturates at 1 and its plain risk
    is not above ``b``'s, then ``b`` must saturate too.  (Only this forward
    implication is generally valid: saturation covers the whole upper
    interval of plain risks, so two saturated models can differ in plain
    risk.)
    """
    vectors = [_check_losses01(v) for v in loss_vectors]
    if len(vectors) < 2:
        raise ValueError("need at least two loss vectors")
    lengths = {v.size for v in vectors}
    if len(lengths) != 1:
        raise ValueError("loss vectors must have equal length")

    plain = [float(v.mean()) for v in vectors]
    adv = [empirical_adversarial_risk(v, spec) for v in vectors]
    report = MonotonicityReport(delta=spec.delta, pairs_checked=0)
    for i in range(len(vectors)):
        for j in range(len(vectors)):
            if i == j:
                continue
            report.pairs_checked += 1
            if adv[i] < 1.0:
                if (plain[i] < plain[j]) != (adv[i] < adv[j]):
                    report.violations.append((i, j, plain[i], plain[j], adv[i], adv[j]))
            elif plain[i] <= plain[j] and adv[j] != 1.0:
                report.violations.append((i, j, plain[i], plain[j], adv[i], adv[j]))
    return report
