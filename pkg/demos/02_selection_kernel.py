"""The selection kernel at work: sort, prefix sums, threshold, prune.

The kernel minimizes  max(sum of selected losses, C - #selected)  over all
binary masks by scanning the sorted losses once.  Lowering C below n prunes
the largest losses, which is the noise-pruning move: with C = (1 - eps) * n
roughly eps * n samples fall off the end.
"""

import numpy as np

from npcl import ThresholdMode, brute_force_optimize, compute_threshold, partial_optimize

losses = np.array([0.02, 0.0, 1.7, 0.31, 0.0, 2.4, 0.08, 0.55])
n = losses.size

print("losses:", losses)
print()
print(f"{'C':>6} {'selected':>9} {'objective':>10} {'brute force':>12}   mask")
for c in (float(n + 2), float(n), 0.75 * n, 0.5 * n, 2.0):
    result = partial_optimize(losses, c)
    exact = brute_force_optimize(losses, c)
    assert result.objective == exact.objective
    mask = "".join("x" if keep else "." for keep in result.mask)
    print(f"{c:6.1f} {result.selected_count:9d} {result.objective:10.3f} {exact.objective:12.3f}   {mask}")

print()
print("thresholds the trainer would use on this batch (3 misclassified):")
for mode in (
    ThresholdMode.full_q(),
    ThresholdMode.full_e(),
    ThresholdMode.npcl_fixed(0.25),
    ThresholdMode.npcl_adaptive(0.25),
):
    c = compute_threshold(mode, n, misclassified_count=3)
    kept = partial_optimize(losses, c).selected_count
    print(f"  {str(mode):<20} C = {c:6.3f}  -> keeps {kept}/{n}")
