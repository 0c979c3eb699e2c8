"""How the selection objectives squeeze between the 0-1 loss and the plain sum.

For any margins, the objective family interleaves as

    J  <=  Q  <=  Q-hat  <=  J-hat        and        J <= 2E <= 2E-hat <= 2J-hat

where J counts misclassifications, J-hat sums the hinge losses, Q/E are the
whole-set objectives and Q-hat/E-hat their mini-batch versions.  Run this to
watch the chain on random batches.
"""

import numpy as np

from npcl import BatchPartition, MarginBatch, ThresholdMode, batched_objective, curriculum_objective

rng = np.random.default_rng(0)

print(f"{'J':>6} {'Q':>9} {'Q-hat':>9} {'2E':>9} {'2E-hat':>9} {'J-hat':>9}")
for _ in range(8):
    margins = rng.normal(0.4, 1.5, size=64)
    batch = MarginBatch.from_margins(margins)
    part = BatchPartition.contiguous(len(batch), 16)

    q, _ = curriculum_objective(batch, ThresholdMode.full_q())
    q_hat, _ = batched_objective(batch, part, ThresholdMode.full_q())
    e, _ = curriculum_objective(batch, ThresholdMode.full_e())
    e_hat, _ = batched_objective(batch, part, ThresholdMode.full_e())

    j, j_hat = batch.zero_one_total, batch.loss_total
    assert j <= q <= q_hat <= j_hat
    assert j <= 2 * e <= 2 * e_hat <= 2 * j_hat
    print(f"{j:6d} {q:9.3f} {q_hat:9.3f} {2 * e:9.3f} {2 * e_hat:9.3f} {j_hat:9.3f}")

print()
print("the whole-set objectives sit closest to J; batching loosens them a")
print("little, and everything stays below the conventional sum of losses")
