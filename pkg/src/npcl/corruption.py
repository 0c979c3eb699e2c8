"""Seeded label-corruption generators.

Two flip models, each applied as an independent per-sample coin with
probability ``rate``:

* symmetric: the label is replaced by a uniform draw over the K-1 other
  classes
* pair: the label is replaced by its cyclic successor ``(y + 1) % K``

Randomness comes from ``numpy.random.default_rng(seed)`` (PCG64), with the
coin vector drawn before the replacement draws, so a (kind, rate, seed, K)
tuple pins down the corrupted labels bit for bit on any platform.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

__all__ = [
    "CorruptionSpec",
    "flip_symmetric",
    "flip_pair",
    "corrupt_labels",
    "corrupt_dataset",
    "write_sidecar",
    "read_sidecar",
]


@dataclass(frozen=True)
class CorruptionSpec:
    kind: str  # "symmetric" | "pair"
    rate: float
    seed: int
    num_classes: int

    def __post_init__(self):
        if self.kind not in ("symmetric", "pair"):
            raise ValueError(f"unknown corruption kind {self.kind!r}")
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError(f"rate must lie in [0, 1], got {self.rate}")
        if self.num_classes < 2:
            raise ValueError("need at least 2 classes")


def _check_labels(labels, num_classes):
    y = np.asarray(labels)
    if not np.issubdtype(y.dtype, np.integer):
        raise ValueError("labels must be integers")
    if np.any(y < 0) or np.any(y >= num_classes):
        raise ValueError(f"labels out of range [0, {num_classes})")
    return y.astype(np.int64)


def flip_symmetric(labels, spec: CorruptionSpec):
    """Flip each label with prob ``rate`` to a uniform wrong class.

    Returns ``(corrupted, flags)``; flags mark the flipped entries.
    """
    y = _check_labels(labels, spec.num_classes)
    rng = np.random.default_rng(spec.seed)
    flags = rng.random(y.size) < spec.rate
    # offset in 1..K-1 lands uniformly on the classes other than y
    offsets = rng.integers(1, spec.num_classes, size=y.size)
    corrupted = np.where(flags, (y + offsets) % spec.num_classes, y)
    return corrupted, flags


def flip_pair(labels, spec: CorruptionSpec):
    """Flip each label with prob ``rate`` to its cyclic successor class."""
    y = _check_labels(labels, spec.num_classes)
    rng = np.random.default_rng(spec.seed)
    flags = rng.random(y.size) < spec.rate
    corrupted = np.where(flags, (y + 1) % spec.num_classes, y)
    return corrupted, flags


def corrupt_labels(labels, spec: CorruptionSpec):
    if spec.kind == "symmetric":
        return flip_symmetric(labels, spec)
    return flip_pair(labels, spec)


def corrupt_dataset(dataset, spec: CorruptionSpec):
    """Corrupted copy of a dataset; originals kept as ``clean_labels``."""
    from .data import Dataset

    if spec.num_classes != dataset.num_classes:
        raise ValueError("corruption spec and dataset disagree on class count")
    corrupted, _ = corrupt_labels(dataset.labels, spec)
    return Dataset(
        features=dataset.features,
        labels=corrupted,
        num_classes=dataset.num_classes,
        clean_labels=dataset.labels.copy(),
    )


def write_sidecar(path, spec: CorruptionSpec, flags):
    """Record the corruption next to a serialized dataset.

    The sidecar stores the spec, the sample count, and the indices of the
    flipped entries, which together reproduce the flag vector exactly.
    """
    flags = np.asarray(flags, dtype=bool)
    payload = {
        "spec": asdict(spec),
        "num_samples": int(flags.size),
        "flipped_indices": np.flatnonzero(flags).tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def read_sidecar(path):
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    spec = CorruptionSpec(**payload["spec"])
    flags = np.zeros(payload["num_samples"], dtype=bool)
    flags[np.asarray(payload["flipped_indices"], dtype=np.int64)] = True
    return spec, flags
