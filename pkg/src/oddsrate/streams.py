"""Keyed random streams.

Every replication gets its own generator derived from the master seed and a
tuple of integers identifying it, so results do not depend on the order in
which replications run or on how they are split across workers.
"""

from __future__ import annotations

import zlib

import numpy as np

CALIBRATION = 0
MSE_STUDY = 1
POWER_STUDY = 2
DEMO = 3


def stream(seed: int, *key: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError("seed must be a nonnegative integer")
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)))


def label_key(label: str) -> int:
    """Stable integer key for a text label (e.g. a distribution spec string)."""
    return zlib.crc32(label.encode("utf-8"))
