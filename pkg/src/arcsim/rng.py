"""Counter-based random streams for reproducible trajectory ensembles.

A trajectory is addressed by an integer path under one master seed, e.g.
(protocol id, plan-point index, trajectory index). The path seeds a Philox
key; the step number goes into the high word of the Philox counter, so every
(trajectory, step) pair owns a private, deterministic stream regardless of
how work is scheduled across processes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def stream_key(master_seed: int, *path: int) -> np.ndarray:
    """Two uint64 key words derived from a master seed and an integer path."""
    if master_seed < 0:
        raise ValueError("master seed must be nonnegative")
    entropy = [int(master_seed)] + [int(p) for p in path]
    return np.random.SeedSequence(entropy).generate_state(2, np.uint64)


@dataclass(frozen=True, eq=False)
class TrajectoryStream:
    """Per-trajectory stream; step(k) yields an independent generator for step k."""

    key: np.ndarray

    def step(self, k: int) -> np.random.Generator:
        counter = np.array([0, 0, 0, int(k)], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=self.key, counter=counter))


def trajectory_stream(master_seed: int, *path: int) -> TrajectoryStream:
    return TrajectoryStream(stream_key(master_seed, *path))
