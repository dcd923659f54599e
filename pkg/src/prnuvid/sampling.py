"""Frame sampling at rate 1/N: pick one of each N, or average blocks of N.

Select mode keeps frames 0, N, 2N, ...; average mode partitions the stream
into consecutive disjoint blocks of exactly N frames (a trailing partial
block is dropped) and replaces each block by its element-wise mean, which
divides additive noise power by N while leaving the multiplicative sensor
pattern intact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MODES = ("select", "average")


@dataclass(frozen=True)
class SamplingPlan:
    """Frame-index groups produced for one video: singletons in select mode,
    blocks of exactly n in average mode."""

    mode: str
    n: int
    groups: tuple[tuple[int, ...], ...] = field(default_factory=tuple)


def plan(frame_count: int, n: int, mode: str = "select") -> SamplingPlan:
    """Build the sampling plan for a video of `frame_count` frames at rate 1/n."""
    if mode not in MODES:
        raise ValueError(f"unknown sampling mode {mode!r}, expected one of {MODES}")
    if n < 1:
        raise ValueError("sampling rate denominator n must be >= 1")
    if frame_count < 1:
        raise ValueError("frame_count must be >= 1")
    if mode == "select":
        groups = tuple((i,) for i in range(0, frame_count, n))
    else:
        groups = tuple(
            tuple(range(g * n, (g + 1) * n)) for g in range(frame_count // n)
        )
    return SamplingPlan(mode=mode, n=n, groups=groups)


def average_block(frames: list[np.ndarray]) -> np.ndarray:
    """Element-wise arithmetic mean of equally sized frames."""
    if not frames:
        raise ValueError("cannot average an empty frame list")
    first = np.asarray(frames[0], dtype=np.float64)
    acc = first.copy()
    for f in frames[1:]:
        f = np.asarray(f, dtype=np.float64)
        if f.shape != first.shape:
            raise ValueError(f"dimension mismatch in block: {f.shape} vs {first.shape}")
        acc += f
    return acc / len(frames)
