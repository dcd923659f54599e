"""Video-level source camera identification against an enrolled registry.

Three methods are provided:

* voting        - each sampled frame votes for its maximum-PCE camera;
                  simple majority wins.
* pattern corr  - a query fingerprint is built from the sampled frames and
                  compared to each stored fingerprint (Pearson or PCE).
* pce vectors   - per-frame vectors of per-camera PCE scores are averaged
                  (optionally normalized by their own maximum first) and the
                  argmax of the mean vector decides.

Frames larger than the enrollment resolution are nearest-neighbor downscaled
before any processing; smaller frames are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import correlation, denoise, fingerprint, imaging
from .errors import CompatibilityError, InputDataError

METHODS = ("voting", "patcorr", "pcevec")


@dataclass
class Registry:
    """Enrolled fingerprints in a fixed order with unique camera ids and a
    common resolution."""

    fingerprints: list[fingerprint.Fingerprint]

    def __post_init__(self) -> None:
        if not self.fingerprints:
            raise ValueError("registry needs at least one fingerprint")
        shape = self.fingerprints[0].shape
        seen: set[str] = set()
        for fp in self.fingerprints:
            if fp.shape != shape:
                raise ValueError(
                    f"fingerprint dimensions differ: {fp.camera_id} has {fp.shape}, expected {shape}"
                )
            if fp.camera_id in seen:
                raise ValueError(f"duplicate camera id in registry: {fp.camera_id!r}")
            seen.add(fp.camera_id)

    @property
    def camera_ids(self) -> list[str]:
        return [fp.camera_id for fp in self.fingerprints]

    @property
    def resolution(self) -> tuple[int, int]:
        return self.fingerprints[0].shape

    def __len__(self) -> int:
        return len(self.fingerprints)


@dataclass
class IdentificationResult:
    predicted_id: str
    method: str
    camera_ids: list[str]
    evidence: list[float]
    frames_used: int
    tie: bool = False
    options: dict = field(default_factory=dict)


def harmonize_frame(frame: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Bring a query frame to the enrollment resolution: pass through exact
    matches, nearest-neighbor downscale larger frames, reject smaller ones."""
    fr, fc = frame.shape
    if (fr, fc) == (rows, cols):
        return frame
    if fr >= rows and fc >= cols:
        return imaging.rescale_nearest(frame, rows, cols)
    raise CompatibilityError(
        f"query frame {fr}x{fc} is smaller than the enrollment resolution {rows}x{cols}"
    )


def score_frame(
    frame: np.ndarray,
    registry: Registry,
    sigma0: float = denoise.DEFAULT_SIGMA0,
    levels: int = denoise.DEFAULT_LEVELS,
    modulate: bool = True,
) -> np.ndarray:
    """Per-camera PCE scores of one frame.

    The frame's residual W is correlated against F_c * I (template modulated
    by the frame's denoised estimate I) or against F_c alone when
    modulate=False.
    """
    frame = np.asarray(frame, dtype=np.float64)
    if frame.shape != registry.resolution:
        raise ValueError(
            f"frame {frame.shape} does not match registry resolution {registry.resolution}"
        )
    residual = denoise.extract_residual(frame, sigma0, levels)
    estimate = frame - residual
    scores = np.empty(len(registry))
    for i, fp in enumerate(registry.fingerprints):
        template = fp.matrix * estimate if modulate else fp.matrix
        scores[i] = correlation.pce(residual, template).pce
    return scores


def _argmax_with_tie(values: Sequence[float]) -> tuple[int, bool]:
    arr = np.asarray(values)
    idx = int(np.argmax(arr))
    return idx, int(np.sum(arr == arr[idx])) > 1


def aggregate_votes(winners: Sequence[int], registry: Registry) -> IdentificationResult:
    """Majority vote over per-frame winner indices; ties go to the camera
    enrolled earliest and are flagged."""
    if len(winners) == 0:
        raise InputDataError("empty frame stream")
    tally = np.bincount(list(winners), minlength=len(registry))
    idx, tie = _argmax_with_tie(tally)
    return IdentificationResult(
        predicted_id=registry.camera_ids[idx],
        method="voting",
        camera_ids=registry.camera_ids,
        evidence=[float(t) for t in tally],
        frames_used=len(winners),
        tie=tie,
    )


def aggregate_pce_vectors(
    vectors: Sequence[np.ndarray],
    registry: Registry,
    normalize: bool = False,
) -> IdentificationResult:
    """Mean of per-frame score vectors (each optionally divided by its own
    maximum; frames whose maximum is <= 0 carry no evidence and are skipped)."""
    if len(vectors) == 0:
        raise InputDataError("empty frame stream")
    total = np.zeros(len(registry))
    used = 0
    for vec in vectors:
        vec = np.asarray(vec, dtype=np.float64)
        if normalize:
            peak = vec.max()
            if peak <= 0:
                continue
            vec = vec / peak
        total += vec
        used += 1
    if used == 0:
        raise InputDataError("all frames skipped under normalization (no positive maxima)")
    mean_vec = total / used
    idx, tie = _argmax_with_tie(mean_vec)
    return IdentificationResult(
        predicted_id=registry.camera_ids[idx],
        method="pcevec",
        camera_ids=registry.camera_ids,
        evidence=[float(v) for v in mean_vec],
        frames_used=len(vectors),
        tie=tie,
        options={"normalize": normalize},
    )


def compare_pattern(
    query: fingerprint.Fingerprint,
    registry: Registry,
    metric: str = "pearson",
) -> IdentificationResult:
    """Compare a query fingerprint to every stored one and take the argmax."""
    if metric not in ("pearson", "pce"):
        raise ValueError(f"unknown metric {metric!r}, expected 'pearson' or 'pce'")
    scores = []
    for fp in registry.fingerprints:
        if metric == "pearson":
            scores.append(correlation.pearson(query.matrix, fp.matrix))
        else:
            scores.append(correlation.pce(query.matrix, fp.matrix).pce)
    idx, tie = _argmax_with_tie(scores)
    return IdentificationResult(
        predicted_id=registry.camera_ids[idx],
        method="patcorr",
        camera_ids=registry.camera_ids,
        evidence=[float(s) for s in scores],
        frames_used=query.frame_count,
        tie=tie,
        options={"metric": metric},
    )


def identify_voting(
    frames: Iterable[np.ndarray],
    registry: Registry,
    sigma0: float = denoise.DEFAULT_SIGMA0,
    levels: int = denoise.DEFAULT_LEVELS,
    modulate: bool = True,
) -> IdentificationResult:
    rows, cols = registry.resolution
    winners = []
    for f in frames:
        f = harmonize_frame(np.asarray(f, dtype=np.float64), rows, cols)
        scores = score_frame(f, registry, sigma0, levels, modulate)
        winners.append(int(np.argmax(scores)))
    return aggregate_votes(winners, registry)


def identify_pattern_corr(
    frames: Iterable[np.ndarray],
    registry: Registry,
    metric: str = "pearson",
    sigma0: float = denoise.DEFAULT_SIGMA0,
    levels: int = denoise.DEFAULT_LEVELS,
) -> IdentificationResult:
    rows, cols = registry.resolution
    acc = fingerprint.FingerprintAccumulator.empty(rows, cols)
    for f in frames:
        f = harmonize_frame(np.asarray(f, dtype=np.float64), rows, cols)
        fingerprint.accumulate(acc, f, sigma0, levels)
    if acc.frame_count == 0:
        raise InputDataError("empty frame stream")
    return compare_pattern(fingerprint.finalize(acc, "query"), registry, metric)


def identify_pce_vectors(
    frames: Iterable[np.ndarray],
    registry: Registry,
    normalize: bool = False,
    sigma0: float = denoise.DEFAULT_SIGMA0,
    levels: int = denoise.DEFAULT_LEVELS,
    modulate: bool = True,
) -> IdentificationResult:
    rows, cols = registry.resolution
    vectors = []
    for f in frames:
        f = harmonize_frame(np.asarray(f, dtype=np.float64), rows, cols)
        vectors.append(score_frame(f, registry, sigma0, levels, modulate))
    return aggregate_pce_vectors(vectors, registry, normalize)
