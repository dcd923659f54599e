"""Orchestration: enrollment from a manifest, registry persistence, and
identification of a frame directory against a registry.

All file-driven steps share one frame path: load, reduce to luminance,
harmonize to the enrollment resolution (nearest-neighbor downscale of larger
frames, done before any other processing), then sample or block-average.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterator

import numpy as np

from . import denoise, fingerprint, identify, imaging, sampling
from .errors import InputDataError
from .manifest import CameraEntry, DatasetManifest


def iter_harmonized(directory: str | os.PathLike, rows: int, cols: int,
                    rate: int, average: bool) -> Iterator[np.ndarray]:
    """Yield the sampled (or block-averaged) luminance frames of a video
    directory, already at the enrollment resolution."""
    paths = imaging.list_frames(directory)
    mode = "average" if average else "select"
    plan = sampling.plan(len(paths), rate, mode)
    for group in plan.groups:
        frames = [
            identify.harmonize_frame(imaging.load_luminance(paths[i]), rows, cols)
            for i in group
        ]
        yield frames[0] if len(frames) == 1 else sampling.average_block(frames)


def enroll_camera(
    entry: CameraEntry,
    rows: int,
    cols: int,
    rate: int,
    average: bool,
    sigma0: float = denoise.DEFAULT_SIGMA0,
    levels: int = denoise.DEFAULT_LEVELS,
) -> fingerprint.Fingerprint:
    """Build one camera's fingerprint from its training videos.  Each video
    is sampled at 1/rate independently; all sampled frames share one
    accumulator.  Training frames smaller than the enrollment resolution are
    an error (only downscaling is supported)."""
    acc = fingerprint.FingerprintAccumulator.empty(rows, cols)
    for directory in entry.training_dirs:
        for frame in iter_harmonized(directory, rows, cols, rate, average):
            fingerprint.accumulate(acc, frame, sigma0, levels)
    if acc.frame_count == 0:
        raise InputDataError(f"no training frames sampled for camera {entry.camera_id!r}")
    return fingerprint.finalize(acc, entry.camera_id)


def map_maybe_parallel(fn: Callable, items: list, threads: int) -> list:
    """Order-preserving map, sequential for threads <= 1."""
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def build_registry(
    man: DatasetManifest,
    rate: int | None = None,
    average_train: bool | None = None,
    sigma0: float = denoise.DEFAULT_SIGMA0,
    levels: int = denoise.DEFAULT_LEVELS,
    threads: int = 1,
) -> identify.Registry:
    """Enroll every camera in the manifest (None falls back to the manifest's
    sampling defaults)."""
    rate = man.sampling.rate if rate is None else rate
    average_train = man.sampling.average_train if average_train is None else average_train

    def enroll_one(entry: CameraEntry) -> fingerprint.Fingerprint:
        return enroll_camera(entry, man.rows, man.cols, rate, average_train, sigma0, levels)

    return identify.Registry(map_maybe_parallel(enroll_one, man.cameras, threads))


def save_registry(registry: identify.Registry, directory: str | os.PathLike) -> list[Path]:
    """Write one <camera_id>.fp file per enrolled camera."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for fp in registry.fingerprints:
        path = directory / f"{fp.camera_id}.fp"
        fingerprint.save_fingerprint(fp, path)
        paths.append(path)
    return paths


def load_registry(directory: str | os.PathLike) -> identify.Registry:
    """Load every *.fp file of a directory, in lexicographic filename order
    (which fixes the enrollment order used for tie-breaking)."""
    directory = Path(directory)
    if not directory.is_dir():
        raise InputDataError(f"not a directory: {directory}")
    paths = sorted(directory.glob("*.fp"))
    if not paths:
        raise InputDataError(f"no fingerprint files (*.fp) found in {directory}")
    return identify.Registry([fingerprint.load_fingerprint(p) for p in paths])


def identify_video(
    directory: str | os.PathLike,
    registry: identify.Registry,
    method: str = "voting",
    rate: int = 10,
    average: bool = False,
    sigma0: float = denoise.DEFAULT_SIGMA0,
    levels: int = denoise.DEFAULT_LEVELS,
    metric: str = "pearson",
    normalize: bool = False,
    modulate: bool = True,
) -> identify.IdentificationResult:
    """Identify the source camera of one frame directory."""
    if method not in identify.METHODS:
        raise ValueError(f"unknown method {method!r}, expected one of {identify.METHODS}")
    rows, cols = registry.resolution
    frames = iter_harmonized(directory, rows, cols, rate, average)
    if method == "voting":
        return identify.identify_voting(frames, registry, sigma0, levels, modulate)
    if method == "patcorr":
        return identify.identify_pattern_corr(frames, registry, metric, sigma0, levels)
    return identify.identify_pce_vectors(frames, registry, normalize, sigma0, levels, modulate)
