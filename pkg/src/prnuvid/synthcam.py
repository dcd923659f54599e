"""Synthetic sensor oracle: seeded cameras with a known multiplicative
pattern so the whole pipeline can be exercised against ground truth.

A camera captures a scene as (1 + K) * scene + additive Gaussian noise,
clipped to the 8-bit range.  K is the camera's fixed zero-mean pattern.
The module also ships three scene families (flat fields, smooth gradients,
seeded smooth texture) and a dataset writer that lays out frame directories
plus a ground-truth manifest in the format the evaluation pipeline consumes.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter

from . import imaging

DEFAULT_STRENGTH = 0.02
MIN_DIM = 16

# Flat-field levels cycled through by training videos; bright enough to make
# the multiplicative pattern observable, dim enough to avoid clipping.  The
# ladder length is coprime to the usual sampling rates (10..30) so sampled
# training frames always cover the whole ladder.
TRAIN_FLAT_LEVELS = (60.0, 85.0, 110.0, 135.0, 155.0, 175.0, 190.0)


@dataclass
class SyntheticCamera:
    """A seeded sensor: fixed pattern K plus a private generator whose state
    advances with every capture."""

    camera_id: str
    pattern: np.ndarray
    strength: float
    seed: int
    _rng: np.random.Generator = field(repr=False)

    @property
    def rows(self) -> int:
        return self.pattern.shape[0]

    @property
    def cols(self) -> int:
        return self.pattern.shape[1]


def make_camera(
    seed: int,
    rows: int,
    cols: int,
    strength: float = DEFAULT_STRENGTH,
    camera_id: str | None = None,
) -> SyntheticCamera:
    """Draw a fresh camera pattern: i.i.d. Gaussian(0, strength^2), then
    mean-removed.  Reproducible per seed."""
    if not 0 < strength <= 0.2:
        raise ValueError("strength must be in (0, 0.2]")
    if rows < MIN_DIM or cols < MIN_DIM:
        raise ValueError(f"camera dimensions must be at least {MIN_DIM}x{MIN_DIM}")
    rng = np.random.default_rng(seed)
    pattern = rng.normal(0.0, strength, size=(rows, cols))
    pattern -= pattern.mean()
    return SyntheticCamera(
        camera_id=camera_id if camera_id is not None else f"synth{seed}",
        pattern=pattern,
        strength=strength,
        seed=seed,
        _rng=rng,
    )


def capture(cam: SyntheticCamera, scene: np.ndarray, sigma_add: float = 0.0) -> np.ndarray:
    """One exposure: (1 + K) * scene + Gaussian(0, sigma_add^2), clipped to
    [0, 255].  The camera's generator advances on every call."""
    scene = np.asarray(scene, dtype=np.float64)
    if scene.shape != cam.pattern.shape:
        raise ValueError(f"scene {scene.shape} does not match camera {cam.pattern.shape}")
    if scene.min() < 0 or scene.max() > 255:
        raise ValueError("scene values must lie in [0, 255]")
    noise = cam._rng.standard_normal(scene.shape)
    out = (1.0 + cam.pattern) * scene + sigma_add * noise
    return np.clip(out, 0.0, 255.0)


def flat_scene(rows: int, cols: int, value: float) -> np.ndarray:
    """Constant-intensity scene; the best case for pattern observability."""
    return np.full((rows, cols), float(value))


def gradient_scene(rows: int, cols: int, lo: float = 40.0, hi: float = 200.0,
                   diagonal: bool = False) -> np.ndarray:
    """Smooth linear ramp from lo to hi, horizontal or diagonal."""
    ramp_c = np.linspace(0.0, 1.0, cols)[None, :]
    if diagonal:
        ramp_r = np.linspace(0.0, 1.0, rows)[:, None]
        ramp = (ramp_c + ramp_r) / 2.0
    else:
        ramp = np.broadcast_to(ramp_c, (rows, cols))
    return lo + (hi - lo) * ramp


def texture_scene(rng: np.random.Generator, rows: int, cols: int,
                  lo: float = 40.0, hi: float = 200.0,
                  smoothness: float = 4.0) -> np.ndarray:
    """Seeded pseudo-random smooth texture spanning [lo, hi]."""
    raw = gaussian_filter(rng.standard_normal((rows, cols)), sigma=smoothness, mode="wrap")
    rmin, rmax = raw.min(), raw.max()
    if rmax == rmin:
        return flat_scene(rows, cols, (lo + hi) / 2.0)
    return lo + (hi - lo) * (raw - rmin) / (rmax - rmin)


def training_scene(rows: int, cols: int, index: int) -> np.ndarray:
    """Frame `index` of a training video: flat fields cycling through a
    fixed ladder of gray levels."""
    return flat_scene(rows, cols, TRAIN_FLAT_LEVELS[index % len(TRAIN_FLAT_LEVELS)])


def mixed_scene(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """One frame of a test video: a per-frame random mix of dim flats,
    bright flats, textures, mid flats, and gradients.

    Dim frames carry little pattern signal, so identification quality
    degrades gracefully as additive noise grows; drawing the kind from the
    video's generator keeps any sampling rate from aliasing onto a single
    scene kind.
    """
    kind = rng.choice(5, p=(0.55, 0.12, 0.13, 0.08, 0.12))
    if kind == 0:
        return flat_scene(rows, cols, rng.uniform(14.0, 26.0))
    if kind == 1:
        return flat_scene(rows, cols, rng.uniform(150.0, 190.0))
    if kind == 2:
        return texture_scene(rng, rows, cols, lo=25.0, hi=150.0)
    if kind == 3:
        return flat_scene(rows, cols, rng.uniform(60.0, 120.0))
    return gradient_scene(rows, cols, lo=25.0, hi=150.0, diagonal=bool(rng.integers(2)))


def write_video(directory: Path, cam: SyntheticCamera, scenes, sigma_add: float) -> int:
    """Capture each scene in order and write frame_NNNNNN.png files."""
    directory.mkdir(parents=True, exist_ok=True)
    count = 0
    for i, scene in enumerate(scenes):
        frame = capture(cam, scene, sigma_add)
        imaging.save_frame(directory / f"frame_{i:06d}.png", frame)
        count += 1
    return count


def write_dataset(
    out_dir: str | os.PathLike,
    cameras: int = 5,
    frames: int = 100,
    tests_per_camera: int = 2,
    rows: int = 128,
    cols: int = 128,
    strength: float = DEFAULT_STRENGTH,
    sigma_add: float = 2.0,
    seed: int = 7,
    rate: int = 10,
) -> Path:
    """Generate a full dataset (training + test videos per camera) and its
    manifest; returns the manifest path.  Fully deterministic per seed."""
    if cameras < 1 or frames < 1 or tests_per_camera < 0:
        raise ValueError("cameras and frames must be >= 1, tests_per_camera >= 0")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    camera_entries = []
    test_entries = []
    for ci in range(cameras):
        # One child sequence per camera keeps parallel generation (or a later
        # change in camera order) from reshuffling the streams.
        cam_ss, scene_ss = np.random.SeedSequence(entropy=seed, spawn_key=(ci,)).spawn(2)
        cam_seed = int(cam_ss.generate_state(1)[0])
        cam_id = f"cam{ci + 1:02d}"
        cam = make_camera(cam_seed, rows, cols, strength, camera_id=cam_id)
        scene_rng = np.random.default_rng(scene_ss)

        train_dir = out_dir / cam_id / "train"
        write_video(
            train_dir, cam,
            (training_scene(rows, cols, i) for i in range(frames)),
            sigma_add,
        )
        camera_entries.append(
            {"id": cam_id, "training_dirs": [str(train_dir.relative_to(out_dir))]}
        )
        for ti in range(tests_per_camera):
            test_dir = out_dir / cam_id / f"test_{ti:02d}"
            write_video(
                test_dir, cam,
                (mixed_scene(scene_rng, rows, cols) for _ in range(frames)),
                sigma_add,
            )
            test_entries.append(
                {"dir": str(test_dir.relative_to(out_dir)), "true_id": cam_id}
            )

    manifest = {
        "seed": seed,
        "enrollment": {"rows": rows, "cols": cols},
        "sampling": {"rate": rate, "average": {"train": False, "run": False}},
        "generator": {
            "strength": strength,
            "sigma_add": sigma_add,
            "frames_per_video": frames,
        },
        "cameras": camera_entries,
        "tests": test_entries,
    }
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest_path
