"""Frame I/O, luminance conversion, and nearest-neighbor downscaling.

A grayscale frame is a 2-D float64 array on the 0..255 scale; an RGB frame
is (rows, cols, 3).  8-bit files are widened to float without rescaling so
stored pixel values survive a load/save round trip exactly.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import InputDataError

FRAME_SUFFIXES = (".png", ".pgm", ".ppm")

# ITU-R BT.601 luma weights.
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


def load_frame(path: str | os.PathLike) -> np.ndarray:
    """Load a PNG or PGM/PPM file as an RGB frame (rows, cols, 3) float64.

    Grayscale images are promoted by replicating the single channel.
    Raises InputDataError for unreadable, corrupt, or unsupported files.
    """
    path = Path(path)
    try:
        with Image.open(path) as img:
            if img.mode == "P":
                img = img.convert("RGB")
            if img.mode not in ("L", "RGB"):
                raise InputDataError(
                    f"unsupported format: {path} has mode {img.mode!r}, expected 8-bit grayscale or RGB"
                )
            data = np.asarray(img, dtype=np.float64)
    except FileNotFoundError:
        raise InputDataError(f"unreadable file: {path}") from None
    except UnidentifiedImageError:
        raise InputDataError(f"corrupt image or unsupported format: {path}") from None
    except OSError as exc:
        raise InputDataError(f"corrupt image: {path} ({exc})") from None

    if data.ndim == 2:
        data = np.repeat(data[:, :, None], 3, axis=2)
    if data.shape[0] == 0 or data.shape[1] == 0:
        raise InputDataError(f"zero-dimension image: {path}")
    return data


def save_frame(path: str | os.PathLike, frame: np.ndarray) -> None:
    """Write a frame as an 8-bit PNG/PGM/PPM (format chosen by extension).

    2-D input is written grayscale, (rows, cols, 3) as RGB.  Values are
    rounded and clipped to 0..255.
    """
    arr = np.clip(np.rint(np.asarray(frame)), 0, 255).astype(np.uint8)
    if arr.ndim == 2:
        img = Image.fromarray(arr, mode="L")
    elif arr.ndim == 3 and arr.shape[2] == 3:
        img = Image.fromarray(arr, mode="RGB")
    else:
        raise ValueError(f"expected 2-D or (rows, cols, 3) array, got shape {arr.shape}")
    img.save(Path(path))


def to_luminance(img: np.ndarray) -> np.ndarray:
    """Reduce an RGB frame to luminance: 0.299 R + 0.587 G + 0.114 B."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"expected (rows, cols, 3) RGB frame, got shape {img.shape}")
    return img @ LUMA_WEIGHTS


def rescale_nearest(frame: np.ndarray, out_rows: int, out_cols: int) -> np.ndarray:
    """Downscale by nearest-neighbor pick: out(i,j) = in(floor(i*rows/out_rows),
    floor(j*cols/out_cols)).  Pixel values are copied, never interpolated.
    """
    frame = np.asarray(frame)
    rows, cols = frame.shape[:2]
    if out_rows < 1 or out_cols < 1:
        raise ValueError("output dimensions must be positive")
    if out_rows > rows or out_cols > cols:
        raise ValueError(
            f"upscaling not supported: {rows}x{cols} -> {out_rows}x{out_cols}"
        )
    row_idx = (np.arange(out_rows) * rows) // out_rows
    col_idx = (np.arange(out_cols) * cols) // out_cols
    return frame[np.ix_(row_idx, col_idx)]


def list_frames(directory: str | os.PathLike) -> list[Path]:
    """List the frame files of a video directory, sorted lexicographically.

    Raises InputDataError if the directory is missing or holds no frames.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise InputDataError(f"not a directory: {directory}")
    paths = sorted(
        p for p in directory.iterdir()
        if p.is_file() and p.suffix.lower() in FRAME_SUFFIXES
    )
    if not paths:
        raise InputDataError(f"no frames found in {directory}")
    return paths


def load_luminance(path: str | os.PathLike) -> np.ndarray:
    """Load a frame file and reduce it to a single luminance channel."""
    return to_luminance(load_frame(path))
