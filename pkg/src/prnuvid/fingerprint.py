"""PRNU fingerprint estimation as a maximum-likelihood weighted average.

Per frame the residual W and the denoised estimate I = frame - W feed two
running element-wise sums, sum(W * I) and sum(I**2); the fingerprint is
their ratio.  Accumulators are mergeable so enrollment can be sharded.

Fingerprint files are a fixed little-endian binary layout:
magic "PRNUFP01", then uint32 rows, cols, frame_count, id byte length,
the UTF-8 camera id, then rows*cols float32 values row-major.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import denoise
from .errors import InputDataError

MAGIC = b"PRNUFP01"
DENOMINATOR_FLOOR = 1e-6  # below this the fingerprint value is forced to 0


@dataclass
class FingerprintAccumulator:
    """Mergeable partial sums of one camera's enrollment."""

    numerator: np.ndarray
    denominator: np.ndarray
    frame_count: int = 0

    @classmethod
    def empty(cls, rows: int, cols: int) -> "FingerprintAccumulator":
        return cls(
            numerator=np.zeros((rows, cols)),
            denominator=np.zeros((rows, cols)),
        )

    @property
    def shape(self) -> tuple[int, int]:
        return self.numerator.shape


@dataclass
class Fingerprint:
    """Finalized PRNU estimate of one camera."""

    camera_id: str
    matrix: np.ndarray
    frame_count: int

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


def accumulate(
    acc: FingerprintAccumulator,
    frame: np.ndarray,
    sigma0: float = denoise.DEFAULT_SIGMA0,
    levels: int = denoise.DEFAULT_LEVELS,
) -> FingerprintAccumulator:
    """Fold one frame into the accumulator (in place) and return it."""
    frame = np.asarray(frame, dtype=np.float64)
    if frame.shape != acc.shape:
        raise ValueError(f"dimension mismatch: frame {frame.shape} vs accumulator {acc.shape}")
    residual = denoise.extract_residual(frame, sigma0, levels)
    estimate = frame - residual
    acc.numerator += residual * estimate
    acc.denominator += estimate * estimate
    acc.frame_count += 1
    return acc


def merge(a: FingerprintAccumulator, b: FingerprintAccumulator) -> FingerprintAccumulator:
    """Combine two partial accumulations; commutative and associative."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return FingerprintAccumulator(
        numerator=a.numerator + b.numerator,
        denominator=a.denominator + b.denominator,
        frame_count=a.frame_count + b.frame_count,
    )


def finalize(acc: FingerprintAccumulator, camera_id: str = "") -> Fingerprint:
    """Ratio of the accumulated sums; pixels whose denominator is below the
    floor (dead or all-black) become 0 instead of dividing by ~0."""
    if acc.frame_count < 1:
        raise ValueError("cannot finalize an empty accumulator")
    usable = acc.denominator >= DENOMINATOR_FLOOR
    matrix = np.zeros_like(acc.numerator)
    np.divide(acc.numerator, acc.denominator, out=matrix, where=usable)
    return Fingerprint(camera_id=camera_id, matrix=matrix, frame_count=acc.frame_count)


def save_fingerprint(fp: Fingerprint, path: str | os.PathLike) -> None:
    """Write the binary fingerprint file format (float32, little-endian)."""
    rows, cols = fp.shape
    id_bytes = fp.camera_id.encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IIII", rows, cols, fp.frame_count, len(id_bytes)))
        fh.write(id_bytes)
        fh.write(np.ascontiguousarray(fp.matrix, dtype="<f4").tobytes())


def load_fingerprint(path: str | os.PathLike) -> Fingerprint:
    """Read a fingerprint file; values come back as float64 widened from
    the stored float32."""
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise InputDataError(f"unreadable fingerprint file: {path} ({exc})") from None
    if len(blob) < len(MAGIC) + 16 or blob[: len(MAGIC)] != MAGIC:
        raise InputDataError(f"not a fingerprint file (bad magic): {path}")
    rows, cols, frame_count, id_len = struct.unpack_from("<IIII", blob, len(MAGIC))
    offset = len(MAGIC) + 16
    if len(blob) != offset + id_len + rows * cols * 4:
        raise InputDataError(f"truncated or oversized fingerprint file: {path}")
    camera_id = blob[offset : offset + id_len].decode("utf-8")
    data = np.frombuffer(blob, dtype="<f4", count=rows * cols, offset=offset + id_len)
    return Fingerprint(
        camera_id=camera_id,
        matrix=data.astype(np.float64).reshape(rows, cols),
        frame_count=frame_count,
    )
