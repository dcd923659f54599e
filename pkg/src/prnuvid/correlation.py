"""Circular cross-correlation, peak-to-correlation-energy, and Pearson correlation.

The correlation surface covers every cyclic displacement; the PCE score is
the squared peak over the mean squared value outside a square window around
the peak, which makes it invariant to positive rescaling of either input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.fft import irfft2, rfft2

DEFAULT_EXCLUDE = 11  # side of the square window removed around the peak


@dataclass(frozen=True)
class PceReport:
    """Peak location/value and PCE score of one comparison."""

    peak_row: int
    peak_col: int
    peak_value: float
    pce: float
    excluded_window: int


def _check_pair(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("inputs must be 2-D matrices")
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    if np.ptp(a) == 0 or np.ptp(b) == 0:
        raise ValueError("zero-variance input")
    return a, b


def xcorr_circular(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full cyclic cross-correlation C(s) = sum_x a'(x) b'(x+s) over all
    displacements s, after mean-subtracting both inputs."""
    a, b = _check_pair(a, b)
    a = a - a.mean()
    b = b - b.mean()
    return irfft2(np.conj(rfft2(a)) * rfft2(b), s=a.shape)


def pce(a: np.ndarray, b: np.ndarray, exclude: int = DEFAULT_EXCLUDE) -> PceReport:
    """Peak-to-correlation-energy of the full circular correlation surface.

    The peak is the signed maximum (first occurrence in row-major order on
    ties); the energy floor is the mean squared correlation outside the
    exclude x exclude window centered at the peak, wrapped cyclically.
    """
    if exclude < 1 or exclude % 2 == 0:
        raise ValueError("exclude window must be a positive odd integer")
    surface = xcorr_circular(a, b)
    rows, cols = surface.shape
    if rows < exclude or cols < exclude or rows * cols < exclude * exclude + 1:
        raise ValueError(
            f"surface {rows}x{cols} too small to exclude a {exclude}x{exclude} window"
        )
    flat_idx = int(np.argmax(surface))
    peak_row, peak_col = np.unravel_index(flat_idx, surface.shape)
    peak_value = float(surface[peak_row, peak_col])

    half = exclude // 2
    keep = np.ones(surface.shape, dtype=bool)
    keep[np.ix_(
        (peak_row + np.arange(-half, half + 1)) % rows,
        (peak_col + np.arange(-half, half + 1)) % cols,
    )] = False
    floor = float(np.mean(surface[keep] ** 2))
    return PceReport(
        peak_row=int(peak_row),
        peak_col=int(peak_col),
        peak_value=peak_value,
        pce=peak_value * peak_value / floor,
        excluded_window=exclude * exclude,
    )


def pearson(a: np.ndarray, b: np.ndarray) -> float:
    """Zero-shift normalized correlation coefficient in [-1, 1]."""
    a, b = _check_pair(a, b)
    a = a - a.mean()
    b = b - b.mean()
    return float((a * b).sum() / np.sqrt((a * a).sum() * (b * b).sum()))
