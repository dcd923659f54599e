"""Source camera identification for video via PRNU sensor fingerprints.

Pipeline: frames -> luminance -> wavelet-Wiener noise residuals -> per-camera
fingerprint accumulation -> PCE matching -> video-level identification
(voting, pattern correlation, PCE vectors) -> confusion-matrix evaluation.
A synthetic sensor oracle makes every stage testable without real cameras.
"""

from .correlation import PceReport, pce, pearson, xcorr_circular
from .denoise import dwt2, extract_residual, idwt2, wiener_shrink
from .errors import CompatibilityError, InputDataError, PrnuVidError
from .fingerprint import (
    Fingerprint,
    FingerprintAccumulator,
    accumulate,
    finalize,
    load_fingerprint,
    merge,
    save_fingerprint,
)
from .identify import (
    IdentificationResult,
    Registry,
    identify_pattern_corr,
    identify_pce_vectors,
    identify_voting,
    score_frame,
)
from .imaging import load_frame, rescale_nearest, to_luminance
from .sampling import SamplingPlan, average_block, plan
from .synthcam import SyntheticCamera, capture, make_camera

__version__ = "0.1.0"

__all__ = [
    "CompatibilityError",
    "Fingerprint",
    "FingerprintAccumulator",
    "IdentificationResult",
    "InputDataError",
    "PceReport",
    "PrnuVidError",
    "Registry",
    "SamplingPlan",
    "SyntheticCamera",
    "accumulate",
    "average_block",
    "capture",
    "dwt2",
    "extract_residual",
    "finalize",
    "idwt2",
    "identify_pattern_corr",
    "identify_pce_vectors",
    "identify_voting",
    "load_fingerprint",
    "load_frame",
    "make_camera",
    "merge",
    "pce",
    "pearson",
    "plan",
    "rescale_nearest",
    "save_fingerprint",
    "score_frame",
    "to_luminance",
    "wiener_shrink",
    "xcorr_circular",
]
