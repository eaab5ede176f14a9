"""The 6-component object feature schema.

Every perceptual judgement in the system is made over this fixed vector.
There is deliberately no color/hue slot: the target platform has a
grayscale camera, so word meanings can never latch onto hue.
"""

import numpy as np

from .errors import InvalidInputError

FEATURE_NAMES = ("size", "elongation", "cornerness", "intensity", "lateral", "depth")
N_FEATURES = len(FEATURE_NAMES)

# inclusive [lo, hi] per component; lateral is signed, everything else unit-interval
_LOWS = np.array([0.0, 0.0, 0.0, 0.0, -1.0, 0.0])
_HIGHS = np.array([1.0, 1.0, 1.0, 1.0, 1.0, 1.0])


def as_feature_array(x):
    """Validate ``x`` as a feature vector and return it as a float64 array.

    Raises InvalidInputError on wrong arity, non-finite components, or
    out-of-range components.
    """
    arr = np.asarray(x, dtype=float)
    if arr.shape != (N_FEATURES,):
        raise InvalidInputError(
            f"feature vector must have exactly {N_FEATURES} components, got shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"feature vector has non-finite components: {arr.tolist()}")
    if np.any(arr < _LOWS) or np.any(arr > _HIGHS):
        raise InvalidInputError(f"feature vector out of range: {arr.tolist()}")
    return arr


def feature_dict(x):
    """Name → value view of a feature vector, for reports and wire payloads."""
    arr = as_feature_array(x)
    return dict(zip(FEATURE_NAMES, arr.tolist()))
