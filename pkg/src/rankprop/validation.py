"""Input validation helpers.

Small wrappers that normalize array inputs and raise ValidationError with
messages naming the offending entry, so every public entry point fails the
same way.
"""
import numpy as np

from .errors import ValidationError


def check_features(X):
    """Validate and return a feature matrix as float32, C-contiguous.

    Requires u >= 2 rows, d >= 1 columns, all entries finite.
    """
    X = np.asarray(X)
    if X.ndim != 2:
        raise ValidationError(f"feature matrix must be 2-d, got shape {X.shape}")
    u, d = X.shape
    if u < 2:
        raise ValidationError(f"need at least 2 items, got {u}")
    if d < 1:
        raise ValidationError(f"need at least 1 feature dimension, got {d}")
    bad = ~np.isfinite(X)
    if bad.any():
        i = int(np.argwhere(bad.any(axis=1)).ravel()[0])
        raise ValidationError(f"non-finite feature value at item {i}")
    return np.ascontiguousarray(X, dtype=np.float32)


def check_indices(idx, u, what="index"):
    """Validate a collection of item indices against catalog size u.

    Duplicates and out-of-range entries are rejected. Returns an int array.
    """
    idx = np.asarray(list(idx), dtype=np.intp).ravel()
    if idx.size and (idx.min() < 0 or idx.max() >= u):
        bad = idx[(idx < 0) | (idx >= u)][0]
        raise ValidationError(f"{what} {bad} out of range for {u} items")
    if len(np.unique(idx)) != len(idx):
        seen, dup = set(), None
        for j in idx:
            if int(j) in seen:
                dup = int(j)
                break
            seen.add(int(j))
        raise ValidationError(f"duplicate {what} {dup}")
    return idx


def check_positive(value, name):
    if not np.isfinite(value) or value <= 0:
        raise ValidationError(f"{name} must be positive, got {value!r}")
    return float(value)


def check_unit_interval(value, name):
    if not np.isfinite(value) or value < 0.0 or value > 1.0:
        raise ValidationError(f"{name} must lie in [0, 1], got {value!r}")
    return float(value)
