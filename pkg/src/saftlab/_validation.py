"""Complex-aware input checks for the estimator wrappers.

sklearn's ``check_array`` rejects complex input, so the wrappers use these.
"""

import numpy as np


def check_signals(X, n_samples=None, name="X"):
    """Return ``X`` as a 2-D complex array of shape (n_signals, n_samples)."""
    arr = np.asarray(X)
    if arr.dtype == object:
        raise TypeError(f"{name} must be numeric")
    arr = arr.astype(complex, copy=False)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 1-D or 2-D, got {arr.ndim}-D")
    if arr.shape[1] < 2:
        raise ValueError(f"{name} needs at least two samples per signal")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinity")
    if n_samples is not None and arr.shape[1] != n_samples:
        raise ValueError(f"{name} has {arr.shape[1]} samples per signal; the estimator was fitted on {n_samples}")
    return arr


def check_positive(value, name):
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return float(value)
