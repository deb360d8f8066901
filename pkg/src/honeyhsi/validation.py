"""Input validation helpers for the estimators and numeric kernels."""

import numpy as np

from .errors import ShapeError


def as_matrix(a, name="matrix"):
    """Coerce to a 2-D float64 array with finite entries."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got ndim={m.ndim}")
    if not np.all(np.isfinite(m)):
        raise ShapeError(f"{name} contains non-finite entries")
    return m


def as_vector(x, name="vector"):
    """Coerce to a 1-D float64 array with finite entries."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ShapeError(f"{name} must be 1-D, got ndim={v.ndim}")
    if not np.all(np.isfinite(v)):
        raise ShapeError(f"{name} contains non-finite entries")
    return v


def as_samples(x, n_features, name="X"):
    """Coerce a single vector or a batch of rows to (n, n_features).

    Returns the 2-D array plus a flag telling whether the input was a
    single vector (so callers can unwrap their result).
    """
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    if single:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be a vector or a 2-D batch, got ndim={arr.ndim}")
    if arr.shape[1] != n_features:
        raise ShapeError(
            f"{name} has {arr.shape[1]} features, expected {n_features}"
        )
    if not np.all(np.isfinite(arr)):
        raise ShapeError(f"{name} contains non-finite entries")
    return arr, single


def check_square(a, name="matrix"):
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"{name} must be square, got {a.shape[0]}x{a.shape[1]}")


def check_symmetric(a, rel_tol=1e-8, name="matrix"):
    """Reject matrices whose asymmetry exceeds ``rel_tol`` in Frobenius norm."""
    check_square(a, name)
    norm = np.linalg.norm(a)
    asym = np.linalg.norm(a - a.T)
    if asym > rel_tol * max(norm, 1e-300):
        raise ShapeError(f"{name} is not symmetric (relative asymmetry {asym / max(norm, 1e-300):.3e})")


def check_is_fitted(estimator, attribute):
    if not hasattr(estimator, attribute):
        raise RuntimeError(
            f"{type(estimator).__name__} is not fitted; call fit() first"
        )
