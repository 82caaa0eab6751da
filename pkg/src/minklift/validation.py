"""Input validation helpers shared by the estimator, CLI and core modules."""

from __future__ import annotations

import numpy as np

RANK_TOL = 1e-10


def as_float_array(values, name: str, shape_hint: str | None = None) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    if shape_hint == "matrix" and arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-d array")
    if shape_hint == "vector" and arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-d array")
    return arr


def check_points(X, name: str = "X", dimension: int | None = None) -> np.ndarray:
    """Coerce to an (m, n) float array of finite points, n in {1, 2}."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError(f"{name} must be a nonempty (m, n) array of points")
    if X.shape[1] not in (1, 2):
        raise ValueError(f"{name} must have 1 or 2 columns, got {X.shape[1]}")
    if dimension is not None and X.shape[1] != dimension:
        raise ValueError(f"{name} has {X.shape[1]} columns, expected {dimension}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} must contain only finite values")
    return X


def check_masses(y, n_points: int, name: str = "masses") -> np.ndarray:
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != n_points:
        raise ValueError(f"{name} must have one entry per point")
    if not np.all(np.isfinite(y)) or np.any(y <= 0):
        raise ValueError(f"{name} must be finite and strictly positive")
    return y


def check_unit_rows(normals, name: str = "normals", tol: float = 1e-9) -> np.ndarray:
    """Coerce to an (N, d) array with unit rows, d in {2, 3}."""
    arr = np.asarray(
        [getattr(n, "coords", n) for n in normals], dtype=float
    )
    if arr.ndim != 2 or arr.shape[1] not in (2, 3):
        raise ValueError(f"{name} must be an (N, d) array with d in {{2, 3}}")
    norms = np.linalg.norm(arr, axis=1)
    if np.any(norms == 0) or not np.all(np.isfinite(norms)):
        raise ValueError(f"{name} must be nonzero finite vectors")
    if np.any(np.abs(norms - 1.0) > tol):
        raise ValueError(f"{name} must be unit vectors (tolerance {tol:g})")
    return arr / norms[:, None]


def spans_space(vectors: np.ndarray, tol: float = RANK_TOL) -> bool:
    """Full linear rank check via singular values, relative tolerance."""
    vectors = np.atleast_2d(vectors)
    d = vectors.shape[1]
    if vectors.shape[0] < d:
        return False
    s = np.linalg.svd(vectors, compute_uv=False)
    return s[-1] > tol * max(s[0], 1.0)
