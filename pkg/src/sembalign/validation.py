"""Input validation helpers.

All public entry points funnel array input through these checks so that
malformed data fails early with a positional error message instead of
propagating NaNs through the solvers. Internal arithmetic is float64
regardless of the caller's dtype.
"""

from __future__ import annotations

import numpy as np


def check_finite(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Raise ValueError naming the first non-finite entry, if any."""
    if np.isfinite(m).all():
        return m
    bad = np.argwhere(~np.isfinite(np.atleast_2d(m)))
    i, j = bad[0]
    if m.ndim == 1:
        raise ValueError(f"{name} has non-finite value at index {j}")
    raise ValueError(f"{name} has non-finite value at row {i}, col {j}")


def as_matrix(data, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D float64 array with at least one row and column."""
    m = np.asarray(data, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got {m.ndim}-D")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"{name} is empty input (shape {m.shape[0]}x{m.shape[1]})")
    return check_finite(m, name)


def as_vector(data, name: str = "vector") -> np.ndarray:
    """Coerce to a 1-D float64 array with at least one element."""
    v = np.asarray(data, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got {v.ndim}-D")
    if v.size < 1:
        raise ValueError(f"{name} is empty input")
    return check_finite(v, name)


def check_same_rows(a: np.ndarray, b: np.ndarray, a_name: str = "source",
                    b_name: str = "target") -> None:
    if a.shape[0] != b.shape[0]:
        raise ValueError(
            f"{a_name} has {a.shape[0]} rows but {b_name} has {b.shape[0]}")
