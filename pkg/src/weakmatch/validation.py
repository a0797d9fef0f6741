"""Input validation helpers shared by the estimators."""

from __future__ import annotations

import numpy as np


def check_vote_matrix(votes) -> np.ndarray:
    """Coerce to a 2-D int8 array of votes in {-1, 0, +1}."""
    arr = np.asarray(votes)
    if arr.ndim != 2:
        raise ValueError(f"vote matrix must be 2-D, got shape {arr.shape}")
    if arr.size and not np.isin(arr, (-1, 0, 1)).all():
        bad = arr[~np.isin(arr, (-1, 0, 1))][0]
        raise ValueError(f"votes must be -1, 0 or +1; found {bad}")
    return arr.astype(np.int8, copy=False)


def check_match_probs(probs, n_rows: int | None = None) -> np.ndarray:
    """Coerce to a float array of probabilities in [0, 1]."""
    arr = np.asarray(probs, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"probabilities must be 1-D, got shape {arr.shape}")
    if n_rows is not None and arr.shape[0] != n_rows:
        raise ValueError(f"expected {n_rows} probabilities, got {arr.shape[0]}")
    if arr.size and (np.nanmin(arr) < 0.0 or np.nanmax(arr) > 1.0):
        raise ValueError("probabilities must lie in [0, 1]")
    return arr


def check_clamps(clamps, n_rows: int) -> np.ndarray | None:
    """Validate a clamp vector: NaN = free, 0/1 = pinned posterior."""
    if clamps is None:
        return None
    arr = np.asarray(clamps, dtype=np.float64)
    if arr.shape != (n_rows,):
        raise ValueError(f"clamps must have shape ({n_rows},), got {arr.shape}")
    known = arr[~np.isnan(arr)]
    if known.size and not np.isin(known, (0.0, 1.0)).all():
        raise ValueError("clamp values must be 0, 1 or NaN")
    return arr
