"""Cholesky factorization for small dense symmetric matrices."""

from __future__ import annotations

import math

import numpy as np

from tabsynth.errors import DomainError, FactorizationError, ShapeError

SYMMETRY_TOL = 1e-12


def cholesky(m, jitter: float = 0.0) -> np.ndarray:
    """Lower-triangular ``L`` with ``L @ L.T == m``.

    Parameters
    ----------
    m : array_like
        Square symmetric positive-definite matrix.
    jitter : float
        Added to every diagonal entry before factoring. Zero (the default)
        means no repair: a non-positive pivot raises.

    Raises
    ------
    FactorizationError
        On the first pivot ``<= 0``; ``err.pivot`` is its 0-based index.
    """
    a = np.array(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"cholesky needs a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix has non-finite entries")
    if np.max(np.abs(a - a.T), initial=0.0) > SYMMETRY_TOL:
        raise DomainError("matrix is not symmetric")
    if jitter < 0:
        raise DomainError("jitter must be nonnegative")
    n = a.shape[0]
    a[np.diag_indices(n)] += jitter
    low = np.zeros_like(a)
    for j in range(n):
        pivot = a[j, j] - low[j, :j] @ low[j, :j]
        if not pivot > 0.0:
            hint = f"; retry with jitter={jitter * 10 if jitter else 1e-6:g} added to the diagonal"
            raise FactorizationError(
                j, pivot, f"matrix is not positive definite: pivot {j} is {pivot:.6g}{hint}"
            )
        low[j, j] = math.sqrt(pivot)
        for i in range(j + 1, n):
            low[i, j] = (a[i, j] - low[i, :j] @ low[j, :j]) / low[j, j]
    return low
