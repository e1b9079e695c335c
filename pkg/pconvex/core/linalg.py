"""
Exact-tolerance linear algebra shared by the reduction and gauge code.

Functions here work on raw numpy arrays (one point per row) so that they can
be used by the value types themselves.
"""

import logging
from typing import List, Optional, Sequence, Union

import numpy as np
import scipy.linalg

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
NEGLIGIBLE = 1e-12

Points = Union[np.ndarray, Sequence[Sequence[float]]]


def _as_rows(points: Points) -> np.ndarray:
    rows = np.asarray(points, dtype=np.float64)
    if rows.ndim == 1:
        rows = rows.reshape(1, -1)
    return rows


def independent_subset(points: Points, tol: float = DEFAULT_TOL) -> List[int]:
    """
    Indices of a maximal linearly independent subset of points.

    Points are visited in order and kept when the part of the normalised point
    orthogonal to the span of the points kept so far is longer than tol; the
    rejected (near-dependent) columns are the ones a limited-pivoting QR would
    move to the right edge. Normalising first makes the decision independent
    of column scaling.

    Args:
        points: Array of shape (k, n), one point per row
        tol: Relative rank tolerance, > 0

    Returns:
        Increasing list of selected row indices
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    rows = _as_rows(points)
    if rows.size == 0:
        return []

    n = rows.shape[1]
    basis = np.zeros((n, 0))
    selected: List[int] = []
    for index, row in enumerate(rows):
        norm = np.linalg.norm(row)
        if norm == 0.0:
            continue
        residual = row / norm
        # Two passes of Gram-Schmidt keep the residual orthogonal to working precision
        for _ in range(2):
            residual = residual - basis @ (basis.T @ residual)
        length = np.linalg.norm(residual)
        if length > tol:
            basis = np.column_stack([basis, residual / length])
            selected.append(index)
            if len(selected) == n:
                break
    return selected


def solve_representation(points: Points, x: np.ndarray,
                         tol: float = DEFAULT_TOL) -> Optional[np.ndarray]:
    """
    Coefficients c with sum_j c_j points[j] = x, or None when x is outside the span.

    Args:
        points: k linearly independent points, shape (k, n), k <= n
        x: Target vector of dimension n
        tol: Residual tolerance, relative to ||x|| (absolute when x = 0)

    Returns:
        Coefficient array of length k (signs unrestricted), or None
    """
    rows = _as_rows(points)
    x = np.asarray(x, dtype=np.float64)
    x_norm = float(np.linalg.norm(x))
    if rows.shape[0] == 0:
        return np.zeros(0) if x_norm <= tol else None

    coeffs, _, _, _ = scipy.linalg.lstsq(rows.T, x)
    residual = float(np.linalg.norm(rows.T @ coeffs - x))
    limit = tol * x_norm if x_norm > 0.0 else tol
    if residual > limit:
        logger.debug(f"Target outside span: residual {residual:.3e} > {limit:.3e}")
        return None
    return coeffs


def orthonormal_basis(points: Points) -> np.ndarray:
    """
    Orthonormal basis of span(points) as columns, shape (n, m).

    Thin QR with the diagonal of R made positive, so the basis is a
    deterministic function of the (independent) input points.
    """
    rows = _as_rows(points)
    q, r = np.linalg.qr(rows.T, mode="reduced")
    signs = np.sign(np.diag(r))
    signs[signs == 0.0] = 1.0
    return q * signs


def null_directions(points: Points, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Basis (columns) of {c : sum_j c_j points[j] = 0}."""
    rows = _as_rows(points)
    return scipy.linalg.null_space(rows.T, rcond=tol)


def clamp_negligible(coeffs: np.ndarray, floor: float = NEGLIGIBLE) -> np.ndarray:
    """Set entries in [-floor, 0) to zero; other entries are returned unchanged."""
    clamped = np.array(coeffs, dtype=np.float64)
    clamped[(clamped < 0.0) & (clamped >= -floor)] = 0.0
    return clamped
