"""Dense linear-algebra kernels: SVD, pseudoinverse, condition number, norms.

Everything here is a pure function of its inputs.
"""

import math

import numpy as np
import scipy.linalg

from .errors import NumericalError

#: Relative singular-value cutoff used when callers do not pass one.
DEFAULT_TOL = 1e-12

#: Value returned by :func:`condition_number` for numerically singular input.
INFINITE = math.inf


def _as_matrix(M):
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M[:, None]
    if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {M.shape}")
    return M


def svd(M):
    """Thin singular value decomposition.

    Parameters
    ----------
    M : array_like, shape (r, c)

    Returns
    -------
    U : ndarray, shape (r, k)
    s : ndarray, shape (k,)
        Singular values, descending and non-negative.
    Vt : ndarray, shape (k, c)

    Raises
    ------
    NumericalError
        If neither LAPACK driver converges.
    """
    M = _as_matrix(M)
    if not np.all(np.isfinite(M)):
        raise ValueError(f"matrix of shape {M.shape} has non-finite entries")
    # gesdd is fast but occasionally fails to converge; gesvd is the slower fallback
    for driver in ("gesdd", "gesvd"):
        try:
            return scipy.linalg.svd(M, full_matrices=False, check_finite=False,
                                    lapack_driver=driver)
        except (np.linalg.LinAlgError, ValueError):
            continue
    raise NumericalError(f"SVD did not converge for a {M.shape[0]}x{M.shape[1]} matrix")


def singular_values(M):
    return svd(M)[1]


def pseudoinverse(M, tol=DEFAULT_TOL):
    """Moore-Penrose inverse via SVD.

    Singular values below ``tol * s_max`` are treated as zero. A matrix whose
    singular values all fall below the cutoff (e.g. the zero matrix) maps to
    the zero matrix of transposed shape.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    M = _as_matrix(M)
    U, s, Vt = svd(M)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((M.shape[1], M.shape[0]))
    keep = s >= tol * s[0]
    inv_s = np.zeros_like(s)
    inv_s[keep] = 1.0 / s[keep]
    return (Vt.T * inv_s) @ U.T


def condition_number(H, tol=DEFAULT_TOL):
    """Spectral condition number ``s_max / s_min`` of ``H``.

    Equal to ``sqrt(lambda_max(H^T H) / lambda_min(H^T H))`` but computed from
    the singular values of ``H`` so the conditioning is not squared on the way.
    Returns :data:`INFINITE` when ``s_min < tol * s_max``.
    """
    H = _as_matrix(H)
    if H.shape[0] < H.shape[1]:
        raise ValueError(f"condition_number needs rows >= cols, got shape {H.shape}")
    s = singular_values(H)
    s_max, s_min = s[0], s[-1]
    if s_max == 0.0 or s_min < tol * s_max:
        return INFINITE
    return max(float(s_max / s_min), 1.0)


def l2_norm(beta):
    """Frobenius norm; the ordinary 2-norm when ``beta`` is a single column."""
    beta = np.asarray(beta, dtype=float)
    return float(np.sqrt(np.sum(beta * beta)))
