"""Dense linear-algebra primitives backing the solvers.

Thin, contract-checked wrappers over LAPACK (via numpy/scipy): singular
value decomposition, SVD-based minimum-norm least squares, a symmetric
positive-definite solve for the normal equations, and seeded random
orthogonal matrices for synthetic ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import ConvergenceError
from .validation import as_matrix, check_same_rows

DEFAULT_RCOND = 1e-12


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD of an m x n matrix: ``u @ diag(sigma) @ vt`` reconstructs
    the input. ``u`` is m x k with orthonormal columns, ``vt`` is k x n with
    orthonormal rows, and ``sigma`` holds the k = min(m, n) singular values
    in nonincreasing order."""

    u: np.ndarray
    sigma: np.ndarray
    vt: np.ndarray


def svd(m) -> SvdResult:
    """Compute the thin singular value decomposition of a matrix."""
    a = as_matrix(m, "matrix")
    try:
        u, sigma, vt = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError("svd did not converge") from exc
    return SvdResult(u=u, sigma=sigma, vt=vt)


def pinv_solve(a, b, rcond: float = DEFAULT_RCOND) -> np.ndarray:
    """Minimum-norm least-squares solution X to ``a @ X ~ b`` via the SVD
    pseudo-inverse.

    Singular values below ``rcond * sigma_max`` are treated as zero, so
    rank-deficient systems yield the smallest-norm minimizer rather than
    blowing up.

    Parameters
    ----------
    a : array-like, shape (n, d)
    b : array-like, shape (n, d2)
    rcond : float
        Relative cutoff for small singular values; must be >= 0.

    Returns
    -------
    ndarray, shape (d, d2)
    """
    if rcond < 0:
        raise ValueError(f"rcond must be nonnegative, got {rcond}")
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    check_same_rows(a, b, "a", "b")
    f = svd(a)
    cutoff = rcond * f.sigma[0] if f.sigma.size else 0.0
    inv = np.zeros_like(f.sigma)
    keep = f.sigma > cutoff
    inv[keep] = 1.0 / f.sigma[keep]
    return f.vt.T @ (inv[:, None] * (f.u.T @ b))


def gram_solve(a, b, ridge: float = 0.0) -> np.ndarray:
    """Solve the normal equations ``(a.T a + ridge I) X = a.T b`` through a
    Cholesky factorization of the (ridge-regularized) Gram matrix.

    Fast path for well-conditioned systems; fails for rank-deficient ``a``
    at ridge = 0, in which case `pinv_solve` is the robust alternative.
    """
    if ridge < 0:
        raise ValueError(f"ridge must be nonnegative, got {ridge}")
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    check_same_rows(a, b, "a", "b")
    gram = a.T @ a
    if ridge > 0:
        gram = gram + ridge * np.eye(a.shape[1])
    try:
        factor = cho_factor(gram, lower=True)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(
            "gram matrix singular; supply ridge or use pinv") from exc
    return cho_solve(factor, a.T @ b)


def random_orthogonal(d: int, seed: int) -> np.ndarray:
    """Draw a d x d orthogonal matrix, deterministic for a given seed.

    QR of a seeded Gaussian matrix with the R diagonal sign-normalized,
    which makes the distribution Haar-uniform over the orthogonal group.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    return orthogonal_from_rng(np.random.default_rng(seed), d)


def orthogonal_from_rng(rng: np.random.Generator, d: int) -> np.ndarray:
    """Same construction as `random_orthogonal`, drawing from an existing
    generator so callers can interleave it with other draws."""
    g = rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs
