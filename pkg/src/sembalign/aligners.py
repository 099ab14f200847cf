"""Cross-lingual mapping constructions.

Three ways to learn a d x d linear map sending source-language sentence
embeddings onto their target-language translations:

* unconstrained least squares (normal equation / pseudo-inverse),
* orthogonal Procrustes (closed form from the SVD of the cross-covariance),
* a single linear layer trained by mini-batch SGD on the MSE objective.

Each is exposed both as a plain function returning a `ProjectionMatrix`
and as a scikit-learn style estimator with ``fit(X, Y)`` / ``transform(X)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .corpus import ParallelCorpus
from .errors import ConvergenceError
from .linalg import DEFAULT_RCOND, gram_solve, pinv_solve, svd
from .validation import as_matrix, as_vector

ORTHOGONALITY_TOL = 1e-8

_KNOWN_METHODS = ("least_squares", "procrustes", "sgd", "unknown")


@dataclass(frozen=True)
class ProjectionMatrix:
    """A fitted d x d cross-lingual map plus fit diagnostics.

    ``method`` records which construction produced the map; Procrustes maps
    are checked for orthogonality on construction. ``meta`` carries solver
    diagnostics (residual, iterations, hyperparameters) and, for maps
    fitted through the CLI, any preprocessing to replay at evaluation time.
    """

    data: np.ndarray
    method: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        data = as_matrix(self.data, "projection")
        if data.shape[0] != data.shape[1]:
            raise ValueError(
                f"projection must be square, got {data.shape[0]}x{data.shape[1]}")
        if self.method not in _KNOWN_METHODS:
            raise ValueError(
                f"unknown method {self.method!r}; expected one of {_KNOWN_METHODS}")
        if self.method == "procrustes":
            gap = np.max(np.abs(data.T @ data - np.eye(data.shape[0])))
            if gap > ORTHOGONALITY_TOL:
                raise ValueError(
                    f"procrustes projection is not orthogonal "
                    f"(max |Q'Q - I| = {gap:.3e})")
        object.__setattr__(self, "data", data)

    @property
    def d(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class SgdConfig:
    """Hyperparameters for the SGD-trained linear map.

    ``tol`` is the stopping threshold on the epoch-average mean-squared
    error; training stops once the epoch average drops below it or
    ``epochs`` passes are exhausted. ``init`` is "zeros" or "gaussian"
    (the latter scaled by ``init_sigma``).
    """

    learning_rate: float = 0.05
    epochs: int = 500
    batch_size: int = 32
    tol: float = 1e-6
    seed: int = 0
    init: str = "zeros"
    init_sigma: float = 0.01

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.tol < 0:
            raise ValueError(f"tol must be nonnegative, got {self.tol}")
        if self.init not in ("zeros", "gaussian"):
            raise ValueError(f"init must be 'zeros' or 'gaussian', got {self.init!r}")


def _residual(corpus: ParallelCorpus, projection: np.ndarray) -> float:
    return float(np.linalg.norm(corpus.source @ projection - corpus.target))


def fit_least_squares(corpus: ParallelCorpus, ridge: float = 0.0,
                      rcond: float = DEFAULT_RCOND) -> ProjectionMatrix:
    """Fit the unconstrained map minimizing ||source @ P - target||_F.

    At ridge = 0 the solution comes from the SVD pseudo-inverse, which
    returns the minimum-norm minimizer even when the corpus has fewer
    pairs than dimensions. A positive ridge switches to the regularized
    normal equations solved by Cholesky.
    """
    if ridge > 0:
        data = gram_solve(corpus.source, corpus.target, ridge=ridge)
    else:
        data = pinv_solve(corpus.source, corpus.target, rcond=rcond)
    meta = {
        "residual_frobenius": _residual(corpus, data),
        "ridge": float(ridge),
        "rcond": float(rcond),
        "n_pairs": corpus.n_pairs,
    }
    return ProjectionMatrix(data=data, method="least_squares", meta=meta)


def fit_procrustes(corpus: ParallelCorpus) -> ProjectionMatrix:
    """Fit the best orthogonal map: P = U V' from the SVD of the d x d
    cross-covariance source' @ target. Among all orthogonal matrices this
    minimizes ||source @ P - target||_F."""
    f = svd(corpus.source.T @ corpus.target)
    data = f.u @ f.vt
    meta = {
        "residual_frobenius": _residual(corpus, data),
        "n_pairs": corpus.n_pairs,
    }
    return ProjectionMatrix(data=data, method="procrustes", meta=meta)


def fit_sgd(corpus: ParallelCorpus, config: SgdConfig | None = None) -> ProjectionMatrix:
    """Train the map as a single linear layer by mini-batch SGD on the
    mean-squared error (1/2n) ||source @ W - target||_F^2.

    Deterministic for a fixed ``config.seed``: the same seed drives both
    the optional Gaussian init and the per-epoch shuffling. Raises
    ConvergenceError if the loss goes non-finite (learning rate too high).
    """
    config = config or SgdConfig()
    weights, final_mse, epochs_used = _sgd_train(
        corpus.source, corpus.target, config)
    meta = {
        "residual_frobenius": _residual(corpus, weights),
        "final_mse": final_mse,
        "epochs_used": epochs_used,
        "learning_rate": config.learning_rate,
        "batch_size": config.batch_size,
        "tol": config.tol,
        "seed": config.seed,
        "init": config.init,
        "n_pairs": corpus.n_pairs,
    }
    return ProjectionMatrix(data=weights, method="sgd", meta=meta)


def _sgd_train(source: np.ndarray, target: np.ndarray,
               config: SgdConfig) -> tuple[np.ndarray, float, int]:
    n, d = source.shape
    rng = np.random.default_rng(config.seed)
    if config.init == "gaussian":
        weights = config.init_sigma * rng.standard_normal((d, d))
    else:
        weights = np.zeros((d, d))

    final_mse = np.inf
    epochs_used = 0
    # Divergence is detected by the finiteness checks below; the overflow
    # warnings numpy would raise on the way there are just noise.
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(config.epochs):
            perm = rng.permutation(n)
            sq_sum = 0.0
            for start in range(0, n, config.batch_size):
                idx = perm[start:start + config.batch_size]
                xb = source[idx]
                residual = xb @ weights - target[idx]
                sq = float(np.sum(residual * residual))
                if not np.isfinite(sq):
                    raise ConvergenceError("sgd diverged; reduce learning_rate")
                sq_sum += sq
                grad = xb.T @ residual / idx.shape[0]
                weights -= config.learning_rate * grad
            # Sample-weighted average of the pre-update batch losses.
            final_mse = sq_sum / (2.0 * n)
            epochs_used = epoch + 1
            if final_mse < config.tol:
                break
    if not np.isfinite(weights).all():
        raise ConvergenceError("sgd diverged; reduce learning_rate")
    return weights, final_mse, epochs_used


def sgd_gradient(w_col, s_a, b_col) -> np.ndarray:
    """Analytic gradient of the per-column MSE (1/2n) ||s_a @ w - b||^2,
    i.e. (1/n) s_a' (s_a w - b). Used by the finite-difference checks."""
    w = as_vector(w_col, "w_col")
    a = as_matrix(s_a, "s_a")
    b = as_vector(b_col, "b_col")
    if a.shape[1] != w.shape[0]:
        raise ValueError(
            f"s_a has {a.shape[1]} columns but w_col has {w.shape[0]} elements")
    if a.shape[0] != b.shape[0]:
        raise ValueError(
            f"s_a has {a.shape[0]} rows but b_col has {b.shape[0]} elements")
    return a.T @ (a @ w - b) / a.shape[0]


def apply_projection(proj: ProjectionMatrix, m) -> np.ndarray:
    """Project an n x d embedding matrix through a fitted map: rows map to
    ``row @ proj.data``."""
    matrix = as_matrix(m, "matrix")
    if matrix.shape[1] != proj.d:
        raise ValueError(
            f"matrix has {matrix.shape[1]} columns but projection expects {proj.d}")
    return matrix @ proj.data


class _AlignerBase(BaseEstimator, TransformerMixin):
    """Shared fit/transform plumbing for the three aligner estimators."""

    def _fit_projection(self, X, Y) -> ProjectionMatrix:  # pragma: no cover
        raise NotImplementedError

    def fit(self, X, Y):
        """Learn the projection from paired source rows X and target rows Y."""
        corpus = ParallelCorpus(source=X, target=Y)
        proj = self._fit_projection(corpus)
        self.projection_ = proj.data
        self.meta_ = proj.meta
        self.residual_ = proj.meta["residual_frobenius"]
        self.n_features_in_ = corpus.dim
        return self

    def transform(self, X) -> np.ndarray:
        """Map source-space rows into the target space."""
        if not hasattr(self, "projection_"):
            raise NotFittedError(
                f"{type(self).__name__} is not fitted; call fit(X, Y) first")
        return apply_projection(self.to_projection(), X)

    def to_projection(self) -> ProjectionMatrix:
        """Return the fitted map as a ProjectionMatrix."""
        if not hasattr(self, "projection_"):
            raise NotFittedError(
                f"{type(self).__name__} is not fitted; call fit(X, Y) first")
        return ProjectionMatrix(data=self.projection_, method=self._method,
                                meta=dict(self.meta_))


class LeastSquaresAligner(_AlignerBase):
    """Unconstrained linear map fitted by (optionally ridge-regularized)
    least squares.

    Parameters
    ----------
    ridge : float, default 0.0
        Regularization strength; 0 selects the pseudo-inverse path.
    rcond : float, default 1e-12
        Relative singular-value cutoff for the pseudo-inverse path.
    """

    _method = "least_squares"

    def __init__(self, ridge: float = 0.0, rcond: float = DEFAULT_RCOND):
        self.ridge = ridge
        self.rcond = rcond

    def _fit_projection(self, corpus):
        return fit_least_squares(corpus, ridge=self.ridge, rcond=self.rcond)


class ProcrustesAligner(_AlignerBase):
    """Orthogonal map fitted in closed form; preserves row norms and
    pairwise angles of the source embeddings."""

    _method = "procrustes"

    def __init__(self):
        pass

    def _fit_projection(self, corpus):
        return fit_procrustes(corpus)


class SgdAligner(_AlignerBase):
    """Linear map trained iteratively by mini-batch SGD on the MSE loss.

    Mirrors `SgdConfig`; see there for the stopping rule. After fitting,
    ``final_mse_`` and ``n_epochs_`` expose the training diagnostics.
    """

    _method = "sgd"

    def __init__(self, learning_rate: float = 0.05, epochs: int = 500,
                 batch_size: int = 32, tol: float = 1e-6, seed: int = 0,
                 init: str = "zeros", init_sigma: float = 0.01):
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.tol = tol
        self.seed = seed
        self.init = init
        self.init_sigma = init_sigma

    def _fit_projection(self, corpus):
        config = SgdConfig(learning_rate=self.learning_rate, epochs=self.epochs,
                           batch_size=self.batch_size, tol=self.tol,
                           seed=self.seed, init=self.init,
                           init_sigma=self.init_sigma)
        return fit_sgd(corpus, config)

    def fit(self, X, Y):
        super().fit(X, Y)
        self.final_mse_ = self.meta_["final_mse"]
        self.n_epochs_ = self.meta_["epochs_used"]
        return self


def with_meta(proj: ProjectionMatrix, **extra) -> ProjectionMatrix:
    """Return a copy of ``proj`` with extra metadata entries merged in."""
    meta = dict(proj.meta)
    meta.update(extra)
    return replace(proj, meta=meta)
