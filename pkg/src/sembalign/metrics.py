"""Alignment quality and STS evaluation metrics.

The headline alignment measure is the average cosine similarity over
row-aligned translated pairs, before or after projection. STS evaluation
correlates predicted pair cosines with gold 0-5 scores using Pearson and
Spearman (average ranks for ties). Correlations are stored in [-1, 1];
the reporting layer renders them x100, the usual percentile convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np
from scipy.stats import rankdata

from .aligners import ProjectionMatrix, apply_projection
from .corpus import ParallelCorpus, StsGold
from .validation import as_vector


@dataclass(frozen=True)
class AlignmentReport:
    """Metrics bundle for one evaluation run.

    ``avg_cosine`` always equals the mean of ``per_pair_cosine`` when the
    per-pair values are kept. ``spearman``/``pearson`` are present only for
    STS evaluations and are stored raw in [-1, 1].
    """

    n_pairs: int
    avg_cosine: float
    residual_frobenius: float
    method: str
    timestamp: str
    per_pair_cosine: np.ndarray | None = None
    spearman: float | None = None
    pearson: float | None = None

    def __post_init__(self):
        if self.per_pair_cosine is not None:
            gap = abs(self.avg_cosine - float(np.mean(self.per_pair_cosine)))
            if gap > 1e-12:
                raise ValueError(
                    f"avg_cosine inconsistent with per-pair mean (gap {gap:.3e})")
        for name, value in (("avg_cosine", self.avg_cosine),
                            ("spearman", self.spearman),
                            ("pearson", self.pearson)):
            if value is not None and not -1.0 <= value <= 1.0:
                raise ValueError(f"{name}={value} outside [-1, 1]")


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def cosine(u, v) -> float:
    """Cosine similarity of two vectors, clamped to [-1, 1] against
    floating-point rounding. Zero-norm input is an error: a zero vector
    has no direction."""
    uu = as_vector(u, "u")
    vv = as_vector(v, "v")
    if uu.shape[0] != vv.shape[0]:
        raise ValueError(f"length mismatch: {uu.shape[0]} vs {vv.shape[0]}")
    su = float(uu @ uu)
    sv = float(vv @ vv)
    if su == 0.0 or sv == 0.0:
        raise ValueError("zero vector has no direction")
    return float(np.clip(float(uu @ vv) / np.sqrt(su * sv), -1.0, 1.0))


def _pair_cosines(projected: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Row-wise cosines between two equal-shape matrices, raising on any
    zero-norm row with its index."""
    ss_p = np.einsum("ij,ij->i", projected, projected)
    ss_t = np.einsum("ij,ij->i", target, target)
    for name, ss in (("projected source", ss_p), ("target", ss_t)):
        zeros = np.flatnonzero(ss == 0.0)
        if zeros.size:
            raise ValueError(
                f"{name} row {zeros[0]} has zero norm; zero vector has no direction")
    dots = np.einsum("ij,ij->i", projected, target)
    return np.clip(dots / np.sqrt(ss_p * ss_t), -1.0, 1.0)


def pearson(x, y) -> float:
    """Sample Pearson correlation coefficient.

    Both sequences need length >= 2 and nonzero variance; a constant
    sequence has no defined correlation and raises.
    """
    xv = as_vector(x, "x")
    yv = as_vector(y, "y")
    if xv.shape[0] != yv.shape[0]:
        raise ValueError(f"length mismatch: {xv.shape[0]} vs {yv.shape[0]}")
    if xv.shape[0] < 2:
        raise ValueError("need at least 2 observations")
    if np.all(xv == xv[0]) or np.all(yv == yv[0]):
        raise ValueError("constant sequence has no correlation")
    xc = xv - xv.mean()
    yc = yv - yv.mean()
    vx = float(xc @ xc)
    vy = float(yc @ yc)
    if vx == 0.0 or vy == 0.0:
        raise ValueError("constant sequence has no correlation")
    return float(np.clip(float(xc @ yc) / np.sqrt(vx * vy), -1.0, 1.0))


def spearman(x, y) -> float:
    """Spearman rank correlation: Pearson on fractional ranks, ties
    receiving average ranks."""
    xv = as_vector(x, "x")
    yv = as_vector(y, "y")
    if xv.shape[0] != yv.shape[0]:
        raise ValueError(f"length mismatch: {xv.shape[0]} vs {yv.shape[0]}")
    return pearson(rankdata(xv, method="average"), rankdata(yv, method="average"))


def avg_pair_cosine(corpus: ParallelCorpus,
                    proj: ProjectionMatrix | None = None) -> AlignmentReport:
    """Average cosine similarity of the translated pairs, after mapping the
    source side through ``proj`` (or leaving it unaligned when None).

    The report also records the Frobenius residual between the (projected)
    source and the target, the raw per-pair cosines, and the method label.
    """
    projected = apply_projection(proj, corpus.source) if proj is not None else corpus.source
    cosines = _pair_cosines(projected, corpus.target)
    return AlignmentReport(
        n_pairs=corpus.n_pairs,
        avg_cosine=float(np.mean(cosines)),
        residual_frobenius=float(np.linalg.norm(projected - corpus.target)),
        method=proj.method if proj is not None else "unaligned",
        timestamp=_utc_now(),
        per_pair_cosine=cosines,
    )


def sts_eval(corpus: ParallelCorpus, gold: StsGold,
             proj: ProjectionMatrix | None = None) -> AlignmentReport:
    """Score cross-lingual STS: predict each pair's similarity as the
    cosine of the (projected) source row and the target row, then
    correlate predictions with the gold scores."""
    if len(gold) != corpus.n_pairs:
        raise ValueError(
            f"gold has {len(gold)} scores but corpus has {corpus.n_pairs} pairs")
    projected = apply_projection(proj, corpus.source) if proj is not None else corpus.source
    cosines = _pair_cosines(projected, corpus.target)
    return AlignmentReport(
        n_pairs=corpus.n_pairs,
        avg_cosine=float(np.mean(cosines)),
        residual_frobenius=float(np.linalg.norm(projected - corpus.target)),
        method=proj.method if proj is not None else "unaligned",
        timestamp=_utc_now(),
        per_pair_cosine=cosines,
        spearman=spearman(cosines, gold.scores),
        pearson=pearson(cosines, gold.scores),
    )
