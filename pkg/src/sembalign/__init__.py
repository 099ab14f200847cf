"""Cross-lingual alignment of sentence embeddings.

Fits a linear projection between the embedding spaces of two languages,
from row-aligned translated sentence pairs, by one of three routes:
normal-equation least squares, orthogonal Procrustes, or a mini-batch
SGD-trained linear map. Alignment quality is evaluated with per-pair
cosine similarity and, against gold similarity scores, Spearman and
Pearson rank correlation.
"""

__version__ = "0.1.0"

from .errors import ConvergenceError
from .corpus import ParallelCorpus, StsGold
from .pooling import mean_pool, stack_pooled
from .linalg import SvdResult, gram_solve, pinv_solve, random_orthogonal, svd
from .aligners import (
    LeastSquaresAligner,
    ProcrustesAligner,
    ProjectionMatrix,
    SgdAligner,
    SgdConfig,
    apply_projection,
    fit_least_squares,
    fit_procrustes,
    fit_sgd,
    sgd_gradient,
)
from .metrics import (
    AlignmentReport,
    avg_pair_cosine,
    cosine,
    pearson,
    spearman,
    sts_eval,
)
from .synth import SynthSpec, generate
from .io import (
    read_gold_tsv,
    read_manifest,
    read_projection,
    read_semb,
    read_tsv_matrix,
    write_manifest,
    write_projection,
    write_report_json,
    write_semb,
)

__all__ = [
    "__version__",
    "AlignmentReport",
    "ConvergenceError",
    "LeastSquaresAligner",
    "ParallelCorpus",
    "ProcrustesAligner",
    "ProjectionMatrix",
    "SgdAligner",
    "SgdConfig",
    "StsGold",
    "SvdResult",
    "SynthSpec",
    "apply_projection",
    "avg_pair_cosine",
    "cosine",
    "fit_least_squares",
    "fit_procrustes",
    "fit_sgd",
    "generate",
    "gram_solve",
    "mean_pool",
    "pearson",
    "pinv_solve",
    "random_orthogonal",
    "read_gold_tsv",
    "read_manifest",
    "read_projection",
    "read_semb",
    "read_tsv_matrix",
    "sgd_gradient",
    "spearman",
    "stack_pooled",
    "sts_eval",
    "svd",
    "write_manifest",
    "write_projection",
    "write_report_json",
    "write_semb",
]
