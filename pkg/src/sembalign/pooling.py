"""Mean pooling of token embeddings into fixed-size sentence embeddings.

A transformer encoder emits one vector per token; averaging them yields a
single pooled vector per sentence. Pooling here averages every row it is
given -- dropping special tokens, if desired, is the extractor's job.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .validation import as_matrix


def mean_pool(tokens) -> np.ndarray:
    """Average a t x d token-embedding matrix into a single d-vector.

    Parameters
    ----------
    tokens : array-like, shape (t, d)
        One row per token, t >= 1.

    Returns
    -------
    ndarray, shape (d,)
        Column means of ``tokens``.
    """
    m = as_matrix(tokens, "token matrix")
    return m.mean(axis=0)


def stack_pooled(token_matrices: Sequence) -> np.ndarray:
    """Pool a sequence of token matrices into an n x d embedding matrix,
    one row per input sentence. All inputs must share the dimension d."""
    if len(token_matrices) == 0:
        raise ValueError("empty input: no token matrices to pool")
    pooled = []
    dim = None
    for i, tokens in enumerate(token_matrices):
        row = mean_pool(tokens)
        if dim is None:
            dim = row.shape[0]
        elif row.shape[0] != dim:
            raise ValueError(
                f"token matrix {i} has {row.shape[0]} columns, expected {dim}")
        pooled.append(row)
    return np.vstack(pooled)
