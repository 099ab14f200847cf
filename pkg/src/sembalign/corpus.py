"""Paired-corpus containers: row-aligned bilingual embedding matrices and
gold similarity scores for STS evaluation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .validation import as_matrix, as_vector


@dataclass(frozen=True)
class ParallelCorpus:
    """Row-aligned source/target sentence embeddings (one translated pair
    per row). Both sides must share the embedding dimension, since the
    mapping is learned within a single d-dimensional space.
    """

    source: np.ndarray
    target: np.ndarray
    source_lang: str = "src"
    target_lang: str = "tgt"

    def __post_init__(self):
        source = as_matrix(self.source, "source")
        target = as_matrix(self.target, "target")
        if source.shape[0] != target.shape[0]:
            raise ValueError(
                f"source has {source.shape[0]} rows but target has "
                f"{target.shape[0]}; pairs must be row-aligned")
        if source.shape[1] != target.shape[1]:
            raise ValueError(
                f"source dimension {source.shape[1]} != target dimension "
                f"{target.shape[1]}")
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)

    @property
    def n_pairs(self) -> int:
        return self.source.shape[0]

    @property
    def dim(self) -> int:
        return self.source.shape[1]


@dataclass(frozen=True)
class StsGold:
    """Gold similarity scores on the 0-5 scale, one per corpus row."""

    scores: np.ndarray = field()

    def __post_init__(self):
        scores = as_vector(self.scores, "gold scores")
        out_of_range = np.argwhere((scores < 0.0) | (scores > 5.0))
        if out_of_range.size:
            i = int(out_of_range[0][0])
            raise ValueError(
                f"gold score {scores[i]} at index {i} outside [0, 5]")
        object.__setattr__(self, "scores", scores)

    def __len__(self) -> int:
        return self.scores.shape[0]
