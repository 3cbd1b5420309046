"""PCA reduction, cosine similarity, pairwise diversity, and subsampling.

Raw feature rows are reduced with plain covariance PCA (no standardization)
to 100 dimensions per level; low and high projections concatenate into a
200-d embedding per image.  Intragroup diversity is the mean similarity
over all unordered pairs, either cosine over embeddings or Jaccard over
SIFT descriptor sets, optionally on a seeded subsample.  Sample sizes for
subsampling follow Cochran's formula with finite-population correction at
p = 0.5.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .errors import (
    DimensionMismatch,
    InsufficientRows,
    LengthMismatch,
    NotEnoughRecords,
    TooFewItems,
    ZeroVector,
)
from .features import EmbeddingTable, RawFeatures
from .rng import CounterRng
from . import sift

EMBED_COMPONENTS = 100  # per feature level; concatenated embedding is 200-d


@dataclass
class PCAModel:
    """Mean vector plus orthonormal components sorted by explained variance."""

    mean: np.ndarray
    components: np.ndarray          # (k, d), rows orthonormal
    explained_variance: np.ndarray  # (k,), non-increasing

    def project(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.float64)
        if rows.shape[-1] != self.mean.shape[0]:
            raise DimensionMismatch(
                f"rows have {rows.shape[-1]} features, model expects {self.mean.shape[0]}"
            )
        return (rows - self.mean) @ self.components.T


def fit_pca(rows: np.ndarray, k: int) -> PCAModel:
    """Top-k principal components of mean-centered rows (SVD route).

    Components are sign-fixed so the largest-magnitude entry of each is
    positive, making embeddings reproducible across runs and solvers.
    """
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2:
        raise ValueError("rows must be a 2-D matrix")
    n = rows.shape[0]
    if k < 1:
        raise ValueError("k must be >= 1")
    if n <= k:
        raise InsufficientRows(f"{n} rows cannot support {k} components")
    mean = rows.mean(axis=0)
    _, svals, vt = np.linalg.svd(rows - mean, full_matrices=False)
    components = vt[:k].copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    explained = svals[:k] ** 2 / (n - 1)
    return PCAModel(mean=mean, components=components, explained_variance=explained)


def build_embeddings(
    raw: RawFeatures, model_low: PCAModel, model_high: PCAModel
) -> EmbeddingTable:
    """Concatenate low/high PCA projections per row, order preserved."""
    low = model_low.project(raw.low)
    high = model_high.project(raw.high)
    return EmbeddingTable(ids=list(raw.ids), vectors=np.hstack([low, high]))


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise LengthMismatch(f"vectors of length {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ZeroVector("cosine similarity undefined for zero vectors")
    return float(np.clip(u @ v / (nu * nv), -1.0, 1.0))


@dataclass
class SimilaritySummary:
    """Mean pairwise similarity of one group under one measure."""

    group: str
    measure: str           # 'ie' or 'sift'
    mean: float
    pair_count: int
    seed: int = 0
    sample_index: list[int] = field(default_factory=list)
    sample_ids: list[str] = field(default_factory=list)


def subsample(records: Sequence, n: int, seed: int) -> list:
    """Uniform sample without replacement, stable original order."""
    if n > len(records):
        raise NotEnoughRecords(f"asked for {n} of {len(records)}")
    if n == len(records):
        return list(records)
    picked = CounterRng(seed).choose(len(records), n)
    return [records[i] for i in picked]


def required_sample_size(population: int, confidence: float = 0.95, margin: float = 0.05) -> int:
    """Cochran's sample size with finite-population correction, p = 0.5."""
    if population < 1:
        raise ValueError("population must be >= 1")
    if not (0.0 < confidence < 1.0 and 0.0 < margin < 1.0):
        raise ValueError("confidence and margin must be in (0, 1)")
    z = stats.norm.ppf(0.5 + confidence / 2.0)
    zz = z * z * 0.25
    n = population * zz / (margin * margin * (population - 1) + zz)
    return int(np.ceil(n - 1e-12))


def mean_pairwise_cosine(vectors: np.ndarray) -> float:
    """Mean cosine over all unordered row pairs.

    Uses the Gram identity sum_{i != j} u_i . u_j = |sum u|^2 - s for unit
    rows, which is exact up to rounding and O(s d) instead of O(s^2 d).
    """
    vectors = np.asarray(vectors, dtype=np.float64)
    s = vectors.shape[0]
    if s < 2:
        raise TooFewItems("need at least 2 vectors")
    norms = np.linalg.norm(vectors, axis=1)
    if np.any(norms == 0.0):
        raise ZeroVector("zero vector in similarity pool")
    unit = vectors / norms[:, None]
    total = unit.sum(axis=0)
    return float((total @ total - s) / (s * (s - 1)))


def mean_pairwise_jaccard(
    sets: Sequence[sift.DescriptorSet],
    ratio: float = sift.DEFAULT_RATIO,
    union: str = "exclusive",
) -> float:
    s = len(sets)
    if s < 2:
        raise TooFewItems("need at least 2 descriptor sets")
    total = 0.0
    for i in range(s):
        for j in range(i + 1, s):
            total += sift.jaccard_similarity(sets[i], sets[j], ratio=ratio, union=union)
    return total / (s * (s - 1) / 2)


def mean_pairwise_similarity(
    items,
    measure: str,
    group: str = "",
    subsample_n: Optional[int] = None,
    seed: int = 0,
    ids: Optional[Sequence[str]] = None,
    ratio: float = sift.DEFAULT_RATIO,
    union: str = "exclusive",
) -> SimilaritySummary:
    """Mean similarity over all unordered pairs of `items`.

    `measure='ie'` expects an (s, d) embedding matrix; `measure='sift'`
    expects a sequence of DescriptorSets.  With `subsample_n`, a seeded
    subsample is drawn first (deterministic; indices recorded in the
    summary).
    """
    if measure not in ("ie", "sift"):
        raise ValueError("measure must be 'ie' or 'sift'")
    count = len(items)
    index = list(range(count))
    if subsample_n is not None and subsample_n < count:
        index = subsample(index, subsample_n, seed)
    if len(index) < 2:
        raise TooFewItems(f"{len(index)} items after subsampling")
    if measure == "ie":
        mean = mean_pairwise_cosine(np.asarray(items)[index])
    else:
        mean = mean_pairwise_jaccard([items[i] for i in index], ratio=ratio, union=union)
    s = len(index)
    return SimilaritySummary(
        group=group,
        measure=measure,
        mean=mean,
        pair_count=s * (s - 1) // 2,
        seed=seed,
        sample_index=index,
        sample_ids=[ids[i] for i in index] if ids is not None else [],
    )
