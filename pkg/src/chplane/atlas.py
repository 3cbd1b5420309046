"""Binning of the C-H plane, yearly group statistics, and year classification.

The default grid follows the corpus analyses: complexity 0-0.31 in steps of
0.01, entropy 0.5-1.0 in steps of 0.02 (31 x 25 candidate bins), reporting
only bins holding at least `min_count` points.  Yearly statistics are the
sample mean, unbiased variance, and adjusted Fisher-Pearson skewness of H
and C, with a bivariate-normal confidence ellipse per year.  A small
stratified-CV k-nearest-neighbor classifier plus stratified/uniform dummy
baselines provide the above-chance check for year labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    BadGridSpec,
    DegenerateCovariance,
    TooFewPerClass,
    TooFewYears,
)
from .rng import CounterRng, derive_seed
from .similarity import mean_pairwise_cosine, mean_pairwise_jaccard, required_sample_size, subsample


@dataclass(frozen=True)
class GridSpec:
    """Half-open binning of the (C, H) rectangle."""

    c_range: tuple[float, float] = (0.0, 0.31)
    h_range: tuple[float, float] = (0.5, 1.0)
    c_step: float = 0.01
    h_step: float = 0.02
    min_count: int = 50

    def __post_init__(self):
        if self.c_step <= 0 or self.h_step <= 0:
            raise BadGridSpec("bin steps must be positive")
        if self.c_range[1] <= self.c_range[0] or self.h_range[1] <= self.h_range[0]:
            raise BadGridSpec("ranges must be increasing")
        if self.min_count < 1:
            raise BadGridSpec("min_count must be >= 1")

    def c_edges(self) -> np.ndarray:
        n = int(round((self.c_range[1] - self.c_range[0]) / self.c_step))
        return self.c_range[0] + np.arange(n + 1) * self.c_step

    def h_edges(self) -> np.ndarray:
        n = int(round((self.h_range[1] - self.h_range[0]) / self.h_step))
        return self.h_range[0] + np.arange(n + 1) * self.h_step


@dataclass
class BinGrid:
    """Points assigned to half-open (c, h) bins; `bins` maps (ci, hi) -> ids."""

    spec: GridSpec
    bins: dict[tuple[int, int], list[str]]

    def reportable(self) -> dict[tuple[int, int], list[str]]:
        return {k: v for k, v in self.bins.items() if len(v) >= self.spec.min_count}

    def bin_origin(self, key: tuple[int, int]) -> tuple[float, float]:
        ci, hi = key
        return (
            self.spec.c_range[0] + ci * self.spec.c_step,
            self.spec.h_range[0] + hi * self.spec.h_step,
        )


def bin_points(ids: Sequence[str], h: np.ndarray, c: np.ndarray, spec: GridSpec = GridSpec()) -> BinGrid:
    """Assign points to bins; values exactly on an edge go to the upper bin.

    Points outside the grid rectangle are dropped.  Bin membership is
    computed against precomputed float edges (searchsorted, right side) so
    boundary assignment is exact for values constructed from the same
    edges.
    """
    h = np.asarray(h, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    c_edges = spec.c_edges()
    h_edges = spec.h_edges()
    ci = np.searchsorted(c_edges, c, side="right") - 1
    hi = np.searchsorted(h_edges, h, side="right") - 1
    ok = (ci >= 0) & (ci < len(c_edges) - 1) & (hi >= 0) & (hi < len(h_edges) - 1)
    bins: dict[tuple[int, int], list[str]] = {}
    for idx in np.nonzero(ok)[0]:
        bins.setdefault((int(ci[idx]), int(hi[idx])), []).append(ids[idx])
    return BinGrid(spec=spec, bins=bins)


@dataclass
class BinDiversity:
    """Per-bin density and mean similarity under both measures."""

    c_lo: float
    h_lo: float
    count: int
    ie_mean: Optional[float]
    sift_mean: Optional[float]
    sift_n: int


def bin_diversity(
    grid: BinGrid,
    embeddings: dict[str, np.ndarray],
    descriptors: dict[str, object],
    seed: int = 0,
    confidence: float = 0.95,
    margin: float = 0.05,
    ratio: float = 0.75,
    union: str = "exclusive",
    log=None,
) -> list[BinDiversity]:
    """Mean IE cosine (all members) and SIFT Jaccard (Cochran subsample) per bin.

    Bins below min_count are suppressed.  Per-bin failures (missing data,
    degenerate pools) null that bin's measure and are reported via `log`.
    Rows are ordered by bin origin for deterministic output.
    """
    rows: list[BinDiversity] = []
    for key in sorted(grid.reportable()):
        members = grid.bins[key]
        c_lo, h_lo = grid.bin_origin(key)
        ie_mean: Optional[float] = None
        sift_mean: Optional[float] = None
        sift_n = 0
        try:
            vecs = np.stack([embeddings[i] for i in members])
            ie_mean = mean_pairwise_cosine(vecs)
        except Exception as exc:  # per-bin failure: log and continue
            if log:
                log(f"bin ({c_lo:.3g},{h_lo:.3g}): ie failed: {exc}")
        try:
            sift_n = required_sample_size(len(members), confidence, margin)
            sub = subsample(members, sift_n, derive_seed(seed, "bin", key[0], key[1]))
            sets = [descriptors[i] for i in sub]
            sift_mean = mean_pairwise_jaccard(sets, ratio=ratio, union=union)
        except Exception as exc:
            sift_n = 0
            if log:
                log(f"bin ({c_lo:.3g},{h_lo:.3g}): sift failed: {exc}")
        rows.append(BinDiversity(c_lo, h_lo, len(members), ie_mean, sift_mean, sift_n))
    return rows


# --------------------------------------------------------------------------
# yearly statistics
# --------------------------------------------------------------------------

@dataclass
class YearlyStats:
    group: str
    year: int
    count: int
    mean_h: float
    mean_c: float
    var_h: float
    var_c: float
    skew_h: Optional[float]
    skew_c: Optional[float]


def _skewness(x: np.ndarray) -> Optional[float]:
    """Adjusted Fisher-Pearson skewness; None below 3 samples or zero spread."""
    n = len(x)
    if n < 3:
        return None
    m = x.mean()
    m2 = np.mean((x - m) ** 2)
    if m2 == 0.0:
        return None
    g1 = np.mean((x - m) ** 3) / m2**1.5
    return float(g1 * math.sqrt(n * (n - 1)) / (n - 2))


def _variance(x: np.ndarray) -> float:
    return float(np.var(x, ddof=1)) if len(x) > 1 else 0.0


def yearly_stats(
    years: Sequence[int], h: np.ndarray, c: np.ndarray, group: str = ""
) -> list[YearlyStats]:
    """Per-year mean/variance/skewness of H and C, years ascending."""
    years = np.asarray(years)
    h = np.asarray(h, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    out = []
    for year in sorted(set(int(y) for y in years)):
        sel = years == year
        hy, cy = h[sel], c[sel]
        out.append(
            YearlyStats(
                group=group,
                year=year,
                count=int(sel.sum()),
                mean_h=float(hy.mean()),
                mean_c=float(cy.mean()),
                var_h=_variance(hy),
                var_c=_variance(cy),
                skew_h=_skewness(hy),
                skew_c=_skewness(cy),
            )
        )
    return out


@dataclass
class EllipseParams:
    """Bivariate-normal coverage ellipse: center, semi-axes a >= b, angle."""

    center: tuple[float, float]
    semi_axes: tuple[float, float]
    angle: float  # radians in [0, pi)


def confidence_ellipse(points: np.ndarray, level: float = 0.95, of_mean: bool = False) -> EllipseParams:
    """Coverage ellipse of 2-D points from the sample covariance.

    Semi-axes are sqrt(eigenvalue * chi2_2(level)); `of_mean` divides the
    covariance by n (standard error of the mean instead of sample spread).
    Raises DegenerateCovariance for < 3 points or a singular covariance.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != 2:
        raise ValueError("points must be (n, 2)")
    n = points.shape[0]
    if n < 3:
        raise DegenerateCovariance("need at least 3 points")
    cov = np.cov(points, rowvar=False, ddof=1)
    if of_mean:
        cov = cov / n
    evals, evecs = np.linalg.eigh(cov)
    if evals[0] <= 1e-15 * max(evals[1], 1e-300):
        raise DegenerateCovariance("points are collinear")
    # chi-square(2) quantile has closed form -2 ln(1 - level)
    q = -2.0 * math.log(1.0 - level)
    major = evecs[:, 1]
    angle = math.atan2(major[1], major[0]) % math.pi
    return EllipseParams(
        center=(float(points[:, 0].mean()), float(points[:, 1].mean())),
        semi_axes=(float(math.sqrt(evals[1] * q)), float(math.sqrt(evals[0] * q))),
        angle=angle,
    )


@dataclass
class Trajectory:
    """Yearly mean (H, C) path with endpoint deltas."""

    years: list[int]
    mean_h: list[float]
    mean_c: list[float]
    delta_h: float
    delta_c: float


def trajectory(stats: Sequence[YearlyStats]) -> Trajectory:
    if len(stats) < 2:
        raise TooFewYears(f"{len(stats)} year(s); need at least 2")
    ordered = sorted(stats, key=lambda s: s.year)
    return Trajectory(
        years=[s.year for s in ordered],
        mean_h=[s.mean_h for s in ordered],
        mean_c=[s.mean_c for s in ordered],
        delta_h=ordered[-1].mean_h - ordered[0].mean_h,
        delta_c=ordered[-1].mean_c - ordered[0].mean_c,
    )


# --------------------------------------------------------------------------
# year classification baselines
# --------------------------------------------------------------------------

def _stratified_folds(labels: np.ndarray, folds: int, rng: CounterRng) -> list[np.ndarray]:
    """Deterministic stratified k-fold assignment; returns index arrays."""
    assignments = np.zeros(len(labels), dtype=int)
    for cls in sorted(set(labels.tolist())):
        idx = np.nonzero(labels == cls)[0]
        if len(idx) < folds:
            raise TooFewPerClass(f"class {cls!r} has {len(idx)} samples for {folds} folds")
        order = rng.shuffled(len(idx))
        for pos, which in enumerate(order):
            assignments[idx[which]] = pos % folds
    return [np.nonzero(assignments == f)[0] for f in range(folds)]


def knn_classify_cv(
    features: np.ndarray,
    labels: Sequence,
    k: int = 5,
    folds: int = 10,
    seed: int = 0,
) -> tuple[list[float], float]:
    """Stratified k-fold CV accuracy of a kNN vote on (h, c) features.

    Features are standardized per training fold; vote ties break toward
    the class of the nearest neighbor among the tied classes.
    """
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels)
    rng = CounterRng(derive_seed(seed, "knn-folds"))
    accuracies = []
    for test_idx in _stratified_folds(labels, folds, rng):
        mask = np.ones(len(labels), dtype=bool)
        mask[test_idx] = False
        train_x, train_y = features[mask], labels[mask]
        mu = train_x.mean(axis=0)
        sd = train_x.std(axis=0)
        sd[sd == 0.0] = 1.0
        tx = (train_x - mu) / sd
        qx = (features[test_idx] - mu) / sd
        d2 = ((qx[:, None, :] - tx[None, :, :]) ** 2).sum(axis=2)
        kk = min(k, tx.shape[0])
        correct = 0
        for row, true_label in zip(d2, labels[test_idx]):
            order = np.argsort(row, kind="stable")[:kk]
            votes: dict = {}
            for j in order:
                votes[train_y[j]] = votes.get(train_y[j], 0) + 1
            top = max(votes.values())
            tied = {cls for cls, v in votes.items() if v == top}
            for j in order:  # nearest neighbor among tied classes wins
                if train_y[j] in tied:
                    pred = train_y[j]
                    break
            correct += pred == true_label
        accuracies.append(correct / len(test_idx))
    return accuracies, float(np.mean(accuracies))


def dummy_classify_cv(
    labels: Sequence,
    strategy: str = "stratified",
    folds: int = 10,
    seed: int = 0,
) -> tuple[list[float], float]:
    """Chance-level baselines: predictions sampled from training-fold label
    frequencies ('stratified') or uniformly over training-fold classes
    ('uniform')."""
    if strategy not in ("stratified", "uniform"):
        raise ValueError("strategy must be 'stratified' or 'uniform'")
    labels = np.asarray(labels)
    rng = CounterRng(derive_seed(seed, "dummy-folds", strategy))
    accuracies = []
    for test_idx in _stratified_folds(labels, folds, rng):
        mask = np.ones(len(labels), dtype=bool)
        mask[test_idx] = False
        train_y = labels[mask]
        classes = sorted(set(train_y.tolist()))
        if strategy == "stratified":
            weights = np.array([np.mean(train_y == cls) for cls in classes])
        else:
            weights = np.full(len(classes), 1.0 / len(classes))
        cum = np.cumsum(weights)
        cum[-1] = 1.0
        correct = 0
        for true_label in labels[test_idx]:
            u = rng.unit()
            pred = classes[int(np.searchsorted(cum, u, side="right"))]
            correct += pred == true_label
        accuracies.append(correct / len(test_idx))
    return accuracies, float(np.mean(accuracies))
