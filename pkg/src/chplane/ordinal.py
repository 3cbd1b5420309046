"""Ordinal-pattern distributions and the complexity-entropy plane.

A dx-by-dy window slides over a luminance matrix (window steps taux/tauy);
the window's values, read row-major, are ranked with a stable sort (ties
broken by position), and each resulting permutation is one of (dx*dy)!
ordinal patterns.  From the pattern distribution P:

    H(P) = (1 / ln n) * sum_i p_i ln(1 / p_i)          normalized entropy
    C(P) = D(P, U) * H(P) / D*                         statistical complexity

where U is uniform over the n patterns, D is the Jensen-Shannon divergence
(natural log), and D* is the maximal divergence from U, attained by a delta
distribution:

    D* = -1/2 * [ (n+1)/n * ln(n+1) - 2 ln(2n) + ln n ]

For a fixed n, all (H, C) points live between a minimum and a maximum
complexity curve; both are traced here from their extremal distribution
families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import LengthMismatch, MatrixTooSmall
from .image_io import CorpusRecord


@dataclass(frozen=True)
class EmbeddingParams:
    """Window shape (dx columns by dy rows) and sliding strides."""

    dx: int = 2
    dy: int = 2
    taux: int = 1
    tauy: int = 1

    def __post_init__(self):
        if min(self.dx, self.dy, self.taux, self.tauy) < 1:
            raise ValueError("dx, dy, taux, tauy must all be >= 1")
        if self.dx * self.dy < 2:
            raise ValueError("window must contain at least 2 values")

    @property
    def n_patterns(self) -> int:
        return math.factorial(self.dx * self.dy)


@dataclass
class OrdinalDistribution:
    """Probability vector over the n = (dx*dy)! ordinal patterns."""

    n: int
    probs: np.ndarray
    window_count: int

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=np.float64)
        if self.probs.shape != (self.n,):
            raise ValueError("probs length must equal pattern count")
        if self.window_count < 1:
            raise ValueError("window_count must be >= 1")
        if abs(self.probs.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1")


@dataclass
class CHPoint:
    """Normalized entropy and statistical complexity of one image."""

    h: float
    c: float
    record: Optional[CorpusRecord] = None
    window_count: int = 0
    width: int = 0
    height: int = 0


def _lehmer_index(perms: np.ndarray, d: int) -> np.ndarray:
    """Lexicographic rank of each permutation row (factorial number system)."""
    idx = np.zeros(perms.shape[0], dtype=np.int64)
    for i in range(d - 1):
        smaller_after = np.zeros(perms.shape[0], dtype=np.int64)
        for j in range(i + 1, d):
            smaller_after += perms[:, j] < perms[:, i]
        idx += smaller_after * math.factorial(d - 1 - i)
    return idx


def pattern_of(window_values) -> tuple[int, ...]:
    """Stable rank permutation of a flat window (reference path, used by tests)."""
    vals = list(window_values)
    return tuple(sorted(range(len(vals)), key=lambda i: (vals[i], i)))


def ordinal_patterns(matrix: np.ndarray, params: EmbeddingParams = EmbeddingParams()) -> OrdinalDistribution:
    """Ordinal-pattern distribution of a 2-D matrix.

    Window top-left corners run over rows {0, tauy, 2 tauy, ...} and columns
    {0, taux, ...}; each dy-by-dx window is read row-major and ranked
    stably.  Raises MatrixTooSmall if no window fits.
    """
    m = np.ascontiguousarray(np.asarray(matrix, dtype=np.float64))
    if m.ndim != 2:
        raise ValueError("matrix must be 2-D")
    h, w = m.shape
    if h < params.dy or w < params.dx:
        raise MatrixTooSmall(f"{h}x{w} matrix cannot hold a {params.dy}x{params.dx} window")
    d = params.dx * params.dy
    # all windows as rows: (n_row_pos, n_col_pos, dy, dx) -> (N, d)
    view = np.lib.stride_tricks.sliding_window_view(m, (params.dy, params.dx))
    view = view[:: params.tauy, :: params.taux]
    windows = view.reshape(-1, d)
    perms = np.argsort(windows, axis=1, kind="stable")
    counts = np.bincount(_lehmer_index(perms, d), minlength=math.factorial(d))
    total = int(counts.sum())
    return OrdinalDistribution(n=math.factorial(d), probs=counts / total, window_count=total)


def shannon_entropy(p: np.ndarray) -> float:
    """Unnormalized Shannon entropy, natural log; 0 * ln 0 taken as 0."""
    p = np.asarray(p, dtype=np.float64)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz)))


def normalized_entropy(dist: OrdinalDistribution | np.ndarray, n: int | None = None) -> float:
    """H(P) = S(P) / ln n, clamped to [0, 1]."""
    if isinstance(dist, OrdinalDistribution):
        p, n = dist.probs, dist.n
    else:
        p = np.asarray(dist, dtype=np.float64)
        n = len(p) if n is None else n
    if n < 2:
        return 0.0
    return min(1.0, max(0.0, shannon_entropy(p) / math.log(n)))


def js_divergence(p: np.ndarray, q: np.ndarray) -> float:
    """Jensen-Shannon divergence S((P+Q)/2) - S(P)/2 - S(Q)/2, natural log."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise LengthMismatch(f"distributions of length {p.shape} vs {q.shape}")
    return shannon_entropy((p + q) / 2.0) - shannon_entropy(p) / 2.0 - shannon_entropy(q) / 2.0


def max_js_divergence(n: int) -> float:
    """Maximal JS divergence from the uniform distribution over n outcomes.

    Attained by a delta distribution; closed form:
    D* = -1/2 [ (n+1)/n ln(n+1) - 2 ln(2n) + ln n ].
    """
    if n < 2:
        raise ValueError("need at least 2 outcomes")
    return -0.5 * ((n + 1) / n * math.log(n + 1) - 2.0 * math.log(2 * n) + math.log(n))


def statistical_complexity(dist: OrdinalDistribution | np.ndarray, n: int | None = None) -> float:
    """C(P) = D(P, U) * H(P) / D* with U uniform over the n patterns."""
    if isinstance(dist, OrdinalDistribution):
        p, n = dist.probs, dist.n
    else:
        p = np.asarray(dist, dtype=np.float64)
        n = len(p) if n is None else n
    uniform = np.full(n, 1.0 / n)
    return js_divergence(p, uniform) * normalized_entropy(p, n) / max_js_divergence(n)


def ch_point(
    matrix: np.ndarray,
    params: EmbeddingParams = EmbeddingParams(),
    record: Optional[CorpusRecord] = None,
) -> CHPoint:
    """Map one luminance matrix to its (H, C) coordinates."""
    dist = ordinal_patterns(matrix, params)
    h, w = np.asarray(matrix).shape
    return CHPoint(
        h=normalized_entropy(dist),
        c=statistical_complexity(dist),
        record=record,
        window_count=dist.window_count,
        width=w,
        height=h,
    )


@dataclass
class BoundaryCurves:
    """Extremal complexity curves for pattern count n.

    `lower` and `upper` are (N, 2) arrays of (h, c) pairs sorted by h;
    both start at (0, 0) and end at (1, 0).
    """

    n: int
    lower: np.ndarray
    upper: np.ndarray
    _lo_h: np.ndarray = field(init=False, repr=False)
    _lo_c: np.ndarray = field(init=False, repr=False)
    _up_h: np.ndarray = field(init=False, repr=False)
    _up_c: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self._lo_h, self._lo_c = self.lower[:, 0], self.lower[:, 1]
        self._up_h, self._up_c = self.upper[:, 0], self.upper[:, 1]

    def lower_at(self, h) -> np.ndarray:
        return np.interp(h, self._lo_h, self._lo_c)

    def upper_at(self, h) -> np.ndarray:
        return np.interp(h, self._up_h, self._up_c)

    def contains(self, h, c, tol: float = 1e-6) -> np.ndarray:
        h = np.asarray(h, dtype=np.float64)
        c = np.asarray(c, dtype=np.float64)
        return (c >= self.lower_at(h) - tol) & (c <= self.upper_at(h) + tol)


def _hc_of(probs: np.ndarray, n: int) -> tuple[float, float]:
    return normalized_entropy(probs, n), statistical_complexity(probs, n)


def complexity_bounds(n: int, resolution: int = 200) -> BoundaryCurves:
    """Trace the minimum and maximum complexity curves for n patterns.

    Lower curve: one component p in [1/n, 1], the rest equal.  Upper curve:
    upper envelope over m in {0, ..., n-2} of families with m zero
    components, one free component p in [0, 1/(n-m)], and the remaining
    n-m-1 components equal.  Each family is evaluated at `resolution`
    points; families tile consecutive h intervals, so concatenating them in
    h order yields the envelope.
    """
    if n < 2:
        raise ValueError("need at least 2 patterns")
    if resolution < 10:
        raise ValueError("resolution must be >= 10")

    lower_pts = []
    for p in np.linspace(1.0 / n, 1.0, resolution):
        probs = np.full(n, (1.0 - p) / (n - 1))
        probs[0] = p
        lower_pts.append(_hc_of(probs, n))
    lower = np.array(lower_pts)[np.argsort(np.array(lower_pts)[:, 0], kind="stable")]

    upper_pts = []
    for m in range(n - 1):
        live = n - m  # nonzero components
        for p in np.linspace(0.0, 1.0 / live, resolution):
            probs = np.zeros(n)
            probs[0] = p
            probs[1:live] = (1.0 - p) / (live - 1)
            upper_pts.append(_hc_of(probs, n))
    upper = np.array(upper_pts)
    upper = upper[np.argsort(upper[:, 0], kind="stable")]

    return BoundaryCurves(n=n, lower=lower, upper=upper)
