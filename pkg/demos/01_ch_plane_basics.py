"""Complexity-entropy basics: from pixel windows to a point on the plane.

Every 2x2 window of a grayscale image is ranked into one of 4! = 24
ordinal patterns.  The distribution of those patterns gives two numbers:
normalized permutation entropy H (how disordered the local structure is)
and statistical complexity C (how far the structure sits from both perfect
order and pure noise).  This script walks the canonical inputs.
"""

import numpy as np

from chplane import (
    ch_point,
    complexity_bounds,
    max_js_divergence,
    normalized_entropy,
    ordinal_patterns,
    statistical_complexity,
)

rng = np.random.default_rng(7)

# --- 1. a single window -----------------------------------------------------
# The values [[1, 2], [3, 4]] read row-major are already sorted: the
# "identity" pattern.  One window, one pattern, probability 1.
dist = ordinal_patterns(np.array([[1.0, 2.0], [3.0, 4.0]]))
print(f"single window: {dist.window_count} window, "
      f"{np.count_nonzero(dist.probs)} pattern(s), n = {dist.n}")

# --- 2. the degenerate corners ----------------------------------------------
# A constant image has every window tied; stable ranking maps ties to the
# identity pattern, so H = 0 and C = 0.  A strictly increasing gradient
# does the same with no ties at all.
flat = ch_point(np.full((64, 64), 100.0))
ramp = ch_point(np.arange(4096.0).reshape(64, 64))
print(f"constant image  -> (H, C) = ({flat.h:.4f}, {flat.c:.4f})")
print(f"monotone ramp   -> (H, C) = ({ramp.h:.4f}, {ramp.c:.4f})")

# --- 3. structured vs random ------------------------------------------------
# A checkerboard uses exactly two alternating patterns: low entropy, but
# maximally far from uniform among two-pattern mixes, so C is sizable.
# I.i.d. noise spreads over all 24 patterns: H near 1, C near 0.
board = (np.indices((65, 65)).sum(axis=0) % 2).astype(float)
board_dist = ordinal_patterns(board)
print(f"checkerboard    -> H = {normalized_entropy(board_dist):.6f} "
      f"(= ln2/ln24), C = {statistical_complexity(board_dist):.6f}")

noise = ch_point(rng.random((512, 512)) * 255)
print(f"uniform noise   -> (H, C) = ({noise.h:.6f}, {noise.c:.6f})")

# --- 4. the plane is bounded --------------------------------------------------
# For n = 24 patterns every image lands between two extremal curves.  The
# normalizer D* is the divergence of a delta distribution from uniform.
print(f"\nD* for n = 24: {max_js_divergence(24):.6f}")
curves = complexity_bounds(24, resolution=400)
for h_query in (0.2, 0.5, 0.8, 0.95):
    lo = curves.lower_at(h_query)
    hi = curves.upper_at(h_query)
    print(f"  at H = {h_query:.2f}: C ranges over [{lo:.4f}, {hi:.4f}]")

# A quick containment check on arbitrary textures:
inside = 0
for _ in range(200):
    img = rng.random((32, 32)) * 255
    point = ch_point(img)
    inside += bool(curves.contains(point.h, point.c))
print(f"200 random images inside the bounds: {inside}/200")
