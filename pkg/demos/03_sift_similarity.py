"""Keypoint similarity: detection, ratio-test matching, Jaccard scores.

Shows the scale-space detector on textured images, the invariances the
descriptor buys (exact under brightness shifts, near-exact under 90-degree
rotation), and the binary descriptor cache used by the batch pipeline.
"""

from pathlib import Path

import numpy as np

from chplane import detect_and_describe, jaccard_similarity, match_descriptors
from chplane.sift import jaccard_detail, load_descriptors, save_descriptors
from chplane.synthetic import textured_image

out = Path(__file__).parent / "demo_output"
out.mkdir(exist_ok=True)

# --- 1. detection ------------------------------------------------------------
img = textured_image(42, size=160, kind="smooth")
ds = detect_and_describe(img)
scales = [kp.scale for kp in ds.keypoints]
print(f"smooth texture: {len(ds)} keypoints, scales "
      f"{min(scales):.2f}..{max(scales):.2f}, descriptors {ds.descriptors.shape}")

flat = detect_and_describe(np.full((64, 64), 128.0))
print(f"uniform image: {len(flat)} keypoints (no gradients, empty set is valid)")

# --- 2. matching and the ratio test -------------------------------------------
other = textured_image(43, size=160, kind="smooth")
ds_other = detect_and_describe(other)
matches = match_descriptors(ds, ds_other, ratio=0.75)
print(f"\nunrelated textures: {len(matches)} ratio-test matches "
      f"out of {len(ds)} x {len(ds_other)} keypoints")

# --- 3. Jaccard similarity and its invariances --------------------------------
print(f"self similarity:        {jaccard_similarity(ds, ds):.3f}")
print(f"unrelated texture:      {jaccard_similarity(ds, ds_other):.3f}")
rot = detect_and_describe(np.rot90(img))
print(f"90-degree rotated copy: {jaccard_similarity(ds, rot):.3f}")
shifted = detect_and_describe(np.clip(img, 10, 245) + 10.0)
clipped = detect_and_describe(np.clip(img, 10, 245))
print(f"brightness-shifted:     {jaccard_similarity(clipped, shifted):.3f}")

detail = jaccard_detail(ds, rot)
print(f"rotation detail: {detail.matches} matches over union "
      f"{detail.k_a} + {detail.k_b} - {detail.matches}")

# --- 4. descriptor cache -------------------------------------------------------
cache = out / "demo.sft"
save_descriptors(cache, ds)
back = load_descriptors(cache)
print(f"\ncache round trip: {cache.stat().st_size} bytes, "
      f"{len(back)} keypoints, descriptors identical: "
      f"{np.array_equal(back.descriptors, ds.descriptors)}")
