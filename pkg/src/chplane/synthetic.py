"""Deterministic synthetic image corpus for tests, demos, and acceptance runs.

Real corpora at the scale this toolkit targets are not redistributable, so
a 200-image stand-in is generated procedurally: textured archetypes (blob
fields, stripe interference, rectangle mosaics, smoothed noise, gradients)
spread over two groups and eleven years.  Everything is seeded; the same
seed always produces byte-identical PNG files.

`write_stub_features` fabricates a raw-feature exchange file directly from
image statistics.  It is a stand-in for the neural extractor so that the
ingestion, PCA, and similarity stages can be exercised end to end without
network weights; the numbers are deterministic image summaries, not
learned features.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from PIL import Image

from .features import RawFeatures, write_chfeat
from .image_io import CorpusRecord, load_image, to_grayscale, write_manifest

GROUPS = ("gallery-a", "gallery-b")
YEARS = tuple(range(2010, 2021))
FIELD_POOL = ("illustration", "graphic-design", "character", "animation", "fine-art")


def _smooth_noise(rng: np.random.Generator, shape, sigma: float) -> np.ndarray:
    from scipy.ndimage import gaussian_filter

    img = gaussian_filter(rng.random(shape), sigma, mode="wrap")
    lo, hi = img.min(), img.max()
    return (img - lo) / (hi - lo + 1e-12)


def _blob_field(rng: np.random.Generator, shape, n_blobs: int) -> np.ndarray:
    h, w = shape
    yy, xx = np.mgrid[0:h, 0:w]
    img = np.zeros(shape)
    for _ in range(n_blobs):
        cy, cx = rng.uniform(0, h), rng.uniform(0, w)
        s = rng.uniform(2.0, min(h, w) / 6.0)
        amp = rng.uniform(0.3, 1.0) * rng.choice([-1.0, 1.0])
        img += amp * np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * s * s))
    lo, hi = img.min(), img.max()
    return (img - lo) / (hi - lo + 1e-12)


def _stripes(rng: np.random.Generator, shape) -> np.ndarray:
    h, w = shape
    yy, xx = np.mgrid[0:h, 0:w]
    img = np.zeros(shape)
    for _ in range(rng.integers(2, 5)):
        theta = rng.uniform(0, math.pi)
        freq = rng.uniform(0.05, 0.5)
        phase = rng.uniform(0, 2 * math.pi)
        img += np.sin(freq * (xx * math.cos(theta) + yy * math.sin(theta)) + phase)
    lo, hi = img.min(), img.max()
    return (img - lo) / (hi - lo + 1e-12)


def _mosaic(rng: np.random.Generator, shape, n_rects: int) -> np.ndarray:
    h, w = shape
    img = np.full(shape, rng.random())
    for _ in range(n_rects):
        y0 = int(rng.integers(0, h - 4))
        x0 = int(rng.integers(0, w - 4))
        y1 = int(rng.integers(y0 + 2, min(h, y0 + h // 3) + 1))
        x1 = int(rng.integers(x0 + 2, min(w, x0 + w // 3) + 1))
        img[y0:y1, x0:x1] = rng.random()
    return img


def _gradient(rng: np.random.Generator, shape) -> np.ndarray:
    h, w = shape
    yy, xx = np.mgrid[0:h, 0:w]
    gx, gy = rng.uniform(-1, 1), rng.uniform(-1, 1)
    img = gx * xx / w + gy * yy / h
    lo, hi = img.min(), img.max()
    return (img - lo) / (hi - lo + 1e-12)


_ARCHETYPES = ("noise", "smooth", "blobs", "stripes", "mosaic", "gradient")


def textured_image(seed: int, size: int = 160, kind: str = "blobs") -> np.ndarray:
    """One grayscale float image in [0, 255] with keypoint-rich structure."""
    rng = np.random.default_rng(seed)
    shape = (size, size)
    if kind == "noise":
        img = rng.random(shape)
    elif kind == "smooth":
        img = _smooth_noise(rng, shape, sigma=rng.uniform(1.5, 5.0))
    elif kind == "blobs":
        img = _blob_field(rng, shape, n_blobs=int(rng.integers(8, 30)))
    elif kind == "stripes":
        img = _stripes(rng, shape)
    elif kind == "mosaic":
        img = _mosaic(rng, shape, n_rects=int(rng.integers(6, 24)))
    elif kind == "gradient":
        img = _gradient(rng, shape)
    else:
        raise ValueError(f"unknown archetype {kind!r}")
    return img * 255.0


def _colorize(rng: np.random.Generator, gray01: np.ndarray) -> np.ndarray:
    """Map a [0,1] field through a random two-color ramp to RGB uint8."""
    c0 = rng.integers(0, 90, size=3).astype(np.float64)
    c1 = rng.integers(150, 256, size=3).astype(np.float64)
    rgb = c0[None, None, :] + gray01[:, :, None] * (c1 - c0)[None, None, :]
    return np.clip(np.round(rgb), 0, 255).astype(np.uint8)


def make_mini_corpus(
    directory: Path | str,
    n_images: int = 200,
    seed: int = 20_100_101,
    min_size: int = 96,
    max_size: int = 128,
) -> Path:
    """Materialize the synthetic corpus; returns the manifest path.

    Images cycle through the archetypes and are assigned round-robin to
    (group, year) cells.  A handful of pure gradients are included on
    purpose: they land at exactly (0, 0) in the C-H plane and exercise the
    zero-C-H filtering path.
    """
    directory = Path(directory)
    (directory / "images").mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    records = []
    for i in range(n_images):
        kind = _ARCHETYPES[i % len(_ARCHETYPES)]
        size = int(rng.integers(min_size, max_size + 1))
        gray = textured_image(int(rng.integers(0, 2**63)), size=size, kind=kind) / 255.0
        rgb = _colorize(rng, gray)
        group = GROUPS[i % len(GROUPS)]
        year = YEARS[(i // len(GROUPS)) % len(YEARS)]
        n_fields = int(rng.integers(0, 3))
        fields = tuple(sorted(rng.choice(FIELD_POOL, size=n_fields, replace=False))) if n_fields else ()
        rel = f"images/img{i:04d}.png"
        Image.fromarray(rgb).save(directory / rel, format="PNG")
        records.append(CorpusRecord(f"img{i:04d}", directory / rel, group, year, fields))
    manifest = directory / "manifest.csv"
    write_manifest(manifest, records)
    return manifest


def stub_feature_row(gray: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic (3136, 512) feature stand-in from image statistics.

    Low part: the image resampled onto a 56x56 grid by block averaging.
    High part: 512 values mixing luminance histogram, row/column profiles,
    and gradient-energy summaries.
    """
    from scipy.ndimage import zoom

    g = np.asarray(gray, dtype=np.float64) / 255.0
    h, w = g.shape
    low = zoom(g, (56.0 / h, 56.0 / w), order=1, grid_mode=True, mode="grid-mirror")
    low = low[:56, :56].ravel().astype(np.float32)

    hist, _ = np.histogram(g, bins=128, range=(0.0, 1.0))
    hist = hist / g.size
    rows = zoom(g.mean(axis=1), 128.0 / h, order=1, grid_mode=True, mode="grid-mirror")[:128]
    cols = zoom(g.mean(axis=0), 128.0 / w, order=1, grid_mode=True, mode="grid-mirror")[:128]
    gy, gx = np.gradient(g)
    energy = zoom(np.hypot(gx, gy).mean(axis=1), 128.0 / h, order=1, grid_mode=True, mode="grid-mirror")[:128]
    high = np.concatenate([hist, rows, cols, energy]).astype(np.float32)
    return low, high


def write_stub_features(records: list[CorpusRecord], out_path: Path | str) -> RawFeatures:
    """Fabricate a raw-feature exchange file for a manifest's images."""
    ids, lows, highs = [], [], []
    for rec in records:
        gray = to_grayscale(load_image(rec.path))
        low, high = stub_feature_row(gray)
        ids.append(rec.id)
        lows.append(low)
        highs.append(high)
    feats = RawFeatures(ids=ids, low=np.stack(lows), high=np.stack(highs))
    write_chfeat(out_path, feats)
    return feats
