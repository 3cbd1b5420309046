"""Scale-invariant keypoints, 128-d descriptors, matching, and Jaccard similarity.

The detector follows Lowe's classic recipe: a Gaussian scale-space pyramid
built on a 2x-upsampled base image, difference-of-Gaussian extrema with
sub-pixel refinement, contrast and edge rejection, gradient-orientation
assignment, and a 4x4-cell by 8-orientation-bin descriptor (128 values,
clamped at 0.2 and L2-normalized).  Matching is two-nearest-neighbor with
Lowe's ratio test, reduced to a one-to-one pairing; the Jaccard similarity
of two images is matched keypoints over the union of keypoints.

Default constants are Lowe's: sigma 1.6, 3 scales per octave, contrast
threshold 0.04, edge ratio 10.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .errors import ImageTooSmall

SIGMA = 1.6
INIT_SIGMA = 0.5          # blur assumed present in the input
N_SCALES = 3              # sampled intervals per octave
CONTRAST_THRESHOLD = 0.04
EDGE_RATIO = 10.0
BORDER = 5
ORI_BINS = 36
ORI_SIGMA_FACTOR = 1.5
ORI_RADIUS_FACTOR = 3.0
ORI_PEAK_RATIO = 0.8
DESCR_WIDTH = 4
DESCR_BINS = 8
DESCR_SCALE_FACTOR = 3.0
DESCR_CLAMP = 0.2

DEFAULT_RATIO = 0.75      # Lowe's canonical ratio-test threshold

_CACHE_MAGIC = b"SFT1"


@dataclass(frozen=True)
class Keypoint:
    """Sub-pixel location, characteristic scale, orientation in [0, 2*pi)."""

    x: float
    y: float
    scale: float
    orientation: float


@dataclass
class DescriptorSet:
    """Keypoints with their (k, 128) float32 descriptor matrix."""

    keypoints: list[Keypoint]
    descriptors: np.ndarray

    def __post_init__(self):
        self.descriptors = np.asarray(self.descriptors, dtype=np.float32).reshape(-1, 128)
        if len(self.keypoints) != self.descriptors.shape[0]:
            raise ValueError("keypoint/descriptor count mismatch")

    def __len__(self) -> int:
        return len(self.keypoints)


@dataclass
class MatchSet:
    """Accepted one-to-one matches: (index_a, index_b, distance) triples."""

    pairs: list[tuple[int, int, float]]
    k_a: int
    k_b: int

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass
class JaccardResult:
    value: float
    matches: int
    k_a: int
    k_b: int
    no_keypoints: bool = False


# --------------------------------------------------------------------------
# scale space
# --------------------------------------------------------------------------

def _base_image(gray01: np.ndarray) -> np.ndarray:
    up = ndimage.zoom(gray01, 2.0, order=1, grid_mode=True, mode="grid-mirror")
    # input blur doubles with the image
    sig_diff = math.sqrt(max(SIGMA**2 - (2.0 * INIT_SIGMA) ** 2, 0.01))
    return ndimage.gaussian_filter(up, sig_diff, mode="mirror")


def _gaussian_pyramid(base: np.ndarray) -> list[list[np.ndarray]]:
    n_octaves = max(1, int(math.log2(min(base.shape))) - 2)
    k = 2.0 ** (1.0 / N_SCALES)
    sigmas = [SIGMA]
    for i in range(1, N_SCALES + 3):
        prev = SIGMA * k ** (i - 1)
        sigmas.append(math.sqrt((k * prev) ** 2 - prev**2))
    pyramid = []
    img = base
    for _ in range(n_octaves):
        octave = [img]
        for sig in sigmas[1:]:
            img = ndimage.gaussian_filter(img, sig, mode="mirror")
            octave.append(img)
        pyramid.append(octave)
        img = _halve(octave[N_SCALES])
    return pyramid


def _halve(img: np.ndarray) -> np.ndarray:
    """2x downsample by block mean.

    Unlike plain decimation this commutes exactly with 90-degree rotation
    on even-sized images, which keeps keypoints consistent between an
    image and its rotated copies across octaves.
    """
    h2 = img.shape[0] // 2 * 2
    w2 = img.shape[1] // 2 * 2
    return img[:h2, :w2].reshape(h2 // 2, 2, w2 // 2, 2).mean(axis=(1, 3))


def _dog_stack(octave: list[np.ndarray]) -> np.ndarray:
    arr = np.stack(octave)
    return arr[1:] - arr[:-1]


def _extrema_candidates(dog: np.ndarray) -> np.ndarray:
    """(layer, row, col) indices of 26-neighborhood extrema above threshold."""
    thr = 0.5 * CONTRAST_THRESHOLD / N_SCALES
    mx = ndimage.maximum_filter(dog, size=3, mode="nearest")
    mn = ndimage.minimum_filter(dog, size=3, mode="nearest")
    cand = ((dog == mx) & (dog > thr)) | ((dog == mn) & (dog < -thr))
    cand[0] = cand[-1] = False
    cand[:, :BORDER] = cand[:, -BORDER:] = False
    cand[:, :, :BORDER] = cand[:, :, -BORDER:] = False
    return np.argwhere(cand)


def _refine(dog: np.ndarray, layer: int, row: int, col: int):
    """Quadratic sub-pixel localization; None when rejected."""
    n_layers, n_rows, n_cols = dog.shape
    for _ in range(5):
        cube = dog[layer - 1 : layer + 2, row - 1 : row + 2, col - 1 : col + 2]
        grad = 0.5 * np.array(
            [
                cube[1, 1, 2] - cube[1, 1, 0],   # d/dx
                cube[1, 2, 1] - cube[1, 0, 1],   # d/dy
                cube[2, 1, 1] - cube[0, 1, 1],   # d/ds
            ]
        )
        center = cube[1, 1, 1]
        dxx = cube[1, 1, 2] - 2 * center + cube[1, 1, 0]
        dyy = cube[1, 2, 1] - 2 * center + cube[1, 0, 1]
        dss = cube[2, 1, 1] - 2 * center + cube[0, 1, 1]
        dxy = 0.25 * (cube[1, 2, 2] - cube[1, 2, 0] - cube[1, 0, 2] + cube[1, 0, 0])
        dxs = 0.25 * (cube[2, 1, 2] - cube[2, 1, 0] - cube[0, 1, 2] + cube[0, 1, 0])
        dys = 0.25 * (cube[2, 2, 1] - cube[2, 0, 1] - cube[0, 2, 1] + cube[0, 0, 1])
        hess = np.array([[dxx, dxy, dxs], [dxy, dyy, dys], [dxs, dys, dss]])
        offset = -np.linalg.lstsq(hess, grad, rcond=None)[0]
        if np.all(np.abs(offset) < 0.5):
            break
        col += int(round(offset[0]))
        row += int(round(offset[1]))
        layer += int(round(offset[2]))
        if (
            layer < 1
            or layer > N_SCALES
            or row < BORDER
            or row >= n_rows - BORDER
            or col < BORDER
            or col >= n_cols - BORDER
        ):
            return None
    else:
        return None
    value = center + 0.5 * float(grad @ offset)
    if abs(value) * N_SCALES < CONTRAST_THRESHOLD:
        return None
    trace = dxx + dyy
    det = dxx * dyy - dxy * dxy
    if det <= 0 or EDGE_RATIO * trace * trace >= (EDGE_RATIO + 1) ** 2 * det:
        return None
    return col + offset[0], row + offset[1], layer, layer + offset[2], abs(value)


# --------------------------------------------------------------------------
# orientation and descriptor
# --------------------------------------------------------------------------

def _patch_gradients(img: np.ndarray, row: int, col: int, radius: int):
    """Central-difference gradients on a clipped square patch.

    Returns (dx, dy, roff, coff) flat arrays for in-bounds pixels together
    with their offsets from the patch center.
    """
    n_rows, n_cols = img.shape
    r0 = max(row - radius, 1)
    r1 = min(row + radius, n_rows - 2)
    c0 = max(col - radius, 1)
    c1 = min(col + radius, n_cols - 2)
    if r0 > r1 or c0 > c1:
        return None
    block = img[r0 - 1 : r1 + 2, c0 - 1 : c1 + 2]
    dx = block[1:-1, 2:] - block[1:-1, :-2]
    dy = block[:-2, 1:-1] - block[2:, 1:-1]
    roff, coff = np.meshgrid(np.arange(r0, r1 + 1) - row, np.arange(c0, c1 + 1) - col, indexing="ij")
    return dx.ravel(), dy.ravel(), roff.ravel(), coff.ravel()


def _orientations(img: np.ndarray, row: int, col: int, sigma_oct: float) -> list[float]:
    """Dominant gradient directions (degrees) around a keypoint."""
    sig = ORI_SIGMA_FACTOR * sigma_oct
    radius = int(round(ORI_RADIUS_FACTOR * sig))
    grads = _patch_gradients(img, row, col, radius)
    if grads is None:
        return []
    dx, dy, roff, coff = grads
    mag = np.hypot(dx, dy)
    ang = np.rad2deg(np.arctan2(dy, dx))
    weight = np.exp(-(roff**2 + coff**2) / (2.0 * sig * sig))
    bins = np.round(ang * ORI_BINS / 360.0).astype(int) % ORI_BINS
    hist = np.zeros(ORI_BINS)
    np.add.at(hist, bins, weight * mag)
    # two passes of the (1,4,6,4,1)/16 circular smoother
    for _ in range(2):
        hist = (
            6 * hist
            + 4 * (np.roll(hist, 1) + np.roll(hist, -1))
            + np.roll(hist, 2)
            + np.roll(hist, -2)
        ) / 16.0
    peak_thr = ORI_PEAK_RATIO * hist.max()
    if hist.max() <= 0:
        return []
    left = np.roll(hist, 1)
    right = np.roll(hist, -1)
    out = []
    for i in np.nonzero((hist > left) & (hist > right) & (hist >= peak_thr))[0]:
        denom = left[i] - 2 * hist[i] + right[i]
        interp = i + 0.5 * (left[i] - right[i]) / denom if denom != 0 else float(i)
        angle = (360.0 - interp * 360.0 / ORI_BINS) % 360.0
        out.append(angle)
    return out


def _descriptor(img: np.ndarray, x: float, y: float, sigma_oct: float, angle_deg: float) -> np.ndarray | None:
    n_rows, n_cols = img.shape
    bins_per_deg = DESCR_BINS / 360.0
    rot = 360.0 - angle_deg
    cos_a = math.cos(math.radians(rot))
    sin_a = math.sin(math.radians(rot))
    hist_width = DESCR_SCALE_FACTOR * sigma_oct
    half = int(round(hist_width * math.sqrt(2) * (DESCR_WIDTH + 1) * 0.5))
    half = min(half, int(math.hypot(n_rows, n_cols)))
    row_c = int(round(y))
    col_c = int(round(x))

    off = np.arange(-half, half + 1)
    roff, coff = np.meshgrid(off, off, indexing="ij")
    row_rot = (coff * sin_a + roff * cos_a) / hist_width
    col_rot = (coff * cos_a - roff * sin_a) / hist_width
    rbin = row_rot + 0.5 * DESCR_WIDTH - 0.5
    cbin = col_rot + 0.5 * DESCR_WIDTH - 0.5
    rows = row_c + roff
    cols = col_c + coff
    valid = (
        (rbin > -1)
        & (rbin < DESCR_WIDTH)
        & (cbin > -1)
        & (cbin < DESCR_WIDTH)
        & (rows > 0)
        & (rows < n_rows - 1)
        & (cols > 0)
        & (cols < n_cols - 1)
    )
    if not valid.any():
        return None
    rows = rows[valid]
    cols = cols[valid]
    dx = img[rows, cols + 1] - img[rows, cols - 1]
    dy = img[rows - 1, cols] - img[rows + 1, cols]
    mag = np.hypot(dx, dy)
    ori = np.rad2deg(np.arctan2(dy, dx)) % 360.0
    weight = np.exp(
        -(row_rot[valid] ** 2 + col_rot[valid] ** 2) / (2.0 * (0.5 * DESCR_WIDTH) ** 2)
    )
    contrib = weight * mag
    rbin = rbin[valid]
    cbin = cbin[valid]
    obin = (ori - rot) * bins_per_deg

    r0 = np.floor(rbin).astype(int)
    c0 = np.floor(cbin).astype(int)
    o0 = np.floor(obin).astype(int)
    rfrac = rbin - r0
    cfrac = cbin - c0
    ofrac = obin - o0
    o0 = o0 % DESCR_BINS

    hist = np.zeros((DESCR_WIDTH + 2, DESCR_WIDTH + 2, DESCR_BINS))
    for dr in (0, 1):
        w_r = contrib * (rfrac if dr else 1.0 - rfrac)
        for dc in (0, 1):
            w_rc = w_r * (cfrac if dc else 1.0 - cfrac)
            for do in (0, 1):
                w = w_rc * (ofrac if do else 1.0 - ofrac)
                np.add.at(hist, (r0 + 1 + dr, c0 + 1 + dc, (o0 + do) % DESCR_BINS), w)
    vec = hist[1:-1, 1:-1, :].ravel()
    norm = float(np.linalg.norm(vec))
    if norm < 1e-12:
        return None
    vec = np.minimum(vec, DESCR_CLAMP * norm)
    vec /= max(float(np.linalg.norm(vec)), 1e-12)
    return vec.astype(np.float32)


# --------------------------------------------------------------------------
# public API
# --------------------------------------------------------------------------

def detect_and_describe(gray: np.ndarray) -> DescriptorSet:
    """Detect keypoints and compute descriptors on a luminance matrix.

    Returns an empty set (not an error) when no stable extrema exist, e.g.
    on uniform images.  Raises ImageTooSmall below 16x16.
    """
    gray = np.asarray(gray, dtype=np.float64)
    if gray.ndim != 2:
        raise ValueError("expected a 2-D luminance matrix")
    height, width = gray.shape
    if height < 16 or width < 16:
        raise ImageTooSmall(f"{height}x{width} is below the 16x16 minimum")
    base = _base_image(gray / 255.0)
    pyramid = _gaussian_pyramid(base)

    found: list[tuple[Keypoint, np.ndarray]] = []
    for octave_idx, octave in enumerate(pyramid):
        dog = _dog_stack(octave)
        for layer, row, col in _extrema_candidates(dog):
            refined = _refine(dog, int(layer), int(row), int(col))
            if refined is None:
                continue
            x_o, y_o, layer_int, layer_ref, _ = refined
            sigma_oct = SIGMA * 2.0 ** (layer_ref / N_SCALES)
            img = octave[layer_int]
            for angle in _orientations(img, int(round(y_o)), int(round(x_o)), sigma_oct):
                desc = _descriptor(img, x_o, y_o, sigma_oct, angle)
                if desc is None:
                    continue
                # octave coords -> base coords -> input coords (base is 2x input)
                to_input = 2.0**octave_idx / 2.0
                kp = Keypoint(
                    x=x_o * to_input,
                    y=y_o * to_input,
                    scale=sigma_oct * to_input,
                    orientation=math.radians(angle) % (2.0 * math.pi),
                )
                if not (0 <= kp.x <= width - 1 and 0 <= kp.y <= height - 1):
                    continue
                found.append((kp, desc))

    # deterministic order independent of pyramid scan details
    found.sort(key=lambda t: (t[0].y, t[0].x, t[0].scale, t[0].orientation))
    dedup: list[tuple[Keypoint, np.ndarray]] = []
    for kp, desc in found:
        if dedup and dedup[-1][0] == kp:
            continue
        dedup.append((kp, desc))
    if not dedup:
        return DescriptorSet([], np.zeros((0, 128), dtype=np.float32))
    return DescriptorSet([kp for kp, _ in dedup], np.stack([d for _, d in dedup]))


def _two_nearest_exact(queries: np.ndarray, index: np.ndarray):
    """Indices and distances of the two nearest neighbors, exhaustively."""
    d2 = (
        np.sum(queries**2, axis=1)[:, None]
        + np.sum(index**2, axis=1)[None, :]
        - 2.0 * queries @ index.T
    )
    np.maximum(d2, 0.0, out=d2)
    order = np.argsort(d2, axis=1, kind="stable")
    nn = order[:, :2]
    if index.shape[0] == 1:
        dist = np.sqrt(np.take_along_axis(d2, nn, axis=1))
        return nn[:, :1], np.column_stack([dist[:, 0], np.full(len(queries), np.inf)])
    return nn, np.sqrt(np.take_along_axis(d2, nn, axis=1))


def match_descriptors(
    a: DescriptorSet,
    b: DescriptorSet,
    ratio: float = DEFAULT_RATIO,
    exact: bool = True,
    kd_eps: float = 0.5,
) -> MatchSet:
    """Ratio-test matching of a's descriptors against b's, one-to-one.

    For each descriptor in `a` the two nearest neighbors in `b` (Euclidean)
    are found (exhaustively by default; with `exact=False` via a kd-tree
    whose approximation slack is `kd_eps`).  A candidate passes when
    d1 < ratio * d2; candidates are then reduced to a one-to-one matching
    by keeping the lowest-distance match per b-index.
    """
    if not 0.0 < ratio <= 1.0:
        raise ValueError("ratio must be in (0, 1]")
    k_a, k_b = len(a), len(b)
    if k_a == 0 or k_b == 0:
        return MatchSet([], k_a, k_b)
    qa = a.descriptors.astype(np.float64)
    qb = b.descriptors.astype(np.float64)
    if exact:
        nn, dist = _two_nearest_exact(qa, qb)
    else:
        dist, nn = cKDTree(qb).query(qa, k=2, eps=kd_eps)
        dist = np.atleast_2d(dist)
        nn = np.atleast_2d(nn)
        bad = nn >= k_b  # padded results when k_b == 1
        dist = np.where(bad, np.inf, dist)
    d1 = dist[:, 0]
    d2 = dist[:, 1] if dist.shape[1] > 1 else np.full(k_a, np.inf)
    accepted = np.nonzero(d1 < ratio * d2)[0]
    candidates = sorted(
        ((float(d1[i]), int(i), int(nn[i, 0])) for i in accepted),
        key=lambda t: (t[0], t[1]),
    )
    used_b: set[int] = set()
    pairs: list[tuple[int, int, float]] = []
    for d, ia, ib in candidates:
        if ib in used_b:
            continue
        used_b.add(ib)
        pairs.append((ia, ib, d))
    return MatchSet(pairs, k_a, k_b)


def jaccard_detail(
    a: DescriptorSet,
    b: DescriptorSet,
    ratio: float = DEFAULT_RATIO,
    union: str = "exclusive",
    exact: bool = True,
) -> JaccardResult:
    """Jaccard similarity with match diagnostics.

    `union='exclusive'` counts a matched pair once: J = m / (k_a + k_b - m);
    `union='additive'` uses J = m / (k_a + k_b).  Matching direction is
    canonical (smaller set queries the larger) so the result is symmetric.
    """
    if union not in ("exclusive", "additive"):
        raise ValueError("union must be 'exclusive' or 'additive'")
    k_a, k_b = len(a), len(b)
    if k_a == 0 and k_b == 0:
        return JaccardResult(0.0, 0, 0, 0, no_keypoints=True)
    first, second = a, b
    if (k_a, k_b, a.descriptors.tobytes()) > (k_b, k_a, b.descriptors.tobytes()):
        first, second = b, a
    m = len(match_descriptors(first, second, ratio=ratio, exact=exact))
    denom = k_a + k_b - m if union == "exclusive" else k_a + k_b
    value = m / denom if denom > 0 else 0.0
    return JaccardResult(value, m, k_a, k_b)


def jaccard_similarity(
    a: DescriptorSet,
    b: DescriptorSet,
    ratio: float = DEFAULT_RATIO,
    union: str = "exclusive",
    exact: bool = True,
) -> float:
    return jaccard_detail(a, b, ratio=ratio, union=union, exact=exact).value


# --------------------------------------------------------------------------
# descriptor cache files
# --------------------------------------------------------------------------

def save_descriptors(path: Path | str, ds: DescriptorSet) -> None:
    """Binary cache: magic SFT1, u32 k, then per keypoint
    (x, y, scale, orientation) as f32 followed by 128 f32 descriptor values,
    all little-endian."""
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<I", len(ds)))
        for kp, desc in zip(ds.keypoints, ds.descriptors):
            fh.write(struct.pack("<4f", kp.x, kp.y, kp.scale, kp.orientation))
            fh.write(np.asarray(desc, dtype="<f4").tobytes())


def load_descriptors(path: Path | str) -> DescriptorSet:
    raw = Path(path).read_bytes()
    if raw[:4] != _CACHE_MAGIC:
        raise ValueError(f"{path}: not a descriptor cache (bad magic)")
    (k,) = struct.unpack_from("<I", raw, 4)
    expected = 8 + k * (4 + 128) * 4
    if len(raw) != expected:
        raise ValueError(f"{path}: truncated cache ({len(raw)} bytes, expected {expected})")
    kps = []
    descs = np.zeros((k, 128), dtype=np.float32)
    off = 8
    for i in range(k):
        x, y, scale, ori = struct.unpack_from("<4f", raw, off)
        off += 16
        descs[i] = np.frombuffer(raw, dtype="<f4", count=128, offset=off)
        off += 512
        kps.append(Keypoint(x, y, scale, ori))
    return DescriptorSet(kps, descs)
