"""Image decoding and corpus manifests.

Images are decoded to 8-bit RGB matrices and reduced to real-valued
luminance (ITU-R BT.601 luma: 0.299 R + 0.587 G + 0.114 B).  Luminance is
kept as float64 without re-quantization so that downstream rank-order
statistics are not distorted by artificial ties.  Alpha channels are
dropped, not composited.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, ManifestError, UnsupportedFormat

_LUMA = np.array([0.299, 0.587, 0.114])
MANIFEST_HEADER = ["id", "path", "group", "year", "fields"]


@dataclass
class ImageMatrix:
    """Decoded RGB image; data is (height, width, 3) uint8."""

    width: int
    height: int
    data: np.ndarray
    channels: int = 3

    def __post_init__(self):
        if self.data.shape != (self.height, self.width, 3):
            raise ValueError("data shape does not match declared dimensions")
        if self.width < 1 or self.height < 1:
            raise ValueError("empty image")


@dataclass(frozen=True)
class CorpusRecord:
    """One manifest row: an image with its group/year labels."""

    id: str
    path: Path
    group: str
    year: int
    fields: tuple[str, ...] = field(default_factory=tuple)


def decode_image(data: bytes) -> ImageMatrix:
    """Decode a PNG or JPEG byte stream to an 8-bit RGB matrix.

    Grayscale and paletted sources are expanded to three channels; alpha
    is discarded.  Raises DecodeError for malformed streams and
    UnsupportedFormat for other image formats.
    """
    try:
        img = Image.open(io.BytesIO(data))
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(f"unrecognized or corrupt image stream: {exc}") from exc
    if img.format not in ("PNG", "JPEG"):
        raise UnsupportedFormat(f"{img.format or 'unknown'} not supported (PNG/JPEG only)")
    try:
        # convert() drops alpha without compositing and expands palettes
        rgb = img.convert("RGB")
        arr = np.asarray(rgb, dtype=np.uint8)
    except (OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(f"corrupt image data: {exc}") from exc
    h, w = arr.shape[:2]
    return ImageMatrix(width=w, height=h, data=arr)


def load_image(path: Path | str) -> ImageMatrix:
    """decode_image over a file's bytes."""
    return decode_image(Path(path).read_bytes())


def to_grayscale(img: ImageMatrix | np.ndarray) -> np.ndarray:
    """BT.601 luminance as float64 in [0, 255], shape (height, width)."""
    arr = img.data if isinstance(img, ImageMatrix) else np.asarray(img)
    if arr.ndim == 2:
        return arr.astype(np.float64)
    return arr.astype(np.float64) @ _LUMA


def load_manifest(path: Path | str) -> list[CorpusRecord]:
    """Parse a corpus manifest CSV: header `id,path,group,year,fields`.

    `fields` is a `;`-separated list and may be empty.  Image paths are
    resolved relative to the manifest's directory.  Malformed rows and
    duplicate ids raise ManifestError carrying the offending row number.
    """
    path = Path(path)
    base = path.parent
    records: list[CorpusRecord] = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ManifestError(1, "missing header row") from None
        if [c.strip() for c in header] != MANIFEST_HEADER:
            raise ManifestError(1, f"expected header {','.join(MANIFEST_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 5:
                raise ManifestError(lineno, f"expected 5 columns, got {len(row)}")
            rid, rel, group, year_s, fields_s = (c.strip() for c in row)
            if not rid:
                raise ManifestError(lineno, "empty id")
            if rid in seen:
                raise ManifestError(lineno, f"duplicate id {rid!r}")
            try:
                year = int(year_s)
            except ValueError:
                raise ManifestError(lineno, f"year {year_s!r} is not an integer") from None
            fields = tuple(f for f in fields_s.split(";") if f)
            records.append(CorpusRecord(rid, (base / rel).resolve(), group, year, fields))
            seen.add(rid)
    return records


def write_manifest(path: Path | str, records: list[CorpusRecord]) -> None:
    """Inverse of load_manifest; paths are written relative to the manifest."""
    path = Path(path)
    base = path.parent.resolve()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MANIFEST_HEADER)
        for rec in records:
            try:
                rel = Path(rec.path).resolve().relative_to(base)
            except ValueError:
                rel = Path(rec.path)
            writer.writerow([rec.id, rel.as_posix(), rec.group, rec.year, ";".join(rec.fields)])
