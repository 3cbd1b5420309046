"""The extraction pipeline: images -> feature rows -> .chfeat file.

Each image is decoded to RGB, resized to 224x224 (bilinear), scaled to
[0, 1], and normalized with the ImageNet convention (mean 0.485/0.456/0.406,
std 0.229/0.224/0.225).  Two taps on the network:

  * the max-pool output (64 x 56 x 56), reduced over channels by mean
    (or max) to a 56x56 map, flattened to 3136 values;
  * the global-average-pool output, 512 values.

Images are processed one at a time in inference mode so that rows are
bit-identical for identical inputs regardless of where they appear in the
manifest.  Undecodable images are skipped and logged; the run only fails
when more than 1% of the manifest is lost.

Output format (little-endian): magic CHF1, u32 row_count, u32 low_dim
(3136), u32 high_dim (512), then per row u16 id_len, UTF-8 id,
low_dim f32, high_dim f32.
"""

from __future__ import annotations

import struct
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np
import torch
from PIL import Image

from .manifest import load_manifest
from .model import load_backbone

LOW_DIM = 56 * 56
HIGH_DIM = 512
_MAGIC = b"CHF1"
_MEAN = torch.tensor([0.485, 0.456, 0.406]).view(3, 1, 1)
_STD = torch.tensor([0.229, 0.224, 0.225]).view(3, 1, 1)


@dataclass
class ExtractionReport:
    written: int
    failed: list[str]

    @property
    def failure_rate(self) -> float:
        total = self.written + len(self.failed)
        return len(self.failed) / total if total else 0.0


def _preprocess(path: Path) -> torch.Tensor:
    with Image.open(path) as img:
        rgb = img.convert("RGB").resize((224, 224), Image.BILINEAR)
    arr = np.asarray(rgb, dtype=np.float32) / 255.0
    tensor = torch.from_numpy(arr).permute(2, 0, 1)
    return (tensor - _MEAN) / _STD


def _feature_row(model: torch.nn.Module, batch: torch.Tensor, reduce: str):
    x = model.conv1(batch)
    x = model.bn1(x)
    x = model.relu(x)
    low_map = model.maxpool(x)  # (1, 64, 56, 56)
    x = model.layer1(low_map)
    x = model.layer2(x)
    x = model.layer3(x)
    x = model.layer4(x)
    high = torch.flatten(model.avgpool(x), 1)  # (1, 512)
    if reduce == "mean":
        low = low_map.mean(dim=1)
    else:
        low = low_map.amax(dim=1)
    return (
        low.reshape(-1).numpy().astype("<f4"),
        high.reshape(-1).numpy().astype("<f4"),
    )


def extract_features(
    manifest_path: Path | str,
    weights_path: Path | str,
    out_path: Path | str,
    reduce: str = "mean",
    log: Optional[Callable[[str], None]] = None,
) -> ExtractionReport:
    """Run the backbone over a manifest and write the .chfeat file.

    Rows appear in manifest order; undecodable images are skipped and
    reported.  Returns the report; callers decide the exit policy.
    """
    if reduce not in ("mean", "max"):
        raise ValueError("reduce must be 'mean' or 'max'")
    log = log or (lambda msg: print(msg, file=sys.stderr))
    rows = load_manifest(manifest_path)
    model = load_backbone(weights_path)

    written = 0
    failed: list[str] = []
    with open(out_path, "wb") as fh:
        fh.write(_MAGIC)
        header_pos = fh.tell()
        fh.write(struct.pack("<III", 0, LOW_DIM, HIGH_DIM))
        with torch.inference_mode():
            for row in rows:
                try:
                    batch = _preprocess(row.path).unsqueeze(0)
                except Exception as exc:
                    failed.append(row.id)
                    log(f"skip {row.id}: {type(exc).__name__}: {exc}")
                    continue
                low, high = _feature_row(model, batch, reduce)
                if not (np.all(np.isfinite(low)) and np.all(np.isfinite(high))):
                    failed.append(row.id)
                    log(f"skip {row.id}: non-finite features")
                    continue
                enc = row.id.encode("utf-8")
                fh.write(struct.pack("<H", len(enc)))
                fh.write(enc)
                fh.write(low.tobytes())
                fh.write(high.tobytes())
                written += 1
        fh.seek(header_pos)
        fh.write(struct.pack("<III", written, LOW_DIM, HIGH_DIM))
    return ExtractionReport(written=written, failed=failed)


def read_chfeat_rows(path: Path | str):
    """Local reader for verification; mirrors the exchange format spec."""
    raw = Path(path).read_bytes()
    if raw[:4] != _MAGIC:
        raise ValueError(f"{path}: bad magic")
    count, low_dim, high_dim = struct.unpack_from("<III", raw, 4)
    out = []
    off = 16
    for _ in range(count):
        (id_len,) = struct.unpack_from("<H", raw, off)
        off += 2
        rid = raw[off : off + id_len].decode("utf-8")
        off += id_len
        low = np.frombuffer(raw, dtype="<f4", count=low_dim, offset=off).copy()
        off += 4 * low_dim
        high = np.frombuffer(raw, dtype="<f4", count=high_dim, offset=off).copy()
        off += 4 * high_dim
        out.append((rid, low, high))
    if off != len(raw):
        raise ValueError(f"{path}: trailing bytes")
    return out
