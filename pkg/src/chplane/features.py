"""Binary exchange formats for raw network features and reduced embeddings.

`.chfeat` (magic CHF1) carries raw per-image feature rows produced by the
extractor: a 3136-value low-level map and a 512-value high-level vector.
`.chemb` (magic CHE1) carries the reduced per-image embeddings this
package computes from them.  Both are little-endian:

    CHF1 | u32 row_count | u32 low_dim | u32 high_dim |
         rows: u16 id_len | id (utf-8) | low_dim f32 | high_dim f32

    CHE1 | u32 count | u32 dim |
         rows: u16 id_len | id (utf-8) | dim f32
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

FEAT_MAGIC = b"CHF1"
EMB_MAGIC = b"CHE1"
LOW_DIM = 3136
HIGH_DIM = 512


@dataclass
class RawFeatures:
    """Raw extractor output: one low/high row pair per image id."""

    ids: list[str]
    low: np.ndarray   # (n, low_dim) float32
    high: np.ndarray  # (n, high_dim) float32

    def __post_init__(self):
        self.low = np.asarray(self.low, dtype=np.float32)
        self.high = np.asarray(self.high, dtype=np.float32)
        if not (len(self.ids) == self.low.shape[0] == self.high.shape[0]):
            raise ValueError("row count mismatch between ids and features")


@dataclass
class EmbeddingTable:
    """Reduced embeddings, one row per image id."""

    ids: list[str]
    vectors: np.ndarray  # (n, dim) float32

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float32)
        if len(self.ids) != self.vectors.shape[0]:
            raise ValueError("row count mismatch between ids and vectors")


def write_chfeat(path: Path | str, feats: RawFeatures) -> None:
    low_dim = feats.low.shape[1]
    high_dim = feats.high.shape[1]
    with open(path, "wb") as fh:
        fh.write(FEAT_MAGIC)
        fh.write(struct.pack("<III", len(feats.ids), low_dim, high_dim))
        for rid, low, high in zip(feats.ids, feats.low, feats.high):
            enc = rid.encode("utf-8")
            fh.write(struct.pack("<H", len(enc)))
            fh.write(enc)
            fh.write(np.asarray(low, dtype="<f4").tobytes())
            fh.write(np.asarray(high, dtype="<f4").tobytes())


def read_chfeat(path: Path | str) -> RawFeatures:
    raw = Path(path).read_bytes()
    if raw[:4] != FEAT_MAGIC:
        raise ValueError(f"{path}: not a raw-feature file (bad magic)")
    count, low_dim, high_dim = struct.unpack_from("<III", raw, 4)
    ids: list[str] = []
    low = np.zeros((count, low_dim), dtype=np.float32)
    high = np.zeros((count, high_dim), dtype=np.float32)
    off = 16
    for i in range(count):
        (id_len,) = struct.unpack_from("<H", raw, off)
        off += 2
        ids.append(raw[off : off + id_len].decode("utf-8"))
        off += id_len
        low[i] = np.frombuffer(raw, dtype="<f4", count=low_dim, offset=off)
        off += 4 * low_dim
        high[i] = np.frombuffer(raw, dtype="<f4", count=high_dim, offset=off)
        off += 4 * high_dim
    if off != len(raw):
        raise ValueError(f"{path}: trailing bytes after {count} rows")
    return RawFeatures(ids=ids, low=low, high=high)


def write_chemb(path: Path | str, table: EmbeddingTable) -> None:
    dim = table.vectors.shape[1]
    with open(path, "wb") as fh:
        fh.write(EMB_MAGIC)
        fh.write(struct.pack("<II", len(table.ids), dim))
        for rid, vec in zip(table.ids, table.vectors):
            enc = rid.encode("utf-8")
            fh.write(struct.pack("<H", len(enc)))
            fh.write(enc)
            fh.write(np.asarray(vec, dtype="<f4").tobytes())


def read_chemb(path: Path | str) -> EmbeddingTable:
    raw = Path(path).read_bytes()
    if raw[:4] != EMB_MAGIC:
        raise ValueError(f"{path}: not an embedding file (bad magic)")
    count, dim = struct.unpack_from("<II", raw, 4)
    ids: list[str] = []
    vectors = np.zeros((count, dim), dtype=np.float32)
    off = 12
    for i in range(count):
        (id_len,) = struct.unpack_from("<H", raw, off)
        off += 2
        ids.append(raw[off : off + id_len].decode("utf-8"))
        off += id_len
        vectors[i] = np.frombuffer(raw, dtype="<f4", count=dim, offset=off)
        off += 4 * dim
    if off != len(raw):
        raise ValueError(f"{path}: trailing bytes after {count} rows")
    return EmbeddingTable(ids=ids, vectors=vectors)
