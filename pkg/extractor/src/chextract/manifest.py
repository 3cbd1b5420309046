"""Corpus manifest reading (the shared CSV contract).

Header `id,path,group,year,fields`; image paths resolve relative to the
manifest's directory.  Implemented locally so the extractor has no code
dependency on the analysis package.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path


class ManifestError(Exception):
    def __init__(self, row: int, message: str):
        self.row = row
        super().__init__(f"row {row}: {message}")


@dataclass(frozen=True)
class ManifestRow:
    id: str
    path: Path
    group: str
    year: int


def load_manifest(path: Path | str) -> list[ManifestRow]:
    path = Path(path)
    base = path.parent
    rows: list[ManifestRow] = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ManifestError(1, "missing header row") from None
        if [c.strip() for c in header] != ["id", "path", "group", "year", "fields"]:
            raise ManifestError(1, "expected header id,path,group,year,fields")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 5:
                raise ManifestError(lineno, f"expected 5 columns, got {len(row)}")
            rid, rel, group, year_s, _fields = (c.strip() for c in row)
            if not rid:
                raise ManifestError(lineno, "empty id")
            if rid in seen:
                raise ManifestError(lineno, f"duplicate id {rid!r}")
            try:
                year = int(year_s)
            except ValueError:
                raise ManifestError(lineno, f"year {year_s!r} is not an integer") from None
            rows.append(ManifestRow(rid, (base / rel).resolve(), group, year))
            seen.add(rid)
    return rows
