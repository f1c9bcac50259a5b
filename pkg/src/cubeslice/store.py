"""Persistent witness cache: one JSON file, atomically replaced on write.

Schema (version 1)::

    {"version": 1,
     "counter": <int>,
     "entries": [{"k": int, "class": "general" | "contraction" | "isometry",
                  "t": int, "matrix": "<matrix text format>",
                  "provenance": str, "verified_at": int}, ...]}

Entries are sorted by ``(k, class, t)``; there is at most one per key.  On
load every entry is recounted and its class re-certified; a failing entry
makes the whole load fail with :class:`StoreError`.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from filelock import FileLock

from .constructions import MapClass
from .errors import ParseError, StoreError
from .intersect import count_intersection
from .linalg import RatMatrix, parse_matrix_text

STORE_VERSION = 1


@dataclass(frozen=True)
class StoreEntry:
    k: int
    cls: MapClass
    t: int
    matrix: RatMatrix
    provenance: str
    verified_at: int

    @property
    def key(self) -> tuple[int, str, int]:
        return self.k, self.cls.value, self.t

    def verify(self) -> bool:
        return (
            self.matrix.k == self.k
            and count_intersection(self.matrix, certify=False).count == self.t
            and self.cls.admits(self.matrix)
        )

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "class": self.cls.value,
            "t": self.t,
            "matrix": self.matrix.to_text(),
            "provenance": self.provenance,
            "verified_at": self.verified_at,
        }


class WitnessStore:
    def __init__(self, path: str | os.PathLike, entries: dict | None = None, counter: int = 0):
        self.path = Path(path)
        self.entries: dict[tuple[int, str, int], StoreEntry] = dict(entries or {})
        self.counter = counter

    @classmethod
    def load(cls, path: str | os.PathLike) -> WitnessStore:
        path = Path(path)
        if not path.exists():
            return cls(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise StoreError(f"{path}: not valid JSON ({exc})") from None
        if not isinstance(data, dict) or data.get("version") != STORE_VERSION:
            raise StoreError(f"{path}: unsupported store version {data.get('version') if isinstance(data, dict) else None!r}")
        entries = {}
        for i, raw in enumerate(data.get("entries", [])):
            try:
                e = StoreEntry(
                    k=int(raw["k"]),
                    cls=MapClass(raw["class"]),
                    t=int(raw["t"]),
                    matrix=parse_matrix_text(raw["matrix"], source=f"{path}#entry{i}"),
                    provenance=str(raw["provenance"]),
                    verified_at=int(raw["verified_at"]),
                )
            except (KeyError, ValueError, TypeError, ParseError) as exc:
                raise StoreError(f"{path}: entry {i} is malformed: {exc}") from None
            if e.key in entries:
                raise StoreError(f"{path}: duplicate entry for (k, class, t) = {e.key}")
            if not e.verify():
                raise StoreError(f"{path}: entry {i} {e.key} fails re-verification")
            entries[e.key] = e
        return cls(path, entries, int(data.get("counter", 0)))

    def get(self, k: int, cls: MapClass | str, t: int) -> StoreEntry | None:
        return self.entries.get((k, MapClass(cls).value, t))

    def add(self, k: int, cls: MapClass | str, t: int, matrix: RatMatrix, provenance: str) -> bool:
        """Insert a verified witness unless the key is already present."""
        cls = MapClass(cls)
        if (k, cls.value, t) in self.entries:
            return False
        self.counter += 1
        e = StoreEntry(k, cls, t, matrix, provenance, self.counter)
        if not e.verify():
            raise StoreError(f"refusing to store witness for {e.key}: recount or class check failed")
        self.entries[e.key] = e
        return True

    def merge_table(self, table) -> int:
        added = 0
        for entry in table.entries:
            if entry.witness is not None:
                added += self.add(table.k, table.cls, entry.t, entry.witness, entry.source)
        return added

    def to_json(self) -> dict:
        return {
            "version": STORE_VERSION,
            "counter": self.counter,
            "entries": [self.entries[key].to_json() for key in sorted(self.entries)],
        }

    def save(self) -> None:
        """Write atomically: a temp file in the same directory, then ``os.replace``."""
        self.path.parent.mkdir(parents=True, exist_ok=True)
        text = json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=self.path.name + ".", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
            os.replace(tmp, self.path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def update_store(path: str | os.PathLike, table) -> int:
    """Merge a table's witnesses into the store at ``path`` under an advisory lock."""
    path = Path(path)
    with FileLock(str(path) + ".lock"):
        store = WitnessStore.load(path)
        added = store.merge_table(table)
        store.save()
    return added
