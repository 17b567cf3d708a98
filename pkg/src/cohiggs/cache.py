"""Append-only JSON-lines cache for censuses and oracle count records.

The first line is a version header; a different version invalidates the whole
file.  Every record is write-once: re-inserting an equal record is a no-op and
inserting a different one under an existing key is an invariant failure.
Writers take an exclusive ``flock``, readers a shared one.
"""

from __future__ import annotations

import fcntl
import json
from contextlib import contextmanager
from pathlib import Path
from typing import Optional

from .chains import ChainComponent
from .ffcount import CountRecord

CACHE_VERSION = "cohiggs-cache-1"


class CacheConflict(AssertionError):
    pass


def _census_key(r: int, d: int) -> str:
    return f"census:{r}:{d}"


def _count_key(component: str) -> str:
    return f"count:{component}"


class CensusCache:
    def __init__(self, path, version: str = CACHE_VERSION):
        self.path = Path(path)
        self.version = version

    @contextmanager
    def _locked(self, mode: int):
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a+", encoding="utf-8") as fh:
            fcntl.flock(fh, mode)
            try:
                fh.seek(0)
                yield fh
            finally:
                fcntl.flock(fh, fcntl.LOCK_UN)

    def _read(self, fh) -> dict[str, dict]:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
        if not lines:
            return {}
        header = json.loads(lines[0])
        if header.get("version") != self.version:
            return {}
        out = {}
        for ln in lines[1:]:
            rec = json.loads(ln)
            out[rec["key"]] = rec["value"]
        return out

    def entries(self) -> dict[str, dict]:
        if not self.path.exists():
            return {}
        with self._locked(fcntl.LOCK_SH) as fh:
            return self._read(fh)

    def _put(self, key: str, value) -> None:
        with self._locked(fcntl.LOCK_EX) as fh:
            text = fh.read()
            lines = [ln for ln in text.splitlines() if ln.strip()]
            stale = not lines or json.loads(lines[0]).get("version") != self.version
            if stale:
                fh.truncate(0)
                fh.write(json.dumps({"version": self.version}) + "\n")
                current = {}
            else:
                fh.seek(0)
                current = self._read(fh)
            if key in current:
                if current[key] != value:
                    raise CacheConflict(f"cache already holds a different value for {key}")
                return
            fh.write(json.dumps({"key": key, "value": value}, sort_keys=True) + "\n")
            fh.flush()

    # censuses

    def get_census(self, r: int, d: int) -> Optional[list[ChainComponent]]:
        value = self.entries().get(_census_key(r, d))
        if value is None:
            return None
        return [ChainComponent.from_json(c) for c in value]

    def put_census(self, r: int, d: int, comps: list[ChainComponent]) -> None:
        self._put(_census_key(r, d), [_component_record(c) for c in comps])

    # oracle records

    def get_count(self, component: str) -> Optional[CountRecord]:
        value = self.entries().get(_count_key(component))
        return None if value is None else CountRecord.from_json(value)

    def put_count(self, rec: CountRecord) -> None:
        self._put(_count_key(rec.component), rec.to_json())

    def oracle(self) -> dict:
        return {v["component"]: CountRecord.from_json(v).poincare
                for k, v in self.entries().items() if k.startswith("count:")}


def _component_record(c: ChainComponent) -> dict:
    rec = c.to_json()
    rec["poincare"] = "external"
    return rec
