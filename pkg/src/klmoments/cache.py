"""Persistent cache of power-sum tables.

One JSON document per (p, convention, method):

    {"schema_version": 1, "p": 199, "convention": "completed",
     "method": "float-congruence",
     "entries": [{"n": 1, "value": "0"}, ...],
     "checksum": "<sha256 of the canonical payload>"}

Values are decimal strings so no consumer has to guess integer widths.
Writes go to a temporary file in the same directory followed by an atomic
rename; concurrent readers see either the old or the new complete file.
The cache is advisory: unreadable or corrupt entries are discarded with a
warning. What is never tolerated silently is disagreement between exact
and float records for the same (p, n) - that raises CacheMismatch.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path

from .errors import CacheMismatch
from .moments import (
    COMPLETED,
    METHOD_EXACT,
    METHOD_FLOAT,
    RESTRICTED,
    PowerSumTable,
)

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1

ENV_CACHE_DIR = "KLMOMENTS_CACHE_DIR"
DEFAULT_CACHE_DIR = ".klmoments-cache"


def resolve_cache_dir(flag_value: str | None = None) -> Path:
    """Cache root: explicit flag wins, then the environment, then local default."""
    if flag_value:
        return Path(flag_value)
    env = os.environ.get(ENV_CACHE_DIR)
    if env:
        return Path(env)
    return Path(DEFAULT_CACHE_DIR)


def _payload(table: PowerSumTable) -> dict:
    entries = [
        {"n": n, "value": str(table.values[n])} for n in sorted(table.values)
    ]
    return {
        "schema_version": SCHEMA_VERSION,
        "p": table.p,
        "convention": table.convention,
        "method": table.method,
        "entries": entries,
    }


def _checksum(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


class PowerSumStore:
    """Directory-backed store of power-sum tables."""

    def __init__(self, root: Path | str):
        self.root = Path(root) / "sums"

    def _path(self, p: int, convention: str, method: str) -> Path:
        return self.root / f"p{p}-{convention}-{method}.json"

    def store(self, table: PowerSumTable) -> Path:
        self.root.mkdir(parents=True, exist_ok=True)
        payload = _payload(table)
        payload["checksum"] = _checksum(payload)
        path = self._path(table.p, table.convention, table.method)
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(payload, fh, sort_keys=True)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return path

    def load(self, p: int, convention: str, method: str) -> PowerSumTable | None:
        """Load one table, or None when absent/corrupt. Cross-checks every
        record of the other method (either convention) when present."""
        table = self._load_raw(p, convention, method)
        if table is None:
            return None
        other_method = METHOD_FLOAT if method == METHOD_EXACT else METHOD_EXACT
        for other_convention in (RESTRICTED, COMPLETED):
            sibling = self._load_raw(p, other_convention, other_method)
            if sibling is not None:
                _check_agreement(table, sibling)
        return table

    def _load_raw(self, p: int, convention: str, method: str) -> PowerSumTable | None:
        path = self._path(p, convention, method)
        if not path.exists():
            return None
        try:
            with open(path) as fh:
                doc = json.load(fh)
            checksum = doc.pop("checksum")
            if doc.get("schema_version") != SCHEMA_VERSION:
                raise ValueError(f"schema_version {doc.get('schema_version')}")
            if checksum != _checksum(doc):
                raise ValueError("checksum mismatch")
            if (doc["p"], doc["convention"], doc["method"]) != (p, convention, method):
                raise ValueError("header does not match file name")
            values = {int(e["n"]): int(e["value"]) for e in doc["entries"]}
            return PowerSumTable(p, convention, values, method)
        except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
            log.warning("discarding corrupt cache entry %s: %s", path, exc)
            try:
                path.unlink()
            except OSError:
                pass
            return None

    def get_or_compute(self, p: int, nmax: int, convention: str, method: str, compute):
        """Cached lookup; `compute` runs on miss and its result is stored.

        A cached table is only a hit when it covers n <= nmax.
        """
        cached = self.load(p, convention, method)
        if cached is not None and all(n in cached.values for n in range(1, nmax + 1)):
            return cached
        table = compute()
        if cached is not None:
            merged = dict(cached.values)
            for n, v in table.values.items():
                if n in merged and merged[n] != v:
                    raise CacheMismatch(
                        f"recomputed S_{n}({p}) = {v} disagrees with cached {merged[n]}"
                    )
                merged[n] = v
            table = PowerSumTable(p, convention, merged, method)
        self.store(table)
        return table


def _check_agreement(a: PowerSumTable, b: PowerSumTable) -> None:
    """Exact and float records must agree wherever they overlap."""
    ca = a.to_convention(COMPLETED)
    cb = b.to_convention(COMPLETED)
    for n in sorted(set(ca.values) & set(cb.values)):
        if ca.values[n] != cb.values[n]:
            raise CacheMismatch(
                f"S'_{n}({a.p}): {a.method} gives {ca.values[n]} "
                f"but {b.method} gives {cb.values[n]}"
            )
