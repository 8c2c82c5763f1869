"""Run configuration shared by the CLI and the batch pipelines."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .cache import resolve_cache_dir
from .moments import DEFAULT_EXACT_LIMIT, PRECISION_CAP, PRECISION_START

FORMATS = ("text", "csv", "json")


@dataclass(frozen=True)
class RunConfig:
    exact_limit: int = DEFAULT_EXACT_LIMIT
    precision_start: int = PRECISION_START
    precision_cap: int = PRECISION_CAP
    cache_dir: Path | None = None
    fmt: str = "text"
    jobs: int = 1
    ntt_min_p: int | None = None
    audit_seed: int = 0

    def __post_init__(self) -> None:
        if self.exact_limit < 3:
            raise ValueError("exact_limit must be >= 3")
        if self.precision_start > self.precision_cap:
            raise ValueError("precision start exceeds cap")
        if self.fmt not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")


def default_jobs() -> int:
    return os.cpu_count() or 1


def make_config(args) -> RunConfig:
    """Build a RunConfig from parsed CLI arguments."""
    jobs = getattr(args, "jobs", None)
    if getattr(args, "deterministic", False):
        jobs = 1
    if getattr(args, "no_cache", False):
        cache_dir = None
    else:
        cache_dir = resolve_cache_dir(getattr(args, "cache_dir", None))
    return RunConfig(
        exact_limit=getattr(args, "exact_limit", DEFAULT_EXACT_LIMIT),
        precision_start=getattr(args, "precision", PRECISION_START),
        precision_cap=getattr(args, "precision_cap", PRECISION_CAP),
        cache_dir=cache_dir,
        fmt=getattr(args, "format", "text"),
        jobs=jobs if jobs else default_jobs(),
        ntt_min_p=getattr(args, "ntt_min_p", None),
    )
