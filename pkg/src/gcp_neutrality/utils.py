"""Seed splitting, summary statistics and number formatting."""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = ["task_seed", "task_rng", "StatSummary", "sig3", "percent"]


def _key_int(part: int | str) -> int:
    if isinstance(part, (int, np.integer)):
        if part < 0:
            raise ValueError("seed key parts must be non-negative")
        return int(part)
    return zlib.crc32(str(part).encode("utf-8"))


def task_seed(base_seed: int, *key: int | str) -> int:
    """Derive an independent 64-bit seed for the task identified by ``key``.

    The scheme is ``SeedSequence(entropy=base_seed, spawn_key=key)`` where
    string key parts are mapped through CRC-32. It depends only on the base
    seed and the task key, never on scheduling order.
    """
    ss = np.random.SeedSequence(entropy=int(base_seed), spawn_key=tuple(_key_int(p) for p in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def task_rng(base_seed: int, *key: int | str) -> np.random.Generator:
    return np.random.default_rng(task_seed(base_seed, *key))


@dataclass(frozen=True)
class StatSummary:
    min: float
    median: float
    mean: float
    max: float

    @classmethod
    def of(cls, values: Sequence[float]) -> "StatSummary":
        arr = np.asarray(values, dtype=float)
        if arr.size == 0:
            nan = float("nan")
            return cls(nan, nan, nan, nan)
        return cls(float(arr.min()), float(np.median(arr)), float(arr.mean()), float(arr.max()))

    def is_ordered(self) -> bool:
        if any(math.isnan(x) for x in (self.min, self.median, self.mean, self.max)):
            return True
        eps = 1e-9 * max(1.0, abs(self.max))
        return (
            self.min <= self.median + eps
            and self.median <= self.max + eps
            and self.min <= self.mean + eps
            and self.mean <= self.max + eps
        )

    def as_row(self) -> list[str]:
        return [sig3(self.min), sig3(self.median), sig3(self.mean), sig3(self.max)]


def sig3(x: float) -> str:
    """Three significant figures without exponent notation (``1090``, ``83.8``, ``1.7``)."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    if x == 0:
        return "0"
    digits = 3 - int(math.floor(math.log10(abs(x)))) - 1
    rounded = round(x, digits)
    if digits <= 0:
        return str(int(rounded))
    return f"{rounded:.{digits}f}".rstrip("0").rstrip(".")


def percent(ratio: float) -> str:
    """Ratio as a percentage to 0.1 of a point, e.g. ``12.7%``."""
    if ratio is None or (isinstance(ratio, float) and math.isnan(ratio)):
        return "nan"
    return f"{100 * ratio:.1f}%"
