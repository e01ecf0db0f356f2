"""Neutrality measurements: descents, neutral random walks, plateau typology.

A plateau is sampled by a neutral random walk started at a local optimum.
Each visited solution has its whole neighbourhood classified, giving a
neutral-degree series and the position of the first portal (a solution
with a strictly improving neighbour). Walks are typed

* ``T1`` - the local optimum has no neutral neighbour,
* ``T2`` - no portal was met along the walk,
* ``T3`` - a portal was met.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from joblib import Parallel, delayed

from .coloring import Coloring, ConflictState, _apply, build_state, canonicalize
from .graph import Graph
from .neighborhood import first_in_random_order, move_deltas
from .utils import StatSummary, task_rng

__all__ = [
    "DescentReport",
    "WalkReport",
    "AutocorrReport",
    "BatteryReport",
    "random_solution",
    "steepest_descent",
    "neutral_walk",
    "autocorrelation",
    "descent_batch",
    "walk_batch",
    "plateau_battery",
]

TYPOLOGIES = ("T1", "T2", "T3")


@dataclass(frozen=True)
class DescentReport:
    start: Coloring
    optimum: Coloring
    step_length: int
    evaluations: int
    start_fitness: int
    fitness: int
    neutral_degree: int

    @property
    def neutral_ratio(self) -> float:
        size = self.optimum.n * (self.optimum.k - 1)
        return self.neutral_degree / size if size else 0.0


@dataclass(frozen=True)
class WalkReport:
    typology: str
    length_limit: int
    steps_taken: int
    portal_index: int | None
    revisits: int
    nd_series: tuple[int, ...]
    fitness: int
    portal: Coloring | None = None
    trace: tuple[Coloring, ...] | None = field(default=None, repr=False)


@dataclass(frozen=True)
class AutocorrReport:
    rho: np.ndarray
    defined: bool

    def __getitem__(self, lag: int) -> float:
        """``report[k]`` is the lag-``k`` coefficient (1-based lag)."""
        if lag < 1 or lag > self.rho.size:
            raise IndexError(f"lag {lag} not computed")
        return float(self.rho[lag - 1])


def random_solution(g: Graph, k: int, rng: np.random.Generator) -> Coloring:
    """Uniform colour per vertex from ``1..k``, returned in canonical form."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return canonicalize(rng.integers(1, k + 1, size=g.n), k)


def steepest_descent(
    g: Graph,
    start: Coloring | ConflictState,
    rng: np.random.Generator,
    k: int | None = None,
    pivot: str = "first",
) -> DescentReport:
    """Descend from ``start`` until no neighbour is strictly better.

    ``pivot="first"`` scans the moves in a fresh random order and takes the
    first improving one (the descent used by the sampling protocol).
    ``pivot="best"`` evaluates the whole neighbourhood and takes a move of
    minimal delta, breaking ties uniformly at random. ``step_length`` counts
    accepted moves; ``evaluations`` counts every delta examined.
    """
    if pivot not in ("first", "best"):
        raise ValueError(f"pivot must be 'first' or 'best', got {pivot!r}")
    state = start.copy() if isinstance(start, ConflictState) else build_state(g, start, k)
    start_col = state.coloring()
    start_fit = state.conflicts
    steps = evaluations = 0
    while True:
        if pivot == "first":
            scan = first_in_random_order(state, rng, _improving)
            evaluations += scan.evaluated
            if scan.move is None:
                break
            _apply(state, *scan.move)
        else:
            deltas, targets = move_deltas(state)
            flat = deltas.reshape(-1)
            evaluations += flat.size
            best = flat.min() if flat.size else 0
            if best >= 0:
                break
            ties = np.flatnonzero(flat == best)
            j = int(ties[rng.integers(ties.size)]) if ties.size > 1 else int(ties[0])
            v, r = divmod(j, targets.shape[1])
            _apply(state, v, int(targets[v, r]))
        steps += 1
    deltas, _ = move_deltas(state)
    return DescentReport(
        start=start_col,
        optimum=state.coloring(),
        step_length=steps,
        evaluations=evaluations,
        start_fitness=start_fit,
        fitness=state.conflicts,
        neutral_degree=int(np.count_nonzero(deltas == 0)),
    )


def _improving(d: np.ndarray) -> np.ndarray:
    return d < 0


def neutral_walk(
    g: Graph,
    start: Coloring | ConflictState,
    length_limit: int,
    rng: np.random.Generator,
    k: int | None = None,
    record_trace: bool = False,
) -> WalkReport:
    """Neutral random walk of at most ``length_limit`` steps from a local optimum.

    The walk keeps going after the first portal so the neutral-degree
    series spans the full length; it ends early only when the current
    solution has no neutral neighbour. ``revisits`` counts canonical
    solutions (start included) seen at least twice.
    """
    if length_limit < 0:
        raise ValueError("length_limit must be non-negative")
    state = start.copy() if isinstance(start, ConflictState) else build_state(g, start, k)
    deltas, targets = move_deltas(state)
    flat = deltas.reshape(-1)
    if np.any(flat < 0):
        raise ValueError("neutral walks must start from a local optimum")

    visits: Counter[bytes] = Counter()
    first = state.coloring()
    visits[first.key()] += 1
    trace = [first] if record_trace else None
    nd_series = [int(np.count_nonzero(flat == 0))]
    portal_index: int | None = None
    portal: Coloring | None = None
    steps = 0

    if nd_series[0] > 0:
        while steps < length_limit:
            neutral = np.flatnonzero(flat == 0)
            if neutral.size == 0:
                break
            j = int(neutral[rng.integers(neutral.size)])
            v, r = divmod(j, targets.shape[1])
            _apply(state, v, int(targets[v, r]))
            steps += 1

            deltas, targets = move_deltas(state)
            flat = deltas.reshape(-1)
            nd_series.append(int(np.count_nonzero(flat == 0)))
            current = state.coloring()
            visits[current.key()] += 1
            if trace is not None:
                trace.append(current)
            if portal_index is None and np.any(flat < 0):
                portal_index = steps
                portal = current

    if nd_series[0] == 0:
        typology = "T1"
    elif portal_index is not None:
        typology = "T3"
    else:
        typology = "T2"
    return WalkReport(
        typology=typology,
        length_limit=int(length_limit),
        steps_taken=steps,
        portal_index=portal_index,
        revisits=sum(1 for c in visits.values() if c >= 2),
        nd_series=tuple(nd_series),
        fitness=state.conflicts,
        portal=portal,
        trace=tuple(trace) if trace is not None else None,
    )


def autocorrelation(nd_series: Sequence[float], max_lag: int = 10) -> AutocorrReport:
    """Lag-k sample autocorrelation ``sum_i (x_i - m)(x_{i+k} - m) / sum_i (x_i - m)^2``.

    Lags ``1..min(max_lag, len - 1)``; ``defined`` is False for a constant series.
    """
    x = np.asarray(nd_series, dtype=float)
    if x.size < 2:
        raise ValueError("autocorrelation needs a series of length >= 2")
    dev = x - x.mean()
    denom = float(dev @ dev)
    lags = min(max_lag, x.size - 1)
    if denom == 0.0:
        return AutocorrReport(rho=np.full(lags, np.nan), defined=False)
    rho = np.array([float(dev[:-lag] @ dev[lag:]) / denom for lag in range(1, lags + 1)])
    return AutocorrReport(rho=rho, defined=True)


@dataclass
class BatteryReport:
    """Descents, walks and their aggregates for one instance at one ``k``."""

    k: int
    descents: list[DescentReport]
    walks: list[WalkReport]
    walk_length: int

    @property
    def typology_counts(self) -> dict[str, int]:
        counts = Counter(w.typology for w in self.walks)
        return {t: counts.get(t, 0) for t in TYPOLOGIES}

    @property
    def nbs(self) -> list[int]:
        return [w.portal_index for w in self.walks if w.portal_index is not None]

    @property
    def step_lengths(self) -> list[int]:
        return [d.step_length for d in self.descents]

    @property
    def nbs_summary(self) -> StatSummary:
        return StatSummary.of(self.nbs)

    @property
    def step_length_summary(self) -> StatSummary:
        return StatSummary.of(self.step_lengths)

    @property
    def rho1_values(self) -> list[float]:
        out = []
        for w in self.walks:
            if len(w.nd_series) >= 2:
                ac = autocorrelation(w.nd_series, max_lag=1)
                if ac.defined:
                    out.append(ac[1])
        return out

    @property
    def rho1(self) -> float:
        """Mean of the per-walk lag-1 autocorrelations (walks with a defined value)."""
        vals = self.rho1_values
        return float(np.mean(vals)) if vals else float("nan")

    @property
    def revisits(self) -> int:
        return sum(w.revisits for w in self.walks)

    @property
    def lo_ratio(self) -> float:
        return float(np.mean([d.neutral_ratio for d in self.descents])) if self.descents else float("nan")


def _descent_task(g: Graph, k: int, seed: int, index: int, pivot: str) -> DescentReport:
    rng = task_rng(seed, "descent", index)
    return steepest_descent(g, random_solution(g, k, rng), rng, k, pivot)


def _walk_task(g: Graph, k: int, start: Coloring, length: int, seed: int, index: int) -> WalkReport:
    return neutral_walk(g, start, length, task_rng(seed, "walk", index), k)


def descent_batch(
    g: Graph, k: int, samples: int = 30, seed: int = 0, n_jobs: int = 1, pivot: str = "first"
) -> list[DescentReport]:
    """``samples`` independent descents from uniform random solutions."""
    return Parallel(n_jobs=n_jobs)(delayed(_descent_task)(g, k, seed, i, pivot) for i in range(samples))


def walk_batch(
    g: Graph,
    k: int,
    starts: Sequence[Coloring],
    length: int,
    seed: int = 0,
    n_jobs: int = 1,
) -> list[WalkReport]:
    return Parallel(n_jobs=n_jobs)(
        delayed(_walk_task)(g, k, s, length, seed, i) for i, s in enumerate(starts)
    )


def plateau_battery(
    g: Graph,
    k: int,
    samples: int = 30,
    seed: int = 0,
    n_jobs: int = 1,
    walk_length: int | None = None,
    pivot: str = "first",
) -> BatteryReport:
    """Descents from random solutions, then one neutral walk per local optimum.

    The walk length defaults to the longest descent of the batch.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    descents = descent_batch(g, k, samples, seed, n_jobs, pivot)
    length = max(d.step_length for d in descents) if walk_length is None else walk_length
    walks = walk_batch(g, k, [d.optimum for d in descents], length, seed, n_jobs)
    return BatteryReport(k=k, descents=descents, walks=walks, walk_length=length)
