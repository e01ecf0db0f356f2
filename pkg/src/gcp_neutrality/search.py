"""Iterated local search that walks plateaus before kicking.

``nils`` alternates a first-improvement hill climber with a perturbation
that first performs up to ``mns`` non-worsening moves looking for an
improvement, and only kicks the solution when none is found. With
``mns = 0`` it reduces to a plain iterated local search with restarts.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .coloring import Coloring, ConflictState, _apply, build_state, canonicalize, format_coloring
from .graph import Graph
from .landscape import random_solution
from .neighborhood import EvaluationBudget, first_in_random_order, move_deltas
from .utils import task_seed

__all__ = [
    "NilsConfig",
    "RunRecord",
    "NwpResult",
    "DecrementResult",
    "fihc",
    "nwp",
    "kick",
    "nils",
    "greedy_coloring",
    "solve_gcp_decrement",
    "downsample_trajectory",
]

NWP_SELECTIONS = ("first", "uniform")


@dataclass(frozen=True)
class NilsConfig:
    """Solver parameters.

    The neutral-step limit is either ``mns_coef`` times the neighbourhood
    size ``n * (k - 1)`` or an absolute ``mns_steps``; exactly one is set.
    ``nwp_selection="uniform"`` replaces first-found neutral steps by a full
    scan and a uniform draw among the non-worsening moves.
    """

    mns_coef: float | None = 1.0
    mns_steps: int | None = None
    kick_fraction: float = 1.0
    eval_budget: int = 20_000_000
    seed: int = 0
    nwp_selection: str = "first"

    def __post_init__(self):
        if (self.mns_coef is None) == (self.mns_steps is None):
            raise ValueError("set exactly one of mns_coef and mns_steps")
        if self.mns_coef is not None and self.mns_coef < 0:
            raise ValueError("mns_coef must be >= 0")
        if self.mns_steps is not None and self.mns_steps < 0:
            raise ValueError("mns_steps must be >= 0")
        if not 0 < self.kick_fraction <= 1:
            raise ValueError("kick_fraction must lie in (0, 1]")
        if self.eval_budget <= 0:
            raise ValueError("eval_budget must be positive")
        if self.nwp_selection not in NWP_SELECTIONS:
            raise ValueError(f"nwp_selection must be one of {NWP_SELECTIONS}")

    def mns_for(self, nbh_size: int) -> int:
        if self.mns_steps is not None:
            return int(self.mns_steps)
        return int(round(self.mns_coef * nbh_size))

    @property
    def label(self) -> str:
        if self.mns_steps is not None:
            return "ILS" if self.mns_steps == 0 else f"NILS-{self.mns_steps}steps"
        return "ILS" if self.mns_coef == 0 else f"NILS-{self.mns_coef:g}x"


@dataclass
class RunRecord:
    config: NilsConfig
    k: int
    best_fitness: int
    best_coloring: Coloring
    trajectory: list[tuple[int, int]]
    evaluations_used: int
    local_optima: int = 0
    kicks: int = 0
    escapes: int = 0

    @property
    def legal_found(self) -> bool:
        return self.best_fitness == 0

    def to_dict(self, max_points: int = 1000) -> dict:
        return {
            "config": asdict(self.config),
            "label": self.config.label,
            "k": self.k,
            "best_fitness": self.best_fitness,
            "legal_found": self.legal_found,
            "evaluations_used": self.evaluations_used,
            "local_optima": self.local_optima,
            "kicks": self.kicks,
            "escapes": self.escapes,
            "best_coloring": format_coloring(self.best_coloring),
            "trajectory": [list(p) for p in downsample_trajectory(self.trajectory, max_points)],
        }


class NwpResult(NamedTuple):
    outcome: str  # "improved", "kicked" or "exhausted"
    steps: int


def fihc(state: ConflictState, rng: np.random.Generator, budget: EvaluationBudget) -> bool:
    """First-improvement hill climbing, in place.

    Each scan visits the moves in a fresh random order and applies the
    first improving one. Returns True at a local optimum, False when the
    budget ran out first.
    """
    while not budget.exhausted:
        scan = first_in_random_order(state, rng, _improving, budget)
        if scan.truncated:
            return False
        if scan.move is None:
            return True
        _apply(state, *scan.move)
    return False


def _improving(d: np.ndarray) -> np.ndarray:
    return d < 0


def _non_worsening(d: np.ndarray) -> np.ndarray:
    return d <= 0


def nwp(
    state: ConflictState,
    mns: int,
    rng: np.random.Generator,
    budget: EvaluationBudget,
    kick_fraction: float = 1.0,
    selection: str = "first",
) -> NwpResult:
    """Neutral-walk perturbation from a local optimum, in place.

    Takes up to ``mns`` non-worsening moves and stops right after the first
    improving one. If none improved, the solution is kicked. The walk also
    ends (and kicks) when no non-worsening move exists. Running out of
    budget mid-walk returns ``"exhausted"`` without kicking.
    """
    step = 0
    better = False
    while step < mns and not better:
        if selection == "first":
            scan = first_in_random_order(state, rng, _non_worsening, budget)
            if scan.truncated:
                return NwpResult("exhausted", step)
            if scan.move is None:
                break
            move, d = scan.move, scan.delta
        else:
            deltas, targets = move_deltas(state)
            flat = deltas.reshape(-1)
            if flat.size > budget.remaining:
                budget.charge(max(int(budget.remaining), 0))
                return NwpResult("exhausted", step)
            budget.charge(flat.size)
            ok = np.flatnonzero(flat <= 0)
            if ok.size == 0:
                break
            j = int(ok[rng.integers(ok.size)])
            v, r = divmod(j, targets.shape[1])
            move, d = (v, int(targets[v, r])), int(flat[j])
        if d < 0:
            better = True
        _apply(state, *move)
        step += 1
    if not better:
        kick(state, kick_fraction, rng)
        return NwpResult("kicked", step)
    return NwpResult("improved", step)


def kick(state: ConflictState, fraction: float, rng: np.random.Generator) -> None:
    """Recolour ``ceil(fraction * n)`` distinct random vertices uniformly from ``1..k``."""
    if not 0 < fraction <= 1:
        raise ValueError("fraction must lie in (0, 1]")
    n = state.n
    count = min(n, max(1, math.ceil(fraction * n - 1e-12)))
    if count == n:
        fresh = build_state(state.graph, rng.integers(1, state.k + 1, size=n), state.k)
        state.colors, state.table, state.conflicts = fresh.colors, fresh.table, fresh.conflicts
        return
    vertices = rng.choice(n, size=count, replace=False)
    colors = rng.integers(1, state.k + 1, size=count)
    for v, c in zip(vertices.tolist(), colors.tolist()):
        if c != state.colors[v]:
            _apply(state, v, c)


def nils(g: Graph, k: int, config: NilsConfig, initial: Coloring | None = None) -> RunRecord:
    """Run the neutrality-based iterated local search on the ``k``-colouring problem.

    Stops at a legal colouring or when ``config.eval_budget`` evaluations
    are spent. The evaluation count never exceeds the budget.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    rng = np.random.default_rng(config.seed)
    budget = EvaluationBudget(config.eval_budget)
    start = random_solution(g, k, rng) if initial is None else initial
    state = build_state(g, start, k)

    best = state.conflicts
    best_colors = state.colors.copy()
    trajectory = [(0, best)]
    record = RunRecord(config, k, best, canonicalize(best_colors, k), trajectory, 0)

    def track() -> None:
        nonlocal best, best_colors
        if state.conflicts < best:
            best = state.conflicts
            best_colors = state.colors.copy()
            trajectory.append((budget.used, best))

    if state.nbh_size == 0:
        # k == 1 or no vertices: nothing to move
        return record

    mns = config.mns_for(state.nbh_size)
    while best > 0 and not budget.exhausted:
        at_optimum = fihc(state, rng, budget)
        track()
        if not at_optimum or state.conflicts == 0:
            break
        record.local_optima += 1
        result = nwp(state, mns, rng, budget, config.kick_fraction, config.nwp_selection)
        if result.outcome == "kicked":
            record.kicks += 1
        elif result.outcome == "improved":
            record.escapes += 1
        track()

    record.best_fitness = best
    record.best_coloring = canonicalize(best_colors, k)
    record.evaluations_used = budget.used
    return record


def downsample_trajectory(points: list[tuple[int, int]], max_points: int = 1000) -> list[tuple[int, int]]:
    """Keep at most ``max_points`` points, log-spaced in evaluations; first and last kept."""
    if len(points) <= max_points:
        return list(points)
    evals = np.array([p[0] for p in points], dtype=float)
    grid = np.unique(np.geomspace(max(evals[1], 1.0), evals[-1], num=max_points - 1))
    idx = np.searchsorted(evals, grid, side="right") - 1
    keep = sorted(set([0, len(points) - 1]) | set(idx.tolist()))
    if len(keep) > max_points:
        keep = keep[:1] + keep[-(max_points - 1):]
    return [points[i] for i in keep]


def greedy_coloring(g: Graph) -> Coloring:
    """First-fit colouring in vertex order (always legal)."""
    colors = np.zeros(g.n, dtype=np.int64)
    for v in range(g.n):
        used = set(colors[g.adjacency[v]].tolist())
        c = 1
        while c in used:
            c += 1
        colors[v] = c
    if g.n == 0:
        return canonicalize(colors, 1)
    return canonicalize(colors)


@dataclass
class DecrementResult:
    k: int
    coloring: Coloring
    k_start: int
    runs: dict[int, RunRecord] = field(default_factory=dict)


def solve_gcp_decrement(g: Graph, config: NilsConfig) -> DecrementResult:
    """Minimise the number of colours by solving k-colouring for decreasing k.

    Starts from a greedy legal colouring and reruns ``nils`` with a fresh
    budget at ``k - 1`` after each success. Returns the smallest ``k`` for
    which a legal colouring was found.
    """
    greedy = greedy_coloring(g)
    result = DecrementResult(greedy.k, greedy, greedy.k)
    k = greedy.k - 1
    while k >= 1:
        if k == 1:
            # a single colour is legal only without edges; no moves to search
            if g.m == 0:
                result.k, result.coloring = 1, canonicalize(np.ones(g.n, dtype=np.int64), 1)
            break
        run = nils(g, k, replace(config, seed=task_seed(config.seed, "decrement", k)))
        result.runs[k] = run
        if not run.legal_found:
            break
        result.k, result.coloring = k, run.best_coloring
        k -= 1
    return result
