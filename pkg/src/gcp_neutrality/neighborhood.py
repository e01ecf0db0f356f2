"""The 1-move neighbourhood: enumeration, classification, neutral degree.

A move recolours one vertex with one of the other ``k - 1`` palette
colours, so every solution has exactly ``n * (k - 1)`` neighbours. Moves
are addressed by a flat index ``j`` with ``v = j // (k - 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, NamedTuple

import numpy as np

from .coloring import ConflictState

__all__ = [
    "Move",
    "NeighborClassification",
    "EvaluationBudget",
    "move_targets",
    "move_deltas",
    "enumerate_moves",
    "classify",
    "neutral_degree",
    "neutral_ratio",
    "is_portal",
    "first_in_random_order",
    "ScanResult",
]


class Move(NamedTuple):
    v: int
    c_new: int


@dataclass(frozen=True)
class NeighborClassification:
    improving: int
    neutral: int
    worsening: int

    @property
    def total(self) -> int:
        return self.improving + self.neutral + self.worsening

    @property
    def ratio(self) -> float:
        return self.neutral / self.total if self.total else 0.0


class EvaluationBudget:
    """Counts neighbour evaluations against an optional limit.

    Every delta computation is one evaluation; applying a move is free.
    """

    def __init__(self, limit: int | None = None):
        if limit is not None and limit < 0:
            raise ValueError("budget limit must be non-negative")
        self.limit = limit
        self.used = 0

    @property
    def remaining(self) -> float:
        return float("inf") if self.limit is None else self.limit - self.used

    @property
    def exhausted(self) -> bool:
        return self.limit is not None and self.used >= self.limit

    def charge(self, n: int) -> None:
        self.used += int(n)

    def __repr__(self) -> str:
        return f"EvaluationBudget(used={self.used}, limit={self.limit})"


def _require_palette(state: ConflictState) -> None:
    if state.k < 2:
        raise ValueError(f"the 1-move neighbourhood needs k >= 2, got k={state.k}")


def move_targets(state: ConflictState) -> np.ndarray:
    """``(n, k-1)`` array: the colours each vertex can move to, ascending."""
    k = state.k
    cols = np.arange(1, k, dtype=np.int64)
    return cols[None, :] + (cols[None, :] >= state.colors[:, None])


def move_deltas(state: ConflictState) -> tuple[np.ndarray, np.ndarray]:
    """Deltas and target colours of every move, both shaped ``(n, k-1)``."""
    _require_palette(state)
    targets = move_targets(state)
    rows = np.arange(state.n)
    own = state.table[rows, state.colors]
    deltas = state.table[rows[:, None], targets] - own[:, None]
    return deltas, targets


def _move_at(targets: np.ndarray, j: int) -> Move:
    v, r = divmod(int(j), targets.shape[1])
    return Move(v, int(targets[v, r]))


def enumerate_moves(state: ConflictState, rng: np.random.Generator | None = None) -> Iterator[Move]:
    """All ``n * (k-1)`` moves; a uniform random order when ``rng`` is given."""
    _require_palette(state)
    targets = move_targets(state)
    size = targets.size
    order = rng.permutation(size) if rng is not None else range(size)
    for j in order:
        yield _move_at(targets, j)


def classify(state: ConflictState, budget: EvaluationBudget | None = None) -> NeighborClassification:
    """Count improving, neutral and worsening neighbours (a full scan)."""
    deltas, _ = move_deltas(state)
    if budget is not None:
        budget.charge(deltas.size)
    neg = int(np.count_nonzero(deltas < 0))
    zero = int(np.count_nonzero(deltas == 0))
    return NeighborClassification(neg, zero, deltas.size - neg - zero)


def neutral_degree(state: ConflictState, budget: EvaluationBudget | None = None) -> int:
    return classify(state, budget).neutral


def neutral_ratio(state: ConflictState, budget: EvaluationBudget | None = None) -> float:
    return classify(state, budget).ratio


class ScanResult(NamedTuple):
    move: Move | None
    delta: int
    evaluated: int
    truncated: bool


def first_in_random_order(
    state: ConflictState,
    rng: np.random.Generator,
    accept: Callable[[np.ndarray], np.ndarray],
    budget: EvaluationBudget | None = None,
) -> ScanResult:
    """Scan the neighbourhood in a fresh random order, each move evaluated once.

    Returns the first move whose delta satisfies ``accept``. Only the moves
    examined up to the hit are charged. When the budget runs out before the
    scan decides, ``truncated`` is set and no move is returned.
    """
    deltas, targets = move_deltas(state)
    flat = deltas.reshape(-1)
    order = rng.permutation(flat.size)
    hits = np.flatnonzero(accept(flat[order]))
    evaluated = int(hits[0]) + 1 if hits.size else flat.size
    if budget is not None and evaluated > budget.remaining:
        spent = max(int(budget.remaining), 0)
        budget.charge(spent)
        return ScanResult(None, 0, spent, True)
    if budget is not None:
        budget.charge(evaluated)
    if not hits.size:
        return ScanResult(None, 0, evaluated, False)
    j = int(order[hits[0]])
    return ScanResult(_move_at(targets, j), int(flat[j]), evaluated, False)


def is_portal(
    state: ConflictState,
    rng: np.random.Generator | None = None,
    budget: EvaluationBudget | None = None,
) -> bool:
    """True iff some neighbour is strictly better.

    Stops at the first improving move; with a budget, only the moves
    actually examined are charged.
    """
    if rng is None:
        deltas, _ = move_deltas(state)
        flat = deltas.reshape(-1)
        hits = np.flatnonzero(flat < 0)
        if budget is not None:
            budget.charge(int(hits[0]) + 1 if hits.size else flat.size)
        return bool(hits.size)
    return first_in_random_order(state, rng, lambda d: d < 0, budget).move is not None
