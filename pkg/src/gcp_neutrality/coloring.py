"""Colour vectors, conflict fitness and incremental conflict bookkeeping.

Colours are 1-based (``1..k``) everywhere in the public API.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import Graph

__all__ = [
    "Coloring",
    "ConflictState",
    "canonicalize",
    "fitness",
    "build_state",
    "delta",
    "apply_move",
    "format_coloring",
    "parse_coloring",
]


@dataclass(frozen=True, eq=False)
class Coloring:
    """A colour vector in canonical (order-of-arrival) form over a palette of ``k``."""

    colors: np.ndarray
    k: int

    @property
    def n(self) -> int:
        return int(self.colors.size)

    def key(self) -> bytes:
        """Hashable identity; equal keys mean equal solutions up to colour permutation."""
        return self.colors.tobytes()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Coloring):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.colors, other.colors)

    def __hash__(self) -> int:
        return hash((self.k, self.key()))

    def __repr__(self) -> str:
        return f"Coloring({self.colors.tolist()}, k={self.k})"


def canonicalize(raw: Sequence[int] | np.ndarray, k: int | None = None) -> Coloring:
    """Relabel colours by order of first appearance: ``[2, 1, 1, 3] -> [1, 2, 2, 3]``.

    ``k`` defaults to the number of distinct colours; when given, a vector
    that needs more than ``k`` colours is rejected.
    """
    arr = np.asarray(raw)
    if arr.ndim != 1:
        raise ValueError("colour vector must be one-dimensional")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise ValueError("colours must be integers")
    arr = arr.astype(np.int64)
    if arr.size and arr.min() <= 0:
        raise ValueError("colours must be positive integers")
    values, first, inverse = np.unique(arr, return_index=True, return_inverse=True)
    # rank of each distinct value by its first occurrence
    rank = np.empty(values.size, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(1, values.size + 1)
    out = rank[inverse.reshape(-1)]
    used = int(values.size)
    if k is None:
        k = max(used, 1)
    elif used > k:
        raise ValueError(f"colouring uses {used} colours but k={k}")
    out.flags.writeable = False
    return Coloring(colors=out, k=int(k))


def _as_colors(g: Graph, s: Coloring | Sequence[int] | np.ndarray) -> np.ndarray:
    colors = s.colors if isinstance(s, Coloring) else np.asarray(s, dtype=np.int64)
    if colors.shape != (g.n,):
        raise ValueError(f"colour vector has length {colors.size}, graph has n={g.n}")
    return colors


def fitness(g: Graph, s: Coloring | Sequence[int] | np.ndarray) -> int:
    """Number of edges whose two endpoints share a colour."""
    colors = _as_colors(g, s)
    if g.m == 0:
        return 0
    return int(np.count_nonzero(colors[g.edges[:, 0]] == colors[g.edges[:, 1]]))


class ConflictState:
    """Mutable colouring with a neighbour-colour table for O(1) move deltas.

    ``table[v, c]`` counts neighbours of ``v`` coloured ``c``; column 0 is
    unused so colours index directly. The working labels are not kept
    canonical; call :meth:`coloring` for the canonical form.
    """

    __slots__ = ("graph", "k", "colors", "table", "conflicts")

    def __init__(self, graph: Graph, colors: np.ndarray, k: int, table: np.ndarray, conflicts: int):
        self.graph = graph
        self.k = k
        self.colors = colors
        self.table = table
        self.conflicts = conflicts

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def nbh_size(self) -> int:
        return self.graph.n * (self.k - 1)

    def coloring(self) -> Coloring:
        return canonicalize(self.colors, self.k)

    def key(self) -> bytes:
        return self.coloring().key()

    def copy(self) -> "ConflictState":
        return ConflictState(self.graph, self.colors.copy(), self.k, self.table.copy(), self.conflicts)

    def same_as(self, other: "ConflictState") -> bool:
        return (
            self.k == other.k
            and self.conflicts == other.conflicts
            and np.array_equal(self.colors, other.colors)
            and np.array_equal(self.table, other.table)
        )

    def __repr__(self) -> str:
        return f"ConflictState(n={self.n}, k={self.k}, conflicts={self.conflicts})"


def build_state(g: Graph, s: Coloring | Sequence[int] | np.ndarray, k: int | None = None) -> ConflictState:
    """Build the incremental state for colouring ``s`` with palette ``k``.

    ``k`` defaults to ``s.k`` for a :class:`Coloring`, else to ``max(s)``.
    """
    colors = np.array(_as_colors(g, s), dtype=np.int64)
    if k is None:
        k = s.k if isinstance(s, Coloring) else int(colors.max(initial=1))
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if colors.size and (colors.min() < 1 or colors.max() > k):
        raise ValueError(f"colours must lie in 1..{k}")
    table = np.zeros((g.n, k + 1), dtype=np.int64)
    if g.m:
        u, v = g.edges[:, 0], g.edges[:, 1]
        np.add.at(table, (u, colors[v]), 1)
        np.add.at(table, (v, colors[u]), 1)
    return ConflictState(g, colors, int(k), table, fitness(g, colors))


def _check_move(state: ConflictState, v: int, c_new: int) -> None:
    if not 0 <= v < state.n:
        raise ValueError(f"vertex {v} out of range")
    if not 1 <= c_new <= state.k:
        raise ValueError(f"colour {c_new} outside 1..{state.k}")
    if c_new == state.colors[v]:
        raise ValueError(f"vertex {v} already has colour {c_new}")


def delta(state: ConflictState, v: int, c_new: int) -> int:
    """Fitness change of recolouring vertex ``v`` (0-based) to ``c_new``; pure query."""
    _check_move(state, v, c_new)
    return int(state.table[v, c_new] - state.table[v, state.colors[v]])


def apply_move(state: ConflictState, v: int, c_new: int) -> None:
    _check_move(state, v, c_new)
    _apply(state, v, c_new)


def _apply(state: ConflictState, v: int, c_new: int) -> None:
    old = state.colors[v]
    state.conflicts += int(state.table[v, c_new] - state.table[v, old])
    nb = state.graph.adjacency[v]
    state.table[nb, old] -= 1
    state.table[nb, c_new] += 1
    state.colors[v] = c_new


def format_coloring(s: Coloring | ConflictState) -> str:
    """One line of space-separated 1-based colours, canonical form."""
    col = s.coloring() if isinstance(s, ConflictState) else s
    return " ".join(map(str, col.colors.tolist()))


def parse_coloring(line: str, k: int | None = None) -> Coloring:
    return canonicalize([int(t) for t in line.split()], k)
