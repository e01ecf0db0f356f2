"""Undirected graphs, DIMACS ``.col`` I/O and the benchmark manifest."""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DimacsFormatError",
    "Graph",
    "InstanceMeta",
    "parse_dimacs",
    "read_dimacs",
    "write_dimacs",
    "load_manifest",
    "find_instance",
    "normalize_name",
]


class DimacsFormatError(ValueError):
    """Malformed DIMACS input; ``lineno`` is 1-based (0 when not line-specific)."""

    def __init__(self, message: str, lineno: int = 0):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno else message)


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``.

    ``adjacency[v]`` is a sorted read-only ``int64`` array of the neighbours
    of ``v``; ``edges`` holds each undirected edge once as ``(u, v)`` with
    ``u < v``, sorted lexicographically.
    """

    n: int
    edges: np.ndarray
    adjacency: tuple[np.ndarray, ...] = field(repr=False)
    name: str = ""

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    @property
    def degrees(self) -> np.ndarray:
        return np.fromiter((a.size for a in self.adjacency), dtype=np.int64, count=self.n)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], name: str = "") -> "Graph":
        """Build from 0-based edge pairs; duplicates and reversed pairs are merged."""
        n = int(n)
        if n < 0:
            raise ValueError(f"vertex count must be non-negative, got {n}")
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        if arr.size == 0:
            arr = np.empty((0, 2), dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("edges must be a sequence of (u, v) pairs")
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ValueError(f"edge endpoint out of range [0, {n})")
        if np.any(arr[:, 0] == arr[:, 1]):
            raise ValueError("self-loops are not allowed")
        arr = np.sort(arr, axis=1)
        arr = np.unique(arr, axis=0)

        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in arr.tolist():
            adj[u].append(v)
            adj[v].append(u)
        adjacency = []
        for nb in adj:
            a = np.array(sorted(nb), dtype=np.int64)
            a.flags.writeable = False
            adjacency.append(a)
        arr.flags.writeable = False
        return cls(n=n, edges=arr, adjacency=tuple(adjacency), name=name)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self) -> int:
        return hash((self.n, self.edges.tobytes()))

    def check(self) -> None:
        """Assert the structural invariants; raises ``ValueError`` on violation."""
        total = 0
        for v, nb in enumerate(self.adjacency):
            total += nb.size
            if nb.size and (np.any(np.diff(nb) <= 0)):
                raise ValueError(f"adjacency of {v} not strictly sorted")
            if np.any(nb == v):
                raise ValueError(f"self-loop at {v}")
            for u in nb.tolist():
                if v not in set(self.adjacency[u].tolist()):
                    raise ValueError(f"asymmetric adjacency between {u} and {v}")
        if total != 2 * self.m:
            raise ValueError("adjacency lengths do not sum to 2m")


def parse_dimacs(text: str | bytes, name: str = "") -> Graph:
    """Parse DIMACS ``.col`` text (``c``/``p edge n m``/``e u v`` lines, 1-based ids)."""
    if isinstance(text, bytes):
        text = text.decode("utf-8", errors="replace")
    n: int | None = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        tokens = raw.split()
        if not tokens or tokens[0].startswith("c"):
            continue
        tag = tokens[0]
        if tag == "p":
            if n is not None:
                raise DimacsFormatError("duplicate 'p' line", lineno)
            if len(tokens) != 4 or tokens[1] not in ("edge", "col"):
                raise DimacsFormatError("expected 'p edge <n> <m>'", lineno)
            n = _to_int(tokens[2], lineno)
            _to_int(tokens[3], lineno)
            if n < 0:
                raise DimacsFormatError("negative vertex count", lineno)
        elif tag == "e":
            if n is None:
                raise DimacsFormatError("edge line before 'p' line", lineno)
            if len(tokens) != 3:
                raise DimacsFormatError("expected 'e <u> <v>'", lineno)
            u, v = _to_int(tokens[1], lineno), _to_int(tokens[2], lineno)
            for x in (u, v):
                if not 1 <= x <= n:
                    raise DimacsFormatError(f"vertex id {x} out of range [1, {n}]", lineno)
            if u == v:
                raise DimacsFormatError(f"self-loop on vertex {u}", lineno)
            edges.append((u - 1, v - 1))
        else:
            raise DimacsFormatError(f"unknown line type {tag!r}", lineno)
    if n is None:
        raise DimacsFormatError("missing 'p' line")
    return Graph.from_edges(n, edges, name=name)


def _to_int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise DimacsFormatError(f"non-integer token {token!r}", lineno) from None


def read_dimacs(path: str | os.PathLike) -> Graph:
    path = Path(path)
    name = path.name
    if name.lower().endswith(".col"):
        name = name[:-4]
    return parse_dimacs(path.read_bytes(), name=name)


def write_dimacs(graph: Graph, comment: str | None = None) -> str:
    """Canonical writer: edges once each, ``u < v``, lexicographic order."""
    lines = []
    if comment:
        lines.extend(f"c {c}" for c in comment.splitlines())
    lines.append(f"p edge {graph.n} {graph.m}")
    lines.extend(f"e {u + 1} {v + 1}" for u, v in graph.edges.tolist())
    return "\n".join(lines) + "\n"


def normalize_name(name: str) -> str:
    """Lookup key tolerant of case and underscore spelling (``le_450_25c`` == ``le450_25c``)."""
    key = name.lower()
    if key.endswith(".col"):
        key = key[:-4]
    return key.replace("_", "")


@dataclass(frozen=True)
class InstanceMeta:
    name: str
    n: int
    chi: int
    nbh_size: int

    def __post_init__(self):
        if self.chi < 2:
            raise ValueError(f"{self.name}: chi must be >= 2, got {self.chi}")
        if self.n < 1:
            raise ValueError(f"{self.name}: n must be >= 1, got {self.n}")
        if self.nbh_size != self.n * (self.chi - 1):
            raise ValueError(
                f"{self.name}: nbh_size {self.nbh_size} != n*(chi-1) = {self.n * (self.chi - 1)}"
            )


def load_manifest(path: str | os.PathLike | None = None) -> list[InstanceMeta]:
    """Read the instance manifest (CSV: ``name,n,chi,nbh_size``).

    With no path the manifest bundled with the package is used.
    """
    if path is None:
        text = resources.files("gcp_neutrality").joinpath("data/manifest.csv").read_text()
    else:
        text = Path(path).read_text()
    rows = csv.DictReader(line for line in io.StringIO(text) if not line.startswith("#"))
    out = []
    for row in rows:
        out.append(
            InstanceMeta(
                name=row["name"].strip(),
                n=int(row["n"]),
                chi=int(row["chi"]),
                nbh_size=int(row["nbh_size"]),
            )
        )
    return out


def manifest_lookup(name: str, manifest: list[InstanceMeta] | None = None) -> InstanceMeta | None:
    manifest = load_manifest() if manifest is None else manifest
    key = normalize_name(name)
    for meta in manifest:
        if normalize_name(meta.name) == key:
            return meta
    return None


def find_instance(name: str, directory: str | os.PathLike) -> Path | None:
    """Locate ``<name>.col`` in ``directory`` ignoring case and underscores."""
    directory = Path(directory)
    if not directory.is_dir():
        return None
    key = normalize_name(name)
    for p in sorted(directory.iterdir()):
        if p.is_file() and p.suffix.lower() == ".col" and normalize_name(p.name) == key:
            return p
    return None
