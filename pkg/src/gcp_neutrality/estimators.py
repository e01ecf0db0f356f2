"""scikit-learn style wrappers.

``fit`` takes a graph in any of the forms accepted by :func:`check_graph`.
A colouring is a partition of the vertices, so :class:`NILSColoring`
follows the clusterer convention and exposes ``labels_``.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .coloring import build_state, canonicalize
from .graph import Graph, read_dimacs
from .landscape import plateau_battery
from .neighborhood import classify
from .search import NilsConfig, nils, solve_gcp_decrement

__all__ = ["check_graph", "NILSColoring", "NeutralityProfile", "PlateauAnalyzer"]


def check_graph(G) -> Graph:
    """Coerce ``G`` to a :class:`Graph`.

    Accepts a :class:`Graph`, a path to a DIMACS file, a networkx graph,
    or a square symmetric adjacency matrix (dense or scipy sparse).
    """
    if isinstance(G, Graph):
        return G
    if isinstance(G, (str, os.PathLike)):
        return read_dimacs(Path(G))
    if hasattr(G, "nodes") and hasattr(G, "edges") and hasattr(G, "is_directed"):
        if G.is_directed():
            raise ValueError("directed graphs are not supported")
        nodes = list(G.nodes())
        index = {v: i for i, v in enumerate(nodes)}
        edges = [(index[u], index[v]) for u, v in G.edges() if u != v]
        return Graph.from_edges(len(nodes), edges)
    if sp.issparse(G):
        B = sp.csr_matrix(G) != 0
        if B.shape[0] != B.shape[1]:
            raise ValueError(f"adjacency matrix must be square, got {B.shape}")
        B.setdiag(False)
        B.eliminate_zeros()
        if (B != B.T).nnz:
            raise ValueError("adjacency matrix must be symmetric")
        upper = sp.triu(B, 1).tocoo()
        return Graph.from_edges(B.shape[0], np.column_stack([upper.row, upper.col]))
    A = check_array(G, ensure_2d=True, ensure_min_samples=0, ensure_min_features=0)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"adjacency matrix must be square, got {A.shape}")
    B = A != 0
    np.fill_diagonal(B, False)
    if not np.array_equal(B, B.T):
        raise ValueError("adjacency matrix must be symmetric")
    return Graph.from_edges(A.shape[0], np.argwhere(np.triu(B, 1)))


def _seed(random_state) -> int:
    if random_state is None:
        return int(np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0])
    if isinstance(random_state, (int, np.integer)):
        return int(random_state)
    if isinstance(random_state, np.random.RandomState):
        return int(random_state.randint(0, 2**31 - 1))
    if isinstance(random_state, np.random.Generator):
        return int(random_state.integers(0, 2**63 - 1))
    raise ValueError(f"cannot derive a seed from {random_state!r}")


class NILSColoring(ClusterMixin, BaseEstimator):
    """Conflict-minimising graph colouring by neutral-walk iterated local search.

    Parameters
    ----------
    k : int or None
        Number of colours. ``None`` searches for the smallest ``k`` reachable,
        starting from a greedy colouring and decrementing.
    mns_coef : float
        Neutral steps allowed per perturbation, as a multiple of the
        neighbourhood size ``n * (k - 1)``. ``0`` gives a plain ILS.
    kick_fraction : float
        Fraction of vertices recoloured by a kick.
    eval_budget : int
        Neighbour evaluations per solver run.
    nwp_selection : {"first", "uniform"}
    random_state : int, RandomState, Generator or None

    Attributes
    ----------
    labels_ : ndarray of shape (n_vertices,)
        Best colouring found, canonical 1-based labels.
    n_conflicts_ : int
    k_ : int
    run_record_ : RunRecord or None
        Record of the fixed-``k`` run (``None`` when ``k`` was searched).
    """

    def __init__(
        self,
        k=None,
        mns_coef=1.0,
        kick_fraction=1.0,
        eval_budget=2_000_000,
        nwp_selection="first",
        random_state=None,
    ):
        self.k = k
        self.mns_coef = mns_coef
        self.kick_fraction = kick_fraction
        self.eval_budget = eval_budget
        self.nwp_selection = nwp_selection
        self.random_state = random_state

    def _config(self) -> NilsConfig:
        return NilsConfig(
            mns_coef=float(self.mns_coef),
            kick_fraction=float(self.kick_fraction),
            eval_budget=int(self.eval_budget),
            seed=_seed(self.random_state),
            nwp_selection=self.nwp_selection,
        )

    def fit(self, G, y=None):
        graph = check_graph(G)
        config = self._config()
        if self.k is None:
            result = solve_gcp_decrement(graph, config)
            self.k_ = result.k
            self.labels_ = result.coloring.colors.copy()
            self.n_conflicts_ = 0
            self.run_record_ = None
            self.runs_ = result.runs
        else:
            if int(self.k) < 1:
                raise ValueError(f"k must be >= 1, got {self.k}")
            record = nils(graph, int(self.k), config)
            self.k_ = int(self.k)
            self.labels_ = record.best_coloring.colors.copy()
            self.n_conflicts_ = record.best_fitness
            self.run_record_ = record
        self.n_vertices_ = graph.n
        return self

    def fit_predict(self, G, y=None):
        return self.fit(G).labels_


class NeutralityProfile(TransformerMixin, BaseEstimator):
    """Map colourings to their neighbourhood statistics for a fixed graph.

    ``fit`` stores the graph; ``transform`` takes an ``(n_samples, n_vertices)``
    array of colourings and returns, per row, ``[conflicts, improving,
    neutral, worsening, neutral_ratio]``.
    """

    def __init__(self, k=None):
        self.k = k

    def fit(self, G, y=None):
        self.graph_ = check_graph(G)
        self.n_features_in_ = self.graph_.n
        return self

    def transform(self, X):
        check_is_fitted(self, "graph_")
        X = check_array(X, dtype=np.int64, ensure_min_samples=0)
        if X.shape[1] != self.graph_.n:
            raise ValueError(f"colourings have {X.shape[1]} entries, graph has {self.graph_.n} vertices")
        out = np.empty((X.shape[0], 5), dtype=float)
        for i, row in enumerate(X):
            k = int(self.k) if self.k is not None else int(row.max(initial=1))
            state = build_state(self.graph_, row, max(k, 2))
            c = classify(state)
            out[i] = (state.conflicts, c.improving, c.neutral, c.worsening, c.ratio)
        return out

    def get_feature_names_out(self, input_features=None):
        return np.array(["conflicts", "improving", "neutral", "worsening", "neutral_ratio"], dtype=object)


class PlateauAnalyzer(BaseEstimator):
    """Sample local-optimum plateaus of the ``k``-colouring landscape.

    Runs ``n_samples`` descents from random colourings and one neutral
    random walk from each local optimum (length: the longest descent).
    """

    def __init__(self, k=2, n_samples=30, walk_length=None, n_jobs=1, random_state=None):
        self.k = k
        self.n_samples = n_samples
        self.walk_length = walk_length
        self.n_jobs = n_jobs
        self.random_state = random_state

    def fit(self, G, y=None):
        graph = check_graph(G)
        if int(self.k) < 2:
            raise ValueError("k must be >= 2")
        report = plateau_battery(
            graph,
            int(self.k),
            samples=int(self.n_samples),
            seed=_seed(self.random_state),
            n_jobs=self.n_jobs,
            walk_length=self.walk_length,
        )
        self.battery_ = report
        self.typology_counts_ = report.typology_counts
        self.rho1_ = report.rho1
        self.nbs_summary_ = report.nbs_summary
        self.step_length_summary_ = report.step_length_summary
        self.lo_neutral_ratio_ = report.lo_ratio
        self.local_optima_ = [canonicalize(d.optimum.colors, report.k) for d in report.descents]
        return self
