"""Neutrality analysis and neutral-walk iterated local search for graph colouring."""

from .coloring import (
    Coloring,
    ConflictState,
    apply_move,
    build_state,
    canonicalize,
    delta,
    fitness,
    format_coloring,
    parse_coloring,
)
from .graph import (
    DimacsFormatError,
    Graph,
    InstanceMeta,
    find_instance,
    load_manifest,
    parse_dimacs,
    read_dimacs,
    write_dimacs,
)
from .landscape import (
    autocorrelation,
    neutral_walk,
    plateau_battery,
    random_solution,
    steepest_descent,
)
from .neighborhood import (
    EvaluationBudget,
    Move,
    NeighborClassification,
    classify,
    enumerate_moves,
    is_portal,
    neutral_degree,
    neutral_ratio,
)
from .search import NilsConfig, RunRecord, fihc, greedy_coloring, kick, nils, nwp, solve_gcp_decrement

__version__ = "0.1.0"
