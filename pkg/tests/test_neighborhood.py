import numpy as np
import pytest

from gcp_neutrality import (
    EvaluationBudget,
    Graph,
    build_state,
    classify,
    enumerate_moves,
    fitness,
    is_portal,
    neutral_degree,
    neutral_ratio,
)
from gcp_neutrality.neighborhood import first_in_random_order
from oracles import random_graph


def brute_classify(g, colors, k):
    base = fitness(g, colors)
    counts = [0, 0, 0]
    for v in range(g.n):
        for c in range(1, k + 1):
            if c == colors[v]:
                continue
            nxt = list(colors)
            nxt[v] = c
            f = fitness(g, nxt)
            counts[0 if f < base else 1 if f == base else 2] += 1
    return tuple(counts)


class TestEnumerate:
    def test_sizes(self, triangle):
        assert len(list(enumerate_moves(build_state(triangle, [1, 2, 1], k=2)))) == 3

    def test_dsjc_sized(self):
        g = Graph.from_edges(250, [])
        s = build_state(g, np.ones(250, dtype=int), k=28)
        assert len(list(enumerate_moves(s))) == 6750

    def test_distinct_and_legal(self, rng):
        g = random_graph(8, 0.5, rng)
        s = build_state(g, rng.integers(1, 5, size=8), k=4)
        moves = list(enumerate_moves(s, np.random.default_rng(0)))
        assert len(set(moves)) == len(moves) == 8 * 3
        assert all(m.c_new != s.colors[m.v] and 1 <= m.c_new <= 4 for m in moves)

    def test_seeded_order_deterministic(self, rng):
        g = random_graph(8, 0.5, rng)
        s = build_state(g, rng.integers(1, 4, size=8), k=3)
        a = list(enumerate_moves(s, np.random.default_rng(7)))
        b = list(enumerate_moves(s, np.random.default_rng(7)))
        c = list(enumerate_moves(s, np.random.default_rng(8)))
        assert a == b and a != c


class TestClassify:
    def test_triangle(self, triangle):
        c = classify(build_state(triangle, [1, 1, 2], k=2))
        assert (c.improving, c.neutral, c.worsening, c.total) == (0, 2, 1, 3)

    def test_legal_path(self, path3):
        c = classify(build_state(path3, [1, 2, 1], k=2))
        assert (c.improving, c.neutral, c.worsening) == (0, 0, 3)

    def test_k_one_rejected(self, k4):
        with pytest.raises(ValueError, match="k >= 2"):
            classify(build_state(k4, [1, 1, 1, 1], k=1))

    def test_budget_accounting(self, triangle):
        b = EvaluationBudget()
        classify(build_state(triangle, [1, 1, 2], k=3), b)
        assert b.used == 6

    def test_matches_brute_force_small(self, rng):
        for _ in range(40):
            n = int(rng.integers(2, 9))
            k = int(rng.integers(2, 4))
            g = random_graph(n, 0.5, rng)
            colors = rng.integers(1, k + 1, size=n)
            c = classify(build_state(g, colors, k=k))
            assert (c.improving, c.neutral, c.worsening) == brute_classify(g, colors.tolist(), k)
            assert c.total == n * (k - 1)


class TestNeutralDegree:
    def test_triangle(self, triangle):
        assert neutral_degree(build_state(triangle, [1, 1, 2], k=2)) == 2

    def test_edgeless(self, edgeless):
        s = build_state(edgeless, [1, 2, 1, 3, 1], k=4)
        assert neutral_degree(s) == 5 * 3
        assert neutral_ratio(s) == 1.0

    def test_ratio_zero(self, path3):
        assert neutral_ratio(build_state(path3, [1, 2, 1], k=2)) == 0.0

    def test_ratio_arithmetic(self):
        assert round(858 / 6750, 4) == 0.1271


class TestPortal:
    def test_triangle_optimum(self, triangle):
        assert not is_portal(build_state(triangle, [1, 1, 2], k=2))

    def test_k4_optimum(self, k4):
        assert not is_portal(build_state(k4, [1, 1, 2, 2], k=2))

    def test_path_has_improving_move(self, path3):
        # exhaustive check: [1,1,2] -> moving vertex 0 to colour 2 gives [2,1,2], f=0
        assert brute_classify(path3, [1, 1, 2], 2) == (1, 1, 1)
        s = build_state(path3, [1, 1, 2], k=2)
        assert is_portal(s)
        assert is_portal(s, np.random.default_rng(0))

    def test_agrees_with_classify(self, rng):
        for _ in range(50):
            g = random_graph(7, 0.5, rng)
            s = build_state(g, rng.integers(1, 4, size=7), k=3)
            assert is_portal(s, rng) == (classify(s).improving > 0)

    def test_short_circuit_charges_only_examined(self, k4):
        b = EvaluationBudget()
        assert is_portal(build_state(k4, [1, 1, 1, 1], k=2), np.random.default_rng(1), b)
        assert b.used == 1


class TestRandomOrderScan:
    def test_budget_truncation(self, rng):
        g = random_graph(10, 0.5, rng)
        s = build_state(g, rng.integers(1, 4, size=10), k=3)
        b = EvaluationBudget(limit=5)
        res = first_in_random_order(s, rng, lambda d: d < -100, b)
        assert res.truncated and res.move is None and b.used == 5

    def test_hit_position_charged(self, k4):
        b = EvaluationBudget()
        s = build_state(k4, [1, 1, 2, 2], k=2)
        res = first_in_random_order(s, np.random.default_rng(3), lambda d: d <= 0, b)
        assert res.move is None and res.evaluated == 4 and b.used == 4

    def test_selected_move_distribution_uniform(self, triangle):
        # first non-worsening move in a uniform order is uniform over the accepted moves
        s = build_state(triangle, [1, 1, 2], k=2)
        r = np.random.default_rng(0)
        picks = [first_in_random_order(s, r, lambda d: d <= 0).move for _ in range(4000)]
        counts = {m: picks.count(m) for m in set(picks)}
        assert set(counts) == {(0, 2), (1, 2)}
        assert abs(counts[(0, 2)] / 4000 - 0.5) < 0.04
