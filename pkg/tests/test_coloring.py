import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gcp_neutrality import apply_move, build_state, canonicalize, delta, fitness
from gcp_neutrality.coloring import format_coloring, parse_coloring
from oracles import brute_fitness, random_graph


@pytest.mark.parametrize(
    "raw, expected",
    [([2, 1, 1, 3], [1, 2, 2, 3]), ([1, 2, 3], [1, 2, 3]), ([5, 5, 5], [1, 1, 1]), ([], [])],
)
def test_canonicalize_examples(raw, expected):
    assert canonicalize(raw).colors.tolist() == expected


def test_canonicalize_rejects_bad_entries():
    with pytest.raises(ValueError):
        canonicalize([0, 1])
    with pytest.raises(ValueError):
        canonicalize([1, -2])
    with pytest.raises(ValueError):
        canonicalize([1, 2, 3], k=2)
    with pytest.raises(ValueError):
        canonicalize([1.5, 2.0])


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(1, 9), max_size=30), st.permutations(list(range(1, 10))))
def test_canonicalize_idempotent_and_permutation_invariant(raw, perm):
    c = canonicalize(raw)
    assert canonicalize(c.colors) == c
    relabelled = [perm[x - 1] for x in raw]
    assert canonicalize(relabelled) == c


class TestFitness:
    def test_examples(self, triangle, k4, path3):
        assert fitness(triangle, [1, 1, 2]) == 1
        assert fitness(k4, [1, 1, 1, 1]) == 6
        assert fitness(path3, [1, 2, 1]) == 0

    def test_length_mismatch(self, triangle):
        with pytest.raises(ValueError, match="length"):
            fitness(triangle, [1, 2])

    def test_one_coloring_counts_every_edge(self, rng):
        for _ in range(20):
            g = random_graph(int(rng.integers(1, 15)), 0.4, rng)
            assert fitness(g, np.ones(g.n, dtype=int)) == g.m


class TestState:
    def test_triangle(self, triangle):
        s = build_state(triangle, [1, 1, 2], k=2)
        assert s.conflicts == 1
        assert s.table[2, 1] == 2

    def test_empty_graph(self, edgeless):
        assert build_state(edgeless, [1, 2, 3, 1, 2], k=3).conflicts == 0

    def test_k4_two_colors(self, k4):
        assert build_state(k4, [1, 2, 1, 2], k=2).conflicts == 2

    def test_palette_bound(self, triangle):
        with pytest.raises(ValueError):
            build_state(triangle, [1, 2, 3], k=2)

    def test_table_matches_definition(self, rng):
        g = random_graph(12, 0.5, rng)
        colors = rng.integers(1, 4, size=12)
        s = build_state(g, colors, k=3)
        for v in range(g.n):
            for c in range(1, 4):
                assert s.table[v, c] == sum(1 for u in g.adjacency[v] if colors[u] == c)


class TestDelta:
    def test_examples(self, triangle, k4, edgeless):
        assert delta(build_state(triangle, [1, 1, 2], k=2), 1, 2) == 0
        assert delta(build_state(k4, [1, 1, 1, 1], k=2), 0, 2) == -3
        assert delta(build_state(edgeless, [1, 1, 1, 1, 1], k=3), 2, 3) == 0

    def test_pure(self, k4):
        s = build_state(k4, [1, 1, 1, 1], k=2)
        before = s.copy()
        delta(s, 0, 2)
        assert s.same_as(before)

    @pytest.mark.parametrize("v, c", [(0, 1), (0, 3), (0, 0), (9, 1)])
    def test_illegal_moves(self, triangle, v, c):
        s = build_state(triangle, [1, 2, 1], k=2)
        with pytest.raises(ValueError):
            delta(s, v, c)
        with pytest.raises(ValueError):
            apply_move(s, v, c)


class TestApplyMove:
    def test_examples(self, triangle, k4):
        s = build_state(triangle, [1, 1, 2], k=2)
        apply_move(s, 0, 2)
        assert s.conflicts == 1 == fitness(triangle, s.colors)
        s = build_state(k4, [1, 1, 1, 1], k=2)
        apply_move(s, 0, 2)
        assert s.conflicts == 3

    def test_inverse_restores_state(self, rng):
        g = random_graph(10, 0.5, rng)
        s = build_state(g, rng.integers(1, 4, size=10), k=3)
        ref = s.copy()
        v = 4
        old = int(s.colors[v])
        new = 1 if old != 1 else 2
        apply_move(s, v, new)
        apply_move(s, v, old)
        assert s.same_as(ref)

    def test_long_sequence_matches_rebuild(self, rng):
        g = random_graph(30, 0.3, rng)
        k = 4
        s = build_state(g, rng.integers(1, k + 1, size=30), k=k)
        for _ in range(500):
            v = int(rng.integers(30))
            c = int(rng.integers(1, k + 1))
            if c == s.colors[v]:
                continue
            d = delta(s, v, c)
            f0 = s.conflicts
            apply_move(s, v, c)
            assert s.conflicts == f0 + d
        fresh = build_state(g, s.colors, k=k)
        assert fresh.same_as(s)
        assert s.conflicts == brute_fitness(g.edges.tolist(), s.colors)


def test_serialization_round_trip(triangle):
    s = build_state(triangle, [3, 3, 1], k=3)
    line = format_coloring(s)
    assert line == "1 1 2"
    assert parse_coloring(line, k=3) == s.coloring()
