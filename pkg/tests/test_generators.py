"""Named and random structures."""

from __future__ import annotations

import pytest

from fmtbench import generators as gen
from fmtbench.classes import CSP, member
from fmtbench.structures import Signature, is_connected


class TestNamed:

    def test_complete_graph_is_symmetric(self) -> None:
        k4 = gen.complete_graph(4)
        assert k4.tuple_count() == 12
        assert all((y, x) in k4.rel("E") for x, y in k4.rel("E"))

    def test_path_counts_edges(self) -> None:
        p = gen.path(3)
        assert p.size == 4
        assert p.tuple_count() == 6

    def test_directed_path(self) -> None:
        assert gen.directed_path(2).rel("E") == frozenset({("0", "1"), ("1", "2")})

    def test_directed_cycle(self) -> None:
        assert gen.directed_cycle(3).holds("E", ("2", "0"))

    def test_cycle_too_short(self) -> None:
        with pytest.raises(ValueError):
            gen.cycle(2)

    def test_negative_size(self) -> None:
        with pytest.raises(ValueError):
            gen.edgeless(-1)

    def test_point_over_other_signature(self) -> None:
        sig = Signature.of(("R", 3))
        assert gen.point(sig).signature == sig

    def test_loop(self) -> None:
        assert gen.loop().holds("E", ("0", "0"))


class TestRandom:

    def test_seeded_graph_is_reproducible(self) -> None:
        assert gen.random_graph(6, 0.4, seed=3) == gen.random_graph(6, 0.4, seed=3)

    def test_extreme_probabilities(self) -> None:
        assert gen.random_graph(4, 0.0, seed=1).tuple_count() == 0
        assert gen.random_graph(4, 1.0, seed=1) == gen.complete_graph(4)

    def test_digraph_loops(self) -> None:
        no_loops = gen.random_digraph(4, 1.0, loops=False, seed=0)
        assert no_loops.tuple_count() == 12
        assert gen.random_digraph(4, 1.0, loops=True, seed=0).tuple_count() == 16

    def test_random_structure_respects_arity(self) -> None:
        sig = Signature.of(("R", 3), ("P", 1))
        s = gen.random_structure(sig, 3, 1.0, seed=0)
        assert len(s.rel("R")) == 27
        assert len(s.rel("P")) == 3

    def test_random_coloring_is_a_homomorphism(self) -> None:
        k2 = gen.complete_graph(2)
        c6 = gen.cycle(6)
        color = gen.random_coloring(c6, k2, seed=5)
        assert color is not None
        assert all(color[x] != color[y] for x, y in c6.rel("E"))

    def test_random_coloring_none(self) -> None:
        assert gen.random_coloring(gen.complete_graph(3), gen.complete_graph(2)) is None

    def test_random_colored(self) -> None:
        k2 = gen.complete_graph(2)
        c = gen.random_colored(8, k2, 0.7, seed=2)
        assert c.base.size == 8
        assert member(CSP(template=k2, graphs=True), c.base)

    def test_dense_random_graph_is_connected(self) -> None:
        assert is_connected(gen.random_graph(6, 1.0, seed=0))
