"""
Named and random structures.

Graphs use ``GRAPH_SIGNATURE`` (one symmetric binary ``E``); directed
structures use the same signature without the symmetry. Elements are
``"0" .. str(n-1)``.
"""
from __future__ import annotations

import random
from itertools import combinations, product
from typing import Iterable, Optional

from .structures import GRAPH_SIGNATURE, ElementId, Signature, Structure, Tuple


def _ids(n: int) -> tuple[ElementId, ...]:
    if n < 0:
        raise ValueError("size must be non-negative")
    return tuple(str(i) for i in range(n))


def graph(n: int, edges: Iterable[tuple[int, int]]) -> Structure:
    """Undirected graph on ``0..n-1``; each edge is stored in both directions."""
    ids = _ids(n)
    e: set[Tuple] = set()
    for x, y in edges:
        e.add((str(x), str(y)))
        e.add((str(y), str(x)))
    return Structure.build(GRAPH_SIGNATURE, ids, {"E": e})


def digraph(n: int, arcs: Iterable[tuple[int, int]]) -> Structure:
    return Structure.build(GRAPH_SIGNATURE, _ids(n), {"E": {(str(x), str(y)) for x, y in arcs}})


def complete_graph(n: int) -> Structure:
    return graph(n, combinations(range(n), 2))


def cycle(n: int) -> Structure:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return graph(n, ((i, (i + 1) % n) for i in range(n)))


def path(n: int) -> Structure:
    """Path with ``n`` edges (``n + 1`` vertices)."""
    return graph(n + 1, ((i, i + 1) for i in range(n)))


def directed_path(n: int) -> Structure:
    return digraph(n + 1, ((i, i + 1) for i in range(n)))


def directed_cycle(n: int) -> Structure:
    return digraph(n, ((i, (i + 1) % n) for i in range(n)))


def edgeless(n: int, signature: Signature = GRAPH_SIGNATURE) -> Structure:
    return Structure.build(signature, _ids(n), {})


def point(signature: Signature = GRAPH_SIGNATURE) -> Structure:
    return edgeless(1, signature)


def loop() -> Structure:
    return digraph(1, [(0, 0)])


def directed_edge() -> Structure:
    return digraph(2, [(0, 1)])


# --- Random ---

def random_graph(n: int, p: float = 0.5, seed: Optional[int] = None) -> Structure:
    rng = random.Random(seed)
    return graph(n, (pair for pair in combinations(range(n), 2) if rng.random() < p))


def random_digraph(n: int, p: float = 0.5, loops: bool = False, seed: Optional[int] = None) -> Structure:
    rng = random.Random(seed)
    return digraph(n, (
        (x, y) for x, y in product(range(n), repeat=2)
        if (loops or x != y) and rng.random() < p
    ))


def random_structure(signature: Signature, n: int, p: float = 0.5, seed: Optional[int] = None) -> Structure:
    rng = random.Random(seed)
    ids = _ids(n)
    rels = {
        sym.name: {t for t in product(ids, repeat=sym.arity) if rng.random() < p}
        for sym in signature
    }
    return Structure.build(signature, ids, rels)


def random_coloring(base: Structure, template: Structure, seed: Optional[int] = None) -> Optional[dict[ElementId, ElementId]]:
    """
    A uniformly chosen homomorphism ``base → template`` among all of them,
    or None when there is none.
    """
    from .morphisms import enumerate_homomorphisms

    homs = enumerate_homomorphisms(base, template)
    if not homs:
        return None
    return dict(random.Random(seed).choice(homs).mapping)


def random_colored(
    n: int, template: Structure, p: float = 0.5, seed: Optional[int] = None
):
    """
    Random colored graph over ``template``: colors are drawn first, then each
    edge compatible with the template is kept with probability ``p``.
    """
    from .colored import make_colored

    rng = random.Random(seed)
    ids = _ids(n)
    color = {x: rng.choice(template.elements) for x in ids}
    allowed = template.rel("E")
    edges = [
        (int(x), int(y)) for x, y in combinations(ids, 2)
        if (color[x], color[y]) in allowed and (color[y], color[x]) in allowed and rng.random() < p
    ]
    return make_colored(graph(n, edges), template, color)
