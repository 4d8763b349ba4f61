"""
Shared pytest fixtures for the fmtbench test suite.

Structures are built with ``fmtbench.generators`` so element ids are always
``"0" .. str(n-1)``. Graphs are symmetric: K2 has the two tuples (0,1) and
(1,0).

Named structures used throughout:
  k2, k3        complete graphs
  c4            symmetric 4-cycle (bipartite, core K2)
  p2            symmetric path 0−1−2
  dpath2        directed path 0→1→2
  dedge         directed edge 0→1
  point         one element, no tuples
  empty_graph   no elements

Class specs:
  all_graphs    AllFinite over E/2 with graphs=True
  all_digraphs  AllFinite over E/2 (loops allowed)
  bipartite     CSP(K2) over graphs
  triangle_free ForbHom({K3}) over graphs
"""

from __future__ import annotations

import json
from itertools import product
from pathlib import Path
from typing import Any

import pytest

from fmtbench import generators as gen
from fmtbench.classes import CSP, AllFinite, ForbHom
from fmtbench.colored import ColoredStructure, make_colored
from fmtbench.structures import GRAPH_SIGNATURE, Structure, empty_structure, structure_to_dict


# ---------------------------------------------------------------------------
# Document builders
# ---------------------------------------------------------------------------

def structure_doc(elements: list[Any], edges: list[list[Any]], symbol: str = "E") -> dict[str, Any]:
    """Raw JSON document for a one-symbol binary structure."""
    return {
        "signature": [{"name": symbol, "arity": 2}],
        "elements": elements,
        "relations": {symbol: edges},
    }


def write_json(path: Path, data: Any) -> Path:
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def write_structure(path: Path, s: Structure) -> Path:
    return write_json(path, structure_to_dict(s))


def naive_homomorphisms(a: Structure, b: Structure, injective: bool = False, reflect: bool = False) -> int:
    """Count maps A → B by trying all |B|^|A| of them."""
    count = 0
    for images in product(b.elements, repeat=a.size):
        f = dict(zip(a.elements, images))
        if injective and len(set(images)) != len(images):
            continue
        ok = all(
            tuple(f[x] for x in t) in b.rel(name)
            for name, ts in a.relations.items() for t in ts
        )
        if ok and reflect:
            inverse = {y: x for x, y in f.items()}
            ok = all(
                tuple(inverse[y] for y in t) in a.rel(name)
                for name, ts in b.relations.items() for t in ts
                if all(y in inverse for y in t)
            )
        count += ok
    return count


# ---------------------------------------------------------------------------
# Structures
# ---------------------------------------------------------------------------

@pytest.fixture
def k2() -> Structure:
    return gen.complete_graph(2)


@pytest.fixture
def k3() -> Structure:
    return gen.complete_graph(3)


@pytest.fixture
def c4() -> Structure:
    return gen.cycle(4)


@pytest.fixture
def p2() -> Structure:
    return gen.path(2)


@pytest.fixture
def dpath2() -> Structure:
    return gen.directed_path(2)


@pytest.fixture
def dedge() -> Structure:
    return gen.directed_edge()


@pytest.fixture
def point() -> Structure:
    return gen.point()


@pytest.fixture
def empty_graph() -> Structure:
    return empty_structure(GRAPH_SIGNATURE)


# ---------------------------------------------------------------------------
# Class specifications
# ---------------------------------------------------------------------------

@pytest.fixture
def all_graphs() -> AllFinite:
    return AllFinite(signature=GRAPH_SIGNATURE, graphs=True)


@pytest.fixture
def all_digraphs() -> AllFinite:
    return AllFinite(signature=GRAPH_SIGNATURE)


@pytest.fixture
def bipartite() -> CSP:
    return CSP(template=gen.complete_graph(2), graphs=True)


@pytest.fixture
def triangle_free() -> ForbHom:
    return ForbHom(forbidden=[gen.complete_graph(3)], graphs=True)


# ---------------------------------------------------------------------------
# Colored structures (template K2)
# ---------------------------------------------------------------------------

@pytest.fixture
def k2_identity(k2: Structure) -> ColoredStructure:
    """(K2, id): each vertex is its own color."""
    return make_colored(k2, k2, {"0": "0", "1": "1"})


@pytest.fixture
def c4_two_colored(c4: Structure, k2: Structure) -> ColoredStructure:
    return make_colored(c4, k2, {"0": "0", "1": "1", "2": "0", "3": "1"})


# ---------------------------------------------------------------------------
# Isolated config directory for CLI tests
# ---------------------------------------------------------------------------

@pytest.fixture(autouse=True)
def isolated_config(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    """Point FMTBENCH_CONFIG at a temp file and clear FMTBENCH_* overrides."""
    path = tmp_path / "config.toml"
    monkeypatch.setenv("FMTBENCH_CONFIG", str(path))
    for var in ("FMTBENCH_SEED", "FMTBENCH_NODE_BUDGET", "FMTBENCH_TIME_BUDGET", "FMTBENCH_FORMAT"):
        monkeypatch.delenv(var, raising=False)
    return path
