"""
Finite relational structures.

A ``Structure`` is a carrier (ordered tuple of string ids) plus, for every
symbol of its ``Signature``, a set of tuples. Only nonempty relations are
stored; a symbol missing from ``relations`` is interpreted as empty, which
is how the finitely many active symbols of a possibly infinite signature
are represented.

Structures are immutable and hashable. Equality is literal (same ids, same
tuples); isomorphism is a search and lives in ``fmtbench.morphisms``.

JSON format::

    {"signature": [{"name": "E", "arity": 2}],
     "elements": ["0", "1", "2"],
     "relations": {"E": [["0", "1"], ["1", "2"]]}}
"""
from __future__ import annotations

import json
from functools import cached_property
from itertools import combinations, permutations, product
from typing import Any, Iterable, Iterator, Mapping, Optional, Union

import networkx as nx
from pydantic import (
    ConfigDict,
    Field,
    RootModel,
    ValidationError,
    field_serializer,
    field_validator,
    model_validator,
)
from pydantic_core import PydanticCustomError

from .exceptions import (
    SignatureMismatchError,
    StructureParseError,
    UnknownElementError,
)
from .models import BaseSchema, raise_input_error

ElementId = str
Tuple = tuple[ElementId, ...]


def _coerce_id(value: Any) -> str:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise PydanticCustomError(
            "element_id",
            "element ids must be strings or integers, got {value!r}",
            {"value": value},
        )
    return str(value)


# ---------------------------------------------------------------------------
# Signature
# ---------------------------------------------------------------------------

class Symbol(BaseSchema):
    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = Field(..., min_length=1, description="Relation symbol name")
    arity: int = Field(..., ge=1, description="Number of places")


class Signature(RootModel[tuple[Symbol, ...]]):
    """Ordered list of relation symbols with pairwise distinct names."""

    model_config = ConfigDict(frozen=True)

    @field_validator("root")
    @classmethod
    def _distinct_names(cls, v: tuple[Symbol, ...]) -> tuple[Symbol, ...]:
        seen: set[str] = set()
        for sym in v:
            if sym.name in seen:
                raise PydanticCustomError(
                    "duplicate_symbol", "symbol {name} is declared twice", {"name": sym.name}
                )
            seen.add(sym.name)
        return v

    @classmethod
    def of(cls, *symbols: tuple[str, int]) -> "Signature":
        """``Signature.of(("E", 2), ("M", 1))``."""
        return cls(tuple(Symbol(name=n, arity=a) for n, a in symbols))

    def __iter__(self) -> Iterator[Symbol]:  # type: ignore[override]
        return iter(self.root)

    def __len__(self) -> int:
        return len(self.root)

    def __contains__(self, name: object) -> bool:
        return name in self.arities

    @property
    def arities(self) -> dict[str, int]:
        return {s.name: s.arity for s in self.root}

    @property
    def names(self) -> list[str]:
        return [s.name for s in self.root]

    def arity(self, name: str) -> int:
        return self.arities[name]

    def extend(self, *symbols: tuple[str, int]) -> "Signature":
        return Signature(self.root + tuple(Symbol(name=n, arity=a) for n, a in symbols))

    def restrict(self, names: Iterable[str]) -> "Signature":
        keep = set(names)
        return Signature(tuple(s for s in self.root if s.name in keep))


# Graphs and digraphs: one binary symbol.
GRAPH_SIGNATURE = Signature.of(("E", 2))


# ---------------------------------------------------------------------------
# Structure
# ---------------------------------------------------------------------------

class Structure(BaseSchema):
    model_config = ConfigDict(extra="forbid", frozen=True)

    signature: Signature
    elements: tuple[ElementId, ...] = ()
    relations: dict[str, frozenset[Tuple]] = Field(default_factory=dict)

    @field_validator("elements", mode="before")
    @classmethod
    def _coerce_elements(cls, v: Any) -> Any:
        if not isinstance(v, (list, tuple)):
            return v
        ids = [_coerce_id(x) for x in v]
        seen: set[str] = set()
        for x in ids:
            if x in seen:
                raise PydanticCustomError(
                    "duplicate_element", "element {element} is listed twice", {"element": x}
                )
            seen.add(x)
        return ids

    @field_validator("relations", mode="before")
    @classmethod
    def _coerce_relations(cls, v: Any) -> Any:
        if not isinstance(v, Mapping):
            return v
        out: dict[str, list[tuple[str, ...]]] = {}
        for name, tuples in v.items():
            if not isinstance(tuples, (list, tuple, set, frozenset)):
                raise PydanticCustomError(
                    "relation_format", "relation {name} must be a list of tuples", {"name": name}
                )
            coerced = []
            for t in tuples:
                if not isinstance(t, (list, tuple)):
                    raise PydanticCustomError(
                        "relation_format", "relation {name} holds a non-tuple entry {entry!r}",
                        {"name": name, "entry": t},
                    )
                coerced.append(tuple(_coerce_id(x) for x in t))
            if coerced:
                out[str(name)] = coerced
        return out

    @model_validator(mode="after")
    def _check_interpretation(self) -> "Structure":
        carrier = set(self.elements)
        arities = self.signature.arities
        for name, tuples in self.relations.items():
            if name not in arities:
                raise PydanticCustomError(
                    "unknown_symbol",
                    "relation {symbol} is not declared in the signature",
                    {"symbol": name, "field": f"relations.{name}"},
                )
            for t in tuples:
                if len(t) != arities[name]:
                    raise PydanticCustomError(
                        "arity_mismatch",
                        "tuple {tuple} of {symbol} has length {length}, expected arity {arity}",
                        {"symbol": name, "tuple": list(t), "length": len(t),
                         "arity": arities[name], "field": f"relations.{name}"},
                    )
                for x in t:
                    if x not in carrier:
                        raise PydanticCustomError(
                            "unknown_element",
                            "unknown element {element} in tuple {tuple} of {symbol}",
                            {"element": x, "tuple": list(t), "symbol": name,
                             "field": f"relations.{name}"},
                        )
        return self

    @field_serializer("relations")
    def _serialize_relations(self, relations: dict[str, frozenset[Tuple]]) -> dict[str, list[list[str]]]:
        return {
            name: [list(t) for t in sorted(relations.get(name, ()))]
            for name in self.signature.names
        }

    # --- construction helpers ---

    @classmethod
    def build(
        cls,
        signature: Signature,
        elements: Iterable[Any],
        relations: Optional[Mapping[str, Iterable[Iterable[Any]]]] = None,
    ) -> "Structure":
        """Validated constructor; invariant violations raise typed ``InputError``s."""
        try:
            return cls(
                signature=signature,
                elements=list(elements),
                relations={k: [list(t) for t in v] for k, v in (relations or {}).items()},
            )
        except ValidationError as exc:
            raise_input_error(exc)

    @classmethod
    def trusted(
        cls,
        signature: Signature,
        elements: Iterable[ElementId],
        relations: Mapping[str, Iterable[Tuple]],
    ) -> "Structure":
        """Skip validation; for constructions whose invariants hold by design."""
        rels = {name: frozenset(ts) for name, ts in relations.items()}
        return cls.model_construct(
            signature=signature,
            elements=tuple(elements),
            relations={name: ts for name, ts in rels.items() if ts},
        )

    # --- identity ---

    def _key(self) -> tuple:
        return (self.signature, frozenset(self.elements), frozenset(self.relations.items()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Structure):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        rels = ", ".join(f"{n}={len(ts)}" for n, ts in sorted(self.relations.items()))
        return f"Structure(|A|={self.size}, {rels or 'no tuples'})"

    # --- access ---

    @property
    def size(self) -> int:
        return len(self.elements)

    @cached_property
    def element_set(self) -> frozenset[ElementId]:
        return frozenset(self.elements)

    def rel(self, name: str) -> frozenset[Tuple]:
        return self.relations.get(name, frozenset())

    def holds(self, name: str, t: Iterable[ElementId]) -> bool:
        return tuple(t) in self.rel(name)

    @cached_property
    def tuples_by_element(self) -> dict[str, dict[ElementId, list[Tuple]]]:
        """``index[symbol][x]``: tuples of ``symbol`` that mention ``x``."""
        index: dict[str, dict[ElementId, list[Tuple]]] = {}
        for name, tuples in self.relations.items():
            by_elem: dict[ElementId, list[Tuple]] = {}
            for t in sorted(tuples):
                for x in set(t):
                    by_elem.setdefault(x, []).append(t)
            index[name] = by_elem
        return index

    @cached_property
    def neighbors(self) -> dict[ElementId, frozenset[ElementId]]:
        """Gaifman neighborhoods."""
        adj: dict[ElementId, set[ElementId]] = {x: set() for x in self.elements}
        for tuples in self.relations.values():
            for t in tuples:
                for x in t:
                    adj[x].update(t)
        return {x: frozenset(ns - {x}) for x, ns in adj.items()}

    def tuple_count(self) -> int:
        return sum(len(ts) for ts in self.relations.values())


def empty_structure(signature: Signature) -> Structure:
    return Structure.trusted(signature, (), {})


def require_same_signature(a: Structure, b: Structure) -> None:
    if a.signature != b.signature:
        raise SignatureMismatchError(
            f"signature mismatch: {a.signature.names} vs {b.signature.names}"
        )


def require_elements(s: Structure, subset: Iterable[ElementId]) -> list[ElementId]:
    items = [str(x) for x in subset]
    for x in items:
        if x not in s.element_set:
            raise UnknownElementError(f"element {x} is not in the carrier")
    return items


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def structure_from_dict(data: Any) -> Structure:
    try:
        return Structure.model_validate(data)
    except ValidationError as exc:
        raise_input_error(exc)


def parse_structure(text: Union[str, bytes]) -> Structure:
    """
    Parse the JSON structure format.

    Raises
    ------
    StructureParseError
        Malformed JSON (with line/column) or a missing / ill-typed field.
    UnknownElementError, ArityMismatchError, UnknownSymbolError
        The document parses but breaks a structure invariant.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    return structure_from_dict(data)


def structure_to_dict(s: Structure) -> dict[str, Any]:
    return s.model_dump(mode="json")


def serialize(s: Structure) -> str:
    """Canonical JSON: signature order, carrier order, sorted tuples."""
    return json.dumps(structure_to_dict(s), separators=(",", ":"))


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------

def induced_substructure(s: Structure, subset: Iterable[ElementId]) -> Structure:
    keep = set(require_elements(s, subset))
    return Structure.trusted(
        s.signature,
        [x for x in s.elements if x in keep],
        {name: [t for t in ts if keep.issuperset(t)] for name, ts in s.relations.items()},
    )


def relabel(s: Structure, mapping: Mapping[ElementId, ElementId]) -> Structure:
    """Rename elements through an injective ``mapping`` defined on the whole carrier."""
    if set(mapping) != s.element_set or len(set(mapping.values())) != len(mapping):
        raise UnknownElementError("relabel needs an injective map defined on the whole carrier")
    return Structure.trusted(
        s.signature,
        [mapping[x] for x in s.elements],
        {name: [tuple(mapping[x] for x in t) for t in ts] for name, ts in s.relations.items()},
    )


def disjoint_union(s1: Structure, s2: Structure, tags: tuple[str, str] = ("l", "r")) -> Structure:
    """
    Coproduct of two structures. Elements are renamed ``<tag>:<id>`` so the
    two carriers never collide.
    """
    require_same_signature(s1, s2)
    left = relabel(s1, {x: f"{tags[0]}:{x}" for x in s1.elements})
    right = relabel(s2, {x: f"{tags[1]}:{x}" for x in s2.elements})
    names = set(left.relations) | set(right.relations)
    return Structure.trusted(
        s1.signature,
        left.elements + right.elements,
        {n: left.rel(n) | right.rel(n) for n in names},
    )


def substructures(s: Structure, max_size: Optional[int] = None) -> Iterator[tuple[ElementId, ...]]:
    """Subsets of the carrier by increasing size, in carrier order."""
    top = s.size if max_size is None else min(max_size, s.size)
    for k in range(top + 1):
        yield from combinations(s.elements, k)


# ---------------------------------------------------------------------------
# Gaifman graph and derived predicates
# ---------------------------------------------------------------------------

def gaifman_graph(s: Structure) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(s.elements)
    for x, ns in s.neighbors.items():
        g.add_edges_from((x, y) for y in ns)
    return g


def component_count(s: Structure) -> int:
    if s.size == 0:
        return 0
    return nx.number_connected_components(gaifman_graph(s))


def is_connected(s: Structure) -> bool:
    if s.size <= 1:
        return True
    return nx.is_connected(gaifman_graph(s))


def is_tight(s: Structure) -> bool:
    return all(len(ns) == s.size - 1 for ns in s.neighbors.values())


def is_packed(s: Structure) -> bool:
    """Any two distinct elements share a tuple. Same predicate as ``is_tight``."""
    return is_tight(s)


def is_link_structure(s: Structure) -> bool:
    if s.size == 1:
        return True
    carrier = s.element_set
    return any(set(t) == carrier for ts in s.relations.values() for t in ts)


def active_signature(s: Structure) -> list:
    return [sym for sym in s.signature if s.relations.get(sym.name)]


def is_sparse(s: Structure) -> bool:
    # Only finitely many symbols can be nonempty in a stored structure.
    return True


def to_dot(s: Structure, name: str = "gaifman") -> str:
    """DOT source of the Gaifman graph (requires the ``cli`` extra for pydot)."""
    g = gaifman_graph(s)
    g.graph["name"] = name
    return nx.nx_pydot.to_pydot(g).to_string()


# ---------------------------------------------------------------------------
# Isomorphism-invariant key
# ---------------------------------------------------------------------------

def _element_invariant(s: Structure, x: ElementId) -> tuple:
    parts = []
    for sym in s.signature:
        per_position = [0] * sym.arity
        repeats = 0
        for t in s.tuples_by_element.get(sym.name, {}).get(x, ()):
            if t.count(x) > 1:
                repeats += 1
            for i, y in enumerate(t):
                if y == x:
                    per_position[i] += 1
        parts.append((tuple(per_position), repeats))
    return tuple(parts)


def canonical_key(s: Structure) -> tuple:
    """
    Key shared by exactly the structures isomorphic to ``s``.

    Elements are split into cells by a local invariant; the key is the least
    relation encoding over all orderings that keep cells in invariant order.
    Cost is the product of the cell factorials, fine for small structures.
    """
    inv = {x: _element_invariant(s, x) for x in s.elements}
    values = sorted(set(inv.values()))
    cells = [[x for x in s.elements if inv[x] == v] for v in values]
    best: Optional[tuple] = None
    for arrangement in product(*(permutations(c) for c in cells)):
        index = {x: i for i, x in enumerate(y for cell in arrangement for y in cell)}
        enc = tuple(
            tuple(sorted(tuple(index[y] for y in t) for t in s.rel(sym.name)))
            for sym in s.signature
        )
        if best is None or enc < best:
            best = enc
    return (s.signature, s.size, tuple(sorted(inv.values())), best)
