"""
Homomorphisms, embeddings and isomorphisms between finite structures.

Every public search returns either a verified ``Morphism`` or ``None``;
``None`` is only returned after a complete search. A search that runs out
of budget raises ``BudgetExceededError``.

Kinds form a chain, each adding a condition to the previous one:

  hom        every tuple of the domain maps into the codomain's relation
  mono       + injective
  embedding  + reflects relations (image tuple present ⇒ tuple present)
  iso        + bijective
"""
from __future__ import annotations

from itertools import combinations, product
from typing import Any, Iterable, Iterator, Mapping, Optional

from pydantic import ConfigDict, Field, ValidationError, model_validator
from pydantic_core import PydanticCustomError

from ._search import HomSearch, SearchBudget, resolve_budget
from ._telemetry import set_attribute, span
from .exceptions import MorphismKindError, SignatureMismatchError
from .models import BaseSchema, MorphismKind, raise_input_error
from .structures import ElementId, Structure, induced_substructure, require_same_signature

PartialMap = Mapping[ElementId, ElementId]


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

def verify_morphism(
    domain: Structure,
    codomain: Structure,
    mapping: Mapping[ElementId, ElementId],
    kind: MorphismKind,
) -> Optional[str]:
    """
    Check ``mapping`` against the invariants of ``kind``.

    Returns
    -------
    None when every condition holds, else a sentence naming the first
    violated one.
    """
    if domain.signature != codomain.signature:
        return "domain and codomain have different signatures"
    if set(mapping) != domain.element_set:
        return "map is not total on the domain"
    for x, y in mapping.items():
        if y not in codomain.element_set:
            return f"{x} is sent to {y}, which is not in the codomain"
    for name, tuples in domain.relations.items():
        target = codomain.rel(name)
        for t in tuples:
            image = tuple(mapping[x] for x in t)
            if image not in target:
                return f"{name}{t} is not preserved: {name}{image} does not hold"
    kind = MorphismKind(kind)
    if kind is MorphismKind.HOM:
        return None
    if len(set(mapping.values())) != len(mapping):
        return "map is not injective"
    if kind is MorphismKind.MONO:
        return None
    inverse = {y: x for x, y in mapping.items()}
    for name, tuples in codomain.relations.items():
        source = domain.rel(name)
        for b in tuples:
            if all(y in inverse for y in b):
                pre = tuple(inverse[y] for y in b)
                if pre not in source:
                    return f"{name}{b} holds but its preimage {name}{pre} does not"
    if kind is MorphismKind.ISO and domain.size != codomain.size:
        return "map is not surjective"
    return None


class Morphism(BaseSchema):
    """A total map between carriers, tagged with its verified kind."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    domain: Structure
    codomain: Structure
    mapping: dict[ElementId, ElementId] = Field(..., description="Total map on element ids")
    kind: MorphismKind = MorphismKind.HOM

    @model_validator(mode="after")
    def _check_kind(self) -> "Morphism":
        reason = verify_morphism(self.domain, self.codomain, self.mapping, self.kind)
        if reason is not None:
            raise PydanticCustomError(
                "morphism_kind",
                "not a {kind}: {reason}",
                {"kind": self.kind.value, "reason": reason},
            )
        return self

    def __call__(self, x: ElementId) -> ElementId:
        return self.mapping[x]

    def __hash__(self) -> int:
        return hash((frozenset(self.mapping.items()), self.kind))

    def key(self) -> tuple[tuple[ElementId, ElementId], ...]:
        """Map as a sorted tuple of pairs; identifies the map regardless of kind."""
        return tuple(sorted(self.mapping.items()))

    def is_identity(self) -> bool:
        return all(x == y for x, y in self.mapping.items())

    def image(self) -> Structure:
        return induced_substructure(self.codomain, set(self.mapping.values()))

    def inverse(self) -> "Morphism":
        if self.kind is not MorphismKind.ISO:
            raise MorphismKindError("only isomorphisms have inverses", kind=self.kind.value)
        return make_morphism(
            self.codomain, self.domain, {y: x for x, y in self.mapping.items()}, MorphismKind.ISO
        )

    def restrict(self, subset: Iterable[ElementId]) -> "Morphism":
        sub = induced_substructure(self.domain, subset)
        kind = MorphismKind.EMBEDDING if self.kind is MorphismKind.ISO else self.kind
        return make_morphism(sub, self.codomain, {x: self.mapping[x] for x in sub.elements}, kind)

    def to_document(self) -> dict[str, Any]:
        return {"map": dict(sorted(self.mapping.items())), "kind": self.kind.value}


def make_morphism(
    domain: Structure,
    codomain: Structure,
    mapping: Mapping[ElementId, ElementId],
    kind: MorphismKind = MorphismKind.HOM,
) -> Morphism:
    """Validated constructor; a kind violation raises ``MorphismKindError``."""
    try:
        return Morphism(
            domain=domain,
            codomain=codomain,
            mapping={str(k): str(v) for k, v in mapping.items()},
            kind=kind,
        )
    except ValidationError as exc:
        raise_input_error(exc)


def compose(g: Morphism, f: Morphism) -> Morphism:
    """``g ∘ f``; the result carries the weaker of the two kinds and is re-verified."""
    if f.codomain != g.domain:
        raise SignatureMismatchError("cannot compose: codomain of f is not the domain of g")
    kind = f.kind if f.kind.strength <= g.kind.strength else g.kind
    return make_morphism(f.domain, g.codomain, {x: g.mapping[y] for x, y in f.mapping.items()}, kind)


def identity(a: Structure) -> Morphism:
    return make_morphism(a, a, {x: x for x in a.elements}, MorphismKind.ISO)


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------

def _search(
    a: Structure,
    b: Structure,
    kind: MorphismKind,
    fixed: Optional[PartialMap],
    domains: Optional[Mapping[ElementId, list[ElementId]]],
    budget: Optional[SearchBudget],
) -> HomSearch:
    return HomSearch(
        a, b,
        injective=kind is not MorphismKind.HOM,
        reflect=kind in (MorphismKind.EMBEDDING, MorphismKind.ISO),
        fixed=fixed,
        domains=domains,
        budget=budget,
    )


def iter_morphisms(
    a: Structure,
    b: Structure,
    kind: MorphismKind = MorphismKind.HOM,
    *,
    fixed: Optional[PartialMap] = None,
    domains: Optional[Mapping[ElementId, list[ElementId]]] = None,
    budget: Optional[SearchBudget] = None,
) -> Iterator[Morphism]:
    """Lazily enumerate every morphism of ``kind`` extending ``fixed``."""
    kind = MorphismKind(kind)
    if kind is MorphismKind.ISO and a.size != b.size:
        return
    for assignment in _search(a, b, kind, fixed, domains, budget).solutions():
        yield make_morphism(a, b, assignment, kind)


def find_morphism(
    a: Structure,
    b: Structure,
    kind: MorphismKind = MorphismKind.HOM,
    *,
    fixed: Optional[PartialMap] = None,
    domains: Optional[Mapping[ElementId, list[ElementId]]] = None,
    budget: Optional[SearchBudget] = None,
) -> Optional[Morphism]:
    budget = resolve_budget(budget)
    with span(f"fmtbench.find_{MorphismKind(kind).value}",
              {"source.size": a.size, "target.size": b.size}) as sp:
        found = next(iter_morphisms(a, b, kind, fixed=fixed, domains=domains, budget=budget), None)
        set_attribute(sp, "search.nodes", budget.nodes)
        return found


def find_homomorphism(
    a: Structure,
    b: Structure,
    fixed: Optional[PartialMap] = None,
    *,
    budget: Optional[SearchBudget] = None,
) -> Optional[Morphism]:
    return find_morphism(a, b, MorphismKind.HOM, fixed=fixed, budget=budget)


def find_embedding(
    a: Structure,
    b: Structure,
    fixed: Optional[PartialMap] = None,
    *,
    budget: Optional[SearchBudget] = None,
) -> Optional[Morphism]:
    return find_morphism(a, b, MorphismKind.EMBEDDING, fixed=fixed, budget=budget)


def find_isomorphism(
    a: Structure, b: Structure, *, budget: Optional[SearchBudget] = None
) -> Optional[Morphism]:
    require_same_signature(a, b)
    if a.size != b.size or a.tuple_count() != b.tuple_count():
        return None
    return find_morphism(a, b, MorphismKind.ISO, budget=budget)


def is_isomorphic(a: Structure, b: Structure, *, budget: Optional[SearchBudget] = None) -> bool:
    return find_isomorphism(a, b, budget=budget) is not None


def enumerate_homomorphisms(
    a: Structure,
    b: Structure,
    fixed: Optional[PartialMap] = None,
    *,
    budget: Optional[SearchBudget] = None,
) -> list[Morphism]:
    with span("fmtbench.enumerate_homomorphisms", {"source.size": a.size, "target.size": b.size}):
        return list(iter_morphisms(a, b, MorphismKind.HOM, fixed=fixed, budget=budget))


def enumerate_embeddings(
    a: Structure,
    b: Structure,
    fixed: Optional[PartialMap] = None,
    *,
    budget: Optional[SearchBudget] = None,
) -> list[Morphism]:
    return list(iter_morphisms(a, b, MorphismKind.EMBEDDING, fixed=fixed, budget=budget))


def count_homomorphisms(
    a: Structure,
    b: Structure,
    fixed: Optional[PartialMap] = None,
    *,
    budget: Optional[SearchBudget] = None,
) -> int:
    with span("fmtbench.count_homomorphisms", {"source.size": a.size, "target.size": b.size}):
        return HomSearch(a, b, fixed=fixed, budget=budget).count()


# ---------------------------------------------------------------------------
# Monoids and groups
# ---------------------------------------------------------------------------

def endomorphisms(a: Structure, *, budget: Optional[SearchBudget] = None) -> list[Morphism]:
    return enumerate_homomorphisms(a, a, budget=budget)


def is_group(morphisms: list[Morphism]) -> bool:
    """Closure under composition and inverses, with the identity present."""
    if not morphisms:
        return False
    keys = {m.key() for m in morphisms}
    elements = morphisms[0].domain.elements
    if tuple((x, x) for x in sorted(elements)) not in keys:
        return False
    for f in morphisms:
        if tuple(sorted((y, x) for x, y in f.mapping.items())) not in keys:
            return False
        for g in morphisms:
            if tuple(sorted((x, g.mapping[y]) for x, y in f.mapping.items())) not in keys:
                return False
    return True


def automorphism_group(
    a: Structure, *, budget: Optional[SearchBudget] = None, verify: bool = True
) -> list[Morphism]:
    """
    All automorphisms of ``a``, identity first.

    With ``verify`` the list is checked to be closed under composition and
    inverses; a failure means a search bug and raises ``MorphismKindError``.
    """
    with span("fmtbench.automorphism_group", {"structure.size": a.size}):
        group = list(iter_morphisms(a, a, MorphismKind.ISO, budget=budget))
        group.sort(key=lambda m: (not m.is_identity(), m.key()))
        if verify and not is_group(group):
            raise MorphismKindError("automorphism list is not closed under composition")
        return group


def orbit_count(
    maps: Iterable[Mapping[ElementId, ElementId]], elements: Iterable[ElementId], n: int
) -> int:
    """Orbits of a permutation group (given by all its elements) acting coordinatewise on n-tuples."""
    maps = list(maps)
    seen: set[tuple[ElementId, ...]] = set()
    orbits = 0
    for t in product(tuple(elements), repeat=n):
        if t in seen:
            continue
        orbits += 1
        seen.update(tuple(g[x] for x in t) for g in maps)
        seen.add(t)
    return orbits


def is_hom_equivalent(a: Structure, b: Structure, *, budget: Optional[SearchBudget] = None) -> bool:
    budget = resolve_budget(budget)
    return (
        find_homomorphism(a, b, budget=budget) is not None
        and find_homomorphism(b, a, budget=budget) is not None
    )


# ---------------------------------------------------------------------------
# Cores
# ---------------------------------------------------------------------------

class CoreResult(BaseSchema):
    core: Structure
    retraction: Morphism
    is_core: bool = Field(..., description="Every endomorphism of the core is an embedding")


def is_core(a: Structure, *, budget: Optional[SearchBudget] = None) -> bool:
    """
    A finite structure is a core iff no endomorphism misses an element, i.e.
    there is no homomorphism into any one-point-deleted substructure.
    """
    budget = resolve_budget(budget)
    for x in a.elements:
        rest = induced_substructure(a, [y for y in a.elements if y != x])
        if find_homomorphism(a, rest, budget=budget) is not None:
            return False
    return True


def _find_retraction(
    a: Structure, subset: tuple[ElementId, ...], budget: SearchBudget
) -> Optional[Morphism]:
    sub = induced_substructure(a, subset)
    return find_homomorphism(a, sub, {x: x for x in subset}, budget=budget)


def minimum_retracts(a: Structure, *, budget: Optional[SearchBudget] = None) -> list[Morphism]:
    """Every retraction of ``a`` onto a smallest retract, in subset order."""
    budget = resolve_budget(budget)
    for k in range(1 if a.size else 0, a.size + 1):
        found = [r for s in combinations(a.elements, k) if (r := _find_retraction(a, s, budget))]
        if found:
            return found
    return []


def core(a: Structure, *, budget: Optional[SearchBudget] = None) -> CoreResult:
    """
    Smallest retract of ``a`` with its retraction.

    Subsets are tried by increasing size in carrier order; the first one
    admitting a retraction wins. The result is re-checked to be a core.
    """
    budget = resolve_budget(budget)
    with span("fmtbench.core", {"structure.size": a.size}) as sp:
        for k in range(1 if a.size else 0, a.size + 1):
            for subset in combinations(a.elements, k):
                r = _find_retraction(a, subset, budget)
                if r is not None:
                    set_attribute(sp, "core.size", k)
                    return CoreResult(core=r.codomain, retraction=r, is_core=is_core(r.codomain, budget=budget))
        raise AssertionError("the full carrier is always a retract")


# ---------------------------------------------------------------------------
# Homomorphism-homogeneity
# ---------------------------------------------------------------------------

class HomogeneityCheck(BaseSchema):
    holds: bool
    local_homs_checked: int
    counterexample: Optional[dict[ElementId, ElementId]] = Field(
        default=None, description="A local homomorphism with no extension to an endomorphism"
    )

    def __bool__(self) -> bool:
        return self.holds


def local_homomorphisms(
    a: Structure, *, budget: Optional[SearchBudget] = None
) -> Iterator[dict[ElementId, ElementId]]:
    """Homomorphisms from nonempty proper induced substructures of ``a`` into ``a``."""
    budget = resolve_budget(budget)
    for k in range(1, a.size):
        for subset in combinations(a.elements, k):
            sub = induced_substructure(a, subset)
            yield from HomSearch(sub, a, budget=budget).solutions()


def is_homomorphism_homogeneous(
    a: Structure, *, budget: Optional[SearchBudget] = None
) -> HomogeneityCheck:
    budget = resolve_budget(budget)
    with span("fmtbench.is_homomorphism_homogeneous", {"structure.size": a.size}):
        checked = 0
        for local in local_homomorphisms(a, budget=budget):
            checked += 1
            if HomSearch(a, a, fixed=local, budget=budget).first() is None:
                return HomogeneityCheck(holds=False, local_homs_checked=checked, counterexample=local)
        return HomogeneityCheck(holds=True, local_homs_checked=checked)
