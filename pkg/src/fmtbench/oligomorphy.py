"""
Positive-existential types and orbit counts on finite structures.

For finite structures the positive-existential type of a tuple is captured
by pointed homomorphisms: tp(A, ā) ⊆ tp(B, b̄) iff some homomorphism A → B
sends ā to b̄. (The canonical query of (A, ā) is itself positive
existential, and such formulas are preserved by homomorphisms.) Types are
therefore never materialized as formula sets.
"""
from __future__ import annotations

from itertools import product
from typing import Any, Optional

from pydantic import ConfigDict, Field, ValidationError, computed_field, model_validator
from pydantic_core import PydanticCustomError

from ._search import HomSearch, SearchBudget, resolve_budget
from ._telemetry import set_attribute, span
from .classes import CSP, MemberMemo, age, enumerate_members
from .exceptions import PartialMapError
from .models import BaseSchema, raise_input_error
from .morphisms import automorphism_group, find_homomorphism, orbit_count
from .structures import ElementId, Structure, require_same_signature

HomMemo = dict[tuple[Any, Any], bool]


class PointedStructure(BaseSchema):
    model_config = ConfigDict(extra="forbid", frozen=True)

    structure: Structure
    point: tuple[ElementId, ...] = Field(default=(), description="The distinguished tuple ā")

    @model_validator(mode="after")
    def _check_point(self) -> "PointedStructure":
        for i, x in enumerate(self.point):
            if x not in self.structure.element_set:
                raise PydanticCustomError(
                    "unknown_element", "point entry {x} is not in the carrier", {"x": x, "field": str(i)}
                )
        return self


def make_pointed(structure: Structure, point: tuple[Any, ...]) -> PointedStructure:
    try:
        return PointedStructure(structure=structure, point=tuple(str(x) for x in point))
    except ValidationError as exc:
        raise_input_error(exc)


def _pointed_map(a: tuple[ElementId, ...], b: tuple[ElementId, ...]) -> Optional[dict[ElementId, ElementId]]:
    fixed: dict[ElementId, ElementId] = {}
    for x, y in zip(a, b):
        if fixed.setdefault(x, y) != y:
            return None
    return fixed


def pe_type_leq(
    a: PointedStructure, b: PointedStructure, *, budget: Optional[SearchBudget] = None
) -> bool:
    """tp⁺(A, ā) ⊆ tp⁺(B, b̄): a homomorphism A → B maps ā to b̄."""
    require_same_signature(a.structure, b.structure)
    if len(a.point) != len(b.point):
        raise PartialMapError(f"tuples of length {len(a.point)} and {len(b.point)} cannot be compared")
    fixed = _pointed_map(a.point, b.point)
    if fixed is None:
        return False
    return find_homomorphism(a.structure, b.structure, fixed, budget=budget) is not None


def _tuple_leq(a: Structure, s: tuple, t: tuple, budget: SearchBudget) -> bool:
    fixed = _pointed_map(s, t)
    return fixed is not None and HomSearch(a, a, fixed=fixed, budget=budget).first() is not None


def pe_type_classes(
    a: Structure, n: int, *, budget: Optional[SearchBudget] = None
) -> list[list[tuple[ElementId, ...]]]:
    """
    Partition of Aⁿ into classes of mutual ``pe_type_leq`` within A.

    Automorphism orbits refine the partition, so only one representative
    per orbit is compared; the others join their representative's class.
    """
    budget = resolve_budget(budget)
    group = [m.mapping for m in automorphism_group(a, budget=budget)]
    orbit_of: dict[tuple, tuple] = {}
    reps: list[tuple] = []
    for t in product(a.elements, repeat=n):
        if t in orbit_of:
            continue
        reps.append(t)
        for g in group:
            orbit_of.setdefault(tuple(g[x] for x in t), t)
    heads: list[tuple] = []
    class_of: dict[tuple, int] = {}
    for r in reps:
        for i, h in enumerate(heads):
            if _tuple_leq(a, r, h, budget) and _tuple_leq(a, h, r, budget):
                class_of[r] = i
                break
        else:
            class_of[r] = len(heads)
            heads.append(r)
    classes: list[list[tuple]] = [[] for _ in heads]
    for t in product(a.elements, repeat=n):
        classes[class_of[orbit_of[t]]].append(t)
    return classes


def count_pe_types(a: Structure, n: int, *, budget: Optional[SearchBudget] = None) -> int:
    with span("fmtbench.count_pe_types", {"structure.size": a.size, "n": n}):
        return len(pe_type_classes(a, n, budget=budget))


def count_orbits(a: Structure, n: int, *, budget: Optional[SearchBudget] = None) -> int:
    """Orbits of Aut(A) on Aⁿ."""
    with span("fmtbench.count_orbits", {"structure.size": a.size, "n": n}):
        group = automorphism_group(a, budget=budget)
        return orbit_count([m.mapping for m in group], a.elements, n)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

class WoRNReport(BaseSchema):
    age_bound: int
    hom_exists: bool = Field(..., description="A → B")
    age_maps: bool = Field(..., description="Every member of Age(A) up to the bound maps into B")
    csp_contained: bool = Field(..., description="CSP(A) ⊆ CSP(B) among structures up to the bound")
    pe_theory_contained: bool = Field(
        ..., description="Positive-existential theory containment, taken equal to csp_contained"
    )
    bound_sufficient: bool = Field(..., description="age_bound ≥ |A|, so every verdict is exact")
    age_members_checked: int
    csp_members_checked: int

    @computed_field  # type: ignore[prop-decorator]
    @property
    def agree(self) -> bool:
        return self.hom_exists == self.age_maps == self.csp_contained


def _maps_into(c: Structure, b: Structure, memo: HomMemo, budget: SearchBudget) -> bool:
    key = (c, b)
    if key not in memo:
        memo[key] = find_homomorphism(c, b, budget=budget) is not None
    return memo[key]


def check_woRN(
    a: Structure,
    b: Structure,
    age_bound: int,
    *,
    memo: Optional[HomMemo] = None,
    member_memo: Optional[MemberMemo] = None,
    budget: Optional[SearchBudget] = None,
) -> WoRNReport:
    """
    Evaluate independently: A → B; every member of Age(A) with at most
    ``age_bound`` elements maps into B; every structure with at most
    ``age_bound`` elements mapping into A maps into B. Containment of
    positive-existential theories is reported equal to the last verdict.

    ``memo`` caches hom-existence answers and ``member_memo`` the members of
    CSP(A) across calls in a sweep.
    """
    require_same_signature(a, b)
    budget = resolve_budget(budget)
    memo = memo if memo is not None else {}
    with span("fmtbench.check_woRN", {"a.size": a.size, "b.size": b.size, "age_bound": age_bound}) as sp:
        hom = find_homomorphism(a, b, budget=budget) is not None
        members = age(a, age_bound, budget=budget)
        age_ok = all(_maps_into(m, b, memo, budget) for m in members)
        csp = enumerate_members(
            CSP(signature=a.signature, template=a), age_bound, budget=budget, memo=member_memo
        )
        csp_ok = all(_maps_into(c, b, memo, budget) for c in csp)
        set_attribute(sp, "woRN.agree", hom == age_ok == csp_ok)
    return WoRNReport(
        age_bound=age_bound,
        hom_exists=hom,
        age_maps=age_ok,
        csp_contained=csp_ok,
        pe_theory_contained=csp_ok,
        bound_sufficient=age_bound >= a.size,
        age_members_checked=len(members),
        csp_members_checked=len(csp),
    )


class ProfileRow(BaseSchema):
    n: int
    pe_types: int
    orbits: int


class OligomorphyReport(BaseSchema):
    """
    Numeric profile of a finite structure: pe-type classes and Aut-orbits
    on n-tuples. Both are finite here; ``coarsening_holds`` records
    pe_types ≤ orbits on every row.
    """

    kind: str = Field(..., description="'weak' (pe-types, End) or 'strong' (orbits, Aut)")
    max_n: int
    rows: list[ProfileRow]
    endomorphisms: Optional[int] = None

    @computed_field  # type: ignore[prop-decorator]
    @property
    def coarsening_holds(self) -> bool:
        return all(r.pe_types <= r.orbits for r in self.rows)


def oligomorphy_profile(
    a: Structure, max_n: int, *, budget: Optional[SearchBudget] = None
) -> list[ProfileRow]:
    budget = resolve_budget(budget)
    return [
        ProfileRow(n=n, pe_types=count_pe_types(a, n, budget=budget), orbits=count_orbits(a, n, budget=budget))
        for n in range(1, max_n + 1)
    ]


def is_weakly_oligomorphic_report(
    a: Structure, max_n: int = 3, *, budget: Optional[SearchBudget] = None
) -> OligomorphyReport:
    budget = resolve_budget(budget)
    rows = oligomorphy_profile(a, max_n, budget=budget)
    endos = HomSearch(a, a, budget=budget).count()
    return OligomorphyReport(kind="weak", max_n=max_n, rows=rows, endomorphisms=endos)


def is_oligomorphic_report(
    a: Structure, max_n: int = 3, *, budget: Optional[SearchBudget] = None
) -> OligomorphyReport:
    return OligomorphyReport(kind="strong", max_n=max_n, rows=oligomorphy_profile(a, max_n, budget=budget))
