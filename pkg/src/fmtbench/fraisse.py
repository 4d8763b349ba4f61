"""
Finite approximants of Fraïssé limits and their certificates.

``build_generic`` grows a member of a class until every one-point extension
demand over a small substructure is realized. ``verify_extension_property``
and ``verify_homogeneity`` re-check the result from scratch;
``verify_universality`` checks that every small member embeds.

A demand is a pair (A, B): A an ordered tuple of elements of U, B a member
of the class on A ∪ {*} inducing U[A] on A. It is realized by y ∈ U \\ A
when y relates to A exactly as * relates to A in B (the one-point type).
Distinct extensions of the same A have distinct types, so types identify
demands.
"""
from __future__ import annotations

import random
from collections import Counter
from itertools import combinations, permutations, product
from typing import Hashable, Iterator, Mapping, Optional, Sequence

from pydantic import Field, computed_field

from ._search import SearchBudget, resolve_budget
from ._telemetry import set_attribute, span
from .classes import (
    ClassSpec,
    _extension_atoms,
    check_property,
    enumerate_members,
    graphs_mode,
    member,
    one_point_extensions,
)
from .exceptions import AmalgamationRefusedError, InputError
from .models import BaseSchema, ClassProperty
from .morphisms import find_embedding
from .structures import ElementId, Structure, Tuple, empty_structure, induced_substructure

NEW = "*"
DEFAULT_STAGE_BUDGET = 500

OneType = frozenset[tuple[str, tuple[int, ...]]]


def one_point_type(u: Structure, base: Sequence[ElementId], y: ElementId) -> OneType:
    """
    How ``y`` relates to the ordered tuple ``base``: every tuple over
    ``base ∪ {y}`` mentioning ``y``, with base entries replaced by their
    position and ``y`` by -1.
    """
    index = {x: i for i, x in enumerate(base)}
    out = set()
    for name, by_elem in u.tuples_by_element.items():
        for t in by_elem.get(y, ()):
            if all(e == y or e in index for e in t):
                out.add((name, tuple(-1 if e == y else index[e] for e in t)))
    return frozenset(out)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

class ExtensionDemand(BaseSchema):
    base: tuple[ElementId, ...] = Field(..., description="The substructure A, as elements of U")
    extension: Structure = Field(..., description="A plus the new element '*'")


class RealizedDemand(ExtensionDemand):
    realized_by: ElementId
    fresh: bool = Field(..., description="The witness was adjoined for this demand")
    stage: int


class GenericApproximant(BaseSchema):
    structure: Structure
    spec: ClassSpec
    demand_size: int
    closure_depth: int = Field(1, description="Rounds of back-and-forth the demands were closed for")
    stage: int = Field(..., description="Number of elements adjoined")
    seed: int
    realized_extensions: list[RealizedDemand] = Field(default_factory=list)
    unmet: list[ExtensionDemand] = Field(default_factory=list)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def complete(self) -> bool:
        return not self.unmet


class ExtensionReport(BaseSchema):
    k: int
    demands_checked: int
    satisfied: int
    unsatisfied: list[ExtensionDemand] = Field(default_factory=list)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def passed(self) -> bool:
        return not self.unsatisfied


class HomogeneityReport(BaseSchema):
    part_size: int
    depth: int
    maps_checked: int
    stuck_count: int
    stuck: list[dict[ElementId, ElementId]] = Field(
        default_factory=list, description="First stuck partial isomorphisms"
    )

    @computed_field  # type: ignore[prop-decorator]
    @property
    def passed(self) -> bool:
        return self.stuck_count == 0


class UniversalityReport(BaseSchema):
    max_size: int
    members_checked: int
    missing: list[Structure] = Field(default_factory=list)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def passed(self) -> bool:
        return not self.missing


def realizes(u: Structure, demand: ExtensionDemand) -> bool:
    """Re-verify a demand: its extension embeds into ``u`` over its base."""
    return find_embedding(demand.extension, u, {x: x for x in demand.base}) is not None


# ---------------------------------------------------------------------------
# Builder
# ---------------------------------------------------------------------------

class _DemandTable:
    """Extension types per substructure of a growing structure, cached by base tuple."""

    def __init__(self, spec: ClassSpec, rng: random.Random, budget: SearchBudget):
        self.spec = spec
        self.rng = rng
        self.budget = budget
        self._types: dict[tuple[ElementId, ...], list[tuple[OneType, Structure]]] = {}

    def demands(self, u: Structure, base: tuple[ElementId, ...]) -> list[tuple[OneType, Structure]]:
        if base not in self._types:
            sub = induced_substructure(u, base)
            exts = [
                (one_point_type(b, base, NEW), b)
                for b in one_point_extensions(sub, self.spec, NEW, budget=self.budget)
            ]
            self.rng.shuffle(exts)
            self._types[base] = exts
        return self._types[base]

    def forget(self, base: tuple[ElementId, ...]) -> None:
        self._types.pop(base, None)


def _witness(u: Structure, base: tuple[ElementId, ...], wanted: OneType) -> Optional[ElementId]:
    taken = set(base)
    for y in u.elements:
        if y not in taken and one_point_type(u, base, y) == wanted:
            return y
    return None


def _adjoin(
    u: Structure,
    base: tuple[ElementId, ...],
    extension: Structure,
    spec: ClassSpec,
    rng: random.Random,
    budget: SearchBudget,
) -> Optional[Structure]:
    """
    Add a fresh element realizing ``extension`` over ``base``; then try the
    remaining tuples linking it to elements outside the base in random
    order, keeping each one that leaves the structure in the class.
    """
    z = str(u.size)
    while z in u.element_set:
        z += "'"
    rename = {NEW: z}
    rels: dict[str, set[Tuple]] = {n: set(ts) for n, ts in u.relations.items()}
    for name, ts in extension.relations.items():
        for t in ts:
            if NEW in t:
                rels.setdefault(name, set()).add(tuple(rename.get(e, e) for e in t))
    grown = Structure.trusted(u.signature, u.elements + (z,), rels)
    if not member(spec, grown, budget=budget):
        return None
    inside = set(base) | {z}
    extras = [
        atom for atom in _extension_atoms(u, z, graphs_mode(spec))
        if not all(e in inside for t in atom[1] for e in t)
    ]
    rng.shuffle(extras)
    for name, tuples in extras:
        if rng.random() < 0.5:
            continue
        trial = {n: set(ts) for n, ts in grown.relations.items()}
        trial.setdefault(name, set()).update(tuples)
        candidate = Structure.trusted(u.signature, grown.elements, trial)
        if member(spec, candidate, budget=budget):
            grown = candidate
    return grown


def _scan(
    u: Structure,
    table: _DemandTable,
    max_base: int,
    satisfied: dict[tuple[ElementId, ...], set[OneType]],
    refused: set[tuple[tuple[ElementId, ...], OneType]],
    done: set[tuple[ElementId, ...]],
    log: list[RealizedDemand],
    log_size: int,
    stage: int,
) -> Iterator[tuple[tuple[ElementId, ...], OneType, Structure]]:
    """
    Yield unmet demands in order, logging the ones existing elements realize
    over bases with at most ``log_size`` elements.

    A realized demand stays realized as U grows, so bases whose demands are
    all satisfied move to ``done`` and are skipped from then on.
    """
    for k in range(min(max_base, u.size) + 1):
        for base in combinations(u.elements, k):
            if base in done:
                continue
            met = satisfied.setdefault(base, set())
            still_open = False
            for wanted, ext in table.demands(u, base):
                if wanted in met:
                    continue
                if (base, wanted) in refused:
                    still_open = True
                    continue
                table.budget.tick()
                y = _witness(u, base, wanted)
                if y is not None:
                    met.add(wanted)
                    if k <= log_size:
                        log.append(RealizedDemand(base=base, extension=ext, realized_by=y, fresh=False, stage=stage))
                    continue
                still_open = True
                yield base, wanted, ext
            if not still_open:
                done.add(base)
                satisfied.pop(base, None)
                table.forget(base)


def build_generic(
    spec: ClassSpec,
    demand_size: int,
    stage_budget: int = DEFAULT_STAGE_BUDGET,
    *,
    closure_depth: int = 1,
    seed: int = 0,
    check_amalgamation: bool = True,
    budget: Optional[SearchBudget] = None,
) -> GenericApproximant:
    """
    Grow a member ``U`` of ``spec`` until every one-point extension demand
    over substructures with at most ``demand_size + closure_depth - 1``
    elements is realized.

    Demands are scanned breadth-first (by base size, then carrier order);
    an unmet one gets a fresh element. Growth stops when ``stage_budget``
    elements have been adjoined; the remaining demands are listed in
    ``unmet``. ``seed`` fixes the order of extensions and the random extra
    tuples given to fresh elements.

    Partial isomorphisms between substructures with at most ``demand_size``
    elements of a complete result survive ``closure_depth`` rounds of
    back-and-forth, so ``verify_homogeneity(U, demand_size, closure_depth)``
    passes. Demands over the larger bases are realized but only logged when
    they needed a fresh element.

    Raises
    ------
    AmalgamationRefusedError
        The class fails AP among members with at most ``demand_size`` elements.
    """
    if closure_depth < 1:
        raise InputError("closure_depth must be at least 1")
    budget = resolve_budget(budget)
    if check_amalgamation:
        report = check_property(spec, ClassProperty.AP, demand_size, budget=budget)
        if not report.holds_up_to_bound:
            raise AmalgamationRefusedError(report)
    max_base = demand_size + closure_depth - 1
    rng = random.Random(seed)
    table = _DemandTable(spec, rng, budget)
    u = empty_structure(spec.sig)
    satisfied: dict = {}
    refused: set = set()
    done: set = set()
    log: list[RealizedDemand] = []
    stage = 0
    attrs = {"class.variant": spec.variant, "demand_size": demand_size, "closure_depth": closure_depth}
    with span("fmtbench.build_generic", attrs) as sp:
        while stage < stage_budget:
            pending = next(_scan(u, table, max_base, satisfied, refused, done, log, demand_size, stage), None)
            if pending is None:
                break
            base, wanted, ext = pending
            grown = _adjoin(u, base, ext, spec, rng, budget)
            if grown is None:
                refused.add((base, wanted))
                continue
            u = grown
            stage += 1
            satisfied.setdefault(base, set()).add(wanted)
            log.append(RealizedDemand(base=base, extension=ext, realized_by=u.elements[-1], fresh=True, stage=stage))
        unmet = [
            ExtensionDemand(base=base, extension=ext)
            for base, _, ext in _scan(u, table, max_base, satisfied, set(), done, log, demand_size, stage)
        ]
        set_attribute(sp, "approximant.size", u.size)
        set_attribute(sp, "approximant.unmet", len(unmet))
    return GenericApproximant(
        structure=u, spec=spec, demand_size=demand_size, closure_depth=closure_depth, stage=stage,
        seed=seed, realized_extensions=log, unmet=unmet,
    )


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------

def verify_extension_property(
    u: Structure, spec: ClassSpec, k: int, *, budget: Optional[SearchBudget] = None
) -> ExtensionReport:
    """Every one-point extension in ``spec`` of every A ≤ U with |A| < k is realized in U."""
    budget = resolve_budget(budget)
    checked = 0
    satisfied = 0
    unsatisfied: list[ExtensionDemand] = []
    with span("fmtbench.verify_extension_property", {"structure.size": u.size, "k": k}):
        for size in range(min(k, u.size + 1)):
            for base in combinations(u.elements, size):
                sub = induced_substructure(u, base)
                for ext in one_point_extensions(sub, spec, NEW, budget=budget):
                    checked += 1
                    budget.tick()
                    if _witness(u, base, one_point_type(ext, base, NEW)) is not None:
                        satisfied += 1
                    else:
                        unsatisfied.append(ExtensionDemand(base=base, extension=ext))
    return ExtensionReport(k=k, demands_checked=checked, satisfied=satisfied, unsatisfied=unsatisfied)


def _positional(
    patterns: list[tuple[str, tuple[int, ...]]],
    slots: tuple[ElementId, ...],
    rels: Mapping[str, frozenset[Tuple]],
    new: Optional[int] = None,
) -> frozenset:
    """The patterns whose tuple over ``slots`` is present; position ``new`` becomes -1."""
    return frozenset(
        (name, tuple(-1 if p == new else p for p in pos))
        for name, pos in patterns
        if tuple(slots[p] for p in pos) in rels[name]
    )


def _reindex(diagram: frozenset, where: Mapping[int, int]) -> frozenset:
    return frozenset((name, tuple(where.get(p, p) for p in pos)) for name, pos in diagram)


class BackAndForth:
    """
    Bounded back-and-forth inside one structure.

    With ``colors`` and ``group`` (maps on the color set), a partial map p is
    accepted under g when ``colors[p(x)] == g[colors[x]]`` on its domain and
    every extension step keeps that equation with the same g. Without colors
    this is plain back-and-forth for partial isomorphisms.
    """

    def __init__(
        self,
        u: Structure,
        colors: Optional[Mapping[ElementId, Hashable]] = None,
        group: Optional[list[Mapping[Hashable, Hashable]]] = None,
        budget: Optional[SearchBudget] = None,
    ):
        self.u = u
        self.colors = colors
        self.group = list(group) if group else [None]
        self.budget = resolve_budget(budget)
        self._types: dict[tuple[ElementId, ...], dict[ElementId, OneType]] = {}
        self._memo: dict[tuple, bool] = {}

    def _color(self, x: ElementId) -> Hashable:
        return None if self.colors is None else self.colors[x]

    def _moved(self, g: Optional[Mapping], c: Hashable) -> Hashable:
        return c if g is None else g[c]

    def types_over(self, base: tuple[ElementId, ...]) -> dict[ElementId, OneType]:
        if base not in self._types:
            taken = set(base)
            self._types[base] = {
                y: one_point_type(self.u, base, y) for y in self.u.elements if y not in taken
            }
        return self._types[base]

    def is_partial_iso(self, dom: tuple[ElementId, ...], ran: tuple[ElementId, ...]) -> bool:
        for i in range(len(dom)):
            if one_point_type(self.u, dom[:i], dom[i]) != one_point_type(self.u, ran[:i], ran[i]):
                return False
        return True

    def compatible(self, g: Optional[Mapping], dom: Sequence[ElementId], ran: Sequence[ElementId]) -> bool:
        return all(self._color(y) == self._moved(g, self._color(x)) for x, y in zip(dom, ran))

    def extends(self, dom: tuple, ran: tuple, gi: int, depth: int) -> bool:
        if depth == 0:
            return True
        key = (tuple(sorted(zip(dom, ran))), gi, depth)
        if key in self._memo:
            return self._memo[key]
        g = self.group[gi]
        src, dst = self.types_over(dom), self.types_over(ran)
        ok = self._side(dom, ran, src, dst, g, gi, depth, forth=True) and \
            self._side(dom, ran, src, dst, g, gi, depth, forth=False)
        self._memo[key] = ok
        return ok

    def _side(self, dom, ran, src, dst, g, gi, depth, forth: bool) -> bool:
        here, there = (src, dst) if forth else (dst, src)
        for x, tx in here.items():
            found = False
            for y, ty in there.items():
                self.budget.tick()
                if tx != ty:
                    continue
                a, b = (x, y) if forth else (y, x)
                if self._color(b) != self._moved(g, self._color(a)):
                    continue
                if self.extends(dom + (a,), ran + (b,), gi, depth - 1):
                    found = True
                    break
            if not found:
                return False
        return True

    def _patterns(self, size: int, with_new: bool) -> list[tuple[str, tuple[int, ...]]]:
        """Candidate tuples over positions ``0 .. size-1`` (plus ``size`` for the new point)."""
        top = size + 1 if with_new else size
        return [
            (sym.name, pos)
            for sym in self.u.signature
            for pos in product(range(top), repeat=sym.arity)
            if not with_new or size in pos
        ]

    def uniform_maps(self, part_size: int, depth: int) -> Optional[int]:
        """
        Uncolored shortcut. When ordered tuples with the same induced
        structure realize the same one-point types over them, for every
        length below ``part_size + depth``, each forth and back step finds a
        partner and no map gets stuck. Returns the number of partial
        isomorphisms with at most ``part_size`` elements, or None as soon as
        two such tuples disagree.
        """
        u = self.u
        rels = {sym.name: u.rel(sym.name) for sym in u.signature}
        reach = part_size + depth - 1
        maps = 0
        for s in range(min(max(part_size, reach), u.size) + 1):
            inside = self._patterns(s, with_new=False)
            linking = self._patterns(s, with_new=True)
            counts: Counter = Counter()
            domains: list[frozenset] = []
            realized: dict[frozenset, frozenset] = {}
            for c in combinations(u.elements, s):
                self.budget.tick()
                diagram = _positional(inside, c, rels)
                types = None
                if s <= reach:
                    taken = set(c)
                    types = frozenset(
                        _positional(linking, c + (y,), rels, new=s) for y in u.elements if y not in taken
                    )
                if s <= part_size:
                    domains.append(diagram)
                for perm in permutations(range(s)):
                    where = {j: i for i, j in enumerate(perm)}
                    key = _reindex(diagram, where)
                    counts[key] += 1
                    if types is not None:
                        moved = frozenset(_reindex(t, where) for t in types)
                        if realized.setdefault(key, moved) != moved:
                            return None
            if s <= part_size:
                maps += sum(counts[d] for d in domains)
        return maps

    def check(self, part_size: int, depth: int, keep: int = 20) -> HomogeneityReport:
        if self.colors is None:
            maps = self.uniform_maps(part_size, depth)
            if maps is not None:
                return HomogeneityReport(part_size=part_size, depth=depth, maps_checked=maps, stuck_count=0)
        checked = 0
        stuck: list[dict[ElementId, ElementId]] = []
        stuck_count = 0
        for k in range(min(part_size, self.u.size) + 1):
            for dom in combinations(self.u.elements, k):
                for ran in permutations(self.u.elements, k):
                    if not self.is_partial_iso(dom, ran):
                        continue
                    candidates = [i for i, g in enumerate(self.group) if self.compatible(g, dom, ran)]
                    if not candidates:
                        continue
                    checked += 1
                    if not any(self.extends(dom, ran, gi, depth) for gi in candidates):
                        stuck_count += 1
                        if len(stuck) < keep:
                            stuck.append(dict(zip(dom, ran)))
        return HomogeneityReport(
            part_size=part_size, depth=depth, maps_checked=checked,
            stuck_count=stuck_count, stuck=stuck,
        )


def verify_homogeneity(
    u: Structure, part_size: int, depth: int, *, budget: Optional[SearchBudget] = None
) -> HomogeneityReport:
    """
    Try ``depth`` rounds of back-and-forth on every isomorphism between
    induced substructures with at most ``part_size`` elements; report the
    maps that get stuck.
    """
    with span("fmtbench.verify_homogeneity", {"structure.size": u.size, "part_size": part_size, "depth": depth}):
        return BackAndForth(u, budget=budget).check(part_size, depth)


def verify_universality(
    u: Structure, spec: ClassSpec, max_size: int, *, budget: Optional[SearchBudget] = None
) -> UniversalityReport:
    """Every member of ``spec`` with at most ``max_size`` elements embeds into ``u``."""
    budget = resolve_budget(budget)
    members = enumerate_members(spec, max_size, budget=budget)
    missing = [m for m in members if find_embedding(m, u, budget=budget) is None]
    return UniversalityReport(max_size=max_size, members_checked=len(members), missing=missing)
