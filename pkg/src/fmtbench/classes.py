"""
Classes of finite structures and their class-level properties.

A ``ClassSpec`` is a discriminated union (on ``variant``) of

  AllFinite  every finite structure over a signature
  KLF        F-free structures of link type L
  CSP        structures with a homomorphism to a template
  ForbHom    structures admitting no homomorphism from any forbidden one
  Explicit   a finite list of structures (closed under isomorphism)
  Colored    encodings S(A, a) of T-colored members of a base class

Every variant carries ``graphs``: when set, binary symbols must be
interpreted symmetric and irreflexive, so "all finite graphs" is
``AllFinite(signature=E/2, graphs=True)``.

All variants except ``Explicit`` are hereditary, which lets
``enumerate_members`` grow representatives one point at a time and prune
non-members early.
"""
from __future__ import annotations

import json
from itertools import product
from typing import Annotated, Any, Iterator, Literal, Optional, Union

from pydantic import Field, TypeAdapter, ValidationError, model_validator
from pydantic_core import PydanticCustomError

from ._search import HomSearch, SearchBudget, resolve_budget
from ._telemetry import set_attribute, span
from .exceptions import ClassSpecError, MorphismKindError, SignatureMismatchError, StructureParseError
from .models import BaseSchema, ClassProperty, MorphismKind, raise_input_error
from .morphisms import (
    Morphism,
    find_homomorphism,
    find_morphism,
    iter_morphisms,
    make_morphism,
)
from .structures import (
    ElementId,
    Signature,
    Structure,
    Tuple,
    canonical_key,
    disjoint_union,
    empty_structure,
    induced_substructure,
    is_link_structure,
    is_packed,
    substructures,
)


# ---------------------------------------------------------------------------
# Specifications
# ---------------------------------------------------------------------------

class _SpecBase(BaseSchema):
    graphs: bool = Field(False, description="Binary symbols are symmetric and irreflexive")
    signature: Optional[Signature] = Field(
        None, description="Signature of the class; derived from the listed structures when omitted"
    )

    def _settle_signature(self, structures: list[Structure]) -> None:
        sigs = {s.signature for s in structures}
        if self.signature is not None:
            sigs.add(self.signature)
        if not sigs:
            raise PydanticCustomError(
                "class_spec", "{variant} needs a signature when it lists no structures",
                {"variant": type(self).__name__},
            )
        if len(sigs) > 1:
            raise PydanticCustomError(
                "class_spec", "all structures of a {variant} spec must share one signature",
                {"variant": type(self).__name__},
            )
        self.signature = sigs.pop()

    @property
    def sig(self) -> Signature:
        assert self.signature is not None
        return self.signature


class AllFinite(_SpecBase):
    variant: Literal["AllFinite"] = "AllFinite"

    @model_validator(mode="after")
    def _check(self) -> "AllFinite":
        self._settle_signature([])
        return self


class KLF(_SpecBase):
    variant: Literal["KLF"] = "KLF"
    links: list[Structure]
    forbidden: list[Structure] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check(self) -> "KLF":
        for i, link in enumerate(self.links):
            if not is_link_structure(link):
                raise PydanticCustomError(
                    "class_spec", "links[{index}] is not a link-structure", {"index": i}
                )
        for i, f in enumerate(self.forbidden):
            if not is_packed(f):
                raise PydanticCustomError(
                    "class_spec", "forbidden[{index}] is not packed", {"index": i}
                )
        self._settle_signature(self.links + self.forbidden)
        return self


class CSP(_SpecBase):
    variant: Literal["CSP"] = "CSP"
    template: Structure

    @model_validator(mode="after")
    def _check(self) -> "CSP":
        self._settle_signature([self.template])
        return self


class ForbHom(_SpecBase):
    variant: Literal["ForbHom"] = "ForbHom"
    forbidden: list[Structure] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check(self) -> "ForbHom":
        self._settle_signature(self.forbidden)
        return self


class Explicit(_SpecBase):
    variant: Literal["Explicit"] = "Explicit"
    structures: list[Structure] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check(self) -> "Explicit":
        self._settle_signature(self.structures)
        return self


class Colored(_SpecBase):
    """
    Encoded T-colored members of ``base``: a structure over ``R`` plus one
    unary ``M_t`` per template element is a member iff every element lies
    in exactly one ``M_t``, the induced coloring is a homomorphism into
    ``template`` and the ``R``-reduct is a member of ``base``.
    """

    variant: Literal["Colored"] = "Colored"
    base: "ClassSpec"
    template: Structure

    @model_validator(mode="after")
    def _check(self) -> "Colored":
        from .colored import encoded_signature

        if self.template.signature != self.base.sig:
            raise PydanticCustomError(
                "class_spec", "template signature differs from the base class signature", {}
            )
        self.signature = encoded_signature(self.template)
        return self


ClassSpec = Annotated[
    Union[AllFinite, KLF, CSP, ForbHom, Explicit, Colored],
    Field(discriminator="variant"),
]
Colored.model_rebuild()

_SPEC_ADAPTER: TypeAdapter = TypeAdapter(ClassSpec)


def class_spec_from_dict(data: Any) -> ClassSpec:
    try:
        return _SPEC_ADAPTER.validate_python(data)
    except ValidationError as exc:
        raise_input_error(exc)


def parse_class_spec(text: Union[str, bytes]) -> ClassSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    return class_spec_from_dict(data)


def graphs_mode(spec: ClassSpec) -> bool:
    if isinstance(spec, Colored):
        return spec.graphs or graphs_mode(spec.base)
    return spec.graphs


# ---------------------------------------------------------------------------
# Membership
# ---------------------------------------------------------------------------

def _graph_shaped(a: Structure) -> bool:
    for sym in a.signature:
        if sym.arity != 2:
            continue
        rel = a.rel(sym.name)
        for x, y in rel:
            if x == y or (y, x) not in rel:
                return False
    return True


def link_substructures(a: Structure) -> Iterator[Structure]:
    """Singletons and the substructures spanned by each tuple's entries."""
    seen: set[frozenset[ElementId]] = set()
    for x in a.elements:
        seen.add(frozenset((x,)))
        yield induced_substructure(a, (x,))
    for name in a.signature.names:
        for t in sorted(a.rel(name)):
            support = frozenset(t)
            if support not in seen:
                seen.add(support)
                yield induced_substructure(a, support)


def member(spec: ClassSpec, a: Structure, *, budget: Optional[SearchBudget] = None) -> bool:
    if a.signature != spec.sig:
        raise SignatureMismatchError(
            f"structure signature {a.signature.names} differs from the class signature {spec.sig.names}"
        )
    budget = resolve_budget(budget)
    if spec.graphs and not _graph_shaped(a):
        return False
    if isinstance(spec, AllFinite):
        return True
    if isinstance(spec, CSP):
        return find_homomorphism(a, spec.template, budget=budget) is not None
    if isinstance(spec, ForbHom):
        return all(find_homomorphism(f, a, budget=budget) is None for f in spec.forbidden)
    if isinstance(spec, KLF):
        link_keys = {canonical_key(link) for link in spec.links}
        if any(canonical_key(s) not in link_keys for s in link_substructures(a)):
            return False
        return all(find_homomorphism(f, a, budget=budget) is None for f in spec.forbidden)
    if isinstance(spec, Explicit):
        return canonical_key(a) in {canonical_key(s) for s in spec.structures}
    if isinstance(spec, Colored):
        from .colored import try_decode

        decoded = try_decode(a, spec.template)
        return decoded is not None and member(spec.base, decoded.base, budget=budget)
    raise ClassSpecError(f"unknown class variant {type(spec).__name__}")


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

def _fresh_id(a: Structure) -> ElementId:
    n = a.size
    while str(n) in a.element_set:
        n += 1
    return str(n)


def _extension_atoms(
    a: Structure, new: ElementId, graphs: bool
) -> list[tuple[str, tuple[Tuple, ...]]]:
    """Tuples mentioning ``new``, grouped so that graph edges come in symmetric pairs."""
    atoms: list[tuple[str, tuple[Tuple, ...]]] = []
    points = a.elements + (new,)
    for sym in a.signature:
        if graphs and sym.arity == 2:
            atoms.extend((sym.name, ((x, new), (new, x))) for x in a.elements)
            continue
        for t in product(points, repeat=sym.arity):
            if new in t:
                atoms.append((sym.name, (t,)))
    return atoms


def one_point_extensions(
    a: Structure,
    spec: ClassSpec,
    new_id: Optional[ElementId] = None,
    *,
    budget: Optional[SearchBudget] = None,
) -> list[Structure]:
    """
    Every member ``B`` of ``spec`` with carrier ``A ∪ {new_id}`` inducing ``a``
    on ``A``. Distinct results are distinct over ``A`` (not isomorphic by a
    map fixing ``A`` pointwise).
    """
    budget = resolve_budget(budget)
    new = new_id if new_id is not None else _fresh_id(a)
    atoms = _extension_atoms(a, new, graphs_mode(spec))
    out = []
    for mask in product((False, True), repeat=len(atoms)):
        rels = {name: set(ts) for name, ts in a.relations.items()}
        for chosen, (name, tuples) in zip(mask, atoms):
            if chosen:
                rels.setdefault(name, set()).update(tuples)
        b = Structure.trusted(a.signature, a.elements + (new,), rels)
        if member(spec, b, budget=budget):
            out.append(b)
    return out


MemberMemo = dict[tuple[str, int], list[Structure]]


def enumerate_members(
    spec: ClassSpec,
    max_size: int,
    *,
    budget: Optional[SearchBudget] = None,
    memo: Optional[MemberMemo] = None,
) -> list[Structure]:
    """
    One representative per isomorphism class of members with at most
    ``max_size`` elements, by increasing size. Members of size ``n`` carry
    the ids ``"0" .. str(n-1)``.

    ``memo`` is owned by the caller and reused across calls in one sweep.
    """
    cache_key = (spec.model_dump_json(), max_size)
    if memo is not None and cache_key in memo:
        return list(memo[cache_key])
    budget = resolve_budget(budget)
    with span("fmtbench.enumerate_members", {"class.variant": spec.variant, "max_size": max_size}) as sp:
        if isinstance(spec, Explicit):
            seen: dict[tuple, Structure] = {}
            for s in sorted(spec.structures, key=lambda s: s.size):
                if s.size <= max_size:
                    seen.setdefault(canonical_key(s), s)
            reps = list(seen.values())
        else:
            empty = empty_structure(spec.sig)
            level = [empty] if member(spec, empty, budget=budget) else []
            reps = list(level)
            for n in range(1, max_size + 1):
                found: dict[tuple, Structure] = {}
                for r in level:
                    for b in one_point_extensions(r, spec, str(n - 1), budget=budget):
                        budget.tick()
                        found.setdefault(canonical_key(b), b)
                level = list(found.values())
                reps.extend(level)
        set_attribute(sp, "class.representatives", len(reps))
    if memo is not None:
        memo[cache_key] = reps
    return list(reps)


def age(a: Structure, max_size: int, *, budget: Optional[SearchBudget] = None) -> list[Structure]:
    """
    One induced substructure of ``a`` per isomorphism type with at most
    ``max_size`` elements, by increasing size and carrier order.
    """
    budget = resolve_budget(budget)
    with span("fmtbench.age", {"structure.size": a.size, "max_size": max_size}):
        seen: dict[tuple, Structure] = {}
        for subset in substructures(a, max_size):
            budget.tick()
            sub = induced_substructure(a, subset)
            seen.setdefault(canonical_key(sub), sub)
        return list(seen.values())


# ---------------------------------------------------------------------------
# Amalgams
# ---------------------------------------------------------------------------

class AmalgamResult(BaseSchema):
    amalgam: Structure
    g1: Morphism
    g2: Morphism


def _glue(f1: Morphism, f2: Morphism, g2_kind: MorphismKind) -> AmalgamResult:
    """
    Pushout of ``f1: A → B1`` and the embedding ``f2: A → B2``: B2 is glued onto
    B1 along ``f1 ∘ f2⁻¹``. B1 keeps its ids; the other B2 elements keep
    theirs unless taken, in which case primes are appended.
    """
    b1, b2 = f1.codomain, f2.codomain
    back = {y: x for x, y in f2.mapping.items()}
    used = set(b1.elements)
    g2: dict[ElementId, ElementId] = {}
    fresh: list[ElementId] = []
    for b in b2.elements:
        if b in back:
            g2[b] = f1.mapping[back[b]]
            continue
        name = b
        while name in used:
            name += "'"
        used.add(name)
        fresh.append(name)
        g2[b] = name
    rels: dict[str, set[Tuple]] = {n: set(ts) for n, ts in b1.relations.items()}
    for n, ts in b2.relations.items():
        rels.setdefault(n, set()).update(tuple(g2[x] for x in t) for t in ts)
    c = Structure.trusted(b1.signature, b1.elements + tuple(fresh), rels)
    return AmalgamResult(
        amalgam=c,
        g1=make_morphism(b1, c, {x: x for x in b1.elements}, MorphismKind.EMBEDDING),
        g2=make_morphism(b2, c, g2, g2_kind),
    )


def _require_common_domain(f1: Morphism, f2: Morphism) -> None:
    if f1.domain != f2.domain:
        raise MorphismKindError("the two morphisms must share their domain")


def free_amalgam(f1: Morphism, f2: Morphism) -> AmalgamResult:
    """
    Free amalgam of two embeddings with a common domain: B1 ⊔ B2 glued along
    the images of A, with no tuples beyond those of B1 and B2.
    """
    for f in (f1, f2):
        if f.kind.strength < MorphismKind.EMBEDDING.strength:
            raise MorphismKindError("free_amalgam needs embeddings", kind=f.kind.value)
    _require_common_domain(f1, f2)
    return _glue(f1, f2, MorphismKind.EMBEDDING)


def homo_amalgam(f1: Morphism, f2: Morphism) -> AmalgamResult:
    """
    Pushout of a homomorphism ``f1`` and an embedding ``f2``; ``g1`` is an
    embedding and ``g2`` a homomorphism.
    """
    if f2.kind.strength < MorphismKind.EMBEDDING.strength:
        raise MorphismKindError("homo_amalgam needs f2 to be an embedding", kind=f2.kind.value)
    _require_common_domain(f1, f2)
    return _glue(f1, f2, MorphismKind.HOM)


def _commutes(f1: Morphism, f2: Morphism, g1: Morphism, g2: Morphism) -> bool:
    return all(g1.mapping[f1.mapping[x]] == g2.mapping[f2.mapping[x]] for x in f1.domain.elements)


def verify_pushout(
    c: Structure,
    g1: Morphism,
    g2: Morphism,
    f1: Morphism,
    f2: Morphism,
    probe_bound: int,
    *,
    budget: Optional[SearchBudget] = None,
) -> bool:
    """
    Check the universal property against every probe ``D`` with at most
    ``probe_bound`` elements: each compatible pair ``h1: B1 → D``,
    ``h2: B2 → D`` must factor through exactly one ``m: C → D``.
    """
    budget = resolve_budget(budget)
    if g1.codomain != c or g2.codomain != c or not _commutes(f1, f2, g1, g2):
        return False
    b1, b2 = f1.codomain, f2.codomain
    probes = enumerate_members(AllFinite(signature=c.signature), probe_bound, budget=budget)
    with span("fmtbench.verify_pushout", {"probe_bound": probe_bound, "probes": len(probes)}):
        for d in probes:
            for h1 in HomSearch(b1, d, budget=budget).solutions():
                fixed2 = {f2.mapping[x]: h1[f1.mapping[x]] for x in f1.domain.elements}
                for h2 in HomSearch(b2, d, fixed=fixed2, budget=budget).solutions():
                    forced: dict[ElementId, ElementId] = {}
                    consistent = True
                    for g, h in ((g1, h1), (g2, h2)):
                        for b, y in h.items():
                            if forced.setdefault(g.mapping[b], y) != y:
                                consistent = False
                    if not consistent:
                        return False
                    if HomSearch(c, d, fixed=forced, budget=budget).count() != 1:
                        return False
    return True


# ---------------------------------------------------------------------------
# Class properties
# ---------------------------------------------------------------------------

class AmalgamCounterexample(BaseSchema):
    base: Optional[Structure] = Field(None, description="A (absent for JEP)")
    left: Structure = Field(..., description="B1 (for HP: the member with a bad substructure)")
    right: Optional[Structure] = Field(None, description="B2")
    f1: Optional[dict[ElementId, ElementId]] = None
    f2: Optional[dict[ElementId, ElementId]] = None
    reason: str


class AmalgamReport(BaseSchema):
    property: ClassProperty
    size_bound: int
    witness_bound: Optional[int] = None
    holds_up_to_bound: bool
    witnesses_checked: int = 0
    counterexample: Optional[AmalgamCounterexample] = None

    def __bool__(self) -> bool:
        return self.holds_up_to_bound


def _search_amalgam(
    spec: ClassSpec,
    f1: Morphism,
    f2: Morphism,
    g2_kind: MorphismKind,
    witness_bound: int,
    budget: SearchBudget,
    memo: MemberMemo,
) -> bool:
    b1, b2 = f1.codomain, f2.codomain
    lower = max(b1.size, b2.size)
    for c in enumerate_members(spec, witness_bound, budget=budget, memo=memo):
        if c.size < lower:
            continue
        for g1 in iter_morphisms(b1, c, MorphismKind.EMBEDDING, budget=budget):
            fixed = {f2.mapping[x]: g1.mapping[f1.mapping[x]] for x in f1.domain.elements}
            if len(set(fixed.values())) < len(fixed) and g2_kind is not MorphismKind.HOM:
                continue
            if find_morphism(b2, c, g2_kind, fixed=fixed, budget=budget) is not None:
                return True
    return False


def _amalgamation_instances(
    reps: list[Structure], f1_kind: MorphismKind, budget: SearchBudget
) -> Iterator[tuple[Morphism, Morphism]]:
    """
    Every span ``(f1: A → B1, f2: A → B2)`` over representatives. With two
    embeddings the square is symmetric and unordered pairs (B1, B2) suffice;
    a homomorphism ``f1`` needs every ordered pair.
    """
    ordered = f1_kind is not MorphismKind.EMBEDDING
    for a in reps:
        for i, b1 in enumerate(reps):
            if b1.size < a.size:
                continue
            for b2 in (reps if ordered else reps[i:]):
                if b2.size < a.size:
                    continue
                for f1 in iter_morphisms(a, b1, f1_kind, budget=budget):
                    for f2 in iter_morphisms(a, b2, MorphismKind.EMBEDDING, budget=budget):
                        yield f1, f2


def check_property(
    spec: ClassSpec,
    prop: Union[ClassProperty, str],
    size_bound: int,
    witness_bound: Optional[int] = None,
    *,
    budget: Optional[SearchBudget] = None,
) -> AmalgamReport:
    """
    Check HP, JEP, AP, HAP or FreeAP over members with at most ``size_bound``
    elements. Amalgam witnesses are searched among members with at most
    ``witness_bound`` elements, defaulting per instance to the size of the
    free amalgam (|B1| + |B2| − |A|; |B1| + |B2| for JEP). The first failing
    instance in enumeration order is reported.
    """
    prop = ClassProperty(prop)
    budget = resolve_budget(budget)
    memo: MemberMemo = {}
    reps = enumerate_members(spec, size_bound, budget=budget, memo=memo)

    def report(holds: bool, checked: int, cex: Optional[AmalgamCounterexample] = None) -> AmalgamReport:
        return AmalgamReport(
            property=prop, size_bound=size_bound, witness_bound=witness_bound,
            holds_up_to_bound=holds, witnesses_checked=checked, counterexample=cex,
        )

    with span("fmtbench.check_property", {"property": prop.value, "size_bound": size_bound}):
        checked = 0
        if prop is ClassProperty.HP:
            # Nonempty substructures first, so a missing ∅ is only reported
            # when nothing else is missing.
            for b in reps:
                for subset in substructures(b, b.size - 1):
                    if not subset:
                        continue
                    checked += 1
                    sub = induced_substructure(b, subset)
                    if not member(spec, sub, budget=budget):
                        return report(False, checked, AmalgamCounterexample(
                            base=sub, left=b, reason="induced substructure is not a member",
                        ))
            nonempty = [b for b in reps if b.size > 0]
            if nonempty:
                checked += 1
                empty = empty_structure(spec.sig)
                if not member(spec, empty, budget=budget):
                    return report(False, checked, AmalgamCounterexample(
                        base=empty, left=nonempty[0], reason="the empty substructure is not a member",
                    ))
            return report(True, checked)

        if prop is ClassProperty.JEP:
            for i, b1 in enumerate(reps):
                for b2 in reps[i:]:
                    checked += 1
                    if member(spec, disjoint_union(b1, b2), budget=budget):
                        continue
                    bound = witness_bound or b1.size + b2.size
                    empty = empty_structure(spec.sig)
                    e1 = make_morphism(empty, b1, {}, MorphismKind.EMBEDDING)
                    e2 = make_morphism(empty, b2, {}, MorphismKind.EMBEDDING)
                    if not _search_amalgam(spec, e1, e2, MorphismKind.EMBEDDING, bound, budget, memo):
                        return report(False, checked, AmalgamCounterexample(
                            left=b1, right=b2, reason=f"no joint embedding with at most {bound} elements",
                        ))
            return report(True, checked)

        hap = prop is ClassProperty.HAP
        f1_kind = MorphismKind.HOM if hap else MorphismKind.EMBEDDING
        g2_kind = MorphismKind.HOM if hap else MorphismKind.EMBEDDING
        for f1, f2 in _amalgamation_instances(reps, f1_kind, budget):
            checked += 1
            glued = homo_amalgam(f1, f2) if hap else free_amalgam(f1, f2)
            if member(spec, glued.amalgam, budget=budget):
                continue
            reason = "the free amalgam is not a member"
            if prop is not ClassProperty.FREE_AP:
                b1, b2, a = f1.codomain, f2.codomain, f1.domain
                bound = witness_bound or b1.size + b2.size - a.size
                if _search_amalgam(spec, f1, f2, g2_kind, bound, budget, memo):
                    continue
                reason = f"no amalgam with at most {bound} elements"
            return report(False, checked, AmalgamCounterexample(
                base=f1.domain, left=f1.codomain, right=f2.codomain,
                f1=dict(f1.mapping), f2=dict(f2.mapping), reason=reason,
            ))
        return report(True, checked)


# ---------------------------------------------------------------------------
# Hrushovski property (EPPA)
# ---------------------------------------------------------------------------

def partial_isomorphisms(a: Structure, *, budget: Optional[SearchBudget] = None) -> list[dict[ElementId, ElementId]]:
    """Isomorphisms between induced substructures of ``a``, as maps."""
    budget = resolve_budget(budget)
    out = []
    for subset in substructures(a):
        sub = induced_substructure(a, subset)
        search = HomSearch(sub, a, injective=True, reflect=True, budget=budget)
        out.extend(search.solutions())
    return out


def _key_over(b: Structure, fixed: tuple[ElementId, ...]) -> tuple:
    """Isomorphism key of ``b`` with the elements of ``fixed`` individualized."""
    marks = [(f"__fixed{i}", 1) for i in range(len(fixed))]
    sig = b.signature.extend(*marks)
    rels: dict[str, Any] = dict(b.relations)
    rels.update({f"__fixed{i}": {(x,)} for i, x in enumerate(fixed)})
    return canonical_key(Structure.trusted(sig, b.elements, rels))


def _extends_all(b: Structure, partials: list[dict[ElementId, ElementId]], budget: SearchBudget) -> bool:
    for p in partials:
        if HomSearch(b, b, injective=True, reflect=True, fixed=p, budget=budget).first() is None:
            return False
    return True


def eppa_witness(
    a: Structure,
    spec: ClassSpec,
    size_bound: int,
    *,
    budget: Optional[SearchBudget] = None,
) -> Optional[Structure]:
    """
    Smallest ``B`` in ``spec`` (at most ``size_bound`` elements) containing
    ``a`` as an induced substructure such that every partial isomorphism of
    ``a`` extends to an automorphism of ``B``.

    Candidates grow one element at a time and are deduplicated up to
    isomorphism over ``a``. ``None`` means no witness within the bound.
    """
    budget = resolve_budget(budget)
    if not member(spec, a, budget=budget):
        raise ClassSpecError("eppa_witness needs a member of the class")
    if size_bound < a.size:
        raise ClassSpecError("size_bound must be at least |A|")
    partials = partial_isomorphisms(a, budget=budget)
    with span("fmtbench.eppa_witness", {"structure.size": a.size, "size_bound": size_bound}) as sp:
        level = [a]
        for size in range(a.size, size_bound + 1):
            for b in level:
                if _extends_all(b, partials, budget):
                    set_attribute(sp, "witness.size", b.size)
                    return b
            if size == size_bound:
                break
            grown: dict[tuple, Structure] = {}
            for b in level:
                for ext in one_point_extensions(b, spec, budget=budget):
                    grown.setdefault(_key_over(ext, a.elements), ext)
            level = list(grown.values())
    return None
