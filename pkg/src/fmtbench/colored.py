"""
T-colored structures.

A colored structure ``(A, a)`` is a structure ``A`` with a homomorphism
``a: A → T`` into a finite template ``T``. Morphisms come in two flavours:

  strong  f: A → B with b∘f = a
  weak    (f, g) with g ∈ Aut(T) and b∘f = g∘a

sAut, wAut and cAut (the first projection of wAut) are computed by
exhaustive search with the color constraints pushed into the solver's
candidate lists.

Encodings:

  S(A, a)   R plus one unary ``M_t`` per template element, M_t = a⁻¹(t)
  tilde     R plus binary ``kappa``, the kernel of a
  hat       tilde plus ``<name>_hat`` per symbol, ρ̂ = {x̄ | a(x̄) ∈ ρ_T}
"""
from __future__ import annotations

import json
from itertools import product
from typing import Any, Hashable, Iterable, Mapping, Optional, Union

from pydantic import ConfigDict, Field, ValidationError, computed_field, model_validator
from pydantic_core import PydanticCustomError

from ._search import SearchBudget, resolve_budget
from ._telemetry import span
from .classes import ClassSpec, Colored, enumerate_members
from .exceptions import (
    ColoringError,
    DecodeError,
    SignatureMismatchError,
    StructureParseError,
)
from .fraisse import (
    DEFAULT_STAGE_BUDGET,
    BackAndForth,
    GenericApproximant,
    HomogeneityReport,
    UniversalityReport,
    build_generic,
)
from .models import BaseSchema, MorphismKind, OrbitMode, raise_input_error
from .morphisms import (
    Morphism,
    automorphism_group,
    compose,
    find_morphism,
    is_group,
    iter_morphisms,
    make_morphism,
    orbit_count,
)
from .structures import (
    ElementId,
    Signature,
    Structure,
    Tuple,
    induced_substructure,
    structure_from_dict,
    structure_to_dict,
)

KAPPA = "kappa"
COLOR_PREFIX = "M_"


def color_symbol(t: ElementId) -> str:
    return f"{COLOR_PREFIX}{t}"


def hat_symbol(name: str) -> str:
    return f"{name}_hat"


def encoded_signature(template: Structure) -> Signature:
    """The template's signature plus one unary color symbol per template element."""
    extra = [(color_symbol(t), 1) for t in template.elements]
    clash = [name for name, _ in extra if name in template.signature]
    if clash:
        raise SignatureMismatchError(f"color symbols {clash} collide with the signature")
    return template.signature.extend(*extra)


# ---------------------------------------------------------------------------
# Colored structures
# ---------------------------------------------------------------------------

def coloring_violation(
    base: Structure, template: Structure, color: Mapping[ElementId, ElementId]
) -> Optional[tuple[str, Optional[tuple[str, Tuple]]]]:
    """First reason ``color`` is not a homomorphism ``base → template``, or None."""
    if base.signature != template.signature:
        return "base and template have different signatures", None
    missing = [x for x in base.elements if x not in color]
    if missing:
        return f"color map is undefined on {missing[0]}", None
    for x, t in color.items():
        if x not in base.element_set:
            return f"color map mentions {x}, which is not in the base", None
        if t not in template.element_set:
            return f"{x} is colored {t}, which is not in the template", None
    for name in base.signature.names:
        target = template.rel(name)
        for tup in sorted(base.rel(name)):
            if tuple(color[x] for x in tup) not in target:
                return f"{name}{tup} maps outside the template relation", (name, tup)
    return None


class ColoredStructure(BaseSchema):
    model_config = ConfigDict(extra="forbid", frozen=True)

    base: Structure
    template: Structure
    color: dict[ElementId, ElementId] = Field(..., description="Homomorphism base → template")

    @model_validator(mode="after")
    def _check_color(self) -> "ColoredStructure":
        problem = coloring_violation(self.base, self.template, self.color)
        if problem is not None:
            message, violation = problem
            raise PydanticCustomError("coloring", message, {"violation": violation})
        return self

    def __hash__(self) -> int:
        return hash((self.base, self.template, frozenset(self.color.items())))

    def fiber(self, t: ElementId) -> list[ElementId]:
        return [x for x in self.base.elements if self.color[x] == t]

    def is_surjective(self) -> bool:
        return set(self.color.values()) == self.template.element_set

    def to_document(self) -> dict[str, Any]:
        doc = structure_to_dict(self.base)
        doc["template"] = structure_to_dict(self.template)
        doc["color"] = dict(sorted(self.color.items()))
        return doc


def make_colored(
    base: Structure, template: Structure, color: Mapping[Any, Any]
) -> ColoredStructure:
    """Validated constructor; a broken color map raises ``ColoringError``."""
    if base.signature != template.signature:
        raise SignatureMismatchError("base and template have different signatures")
    try:
        return ColoredStructure(
            base=base, template=template, color={str(k): str(v) for k, v in color.items()}
        )
    except ValidationError as exc:
        raise_input_error(exc)


def colored_from_dict(data: Any) -> ColoredStructure:
    if not isinstance(data, dict):
        raise StructureParseError("colored structure must be a JSON object")
    data = dict(data)
    try:
        template = data.pop("template")
        color = data.pop("color")
    except KeyError as exc:
        raise StructureParseError(f"missing field {exc.args[0]}", field=exc.args[0]) from exc
    if not isinstance(color, dict):
        raise StructureParseError("color must be an object", field="color")
    return make_colored(structure_from_dict(data), structure_from_dict(template), color)


def parse_colored(text: Union[str, bytes]) -> ColoredStructure:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    return colored_from_dict(data)


def _require_same_template(c1: ColoredStructure, c2: ColoredStructure) -> None:
    if c1.template != c2.template:
        raise SignatureMismatchError("colored structures have different templates")


# ---------------------------------------------------------------------------
# Strong and weak morphisms
# ---------------------------------------------------------------------------

class WeakMorphism(BaseSchema):
    """A pair (f, g): f a base morphism, g an automorphism of the template, b∘f = g∘a."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    source: ColoredStructure
    target: ColoredStructure
    f: Morphism
    g: Morphism

    @model_validator(mode="after")
    def _check_equation(self) -> "WeakMorphism":
        if self.f.domain != self.source.base or self.f.codomain != self.target.base:
            raise PydanticCustomError("morphism_kind", "f does not map source base to target base", {})
        if self.g.kind is not MorphismKind.ISO or self.g.domain != self.source.template \
                or self.g.codomain != self.target.template:
            raise PydanticCustomError("morphism_kind", "g is not an automorphism of the template", {})
        for x in self.source.base.elements:
            if self.target.color[self.f(x)] != self.g(self.source.color[x]):
                raise PydanticCustomError(
                    "coloring", "color equation fails at {x}", {"x": x, "violation": None}
                )
        return self

    def __hash__(self) -> int:
        return hash((self.f, self.g))

    def key(self) -> tuple:
        return self.f.key(), self.g.key()

    def is_strong(self) -> bool:
        return self.g.is_identity()

    def to_document(self) -> dict[str, Any]:
        return {"f": self.f.to_document(), "g": self.g.to_document()}


def compose_weak(w1: WeakMorphism, w2: WeakMorphism) -> WeakMorphism:
    """``(f1, g1) ∘ (f2, g2) = (f1∘f2, g1∘g2)``, re-verified."""
    try:
        return WeakMorphism(
            source=w2.source, target=w1.target, f=compose(w1.f, w2.f), g=compose(w1.g, w2.g)
        )
    except ValidationError as exc:
        raise_input_error(exc)


def _color_domains(
    src: ColoredStructure, dst: ColoredStructure, g: Optional[Mapping[ElementId, ElementId]] = None
) -> dict[ElementId, list[ElementId]]:
    fibers: dict[ElementId, list[ElementId]] = {}
    for y in dst.base.elements:
        fibers.setdefault(dst.color[y], []).append(y)
    return {
        x: fibers.get(src.color[x] if g is None else g[src.color[x]], [])
        for x in src.base.elements
    }


def iter_strong(
    src: ColoredStructure,
    dst: ColoredStructure,
    kind: MorphismKind = MorphismKind.HOM,
    *,
    fixed: Optional[Mapping[ElementId, ElementId]] = None,
    budget: Optional[SearchBudget] = None,
):
    _require_same_template(src, dst)
    yield from iter_morphisms(
        src.base, dst.base, kind, fixed=fixed, domains=_color_domains(src, dst), budget=budget
    )


def find_strong_hom(
    src: ColoredStructure,
    dst: ColoredStructure,
    fixed: Optional[Mapping[ElementId, ElementId]] = None,
    *,
    budget: Optional[SearchBudget] = None,
) -> Optional[Morphism]:
    _require_same_template(src, dst)
    return find_morphism(
        src.base, dst.base, MorphismKind.HOM,
        fixed=fixed, domains=_color_domains(src, dst), budget=budget,
    )


def find_strong_embedding(
    src: ColoredStructure,
    dst: ColoredStructure,
    fixed: Optional[Mapping[ElementId, ElementId]] = None,
    *,
    budget: Optional[SearchBudget] = None,
) -> Optional[Morphism]:
    _require_same_template(src, dst)
    return find_morphism(
        src.base, dst.base, MorphismKind.EMBEDDING,
        fixed=fixed, domains=_color_domains(src, dst), budget=budget,
    )


# ---------------------------------------------------------------------------
# Groups
# ---------------------------------------------------------------------------

def strong_automorphisms(c: ColoredStructure, *, budget: Optional[SearchBudget] = None) -> list[Morphism]:
    """sAut(A, a): automorphisms f of A with a∘f = a, identity first."""
    with span("fmtbench.strong_automorphisms", {"structure.size": c.base.size}):
        group = list(iter_strong(c, c, MorphismKind.ISO, budget=budget))
        group.sort(key=lambda m: (not m.is_identity(), m.key()))
        if not is_group(group):
            raise ColoringError("strong automorphisms are not closed under composition")
        return group


def _is_weak_group(group: list[WeakMorphism]) -> bool:
    keys = {w.key() for w in group}
    for w1 in group:
        inverse = (
            tuple(sorted((y, x) for x, y in w1.f.mapping.items())),
            tuple(sorted((y, x) for x, y in w1.g.mapping.items())),
        )
        if inverse not in keys:
            return False
        for w2 in group:
            f = tuple(sorted((x, w1.f.mapping[y]) for x, y in w2.f.mapping.items()))
            g = tuple(sorted((x, w1.g.mapping[y]) for x, y in w2.g.mapping.items()))
            if (f, g) not in keys:
                return False
    return bool(group)


def weak_automorphisms(
    c: ColoredStructure,
    *,
    template_group: Optional[list[Morphism]] = None,
    budget: Optional[SearchBudget] = None,
) -> list[WeakMorphism]:
    """
    wAut(A, a): pairs (f, g) with f ∈ Aut(A), g ∈ Aut(T) and a∘f = g∘a.

    ``template_group`` restricts g to a subgroup of Aut(T); the default is
    all of Aut(T).
    """
    budget = resolve_budget(budget)
    with span("fmtbench.weak_automorphisms", {"structure.size": c.base.size}):
        gs = template_group if template_group is not None else automorphism_group(c.template, budget=budget)
        group: list[WeakMorphism] = []
        for g in gs:
            domains = _color_domains(c, c, g.mapping)
            for f in iter_morphisms(c.base, c.base, MorphismKind.ISO, domains=domains, budget=budget):
                group.append(WeakMorphism(source=c, target=c, f=f, g=g))
        group.sort(key=lambda w: (not (w.f.is_identity() and w.g.is_identity()), w.key()))
        if not _is_weak_group(group):
            raise ColoringError("weak automorphisms are not closed under composition")
        return group


def color_automorphisms(
    c: ColoredStructure, *, budget: Optional[SearchBudget] = None
) -> list[Morphism]:
    """cAut(A, a): the first projection of wAut."""
    seen: dict[tuple, Morphism] = {}
    for w in weak_automorphisms(c, budget=budget):
        seen.setdefault(w.f.key(), w.f)
    group = sorted(seen.values(), key=lambda m: (not m.is_identity(), m.key()))
    if not is_group(group):
        raise ColoringError("color automorphisms are not closed under composition")
    return group


def strong_kernel(c: ColoredStructure, *, budget: Optional[SearchBudget] = None) -> list[Morphism]:
    """Kernel of the second projection of wAut, as maps on the base."""
    return [w.f for w in weak_automorphisms(c, budget=budget) if w.is_strong()]


def generate_group(
    generators: Iterable[Union[Morphism, Mapping[ElementId, ElementId]]], template: Structure
) -> list[Morphism]:
    """
    Closure of ``generators`` (automorphisms of ``template``) under
    composition, identity first.
    """
    start = tuple(sorted((x, x) for x in template.elements))
    gens = [dict(g.mapping if isinstance(g, Morphism) else {str(k): str(v) for k, v in g.items()})
            for g in generators]
    for g in gens:
        make_morphism(template, template, g, MorphismKind.ISO)
    seen = {start}
    frontier = [dict(start)]
    while frontier:
        current = frontier.pop()
        for g in gens:
            nxt = {x: g[y] for x, y in current.items()}
            key = tuple(sorted(nxt.items()))
            if key not in seen:
                seen.add(key)
                frontier.append(nxt)
    ordered = sorted(seen, key=lambda k: (k != start, k))
    return [make_morphism(template, template, dict(k), MorphismKind.ISO) for k in ordered]


def count_colored_orbits(
    c: ColoredStructure, n: int, mode: OrbitMode = OrbitMode.STRONG,
    *, budget: Optional[SearchBudget] = None,
) -> int:
    """Orbits of sAut (``strong``) or cAut (``color``) on n-tuples of the base."""
    mode = OrbitMode(mode)
    group = (
        strong_automorphisms(c, budget=budget) if mode is OrbitMode.STRONG
        else color_automorphisms(c, budget=budget)
    )
    return orbit_count([m.mapping for m in group], c.base.elements, n)


# ---------------------------------------------------------------------------
# Encodings
# ---------------------------------------------------------------------------

def encode_S(c: ColoredStructure) -> Structure:
    rels: dict[str, set[Tuple]] = {name: set(ts) for name, ts in c.base.relations.items()}
    for t in c.template.elements:
        rels[color_symbol(t)] = {(x,) for x in c.fiber(t)}
    return Structure.trusted(encoded_signature(c.template), c.base.elements, rels)


def decode_S(s: Structure, template: Structure) -> ColoredStructure:
    """
    Read a colored structure back off its unary color predicates.

    Raises
    ------
    DecodeError
        An element lies in no or several ``M_t``, or the induced color map
        breaks a tuple; ``link`` then holds the tuple's substructure.
    """
    if s.signature != encoded_signature(template):
        raise SignatureMismatchError("structure is not over the encoded signature of the template")
    color: dict[ElementId, ElementId] = {}
    for x in s.elements:
        marks = [t for t in template.elements if s.holds(color_symbol(t), (x,))]
        if len(marks) != 1:
            raise DecodeError(
                f"{x} lies in {len(marks)} color predicates", link=induced_substructure(s, (x,))
            )
        color[x] = marks[0]
    names = template.signature.names
    base = Structure.trusted(template.signature, s.elements, {n: s.rel(n) for n in names})
    for name in names:
        target = template.rel(name)
        for tup in sorted(base.rel(name)):
            if tuple(color[x] for x in tup) not in target:
                raise DecodeError(
                    f"{name}{tup} is not preserved by the induced coloring",
                    link=induced_substructure(s, set(tup)),
                )
    return ColoredStructure.model_construct(base=base, template=template, color=color)


def try_decode(s: Structure, template: Structure) -> Optional[ColoredStructure]:
    try:
        return decode_S(s, template)
    except DecodeError:
        return None


def encode_class(spec: ClassSpec, template: Structure) -> Colored:
    return Colored(base=spec, template=template)


def _kernel(c: ColoredStructure) -> set[Tuple]:
    return {(x, y) for x in c.base.elements for y in c.base.elements if c.color[x] == c.color[y]}


def tilde_expansion(c: ColoredStructure) -> Structure:
    if KAPPA in c.base.signature:
        raise SignatureMismatchError(f"symbol {KAPPA} is already in the signature")
    rels: dict[str, set[Tuple]] = {n: set(ts) for n, ts in c.base.relations.items()}
    rels[KAPPA] = _kernel(c)
    return Structure.trusted(c.base.signature.extend((KAPPA, 2)), c.base.elements, rels)


def _hat_relation(c: ColoredStructure, name: str) -> set[Tuple]:
    arity = c.base.signature.arity(name)
    target = c.template.rel(name)
    return {
        xs for xs in product(c.base.elements, repeat=arity)
        if tuple(c.color[x] for x in xs) in target
    }


def hat_expansion(c: ColoredStructure) -> Structure:
    tilde = tilde_expansion(c)
    extra = [(hat_symbol(s.name), s.arity) for s in c.base.signature]
    clash = [n for n, _ in extra if n in tilde.signature]
    if clash:
        raise SignatureMismatchError(f"symbols {clash} are already in the signature")
    rels = {n: set(ts) for n, ts in tilde.relations.items()}
    for s in c.base.signature:
        rels[hat_symbol(s.name)] = _hat_relation(c, s.name)
    return Structure.trusted(tilde.signature.extend(*extra), c.base.elements, rels)


def phi_relation(tilde: Structure, name: str) -> set[Tuple]:
    """
    Interpret ∃ȳ (ρ(ȳ) ∧ ⋀ κ(x_i, y_i)) in a tilde expansion by running
    over the witnesses ȳ ∈ ρ.
    """
    classes: dict[ElementId, list[ElementId]] = {y: [] for y in tilde.elements}
    for x, y in tilde.rel(KAPPA):
        classes[y].append(x)
    out: set[Tuple] = set()
    for ys in tilde.rel(name):
        out.update(product(*(classes[y] for y in ys)))
    return out


# ---------------------------------------------------------------------------
# Retractions and group identities
# ---------------------------------------------------------------------------

class RetractionCheck(BaseSchema):
    holds: bool
    coretraction: Optional[Morphism] = Field(None, description="Embedding ι: T ↪ U with u∘ι = id")

    def __bool__(self) -> bool:
        return self.holds


def is_retraction(c: ColoredStructure, *, budget: Optional[SearchBudget] = None) -> RetractionCheck:
    """Search an embedding ι: T ↪ U with u∘ι = id_T."""
    domains = {t: c.fiber(t) for t in c.template.elements}
    iota = find_morphism(c.template, c.base, MorphismKind.EMBEDDING, domains=domains, budget=budget)
    return RetractionCheck(holds=iota is not None, coretraction=iota)


class CAutReport(BaseSchema):
    surjective: bool
    retraction: bool
    caut_order: int
    aut_hat_order: int
    aut_tilde_order: int
    caut_subset_aut_hat: bool
    caut_equals_aut_hat: bool
    caut_equals_aut_tilde: bool
    phi_equals_hat: dict[str, bool]
    asserted: list[str] = Field(default_factory=list, description="Identities that must hold here")

    @computed_field  # type: ignore[prop-decorator]
    @property
    def consistent(self) -> bool:
        values = {
            "caut_subset_aut_hat": self.caut_subset_aut_hat,
            "caut_equals_aut_hat": self.caut_equals_aut_hat,
            "caut_equals_aut_tilde": self.caut_equals_aut_tilde,
            "phi_equals_hat": all(self.phi_equals_hat.values()),
        }
        return all(values[name] for name in self.asserted)


def check_caut_identity(c: ColoredStructure, *, budget: Optional[SearchBudget] = None) -> CAutReport:
    """
    Compare cAut(U, u) with the automorphism groups of the tilde and hat
    expansions, and each φ_ρ with ρ̂.

    The inclusion cAut ⊆ Aut(hat) is always asserted. With u surjective
    equality with Aut(hat) is asserted too; with u a retraction all
    identities are.
    """
    budget = resolve_budget(budget)
    with span("fmtbench.check_caut_identity", {"structure.size": c.base.size}):
        caut = {m.key() for m in color_automorphisms(c, budget=budget)}
        tilde = tilde_expansion(c)
        hat = hat_expansion(c)
        aut_tilde = {m.key() for m in automorphism_group(tilde, budget=budget)}
        aut_hat = {m.key() for m in automorphism_group(hat, budget=budget)}
        phi = {
            s.name: phi_relation(tilde, s.name) == _hat_relation(c, s.name)
            for s in c.base.signature
        }
        surjective = c.is_surjective()
        retraction = surjective and is_retraction(c, budget=budget).holds
    asserted = ["caut_subset_aut_hat"]
    if surjective:
        asserted.append("caut_equals_aut_hat")
    if retraction:
        asserted += ["caut_equals_aut_tilde", "phi_equals_hat"]
    return CAutReport(
        surjective=surjective,
        retraction=retraction,
        caut_order=len(caut),
        aut_hat_order=len(aut_hat),
        aut_tilde_order=len(aut_tilde),
        caut_subset_aut_hat=caut <= aut_hat,
        caut_equals_aut_hat=caut == aut_hat,
        caut_equals_aut_tilde=caut == aut_tilde,
        phi_equals_hat=phi,
        asserted=asserted,
    )


def check_saut_identity(c: ColoredStructure, *, budget: Optional[SearchBudget] = None) -> bool:
    """sAut(U, u) equals Aut(S(U, u)) as sets of maps."""
    budget = resolve_budget(budget)
    saut = {m.key() for m in strong_automorphisms(c, budget=budget)}
    return saut == {m.key() for m in automorphism_group(encode_S(c), budget=budget)}


def stabilizer_check(c: ColoredStructure, *, budget: Optional[SearchBudget] = None) -> Optional[bool]:
    """
    With a co-retraction ι, the maps of cAut fixing ι(T) pointwise are
    strong. ``None`` when u is not a retraction.
    """
    budget = resolve_budget(budget)
    check = is_retraction(c, budget=budget)
    if check.coretraction is None:
        return None
    anchors = list(check.coretraction.mapping.values())
    saut = {m.key() for m in strong_automorphisms(c, budget=budget)}
    return all(
        m.key() in saut
        for m in color_automorphisms(c, budget=budget)
        if all(m(x) == x for x in anchors)
    )


# ---------------------------------------------------------------------------
# Universal approximants
# ---------------------------------------------------------------------------

class ColoredApproximant(BaseSchema):
    colored: ColoredStructure
    approximant: GenericApproximant = Field(..., description="The build over the encoded class")

    @computed_field  # type: ignore[prop-decorator]
    @property
    def complete(self) -> bool:
        return self.approximant.complete


def build_universal_colored(
    spec: ClassSpec,
    template: Structure,
    demand_size: int,
    stage_budget: int = DEFAULT_STAGE_BUDGET,
    *,
    seed: int = 0,
    budget: Optional[SearchBudget] = None,
) -> ColoredApproximant:
    """
    Build over the encoded class S(spec, T) and decode: colored one-point
    extension demands become ordinary demands of the encoded class.
    """
    with span("fmtbench.build_universal_colored", {"template.size": template.size}):
        approx = build_generic(
            encode_class(spec, template), demand_size, stage_budget, seed=seed, budget=budget
        )
        return ColoredApproximant(colored=decode_S(approx.structure, template), approximant=approx)


def verify_colored_homogeneity(
    c: ColoredStructure, part_size: int, depth: int, *, budget: Optional[SearchBudget] = None
) -> HomogeneityReport:
    """Back-and-forth for color-preserving partial isomorphisms."""
    with span("fmtbench.verify_colored_homogeneity", {"structure.size": c.base.size}):
        return BackAndForth(c.base, colors=c.color, budget=budget).check(part_size, depth)


def _template_maps(
    template: Structure,
    generators: Optional[Iterable[Union[Morphism, Mapping[ElementId, ElementId]]]],
    budget: Optional[SearchBudget],
) -> list[dict[Hashable, Hashable]]:
    group = (
        generate_group(generators, template) if generators is not None
        else automorphism_group(template, budget=budget)
    )
    return [dict(g.mapping) for g in group]


def verify_w_homogeneity(
    c: ColoredStructure,
    part_size: int,
    depth: int,
    *,
    generators: Optional[Iterable[Union[Morphism, Mapping[ElementId, ElementId]]]] = None,
    budget: Optional[SearchBudget] = None,
) -> HomogeneityReport:
    """
    Back-and-forth for partial isomorphisms p admitting some g in G with
    u∘p = g∘u; the same g must serve every extension step. G is generated
    by ``generators`` (default: all of Aut(T)).
    """
    group = _template_maps(c.template, generators, budget)
    with span("fmtbench.verify_w_homogeneity", {"structure.size": c.base.size, "group.order": len(group)}):
        return BackAndForth(c.base, colors=c.color, group=group, budget=budget).check(part_size, depth)


def verify_colored_universality(
    c: ColoredStructure,
    spec: ClassSpec,
    max_size: int,
    *,
    generators: Optional[Iterable[Union[Morphism, Mapping[ElementId, ElementId]]]] = None,
    budget: Optional[SearchBudget] = None,
) -> UniversalityReport:
    """
    Every T-colored member (A, a) of ``spec`` with at most ``max_size``
    elements embeds into (U, u): strongly by default, or up to some g of the
    group generated by ``generators``.
    """
    budget = resolve_budget(budget)
    group = [None] if generators is None else _template_maps(c.template, generators, budget)
    target_fibers: dict[ElementId, list[ElementId]] = {}
    for y in c.base.elements:
        target_fibers.setdefault(c.color[y], []).append(y)
    members = enumerate_members(encode_class(spec, c.template), max_size, budget=budget)
    missing: list[Structure] = []
    for encoded in members:
        small = decode_S(encoded, c.template)
        found = False
        for g in group:
            domains = {
                x: target_fibers.get(small.color[x] if g is None else g[small.color[x]], [])
                for x in small.base.elements
            }
            if find_morphism(small.base, c.base, MorphismKind.EMBEDDING, domains=domains, budget=budget) is not None:
                found = True
                break
        if not found:
            missing.append(encoded)
    return UniversalityReport(max_size=max_size, members_checked=len(members), missing=missing)
