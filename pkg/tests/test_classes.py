"""
Class specifications, membership, ages, amalgams and class properties.

Pinned by exhaustive search:
  CSP(K2) over graphs fails HAP at size 3 (edgeless pair, homomorphic
  image K2, path through a middle vertex: any amalgam has a triangle).
  EPPA: K2 is its own witness; the directed edge first gets one at size 3
  (the directed 3-cycle).
"""

from __future__ import annotations

import json

import pytest

from conftest import structure_doc
from fmtbench import SearchBudget
from fmtbench import generators as gen
from fmtbench.classes import (
    CSP,
    KLF,
    AllFinite,
    Explicit,
    ForbHom,
    age,
    check_property,
    class_spec_from_dict,
    enumerate_members,
    eppa_witness,
    free_amalgam,
    homo_amalgam,
    member,
    one_point_extensions,
    parse_class_spec,
    partial_isomorphisms,
    verify_pushout,
)
from fmtbench.exceptions import (
    BudgetExceededError,
    ClassSpecError,
    InputError,
    MorphismKindError,
    SignatureMismatchError,
)
from fmtbench.models import ClassProperty, MorphismKind
from fmtbench.morphisms import automorphism_group, find_morphism, is_isomorphic, iter_morphisms, make_morphism
from fmtbench.structures import (
    GRAPH_SIGNATURE,
    Signature,
    Structure,
    canonical_key,
    disjoint_union,
    empty_structure,
    induced_substructure,
    structure_to_dict,
    substructures,
)


# ===========================================================================
# Specifications
# ===========================================================================

class TestSpecParsing:

    def test_csp_document(self) -> None:
        doc = {"variant": "CSP", "graphs": True, "template": structure_doc([0, 1], [[0, 1], [1, 0]])}
        spec = parse_class_spec(json.dumps(doc))
        assert isinstance(spec, CSP)
        assert spec.sig == GRAPH_SIGNATURE

    def test_all_finite_needs_signature(self) -> None:
        with pytest.raises(ClassSpecError):
            class_spec_from_dict({"variant": "AllFinite"})

    def test_klf_link_must_be_link_structure(self) -> None:
        doc = {"variant": "KLF", "links": [structure_to_dict(gen.digraph(3, [(0, 1)]))]}
        with pytest.raises(ClassSpecError) as excinfo:
            class_spec_from_dict(doc)
        assert "link-structure" in str(excinfo.value)

    def test_klf_forbidden_must_be_packed(self, point: Structure) -> None:
        doc = {
            "variant": "KLF",
            "links": [structure_to_dict(point)],
            "forbidden": [structure_to_dict(gen.edgeless(2))],
        }
        with pytest.raises(ClassSpecError):
            class_spec_from_dict(doc)

    def test_mixed_signatures(self, k2: Structure) -> None:
        unary = gen.edgeless(1, Signature.of(("R", 1)))
        doc = {"variant": "ForbHom", "forbidden": [structure_to_dict(k2), structure_to_dict(unary)]}
        with pytest.raises(ClassSpecError):
            class_spec_from_dict(doc)

    def test_unknown_variant(self) -> None:
        with pytest.raises(InputError):
            class_spec_from_dict({"variant": "Everything"})


# ===========================================================================
# Membership
# ===========================================================================

class TestMember:

    def test_csp_two_colorable(self, bipartite: CSP, c4: Structure, k3: Structure) -> None:
        assert member(bipartite, c4)
        assert not member(bipartite, k3)

    def test_forbhom_triangle(self, triangle_free: ForbHom, k3: Structure, c4: Structure) -> None:
        assert not member(triangle_free, k3)
        assert member(triangle_free, c4)

    def test_klf_vertices_and_edges(self, point: Structure, k2: Structure, k3: Structure, c4: Structure) -> None:
        spec = KLF(links=[point, k2])
        assert member(spec, c4)
        assert member(spec, k3)
        assert not member(spec, gen.directed_edge())

    def test_klf_with_forbidden(self, point: Structure, k2: Structure, k3: Structure, c4: Structure) -> None:
        spec = KLF(links=[point, k2], forbidden=[k3])
        assert member(spec, c4)
        assert not member(spec, k3)

    def test_graphs_flag_rejects_loops(self, all_graphs: AllFinite, all_digraphs: AllFinite) -> None:
        assert not member(all_graphs, gen.loop())
        assert not member(all_graphs, gen.directed_edge())
        assert member(all_digraphs, gen.loop())

    def test_explicit_up_to_isomorphism(self, k2: Structure) -> None:
        spec = Explicit(structures=[k2])
        assert member(spec, gen.graph(2, [(1, 0)]))
        assert not member(spec, gen.edgeless(2))

    def test_signature_mismatch(self, bipartite: CSP) -> None:
        with pytest.raises(SignatureMismatchError):
            member(bipartite, gen.edgeless(1, Signature.of(("R", 1))))


# ===========================================================================
# Enumeration and ages
# ===========================================================================

class TestEnumeration:

    def test_one_point_extensions_of_point(self, point: Structure, all_graphs: AllFinite) -> None:
        exts = one_point_extensions(point, all_graphs)
        assert len(exts) == 2
        assert all(induced_substructure(b, ["0"]) == point for b in exts)

    def test_graphs_up_to_three(self, all_graphs: AllFinite) -> None:
        reps = enumerate_members(all_graphs, 3)
        assert [r.size for r in reps] == [0, 1, 2, 2, 3, 3, 3, 3]

    def test_triangle_free_up_to_three(self, triangle_free: ForbHom) -> None:
        assert len(enumerate_members(triangle_free, 3)) == 7

    def test_digraphs_up_to_two(self, all_digraphs: AllFinite) -> None:
        assert len(enumerate_members(all_digraphs, 2)) == 13

    def test_explicit_deduplicates(self, k2: Structure) -> None:
        spec = Explicit(structures=[k2, gen.graph(2, [(1, 0)]), gen.point()])
        assert len(enumerate_members(spec, 2)) == 2

    def test_repeat_call_is_charged_to_its_budget(self, all_graphs: AllFinite) -> None:
        assert len(enumerate_members(all_graphs, 3)) == 8
        with pytest.raises(BudgetExceededError):
            enumerate_members(all_graphs, 3, budget=SearchBudget(node_budget=1))

    def test_caller_memo_is_reused(self, all_graphs: AllFinite) -> None:
        memo: dict = {}
        first = enumerate_members(all_graphs, 3, memo=memo)
        assert len(memo) == 1
        again = enumerate_members(all_graphs, 3, budget=SearchBudget(node_budget=1), memo=memo)
        assert again == first
        again.clear()
        assert len(enumerate_members(all_graphs, 3, memo=memo)) == 8


class TestAge:

    def test_triangle(self, k3: Structure) -> None:
        assert [m.size for m in age(k3, 3)] == [0, 1, 2, 3]

    def test_edgeless_pair(self) -> None:
        assert len(age(gen.edgeless(2), 2)) == 3

    def test_bound_zero(self, c4: Structure) -> None:
        members = age(c4, 0)
        assert members == [empty_structure(GRAPH_SIGNATURE)]

    def test_c4_has_path_but_no_triangle(self, c4: Structure, p2: Structure) -> None:
        types = age(c4, 3)
        assert any(is_isomorphic(t, p2) for t in types)
        assert not any(is_isomorphic(t, gen.complete_graph(3)) for t in types)


# ===========================================================================
# Amalgams
# ===========================================================================

def _embed(a: Structure, b: Structure, mapping: dict[str, str]):
    return make_morphism(a, b, mapping, MorphismKind.EMBEDDING)


class TestFreeAmalgam:

    def test_two_edges_over_a_point(self, point: Structure, k2: Structure) -> None:
        f = _embed(point, k2, {"0": "0"})
        result = free_amalgam(f, f)
        assert result.amalgam.size == 3
        assert result.amalgam.tuple_count() == 4
        assert is_isomorphic(result.amalgam, gen.path(2))

    def test_empty_base_is_coproduct(self, empty_graph: Structure, k2: Structure, k3: Structure) -> None:
        f1 = _embed(empty_graph, k2, {})
        f2 = _embed(empty_graph, k3, {})
        result = free_amalgam(f1, f2)
        assert is_isomorphic(result.amalgam, disjoint_union(k2, k3))

    def test_two_triangles_over_an_edge(self, k2: Structure, k3: Structure) -> None:
        f = _embed(k2, k3, {"0": "0", "1": "1"})
        result = free_amalgam(f, f)
        c = result.amalgam
        assert c.size == 4
        assert c.tuple_count() == 10
        apex_left, apex_right = result.g1("2"), result.g2("2")
        assert apex_left != apex_right
        assert not c.holds("E", (apex_left, apex_right))

    def test_maps_are_embeddings(self, k2: Structure, k3: Structure) -> None:
        f = _embed(k2, k3, {"0": "0", "1": "1"})
        result = free_amalgam(f, f)
        assert result.g1.kind is MorphismKind.EMBEDDING
        assert result.g2.kind is MorphismKind.EMBEDDING

    def test_requires_embeddings(self, k2: Structure) -> None:
        fold = make_morphism(k2, k2, {"0": "0", "1": "1"})
        with pytest.raises(MorphismKindError):
            free_amalgam(fold, fold)

    def test_requires_common_domain(self, point: Structure, k2: Structure, k3: Structure) -> None:
        f1 = _embed(point, k2, {"0": "0"})
        f2 = _embed(k2, k3, {"0": "0", "1": "1"})
        with pytest.raises(MorphismKindError):
            free_amalgam(f1, f2)


class TestHomoAmalgam:

    def test_identifies_along_the_hom(self, k2: Structure, p2: Structure) -> None:
        pair = gen.edgeless(2)
        f1 = make_morphism(pair, k2, {"0": "0", "1": "1"})
        f2 = _embed(pair, p2, {"0": "0", "1": "2"})
        result = homo_amalgam(f1, f2)
        assert is_isomorphic(result.amalgam, gen.complete_graph(3))
        assert result.g1.kind is MorphismKind.EMBEDDING
        assert result.g2.kind is MorphismKind.HOM


class TestVerifyPushout:

    def test_two_triangles(self, k2: Structure, k3: Structure) -> None:
        f = _embed(k2, k3, {"0": "0", "1": "1"})
        r = free_amalgam(f, f)
        assert verify_pushout(r.amalgam, r.g1, r.g2, f, f, 3)

    def test_extra_apex_edge_breaks_it(self, k2: Structure, k3: Structure) -> None:
        f = _embed(k2, k3, {"0": "0", "1": "1"})
        r = free_amalgam(f, f)
        c = _with_tuple(r.amalgam, (r.g1("2"), r.g2("2")))
        g1 = make_morphism(k3, c, r.g1.mapping)
        g2 = make_morphism(k3, c, r.g2.mapping)
        assert not verify_pushout(c, g1, g2, f, f, 3)

    def test_coproduct(self, empty_graph: Structure, k2: Structure, point: Structure) -> None:
        f1 = _embed(empty_graph, k2, {})
        f2 = _embed(empty_graph, point, {})
        r = free_amalgam(f1, f2)
        assert verify_pushout(r.amalgam, r.g1, r.g2, f1, f2, 2)

    @pytest.mark.slow
    def test_all_small_graph_spans(self, all_graphs: AllFinite) -> None:
        reps = enumerate_members(all_graphs, 3)
        checked = 0
        for a in reps:
            for b1 in reps:
                for b2 in reps:
                    if a.size > min(b1.size, b2.size):
                        continue
                    for f1 in iter_morphisms(a, b1, MorphismKind.EMBEDDING):
                        f2 = next(iter_morphisms(a, b2, MorphismKind.EMBEDDING), None)
                        if f2 is None:
                            continue
                        r = free_amalgam(f1, f2)
                        assert verify_pushout(r.amalgam, r.g1, r.g2, f1, f2, 3)
                        checked += 1
                        left = [r.g1(x) for x in b1.elements if x not in f1.mapping.values()]
                        right = [r.g2(y) for y in b2.elements if y not in f2.mapping.values()]
                        for x in left:
                            for y in right:
                                c = _with_tuple(r.amalgam, (x, y))
                                g1 = make_morphism(b1, c, r.g1.mapping)
                                g2 = make_morphism(b2, c, r.g2.mapping)
                                assert not verify_pushout(c, g1, g2, f1, f2, 3)
        assert checked > 0


def _with_tuple(c: Structure, t: tuple[str, str]) -> Structure:
    return Structure.build(c.signature, c.elements, {"E": set(c.rel("E")) | {t}})


# ===========================================================================
# Class properties
# ===========================================================================

class TestCheckProperty:

    def test_graphs_amalgamate(self, all_graphs: AllFinite) -> None:
        report = check_property(all_graphs, ClassProperty.AP, 3)
        assert report.holds_up_to_bound
        assert report.counterexample is None
        assert report.witnesses_checked > 0

    def test_graphs_free_amalgamate(self, all_graphs: AllFinite) -> None:
        assert check_property(all_graphs, "FreeAP", 3).holds_up_to_bound

    def test_triangle_free_free_amalgamates(self, triangle_free: ForbHom) -> None:
        assert check_property(triangle_free, ClassProperty.FREE_AP, 3)

    def test_graphs_hereditary_and_joint(self, all_graphs: AllFinite) -> None:
        assert check_property(all_graphs, ClassProperty.HP, 3)
        assert check_property(all_graphs, ClassProperty.JEP, 2)

    def test_explicit_fails_hp(self, point: Structure, k2: Structure, k3: Structure) -> None:
        spec = Explicit(structures=[point, k2, k3], graphs=True)
        report = check_property(spec, ClassProperty.HP, 3)
        assert not report.holds_up_to_bound
        cex = report.counterexample
        assert cex is not None
        assert not member(spec, cex.base)
        # Every nonempty induced substructure of K3 is complete, so only ∅ is missing.
        assert cex.base.size == 0
        assert cex.left.size > 0

    def test_missing_edgeless_pair_reported_before_empty(self, point: Structure, k2: Structure, p2: Structure) -> None:
        spec = Explicit(structures=[point, k2, p2], graphs=True)
        report = check_property(spec, ClassProperty.HP, 3)
        assert not report.holds_up_to_bound
        cex = report.counterexample
        assert cex is not None
        assert cex.base.size == 2
        assert cex.base.tuple_count() == 0
        assert is_isomorphic(cex.left, p2)

    def test_explicit_fails_jep(self, point: Structure, k2: Structure) -> None:
        spec = Explicit(structures=[empty_structure(GRAPH_SIGNATURE), point, k2, gen.edgeless(2)], graphs=True)
        report = check_property(spec, ClassProperty.JEP, 2)
        assert not report.holds_up_to_bound
        cex = report.counterexample
        assert cex is not None and cex.right is not None
        assert {cex.left.tuple_count(), cex.right.tuple_count()} == {0, 2}

    def test_bipartite_fails_hap(self, bipartite: CSP) -> None:
        report = check_property(bipartite, ClassProperty.HAP, 3)
        assert not report.holds_up_to_bound
        cex = report.counterexample
        assert cex is not None
        # The counterexample re-verifies: no amalgam within the bound.
        f1 = make_morphism(cex.base, cex.left, cex.f1)
        f2 = make_morphism(cex.base, cex.right, cex.f2, MorphismKind.EMBEDDING)
        assert not member(bipartite, homo_amalgam(f1, f2).amalgam)

    @pytest.mark.parametrize("order", [(0, 1, 2, 3), (0, 1, 3, 2)])
    def test_hap_visits_both_orders_of_a_pair(self, order: tuple[int, ...], point: Structure, k2: Structure) -> None:
        # Graphs on at most two vertices: ∅ → E2 (hom) and ∅ → K2 (embedding)
        # have no amalgam, since E2 must stay edgeless inside a 2-vertex member.
        listed = [empty_structure(GRAPH_SIGNATURE), point, k2, gen.edgeless(2)]
        spec = Explicit(structures=[listed[i] for i in order], graphs=True)
        report = check_property(spec, ClassProperty.HAP, 2)
        assert not report.holds_up_to_bound
        cex = report.counterexample
        assert cex is not None and cex.right is not None
        assert cex.base.size == 0
        assert cex.left.size == 2 and cex.left.tuple_count() == 0
        assert cex.right.tuple_count() == 2

    def test_graphs_homo_amalgamate(self, all_graphs: AllFinite) -> None:
        report = check_property(all_graphs, ClassProperty.HAP, 2)
        assert report.holds_up_to_bound
        # Ordered pairs: more instances than the symmetric AP sweep.
        assert report.witnesses_checked > check_property(all_graphs, ClassProperty.AP, 2).witnesses_checked

    def test_triangle_free_homo_amalgamates_up_to_two(self, triangle_free: ForbHom) -> None:
        assert check_property(triangle_free, ClassProperty.HAP, 2)

    def test_bool_is_verdict(self, all_graphs: AllFinite) -> None:
        report = check_property(all_graphs, ClassProperty.HP, 2)
        assert bool(report) is report.holds_up_to_bound


class TestClassInvariants:

    def test_csp_closed_under_disjoint_union(self, all_graphs: AllFinite, bipartite: CSP) -> None:
        reps = enumerate_members(all_graphs, 3)
        for a in reps:
            for b in reps:
                assert member(bipartite, disjoint_union(a, b)) == (member(bipartite, a) and member(bipartite, b))

    def test_csp_closed_under_inverse_homomorphisms(self, all_graphs: AllFinite, bipartite: CSP) -> None:
        reps = enumerate_members(all_graphs, 4)
        targets = [b for b in reps if member(bipartite, b)]
        for a in reps:
            if any(find_morphism(a, b) is not None for b in targets):
                assert member(bipartite, a)

    @pytest.mark.parametrize("name", ["k3", "c4", "p2", "dpath2"])
    def test_age_monotone_in_bound(self, name: str, request: pytest.FixtureRequest) -> None:
        a = request.getfixturevalue(name)
        previous: set = set()
        for n in range(a.size + 2):
            keys = {canonical_key(m) for m in age(a, n)}
            assert previous <= keys
            previous = keys

    @pytest.mark.parametrize("name", ["k3", "c4", "p2", "dpath2"])
    def test_age_closed_under_substructures(self, name: str, request: pytest.FixtureRequest) -> None:
        a = request.getfixturevalue(name)
        members = age(a, a.size)
        keys = {canonical_key(m) for m in members}
        for m in members:
            for subset in substructures(m):
                assert canonical_key(induced_substructure(m, subset)) in keys

    def test_age_of_a_member_stays_in_a_hereditary_class(self, c4: Structure, bipartite: CSP) -> None:
        assert all(member(bipartite, m) for m in age(c4, 4))

    def test_klf_closed_under_free_amalgamation(self, point: Structure, k2: Structure, k3: Structure) -> None:
        spec = KLF(links=[point, k2], forbidden=[k3], graphs=True)
        reps = enumerate_members(spec, 3)
        bases = [r for r in reps if r.size <= 2]
        for a in bases:
            for b1 in reps:
                for b2 in reps:
                    for f1 in iter_morphisms(a, b1, MorphismKind.EMBEDDING):
                        f2 = find_morphism(a, b2, MorphismKind.EMBEDDING)
                        if f2 is None:
                            break
                        assert member(spec, free_amalgam(f1, f2).amalgam)

    def test_klf_free_ap_report(self, point: Structure, k2: Structure, k3: Structure) -> None:
        spec = KLF(links=[point, k2], forbidden=[k3], graphs=True)
        assert check_property(spec, ClassProperty.FREE_AP, 3)


# ===========================================================================
# EPPA
# ===========================================================================

class TestEppa:

    def test_point_is_its_own_witness(self, point: Structure, all_graphs: AllFinite) -> None:
        assert eppa_witness(point, all_graphs, 1) == point

    def test_edge(self, k2: Structure, all_graphs: AllFinite) -> None:
        witness = eppa_witness(k2, all_graphs, 4)
        assert witness is not None
        assert witness.size == 2

    def test_directed_edge(self, dedge: Structure, all_digraphs: AllFinite) -> None:
        witness = eppa_witness(dedge, all_digraphs, 6)
        assert witness is not None
        assert witness.size == 3
        assert induced_substructure(witness, dedge.elements) == dedge
        for p in partial_isomorphisms(dedge):
            assert find_morphism(witness, witness, MorphismKind.ISO, fixed=p) is not None
        assert len(automorphism_group(witness)) == 3

    def test_directed_edge_bound_too_small(self, dedge: Structure, all_digraphs: AllFinite) -> None:
        assert eppa_witness(dedge, all_digraphs, 2) is None

    def test_non_member_rejected(self, k3: Structure, bipartite: CSP) -> None:
        with pytest.raises(ClassSpecError):
            eppa_witness(k3, bipartite, 4)
