"""
Tests for the fmtbench CLI.

Exit codes:
  0  success / verdict "yes"
  1  verdict "no" (counterexample in the output)
  2  search budget exceeded
  3  malformed or invalid input

JSON is read from ``result.stdout``; error panels go to stderr.
"""

from __future__ import annotations

import json
from pathlib import Path

import pytest
from typer.testing import CliRunner

from conftest import structure_doc, write_json, write_structure
from fmtbench import generators as gen
from fmtbench.cli.main import app
from fmtbench.colored import ColoredStructure
from fmtbench.structures import Structure, structure_to_dict

runner = CliRunner()


@pytest.fixture
def files(tmp_path: Path, k2: Structure, k3: Structure, c4: Structure, p2: Structure, dpath2: Structure) -> dict[str, str]:
    return {
        "k2": str(write_structure(tmp_path / "k2.json", k2)),
        "k3": str(write_structure(tmp_path / "k3.json", k3)),
        "c4": str(write_structure(tmp_path / "c4.json", c4)),
        "p2": str(write_structure(tmp_path / "p2.json", p2)),
        "dpath2": str(write_structure(tmp_path / "dpath2.json", dpath2)),
    }


def _json(result) -> dict:
    return json.loads(result.stdout)


# ===========================================================================
# morphisms
# ===========================================================================

class TestHom:

    def test_c4_maps_to_k2(self, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["hom", files["c4"], files["k2"], "--json"])
        assert result.exit_code == 0, result.output
        payload = _json(result)
        assert payload["found"] is True
        assert payload["kind"] == "hom"
        assert set(payload["map"]) == {"0", "1", "2", "3"}

    def test_k3_does_not_map_to_k2(self, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["hom", files["k3"], files["k2"], "--json"])
        assert result.exit_code == 1
        assert _json(result) == {"found": False, "kind": "hom"}

    def test_table_output(self, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["hom", files["c4"], files["k2"]])
        assert result.exit_code == 0, result.output
        assert "hom found" in result.stdout

    def test_fixed_map(self, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["hom", files["c4"], files["k2"], "--fixed", '{"0": "1"}', "--json"])
        assert result.exit_code == 0, result.output
        assert _json(result)["map"]["0"] == "1"

    def test_fixed_map_to_unknown_element(self, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["hom", files["c4"], files["k2"], "--fixed", '{"0": "9"}'])
        assert result.exit_code == 3

    def test_fixed_map_not_json(self, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["hom", files["c4"], files["k2"], "--fixed", "0->1"])
        assert result.exit_code == 3

    def test_embedding_kind(self, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["hom", files["p2"], files["c4"], "--kind", "embedding", "--json"])
        assert result.exit_code == 0, result.output
        assert _json(result)["kind"] == "embedding"

    def test_malformed_input(self, tmp_path: Path, files: dict[str, str]) -> None:
        bad = tmp_path / "bad.json"
        bad.write_text('{"signature": [', encoding="utf-8")
        result = runner.invoke(app, ["hom", str(bad), files["k2"]])
        assert result.exit_code == 3

    def test_unknown_element_in_tuple(self, tmp_path: Path, files: dict[str, str]) -> None:
        bad = write_json(tmp_path / "bad.json", structure_doc([0, 1], [[0, 5]]))
        result = runner.invoke(app, ["hom", str(bad), files["k2"]])
        assert result.exit_code == 3

    def test_missing_file(self, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["hom", "/nonexistent/a.json", files["k2"]])
        assert result.exit_code == 3

    def test_stdin(self, files: dict[str, str], c4: Structure) -> None:
        result = runner.invoke(app, ["hom", "-", files["k2"], "--json"], input=json.dumps(structure_to_dict(c4)))
        assert result.exit_code == 0, result.output

    def test_budget_exceeded(self, tmp_path: Path) -> None:
        big = write_structure(tmp_path / "k5.json", gen.complete_graph(5))
        k4 = write_structure(tmp_path / "k4.json", gen.complete_graph(4))
        result = runner.invoke(app, ["--node-budget", "3", "hom", str(big), str(k4)])
        assert result.exit_code == 2

    def test_same_seed_same_bytes(self, files: dict[str, str]) -> None:
        first = runner.invoke(app, ["--seed", "4", "hom", files["c4"], files["k2"], "--json"])
        second = runner.invoke(app, ["--seed", "4", "hom", files["c4"], files["k2"], "--json"])
        assert first.stdout == second.stdout


class TestMorphismCommands:

    def test_iso(self, tmp_path: Path, files: dict[str, str]) -> None:
        other = write_structure(tmp_path / "c4b.json", gen.graph(4, [(0, 2), (2, 1), (1, 3), (3, 0)]))
        result = runner.invoke(app, ["iso", files["c4"], str(other), "--json"])
        assert result.exit_code == 0, result.output

    def test_embed_fails(self, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["embed", files["k3"], files["c4"], "--json"])
        assert result.exit_code == 1

    def test_core_of_c4(self, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["core", files["c4"], "--json"])
        assert result.exit_code == 0, result.output
        payload = _json(result)
        assert len(payload["core"]["elements"]) == 2
        assert payload["is_core"] is False

    def test_endos_count(self, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["endos", files["k3"], "--count", "--json"])
        assert result.exit_code == 0, result.output
        assert _json(result) == {"count": 6}

    def test_auts(self, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["auts", files["c4"], "--json"])
        assert result.exit_code == 0, result.output
        payload = _json(result)
        assert payload["order"] == 8
        assert payload["automorphisms"][0] == {"0": "0", "1": "1", "2": "2", "3": "3"}

    def test_hh_check_path(self, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["hh-check", files["p2"], "--json"])
        assert result.exit_code == 1
        assert _json(result)["holds"] is False

    def test_hh_check_triangle(self, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["hh-check", files["k3"]])
        assert result.exit_code == 0, result.output

    def test_dot(self, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["dot", files["k2"], "--name", "edge"])
        assert result.exit_code == 0, result.output
        assert "edge" in result.stdout


# ===========================================================================
# classes
# ===========================================================================

@pytest.fixture
def bipartite_file(tmp_path: Path, k2: Structure) -> str:
    return str(write_json(tmp_path / "bip.json", {
        "variant": "CSP", "graphs": True, "template": structure_to_dict(k2),
    }))


@pytest.fixture
def graphs_file(tmp_path: Path) -> str:
    return str(write_json(tmp_path / "graphs.json", {
        "variant": "AllFinite", "graphs": True, "signature": [{"name": "E", "arity": 2}],
    }))


class TestClasses:

    def test_member(self, bipartite_file: str, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["member", bipartite_file, files["c4"], "--json"])
        assert result.exit_code == 0, result.output
        assert _json(result) == {"member": True, "variant": "CSP"}

    def test_not_member(self, bipartite_file: str, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["member", bipartite_file, files["k3"]])
        assert result.exit_code == 1

    def test_bad_spec(self, tmp_path: Path, files: dict[str, str]) -> None:
        spec = write_json(tmp_path / "spec.json", {"variant": "AllFinite"})
        result = runner.invoke(app, ["member", str(spec), files["k2"]])
        assert result.exit_code == 3

    def test_age(self, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["age", files["k3"], "-n", "3", "--json"])
        assert result.exit_code == 0, result.output
        assert len(_json(result)["members"]) == 4

    def test_check_ap(self, graphs_file: str) -> None:
        result = runner.invoke(app, ["check-ap", graphs_file, "--bound", "2", "--json"])
        assert result.exit_code == 0, result.output
        payload = _json(result)
        assert payload["property"] == "AP"
        assert payload["holds_up_to_bound"] is True

    def test_check_hap_fails(self, bipartite_file: str) -> None:
        result = runner.invoke(app, ["check-hap", bipartite_file, "-n", "3", "--json"])
        assert result.exit_code == 1
        assert _json(result)["counterexample"] is not None

    def test_check_hp(self, graphs_file: str) -> None:
        result = runner.invoke(app, ["check-hp", graphs_file, "-n", "2"])
        assert result.exit_code == 0, result.output

    def test_check_jep(self, graphs_file: str) -> None:
        result = runner.invoke(app, ["check-jep", graphs_file, "-n", "2", "--json"])
        assert result.exit_code == 0, result.output

    def test_check_free_ap(self, graphs_file: str) -> None:
        result = runner.invoke(app, ["check-ap", graphs_file, "-n", "2", "--free", "--json"])
        assert result.exit_code == 0, result.output
        assert _json(result)["property"] == "FreeAP"


@pytest.fixture
def span_file(tmp_path: Path, k2: Structure, k3: Structure) -> str:
    return str(write_json(tmp_path / "span.json", {
        "base": structure_to_dict(k2),
        "left": structure_to_dict(k3),
        "right": structure_to_dict(k3),
        "f1": {"0": "0", "1": "1"},
        "f2": {"0": "0", "1": "1"},
    }))


class TestAmalgams:

    def test_amalgam(self, span_file: str) -> None:
        result = runner.invoke(app, ["amalgam", span_file, "--json"])
        assert result.exit_code == 0, result.output
        amalgam = _json(result)["amalgam"]
        assert len(amalgam["elements"]) == 4
        assert len(amalgam["relations"]["E"]) == 10

    def test_pushout(self, span_file: str) -> None:
        result = runner.invoke(app, ["pushout", span_file, "--probe-bound", "2", "--json"])
        assert result.exit_code == 0, result.output
        assert _json(result)["pushout"] is True

    def test_span_missing_map(self, tmp_path: Path, k2: Structure) -> None:
        bad = write_json(tmp_path / "span.json", {
            "base": structure_to_dict(k2), "left": structure_to_dict(k2), "right": structure_to_dict(k2),
        })
        result = runner.invoke(app, ["amalgam", str(bad)])
        assert result.exit_code == 3

    def test_span_map_not_embedding(self, tmp_path: Path, k2: Structure, p2: Structure) -> None:
        bad = write_json(tmp_path / "span.json", {
            "base": structure_to_dict(gen.edgeless(2)),
            "left": structure_to_dict(k2),
            "right": structure_to_dict(p2),
            "f1": {"0": "0", "1": "1"},
            "f2": {"0": "0", "1": "2"},
        })
        assert runner.invoke(app, ["amalgam", str(bad)]).exit_code == 3
        result = runner.invoke(app, ["amalgam", str(bad), "--homo", "--json"])
        assert result.exit_code == 0, result.output
        assert len(_json(result)["amalgam"]["elements"]) == 3

    def test_eppa(self, tmp_path: Path, dedge: Structure) -> None:
        spec = write_json(tmp_path / "digraphs.json", {
            "variant": "AllFinite", "signature": [{"name": "E", "arity": 2}],
        })
        a = write_structure(tmp_path / "dedge.json", dedge)
        result = runner.invoke(app, ["eppa", str(spec), str(a), "--size-bound", "4", "--json"])
        assert result.exit_code == 0, result.output
        assert len(_json(result)["witness"]["elements"]) == 3


# ===========================================================================
# fraisse
# ===========================================================================

class TestFraisse:

    def test_generic(self, graphs_file: str) -> None:
        result = runner.invoke(app, ["generic", graphs_file, "-k", "1", "--json"])
        assert result.exit_code == 0, result.output
        payload = _json(result)
        assert payload["approximant"]["complete"] is True
        assert "realized_extensions" not in payload["approximant"]
        assert payload["extension_report"]["passed"] is True

    def test_generic_with_log(self, graphs_file: str) -> None:
        result = runner.invoke(app, ["generic", graphs_file, "-k", "1", "--log", "--json"])
        assert result.exit_code == 0, result.output
        assert _json(result)["approximant"]["realized_extensions"]

    def test_generic_is_reproducible(self, graphs_file: str) -> None:
        first = runner.invoke(app, ["--seed", "3", "generic", graphs_file, "-k", "1", "--json"])
        second = runner.invoke(app, ["--seed", "3", "generic", graphs_file, "-k", "1", "--json"])
        assert first.stdout == second.stdout
        assert _json(first)["approximant"]["seed"] == 3

    def test_generic_stage_budget(self, graphs_file: str) -> None:
        result = runner.invoke(app, ["generic", graphs_file, "-k", "2", "--stages", "1", "--json"])
        assert result.exit_code == 1
        assert _json(result)["approximant"]["complete"] is False

    def test_generic_refused(self, tmp_path: Path, k2: Structure) -> None:
        spec = write_json(tmp_path / "spec.json", {
            "variant": "Explicit", "graphs": True,
            "structures": [
                structure_to_dict(gen.edgeless(0)),
                structure_to_dict(gen.point()),
                structure_to_dict(k2),
                structure_to_dict(gen.edgeless(2)),
            ],
        })
        result = runner.invoke(app, ["generic", str(spec), "-k", "2"])
        assert result.exit_code == 1
        assert "AmalgamationRefusedError" in result.output
        assert "counterexample" in result.output

    def test_generic_closure_depth(self, graphs_file: str) -> None:
        result = runner.invoke(app, ["generic", graphs_file, "-k", "1", "--closure-depth", "2", "--json"])
        assert result.exit_code == 0, result.output
        payload = _json(result)
        assert payload["approximant"]["closure_depth"] == 2
        assert payload["extension_report"]["k"] == 3
        assert payload["extension_report"]["passed"] is True

    def test_ext_check(self, graphs_file: str, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["ext-check", graphs_file, files["k2"], "-k", "2", "--json"])
        assert result.exit_code == 1
        assert _json(result)["passed"] is False

    def test_homog_check(self, files: dict[str, str]) -> None:
        assert runner.invoke(app, ["homog-check", files["dpath2"], "--part-size", "1"]).exit_code == 1
        result = runner.invoke(app, ["homog-check", files["k3"], "--json"])
        assert result.exit_code == 0, result.output
        assert _json(result)["stuck_count"] == 0


# ===========================================================================
# colored
# ===========================================================================

@pytest.fixture
def colored_files(tmp_path: Path, k2_identity: ColoredStructure, c4_two_colored: ColoredStructure, k2: Structure) -> dict[str, str]:
    return {
        "k2id": str(write_json(tmp_path / "k2id.json", k2_identity.to_document())),
        "c4col": str(write_json(tmp_path / "c4col.json", c4_two_colored.to_document())),
        "template": str(write_structure(tmp_path / "template.json", k2)),
    }


class TestColored:

    def test_colored_auts(self, colored_files: dict[str, str]) -> None:
        result = runner.invoke(app, ["colored-auts", colored_files["k2id"], "--json"])
        assert result.exit_code == 0, result.output
        payload = _json(result)
        assert len(payload["saut"]) == 1
        assert len(payload["waut"]) == 2
        assert len(payload["caut"]) == 2
        assert payload["saut_equals_aut_S"] is True

    def test_colored_orbits(self, colored_files: dict[str, str]) -> None:
        strong = runner.invoke(app, ["colored-orbits", colored_files["k2id"], "-n", "1", "--json"])
        color = runner.invoke(app, ["colored-orbits", colored_files["k2id"], "-n", "1", "--mode", "color", "--json"])
        assert _json(strong) == {"n": 1, "mode": "strong", "orbits": 2}
        assert _json(color)["orbits"] == 1

    def test_encode_then_decode(self, tmp_path: Path, colored_files: dict[str, str]) -> None:
        encoded = runner.invoke(app, ["encode-s", colored_files["c4col"], "--json"])
        assert encoded.exit_code == 0, encoded.output
        names = [s["name"] for s in _json(encoded)["signature"]]
        assert names == ["E", "M_0", "M_1"]
        s_path = tmp_path / "s.json"
        s_path.write_text(encoded.stdout, encoding="utf-8")
        decoded = runner.invoke(app, ["decode-s", str(s_path), colored_files["template"], "--json"])
        assert decoded.exit_code == 0, decoded.output
        assert _json(decoded)["color"] == {"0": "0", "1": "1", "2": "0", "3": "1"}

    def test_decode_failure(self, tmp_path: Path, colored_files: dict[str, str], k2: Structure) -> None:
        s_path = write_structure(tmp_path / "k2.json", k2)
        result = runner.invoke(app, ["decode-s", str(s_path), colored_files["template"]])
        assert result.exit_code == 3

    def test_tilde_and_hat(self, colored_files: dict[str, str]) -> None:
        tilde = runner.invoke(app, ["tilde", colored_files["c4col"], "--json"])
        hat = runner.invoke(app, ["hat", colored_files["c4col"], "--json"])
        assert tilde.exit_code == 0 and hat.exit_code == 0
        assert len(_json(tilde)["relations"]["kappa"]) == 8
        assert "E_hat" in _json(hat)["relations"]

    def test_check_caut(self, colored_files: dict[str, str]) -> None:
        result = runner.invoke(app, ["check-caut", colored_files["c4col"], "--json"])
        assert result.exit_code == 0, result.output
        assert _json(result)["consistent"] is True

    def test_retraction(self, colored_files: dict[str, str]) -> None:
        result = runner.invoke(app, ["retraction", colored_files["k2id"], "--json"])
        assert result.exit_code == 0, result.output
        assert _json(result)["retraction"] is True

    def test_bad_coloring(self, tmp_path: Path, k2: Structure) -> None:
        doc = structure_to_dict(k2)
        doc["template"] = structure_to_dict(k2)
        doc["color"] = {"0": "0", "1": "0"}
        bad = write_json(tmp_path / "bad.json", doc)
        assert runner.invoke(app, ["retraction", str(bad)]).exit_code == 3

    def test_colored_build(self, graphs_file: str, colored_files: dict[str, str]) -> None:
        result = runner.invoke(app, ["colored-build", graphs_file, colored_files["template"], "-k", "1", "--json"])
        assert result.exit_code == 0, result.output
        payload = _json(result)
        assert payload["complete"] is True
        assert payload["unmet"] == 0

    def test_colored_homog_check(self, colored_files: dict[str, str]) -> None:
        result = runner.invoke(app, [
            "homog-check", colored_files["k2id"], "--colored", "--weak", "--part-size", "1", "--json",
        ])
        assert result.exit_code == 0, result.output
        assert _json(result)["maps_checked"] == 5


# ===========================================================================
# oligomorphy
# ===========================================================================

class TestOligomorphy:

    def test_pe_leq(self, files: dict[str, str]) -> None:
        result = runner.invoke(app, [
            "pe-leq", files["p2"], files["k2"], "--point-a", "0,2", "--point-b", "0,0", "--json",
        ])
        assert result.exit_code == 0, result.output
        assert _json(result) == {"leq": True}

    def test_pe_leq_length_mismatch(self, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["pe-leq", files["k2"], files["k2"], "--point-a", "0"])
        assert result.exit_code == 3

    def test_pe_types(self, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["pe-types", files["k3"], "-n", "2", "--json"])
        assert _json(result) == {"n": 2, "pe_types": 2}

    def test_orbits(self, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["orbits", files["c4"], "-n", "2", "--json"])
        assert _json(result) == {"n": 2, "orbits": 3}

    def test_worn_check(self, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["worn-check", files["c4"], files["k2"], "--age-bound", "4", "--json"])
        assert result.exit_code == 0, result.output
        assert _json(result)["agree"] is True

    def test_worn_check_low_bound(self, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["worn-check", files["k3"], files["k2"], "--age-bound", "2", "--json"])
        assert result.exit_code == 1
        assert _json(result)["bound_sufficient"] is False

    def test_olig_report(self, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["olig-report", files["k3"], "--max-n", "2", "--json"])
        assert result.exit_code == 0, result.output
        payload = _json(result)
        assert payload["kind"] == "weak"
        assert payload["coarsening_holds"] is True
        strong = runner.invoke(app, ["olig-report", files["k3"], "--strong", "--json"])
        assert _json(strong)["kind"] == "strong"


# ===========================================================================
# config
# ===========================================================================

class TestConfig:

    def test_set_then_show(self, isolated_config: Path) -> None:
        result = runner.invoke(app, ["config", "set", "seed", "11"])
        assert result.exit_code == 0, result.output
        assert isolated_config.exists()
        shown = runner.invoke(app, ["config", "show", "--json"])
        assert shown.exit_code == 0, shown.output
        payload = _json(shown)
        assert payload["stored"] == {"seed": 11}
        assert payload["resolved"]["seed"] == 11

    def test_show_honours_global_format(self) -> None:
        runner.invoke(app, ["config", "set", "seed", "11"])
        result = runner.invoke(app, ["--format", "json", "config", "show"])
        assert result.exit_code == 0, result.output
        assert _json(result)["stored"] == {"seed": 11}

    def test_show_reports_global_flags(self) -> None:
        payload = _json(runner.invoke(app, ["--seed", "4", "config", "show", "--json"]))
        assert payload["resolved"]["seed"] == 4

    def test_env_overrides_file(self, monkeypatch: pytest.MonkeyPatch) -> None:
        runner.invoke(app, ["config", "set", "seed", "11"])
        monkeypatch.setenv("FMTBENCH_SEED", "5")
        payload = _json(runner.invoke(app, ["config", "show", "--json"]))
        assert payload["resolved"]["seed"] == 5

    def test_format_setting_is_lowercased(self) -> None:
        result = runner.invoke(app, ["config", "set", "output_format", "JSON"])
        assert result.exit_code == 0, result.output
        payload = _json(runner.invoke(app, ["config", "show", "--json"]))
        assert payload["stored"]["output_format"] == "json"

    def test_stored_format_applies(self, files: dict[str, str]) -> None:
        runner.invoke(app, ["config", "set", "output_format", "json"])
        result = runner.invoke(app, ["pe-types", files["k3"]])
        assert _json(result) == {"n": 1, "pe_types": 1}

    def test_unknown_key(self) -> None:
        result = runner.invoke(app, ["config", "set", "colour", "red"])
        assert result.exit_code == 3

    def test_invalid_value(self) -> None:
        result = runner.invoke(app, ["config", "set", "node_budget", "0"])
        assert result.exit_code == 3

    def test_invalid_flag_value(self, files: dict[str, str]) -> None:
        result = runner.invoke(app, ["--node-budget", "0", "orbits", files["k3"]])
        assert result.exit_code == 3
