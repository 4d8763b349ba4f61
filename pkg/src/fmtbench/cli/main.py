"""
fmtbench - finite model theory workbench CLI

Entry point: fmtbench [global options] <command> [options]

Sections of this file:
  morphisms    - hom / embed / iso / core / endos / auts / hh-check / dot
  classes      - member / age / check-hp / check-jep / check-ap / check-hap /
                 amalgam / pushout / eppa
  fraisse      - generic / ext-check / homog-check
  colored      - colored-build / colored-auts / colored-orbits / encode-s /
                 decode-s / tilde / hat / check-caut / retraction
  oligomorphy  - pe-leq / pe-types / orbits / worn-check / olig-report
  config       - show / set

Exit codes: 0 = success or verdict "yes", 1 = verdict "no" (with the
counterexample in the output), 2 = search budget exceeded, 3 = bad input.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Annotated, Any, Optional

import typer
from pydantic import ValidationError

from fmtbench.classes import (
    check_property,
    eppa_witness,
    free_amalgam,
    homo_amalgam,
    member,
    verify_pushout,
)
from fmtbench.classes import age as class_age
from fmtbench.colored import (
    build_universal_colored,
    check_caut_identity,
    check_saut_identity,
    color_automorphisms,
    count_colored_orbits,
    decode_S,
    encode_S,
    hat_expansion,
    is_retraction,
    stabilizer_check,
    strong_automorphisms,
    tilde_expansion,
    verify_colored_homogeneity,
    verify_w_homogeneity,
    weak_automorphisms,
)
from fmtbench.exceptions import StructureParseError
from fmtbench.fraisse import build_generic, verify_extension_property, verify_homogeneity
from fmtbench.models import ClassProperty, MorphismKind, OrbitMode, OutputFormat
from fmtbench.morphisms import (
    automorphism_group,
    core,
    count_homomorphisms,
    endomorphisms,
    find_isomorphism,
    find_morphism,
    is_homomorphism_homogeneous,
    make_morphism,
)
from fmtbench.oligomorphy import (
    check_woRN,
    count_orbits,
    count_pe_types,
    is_oligomorphic_report,
    is_weakly_oligomorphic_report,
    make_pointed,
    pe_type_leq,
)
from fmtbench.structures import Structure, structure_from_dict, structure_to_dict, to_dot

from ._inputs import (
    handled,
    load_colored,
    load_spec,
    load_structure,
    parse_map,
    parse_point,
    read_source,
    run_config,
    spinner,
)
from .config import config_path, load_config, resolve_run_config, save_config, validate_setting
from .output import (
    console,
    err_console,
    err_panel,
    kv_table,
    map_table,
    print_json,
    rows_table,
    structure_table,
    success_panel,
    verdict_panel,
)

# ---------------------------------------------------------------------------
# Root app
# ---------------------------------------------------------------------------

app = typer.Typer(
    name="fmtbench",
    help="Finite model theory workbench - homomorphisms, amalgamation classes, Fraïssé approximants.",
    no_args_is_help=True,
    rich_markup_mode="rich",
    add_completion=True,
)

config_app = typer.Typer(help="Show or change stored run settings.", no_args_is_help=True)
app.add_typer(config_app, name="config")

StructArg = Annotated[Path, typer.Argument(help="Structure JSON file (- for stdin).")]
SpecArg = Annotated[Path, typer.Argument(help="Class specification JSON file.")]
ColoredArg = Annotated[Path, typer.Argument(help="Colored structure JSON file.")]
JsonFlag = Annotated[bool, typer.Option("--json", help="Emit raw JSON (same as --format json).")]


@app.callback()
def root(
    ctx: typer.Context,
    seed: Annotated[Optional[int], typer.Option("--seed", help="Seed for randomized constructions.")] = None,
    node_budget: Annotated[Optional[int], typer.Option("--node-budget", help="Search nodes per command.")] = None,
    time_budget: Annotated[Optional[float], typer.Option("--time-budget", help="Seconds per command.")] = None,
    output_format: Annotated[
        Optional[OutputFormat], typer.Option("--format", help="json, table or dot.")
    ] = None,
) -> None:
    """Flags override FMTBENCH_* environment variables, which override config.toml."""
    try:
        ctx.obj = resolve_run_config({
            "seed": seed,
            "node_budget": node_budget,
            "time_budget": time_budget,
            "output_format": output_format,
        })
    except ValidationError as exc:
        err_console.print(err_panel(str(exc), title="Invalid run settings"))
        raise typer.Exit(3)


def _format(ctx: typer.Context, as_json: bool) -> OutputFormat:
    return OutputFormat.JSON if as_json else run_config(ctx).output_format


def _verdict(holds: bool) -> None:
    if not holds:
        raise typer.Exit(1)


# ===========================================================================
# morphisms
# ===========================================================================

def _morphism_command(
    ctx: typer.Context, a_path: Path, b_path: Path, kind: MorphismKind, fixed: Optional[str], as_json: bool
) -> None:
    fmt = _format(ctx, as_json)
    with handled():
        a, b = load_structure(a_path), load_structure(b_path)
        budget = run_config(ctx).budget()
        with spinner(f"Searching for a {kind.value}..."):
            if kind is MorphismKind.ISO and not fixed:
                found = find_isomorphism(a, b, budget=budget)
            else:
                found = find_morphism(a, b, kind, fixed=parse_map(fixed), budget=budget)

    if fmt is OutputFormat.JSON:
        print_json({"found": True, **found.to_document()} if found else {"found": False, "kind": kind.value})
    elif found:
        console.print(success_panel(f"{kind.value} found"))
        console.print(map_table(found.mapping))
    else:
        console.print(verdict_panel(False, "", f"No {kind.value} exists (complete search)."))
    _verdict(found is not None)


@app.command("hom")
def hom(
    ctx: typer.Context,
    a: StructArg,
    b: StructArg,
    kind: Annotated[MorphismKind, typer.Option("--kind", help="hom, mono, embedding or iso.")] = MorphismKind.HOM,
    fixed: Annotated[Optional[str], typer.Option("--fixed", help='Partial map as JSON, e.g. {"0": "1"}.')] = None,
    as_json: JsonFlag = False,
) -> None:
    """Search a homomorphism A → B (exit 1 when none exists)."""
    _morphism_command(ctx, a, b, kind, fixed, as_json)


@app.command("embed")
def embed(
    ctx: typer.Context,
    a: StructArg,
    b: StructArg,
    fixed: Annotated[Optional[str], typer.Option("--fixed", help="Partial map as JSON.")] = None,
    as_json: JsonFlag = False,
) -> None:
    """Search an embedding A ↪ B."""
    _morphism_command(ctx, a, b, MorphismKind.EMBEDDING, fixed, as_json)


@app.command("iso")
def iso(ctx: typer.Context, a: StructArg, b: StructArg, as_json: JsonFlag = False) -> None:
    """Search an isomorphism A ≅ B."""
    _morphism_command(ctx, a, b, MorphismKind.ISO, None, as_json)


@app.command("core")
def core_cmd(ctx: typer.Context, a: StructArg, as_json: JsonFlag = False) -> None:
    """Compute the core of A and a retraction onto it."""
    fmt = _format(ctx, as_json)
    with handled():
        s = load_structure(a)
        with spinner("Computing core..."):
            result = core(s, budget=run_config(ctx).budget())

    if fmt is OutputFormat.JSON:
        print_json({
            "core": structure_to_dict(result.core),
            "retraction": result.retraction.to_document(),
            "is_core": result.is_core,
        })
    elif fmt is OutputFormat.DOT:
        print(to_dot(result.core, "core"))
    else:
        console.print(structure_table(result.core, title=f"Core ({result.core.size} of {s.size} elements)"))
        console.print(map_table(result.retraction.mapping, title="Retraction"))


@app.command("endos")
def endos(
    ctx: typer.Context,
    a: StructArg,
    count: Annotated[bool, typer.Option("--count", help="Only count them.")] = False,
    as_json: JsonFlag = False,
) -> None:
    """List (or count) the endomorphisms of A."""
    fmt = _format(ctx, as_json)
    with handled():
        s = load_structure(a)
        budget = run_config(ctx).budget()
        with spinner("Enumerating endomorphisms..."):
            if count:
                n = count_homomorphisms(s, s, budget=budget)
                maps: list[dict[str, str]] = []
            else:
                maps = [dict(sorted(m.mapping.items())) for m in endomorphisms(s, budget=budget)]
                n = len(maps)

    if fmt is OutputFormat.JSON:
        print_json({"count": n} if count else {"count": n, "endomorphisms": maps})
        return
    console.print(kv_table([("Endomorphisms", n)]))
    if maps:
        console.print(rows_table(maps, columns=list(s.elements)))


@app.command("auts")
def auts(ctx: typer.Context, a: StructArg, as_json: JsonFlag = False) -> None:
    """Compute Aut(A), identity first."""
    fmt = _format(ctx, as_json)
    with handled():
        s = load_structure(a)
        with spinner("Enumerating automorphisms..."):
            group = automorphism_group(s, budget=run_config(ctx).budget())

    maps = [dict(sorted(m.mapping.items())) for m in group]
    if fmt is OutputFormat.JSON:
        print_json({"order": len(group), "automorphisms": maps})
        return
    console.print(kv_table([("Order", len(group))], title="Aut(A)"))
    console.print(rows_table(maps, columns=list(s.elements)))


@app.command("hh-check")
def hh_check(ctx: typer.Context, a: StructArg, as_json: JsonFlag = False) -> None:
    """Is every local homomorphism of A extendable to an endomorphism?"""
    fmt = _format(ctx, as_json)
    with handled():
        s = load_structure(a)
        with spinner("Checking local homomorphisms..."):
            result = is_homomorphism_homogeneous(s, budget=run_config(ctx).budget())

    if fmt is OutputFormat.JSON:
        print_json(result.model_dump(mode="json"))
    else:
        console.print(verdict_panel(
            result.holds,
            f"Homomorphism-homogeneous ({result.local_homs_checked} local homomorphisms checked)",
            f"Not homomorphism-homogeneous: {result.counterexample} does not extend",
        ))
    _verdict(result.holds)


@app.command("dot")
def dot(
    a: StructArg,
    name: Annotated[str, typer.Option("--name", help="Graph name.")] = "gaifman",
) -> None:
    """Export the Gaifman graph of A as Graphviz DOT."""
    with handled():
        print(to_dot(load_structure(a), name))


# ===========================================================================
# classes
# ===========================================================================

@app.command("member")
def member_cmd(ctx: typer.Context, spec: SpecArg, a: StructArg, as_json: JsonFlag = False) -> None:
    """Is A a member of the class?"""
    fmt = _format(ctx, as_json)
    with handled():
        cls, s = load_spec(spec), load_structure(a)
        holds = member(cls, s, budget=run_config(ctx).budget())

    if fmt is OutputFormat.JSON:
        print_json({"member": holds, "variant": cls.variant})
    else:
        console.print(verdict_panel(holds, f"Member of {cls.variant}", f"Not a member of {cls.variant}"))
    _verdict(holds)


@app.command("age")
def age_cmd(
    ctx: typer.Context,
    a: StructArg,
    max_size: Annotated[int, typer.Option("--max-size", "-n", min=0, help="Largest substructure size.")] = 3,
    as_json: JsonFlag = False,
) -> None:
    """Isomorphism types of induced substructures of A up to a size."""
    fmt = _format(ctx, as_json)
    with handled():
        s = load_structure(a)
        with spinner("Enumerating the age..."):
            members = class_age(s, max_size, budget=run_config(ctx).budget())

    if fmt is OutputFormat.JSON:
        print_json({"max_size": max_size, "members": [structure_to_dict(m) for m in members]})
        return
    rows = [{"size": m.size, "tuples": m.tuple_count(), "elements": ",".join(m.elements)} for m in members]
    console.print(rows_table(rows, title=f"Age up to {max_size} ({len(members)} types)"))


def _property_command(
    ctx: typer.Context, spec: Path, prop: ClassProperty, bound: int, witness_bound: Optional[int], as_json: bool
) -> None:
    fmt = _format(ctx, as_json)
    with handled():
        cls = load_spec(spec)
        with spinner(f"Checking {prop.value} up to size {bound}..."):
            report = check_property(cls, prop, bound, witness_bound, budget=run_config(ctx).budget())

    if fmt is OutputFormat.JSON:
        print_json(report.model_dump(mode="json"))
    else:
        console.print(verdict_panel(
            report.holds_up_to_bound,
            f"{prop.value} holds up to size {bound} ({report.witnesses_checked} instances)",
            f"{prop.value} fails: {report.counterexample.reason if report.counterexample else ''}",
        ))
        if report.counterexample is not None:
            cex = report.counterexample
            for label, s in (("A", cex.base), ("B1", cex.left), ("B2", cex.right)):
                if s is not None:
                    console.print(structure_table(s, title=label))
    _verdict(report.holds_up_to_bound)


BoundOpt = Annotated[int, typer.Option("--bound", "-n", min=0, help="Largest member size checked.")]
WitnessOpt = Annotated[Optional[int], typer.Option("--witness-bound", help="Largest amalgam size searched.")]


@app.command("check-hp")
def check_hp(ctx: typer.Context, spec: SpecArg, bound: BoundOpt = 3, as_json: JsonFlag = False) -> None:
    """Hereditary property up to a bound."""
    _property_command(ctx, spec, ClassProperty.HP, bound, None, as_json)


@app.command("check-jep")
def check_jep(
    ctx: typer.Context, spec: SpecArg, bound: BoundOpt = 3, witness_bound: WitnessOpt = None, as_json: JsonFlag = False
) -> None:
    """Joint embedding property up to a bound."""
    _property_command(ctx, spec, ClassProperty.JEP, bound, witness_bound, as_json)


@app.command("check-ap")
def check_ap(
    ctx: typer.Context,
    spec: SpecArg,
    bound: BoundOpt = 3,
    witness_bound: WitnessOpt = None,
    free: Annotated[bool, typer.Option("--free", help="Require the free amalgam itself (FreeAP).")] = False,
    as_json: JsonFlag = False,
) -> None:
    """Amalgamation property up to a bound."""
    prop = ClassProperty.FREE_AP if free else ClassProperty.AP
    _property_command(ctx, spec, prop, bound, witness_bound, as_json)


@app.command("check-hap")
def check_hap(
    ctx: typer.Context, spec: SpecArg, bound: BoundOpt = 3, witness_bound: WitnessOpt = None, as_json: JsonFlag = False
) -> None:
    """Homo-amalgamation property up to a bound."""
    _property_command(ctx, spec, ClassProperty.HAP, bound, witness_bound, as_json)


def _load_span(path: Path, homo: bool):
    """Span file: {"base": A, "left": B1, "right": B2, "f1": {...}, "f2": {...}}."""
    try:
        data = json.loads(read_source(path))
        a, b1, b2 = (structure_from_dict(data[k]) for k in ("base", "left", "right"))
        f1_map, f2_map = data["f1"], data["f2"]
    except json.JSONDecodeError as exc:
        raise StructureParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    except (KeyError, TypeError) as exc:
        raise StructureParseError(f"span file needs base, left, right, f1 and f2 ({exc})") from exc
    f1 = make_morphism(a, b1, f1_map, MorphismKind.HOM if homo else MorphismKind.EMBEDDING)
    f2 = make_morphism(a, b2, f2_map, MorphismKind.EMBEDDING)
    return f1, f2


@app.command("amalgam")
def amalgam(
    ctx: typer.Context,
    span_file: Annotated[Path, typer.Argument(help="Span JSON: base, left, right, f1, f2.")],
    homo: Annotated[bool, typer.Option("--homo", help="f1 is a homomorphism (homo-amalgam).")] = False,
    as_json: JsonFlag = False,
) -> None:
    """Free amalgam (or homo-amalgam) of a span B1 ← A → B2."""
    fmt = _format(ctx, as_json)
    with handled():
        f1, f2 = _load_span(span_file, homo)
        result = homo_amalgam(f1, f2) if homo else free_amalgam(f1, f2)

    if fmt is OutputFormat.JSON:
        print_json({
            "amalgam": structure_to_dict(result.amalgam),
            "g1": result.g1.to_document(),
            "g2": result.g2.to_document(),
        })
    elif fmt is OutputFormat.DOT:
        print(to_dot(result.amalgam, "amalgam"))
    else:
        console.print(structure_table(result.amalgam, title="Amalgam"))
        console.print(map_table(result.g2.mapping, title="g2: B2 → C"))


@app.command("pushout")
def pushout(
    ctx: typer.Context,
    span_file: Annotated[Path, typer.Argument(help="Span JSON: base, left, right, f1, f2.")],
    probe_bound: Annotated[int, typer.Option("--probe-bound", min=0, help="Largest probe structure.")] = 3,
    homo: Annotated[bool, typer.Option("--homo", help="f1 is a homomorphism (homo-amalgam).")] = False,
    as_json: JsonFlag = False,
) -> None:
    """Verify that the amalgam of a span is its pushout against small probes."""
    fmt = _format(ctx, as_json)
    with handled():
        f1, f2 = _load_span(span_file, homo)
        result = homo_amalgam(f1, f2) if homo else free_amalgam(f1, f2)
        with spinner("Probing the universal property..."):
            holds = verify_pushout(
                result.amalgam, result.g1, result.g2, f1, f2, probe_bound, budget=run_config(ctx).budget()
            )

    if fmt is OutputFormat.JSON:
        print_json({"pushout": holds, "probe_bound": probe_bound, "amalgam": structure_to_dict(result.amalgam)})
    else:
        console.print(verdict_panel(
            holds, f"Pushout against every probe with ≤ {probe_bound} elements", "Universal property fails"
        ))
    _verdict(holds)


@app.command("eppa")
def eppa(
    ctx: typer.Context,
    spec: SpecArg,
    a: StructArg,
    size_bound: Annotated[int, typer.Option("--size-bound", "-n", min=0, help="Largest witness size.")] = 6,
    as_json: JsonFlag = False,
) -> None:
    """Search a structure in which every partial isomorphism of A extends to an automorphism."""
    fmt = _format(ctx, as_json)
    with handled():
        cls, s = load_spec(spec), load_structure(a)
        with spinner("Searching EPPA witness..."):
            witness = eppa_witness(s, cls, size_bound, budget=run_config(ctx).budget())

    if fmt is OutputFormat.JSON:
        print_json({"found": witness is not None, "witness": structure_to_dict(witness) if witness else None})
    elif witness is not None:
        console.print(structure_table(witness, title=f"EPPA witness ({witness.size} elements)"))
    else:
        console.print(verdict_panel(False, "", f"No witness with at most {size_bound} elements"))
    _verdict(witness is not None)


# ===========================================================================
# fraisse
# ===========================================================================

DemandOpt = Annotated[int, typer.Option("--demand-size", "-k", min=0, help="Largest base of a demand.")]
StagesOpt = Annotated[int, typer.Option("--stages", min=0, help="Most elements to adjoin.")]


@app.command("generic")
def generic(
    ctx: typer.Context,
    spec: SpecArg,
    demand_size: DemandOpt = 2,
    stages: StagesOpt = 500,
    closure_depth: Annotated[
        int, typer.Option("--closure-depth", min=1, help="Back-and-forth rounds the demands must support.")
    ] = 1,
    log: Annotated[bool, typer.Option("--log", help="Include the demand log.")] = False,
    as_json: JsonFlag = False,
) -> None:
    """Build a finite approximant of the Fraïssé limit (exit 1 if demands remain unmet)."""
    fmt = _format(ctx, as_json)
    run = run_config(ctx)
    with handled():
        cls = load_spec(spec)
        with spinner("Realizing extension demands..."):
            approx = build_generic(
                cls, demand_size, stages, closure_depth=closure_depth, seed=run.seed, budget=run.budget()
            )
            report = verify_extension_property(
                approx.structure, cls, demand_size + closure_depth, budget=run.budget()
            )

    if fmt is OutputFormat.JSON:
        exclude = None if log else {"realized_extensions"}
        print_json({
            "approximant": approx.model_dump(mode="json", exclude=exclude),
            "extension_report": report.model_dump(mode="json", exclude={"unsatisfied"}),
        })
    elif fmt is OutputFormat.DOT:
        print(to_dot(approx.structure, "generic"))
    else:
        console.print(kv_table([
            ("Elements", approx.structure.size),
            ("Stages", approx.stage),
            ("Seed", approx.seed),
            ("Demands realized", len(approx.realized_extensions)),
            ("Unmet demands", len(approx.unmet)),
            ("Extension property", report.passed),
        ], title=f"Approximant of {cls.variant}"))
    _verdict(approx.complete)


@app.command("ext-check")
def ext_check(
    ctx: typer.Context,
    spec: SpecArg,
    u: StructArg,
    k: Annotated[int, typer.Option("-k", min=0, help="Check substructures with fewer than k elements.")] = 3,
    as_json: JsonFlag = False,
) -> None:
    """Verify the one-point extension property of U over small substructures."""
    fmt = _format(ctx, as_json)
    with handled():
        cls, s = load_spec(spec), load_structure(u)
        with spinner("Checking extension demands..."):
            report = verify_extension_property(s, cls, k, budget=run_config(ctx).budget())

    if fmt is OutputFormat.JSON:
        print_json(report.model_dump(mode="json"))
    else:
        console.print(kv_table([
            ("Demands", report.demands_checked),
            ("Satisfied", report.satisfied),
            ("Unsatisfied", len(report.unsatisfied)),
        ], title=f"Extension property, |A| < {k}"))
    _verdict(report.passed)


@app.command("homog-check")
def homog_check(
    ctx: typer.Context,
    u: Annotated[Path, typer.Argument(help="Structure (or colored structure with --colored).")],
    part_size: Annotated[int, typer.Option("--part-size", min=0)] = 2,
    depth: Annotated[int, typer.Option("--depth", min=0)] = 1,
    colored: Annotated[bool, typer.Option("--colored", help="Input is colored; maps preserve colors.")] = False,
    weak: Annotated[bool, typer.Option("--weak", help="With --colored: colors may move by Aut(T).")] = False,
    as_json: JsonFlag = False,
) -> None:
    """Bounded back-and-forth over partial isomorphisms of U."""
    fmt = _format(ctx, as_json)
    with handled():
        budget = run_config(ctx).budget()
        with spinner("Running back-and-forth..."):
            if colored:
                c = load_colored(u)
                if weak:
                    report = verify_w_homogeneity(c, part_size, depth, budget=budget)
                else:
                    report = verify_colored_homogeneity(c, part_size, depth, budget=budget)
            else:
                report = verify_homogeneity(load_structure(u), part_size, depth, budget=budget)

    if fmt is OutputFormat.JSON:
        print_json(report.model_dump(mode="json"))
    else:
        console.print(kv_table([
            ("Partial isomorphisms", report.maps_checked),
            ("Stuck", report.stuck_count),
        ], title=f"Back-and-forth (part {part_size}, depth {depth})"))
    _verdict(report.passed)


# ===========================================================================
# colored
# ===========================================================================

def _emit_structure(fmt: OutputFormat, s: Structure, title: str) -> None:
    if fmt is OutputFormat.JSON:
        print_json(structure_to_dict(s))
    elif fmt is OutputFormat.DOT:
        print(to_dot(s, title.lower().replace(" ", "_")))
    else:
        console.print(structure_table(s, title=title))


@app.command("colored-build")
def colored_build(
    ctx: typer.Context,
    spec: SpecArg,
    template: Annotated[Path, typer.Argument(help="Template structure T.")],
    demand_size: DemandOpt = 2,
    stages: StagesOpt = 500,
    as_json: JsonFlag = False,
) -> None:
    """Build a universal homogeneous T-colored approximant."""
    fmt = _format(ctx, as_json)
    run = run_config(ctx)
    with handled():
        cls, t = load_spec(spec), load_structure(template)
        with spinner("Realizing colored extension demands..."):
            result = build_universal_colored(cls, t, demand_size, stages, seed=run.seed, budget=run.budget())

    if fmt is OutputFormat.JSON:
        print_json({
            "colored": result.colored.to_document(),
            "stage": result.approximant.stage,
            "complete": result.complete,
            "unmet": len(result.approximant.unmet),
        })
    else:
        console.print(structure_table(result.colored.base, title="Colored approximant"))
        console.print(map_table(result.colored.color, headers=("x", "u(x)")))
    _verdict(result.complete)


@app.command("colored-auts")
def colored_auts(ctx: typer.Context, c: ColoredArg, as_json: JsonFlag = False) -> None:
    """Orders of sAut, wAut and cAut, with the identities between them."""
    fmt = _format(ctx, as_json)
    with handled():
        colored = load_colored(c)
        budget = run_config(ctx).budget()
        with spinner("Enumerating colored automorphisms..."):
            saut = strong_automorphisms(colored, budget=budget)
            waut = weak_automorphisms(colored, budget=budget)
            caut = color_automorphisms(colored, budget=budget)
            saut_is_aut_s = check_saut_identity(colored, budget=budget)
            stabilizer = stabilizer_check(colored, budget=budget)

    doc = {
        "saut": [dict(sorted(m.mapping.items())) for m in saut],
        "waut": [w.to_document() for w in waut],
        "caut": [dict(sorted(m.mapping.items())) for m in caut],
        "saut_equals_aut_S": saut_is_aut_s,
        "stabilizer_inside_saut": stabilizer,
    }
    if fmt is OutputFormat.JSON:
        print_json(doc)
        return
    console.print(kv_table([
        ("|sAut|", len(saut)),
        ("|wAut|", len(waut)),
        ("|cAut|", len(caut)),
        ("sAut = Aut(S(U,u))", saut_is_aut_s),
        ("Stabilizer ⊆ sAut", stabilizer),
    ], title="Colored automorphism groups"))


@app.command("colored-orbits")
def colored_orbits(
    ctx: typer.Context,
    c: ColoredArg,
    n: Annotated[int, typer.Option("-n", min=0, help="Tuple length.")] = 1,
    mode: Annotated[OrbitMode, typer.Option("--mode", help="strong (sAut) or color (cAut).")] = OrbitMode.STRONG,
    as_json: JsonFlag = False,
) -> None:
    """Count orbits of sAut or cAut on n-tuples."""
    fmt = _format(ctx, as_json)
    with handled():
        colored = load_colored(c)
        orbits = count_colored_orbits(colored, n, mode, budget=run_config(ctx).budget())
    if fmt is OutputFormat.JSON:
        print_json({"n": n, "mode": mode.value, "orbits": orbits})
    else:
        console.print(kv_table([("n", n), ("Mode", mode.value), ("Orbits", orbits)]))


@app.command("encode-s")
def encode_s(ctx: typer.Context, c: ColoredArg, as_json: JsonFlag = False) -> None:
    """Encode a colored structure with one unary predicate per color."""
    fmt = _format(ctx, as_json)
    with handled():
        encoded = encode_S(load_colored(c))
    _emit_structure(fmt, encoded, "S encoding")


@app.command("decode-s")
def decode_s(
    ctx: typer.Context,
    s: StructArg,
    template: Annotated[Path, typer.Argument(help="Template structure T.")],
    as_json: JsonFlag = False,
) -> None:
    """Decode a structure with color predicates back to a colored structure."""
    fmt = _format(ctx, as_json)
    with handled():
        decoded = decode_S(load_structure(s), load_structure(template))
    if fmt is OutputFormat.JSON:
        print_json(decoded.to_document())
    else:
        console.print(structure_table(decoded.base))
        console.print(map_table(decoded.color, headers=("x", "color")))


@app.command("tilde")
def tilde(ctx: typer.Context, c: ColoredArg, as_json: JsonFlag = False) -> None:
    """Expand by the kernel of the coloring."""
    fmt = _format(ctx, as_json)
    with handled():
        expanded = tilde_expansion(load_colored(c))
    _emit_structure(fmt, expanded, "Tilde expansion")


@app.command("hat")
def hat(ctx: typer.Context, c: ColoredArg, as_json: JsonFlag = False) -> None:
    """Expand by the kernel and the pulled-back template relations."""
    fmt = _format(ctx, as_json)
    with handled():
        expanded = hat_expansion(load_colored(c))
    _emit_structure(fmt, expanded, "Hat expansion")


@app.command("check-caut")
def check_caut(ctx: typer.Context, c: ColoredArg, as_json: JsonFlag = False) -> None:
    """Compare cAut with Aut of the tilde and hat expansions."""
    fmt = _format(ctx, as_json)
    with handled():
        colored = load_colored(c)
        with spinner("Comparing groups..."):
            report = check_caut_identity(colored, budget=run_config(ctx).budget())

    if fmt is OutputFormat.JSON:
        print_json(report.model_dump(mode="json"))
    else:
        console.print(kv_table([
            ("Surjective", report.surjective),
            ("Retraction", report.retraction),
            ("|cAut|", report.caut_order),
            ("|Aut(tilde)|", report.aut_tilde_order),
            ("|Aut(hat)|", report.aut_hat_order),
            ("cAut ⊆ Aut(hat)", report.caut_subset_aut_hat),
            ("Asserted", ", ".join(report.asserted)),
        ], title="cAut identity"))
    _verdict(report.consistent)


@app.command("retraction")
def retraction(ctx: typer.Context, c: ColoredArg, as_json: JsonFlag = False) -> None:
    """Does T embed into U as a section of the coloring?"""
    fmt = _format(ctx, as_json)
    with handled():
        check = is_retraction(load_colored(c), budget=run_config(ctx).budget())

    if fmt is OutputFormat.JSON:
        print_json({
            "retraction": check.holds,
            "coretraction": check.coretraction.to_document() if check.coretraction else None,
        })
    elif check.coretraction is not None:
        console.print(success_panel("The coloring is a retraction"))
        console.print(map_table(check.coretraction.mapping, headers=("t", "ι(t)")))
    else:
        console.print(verdict_panel(False, "", "No embedding ι: T ↪ U with u∘ι = id"))
    _verdict(check.holds)


# ===========================================================================
# oligomorphy
# ===========================================================================

@app.command("pe-leq")
def pe_leq(
    ctx: typer.Context,
    a: StructArg,
    b: StructArg,
    point_a: Annotated[str, typer.Option("--point-a", help="Tuple of A, comma separated.")] = "",
    point_b: Annotated[str, typer.Option("--point-b", help="Tuple of B, comma separated.")] = "",
    as_json: JsonFlag = False,
) -> None:
    """Is the positive-existential type of (A, ā) contained in that of (B, b̄)?"""
    fmt = _format(ctx, as_json)
    with handled():
        pa = make_pointed(load_structure(a), parse_point(point_a))
        pb = make_pointed(load_structure(b), parse_point(point_b))
        holds = pe_type_leq(pa, pb, budget=run_config(ctx).budget())

    if fmt is OutputFormat.JSON:
        print_json({"leq": holds})
    else:
        console.print(verdict_panel(holds, "Type contained", "Type not contained"))
    _verdict(holds)


@app.command("pe-types")
def pe_types(
    ctx: typer.Context, a: StructArg, n: Annotated[int, typer.Option("-n", min=0)] = 1, as_json: JsonFlag = False
) -> None:
    """Number of positive-existential types of n-tuples of A."""
    fmt = _format(ctx, as_json)
    with handled():
        count = count_pe_types(load_structure(a), n, budget=run_config(ctx).budget())
    if fmt is OutputFormat.JSON:
        print_json({"n": n, "pe_types": count})
    else:
        console.print(kv_table([("n", n), ("pe-types", count)]))


@app.command("orbits")
def orbits(
    ctx: typer.Context, a: StructArg, n: Annotated[int, typer.Option("-n", min=0)] = 1, as_json: JsonFlag = False
) -> None:
    """Number of Aut(A)-orbits on n-tuples."""
    fmt = _format(ctx, as_json)
    with handled():
        count = count_orbits(load_structure(a), n, budget=run_config(ctx).budget())
    if fmt is OutputFormat.JSON:
        print_json({"n": n, "orbits": count})
    else:
        console.print(kv_table([("n", n), ("Orbits", count)]))


@app.command("worn-check")
def worn_check(
    ctx: typer.Context,
    a: StructArg,
    b: StructArg,
    age_bound: Annotated[int, typer.Option("--age-bound", min=0)] = 3,
    as_json: JsonFlag = False,
) -> None:
    """Evaluate the hom / age / CSP-containment conditions and whether they agree."""
    fmt = _format(ctx, as_json)
    with handled():
        sa, sb = load_structure(a), load_structure(b)
        with spinner("Evaluating conditions..."):
            report = check_woRN(sa, sb, age_bound, budget=run_config(ctx).budget())

    if fmt is OutputFormat.JSON:
        print_json(report.model_dump(mode="json"))
    else:
        console.print(kv_table([
            ("A → B", report.hom_exists),
            ("Age(A) → B", report.age_maps),
            ("CSP(A) ⊆ CSP(B)", report.csp_contained),
            ("Th∃⁺ containment", report.pe_theory_contained),
            ("Bound sufficient", report.bound_sufficient),
            ("Agree", report.agree),
        ], title=f"Conditions at age bound {age_bound}"))
    _verdict(report.agree)


@app.command("olig-report")
def olig_report(
    ctx: typer.Context,
    a: StructArg,
    max_n: Annotated[int, typer.Option("--max-n", min=0)] = 2,
    strong: Annotated[bool, typer.Option("--strong", help="Orbit profile (Aut) instead of End.")] = False,
    as_json: JsonFlag = False,
) -> None:
    """Profile of pe-types against orbits for n = 1..max_n."""
    fmt = _format(ctx, as_json)
    with handled():
        s = load_structure(a)
        budget = run_config(ctx).budget()
        with spinner("Counting types and orbits..."):
            report = (is_oligomorphic_report if strong else is_weakly_oligomorphic_report)(s, max_n, budget=budget)

    if fmt is OutputFormat.JSON:
        print_json(report.model_dump(mode="json"))
    else:
        console.print(rows_table([r.model_dump() for r in report.rows], title=f"{report.kind} oligomorphy profile"))
        console.print(kv_table([("pe-types ≤ orbits", report.coarsening_holds)]))


# ===========================================================================
# config
# ===========================================================================

@config_app.command("show")
def config_show(ctx: typer.Context, as_json: JsonFlag = False) -> None:
    """Print the resolved run settings and the config file location."""
    with handled():
        resolved = run_config(ctx)
        fmt = _format(ctx, as_json)
    doc: dict[str, Any] = {
        "path": str(config_path()),
        "stored": load_config(),
        "resolved": resolved.model_dump(mode="json"),
    }
    if fmt is OutputFormat.JSON:
        print_json(doc)
        return
    console.print(kv_table(
        [("Config file", doc["path"])] + [(k, v) for k, v in doc["resolved"].items()],
        title="Run settings",
    ))


@config_app.command("set")
def config_set(
    key: Annotated[str, typer.Argument(help="seed, node_budget, time_budget or output_format.")],
    value: Annotated[str, typer.Argument(help="New value.")],
) -> None:
    """Store one setting in config.toml."""
    try:
        parsed = validate_setting(key, value)
    except KeyError:
        err_console.print(err_panel(f"Unknown setting [bold]{key}[/bold]."))
        raise typer.Exit(3)
    except ValidationError as exc:
        err_console.print(err_panel(f"Invalid value for {key}:\n{exc}"))
        raise typer.Exit(3)
    save_config({key: parsed})
    console.print(success_panel(f"{key} = {parsed} → {config_path()}"))


# ===========================================================================
# Entry point
# ===========================================================================

def main() -> None:
    app()


if __name__ == "__main__":
    main()
