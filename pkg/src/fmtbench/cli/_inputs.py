"""
Input loading and error handling shared by every command.

Files are read from a path, or from stdin when the path is ``-``. Library
exceptions are turned into a red panel on stderr and the exit code from
``fmtbench.exceptions.EXIT_CODE_MAP``: 2 for an exhausted budget, 3 for bad
input. Verdict commands exit 1 themselves when the answer is "no"; a
refused construction also exits 1, with the failing counterexample in its
panel.
"""

from __future__ import annotations

import json
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Generator, Optional

import typer
from pydantic import ValidationError
from rich.markup import escape
from rich.progress import Progress, SpinnerColumn, TextColumn, TimeElapsedColumn

from fmtbench.classes import ClassSpec, parse_class_spec
from fmtbench.colored import ColoredStructure, parse_colored
from fmtbench.exceptions import (
    AmalgamationRefusedError,
    FMTBenchError,
    PartialMapError,
    StructureParseError,
    exit_code_for,
)
from fmtbench.structures import ElementId, Structure, parse_structure, structure_to_dict

from .config import RunConfig, resolve_run_config
from .output import err_console, err_panel


def read_source(path: Path) -> str:
    if str(path) == "-":
        return sys.stdin.read()
    if not path.exists():
        raise StructureParseError(f"file not found: {path}")
    return path.read_text(encoding="utf-8")


def load_structure(path: Path) -> Structure:
    return parse_structure(read_source(path))


def load_colored(path: Path) -> ColoredStructure:
    return parse_colored(read_source(path))


def load_spec(path: Path) -> ClassSpec:
    return parse_class_spec(read_source(path))


def parse_map(text: Optional[str]) -> dict[ElementId, ElementId]:
    """``--fixed '{"0": "a"}'``: a JSON object of element ids."""
    if not text:
        return {}
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PartialMapError(f"--fixed is not valid JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise PartialMapError("--fixed must be a JSON object")
    return {str(k): str(v) for k, v in data.items()}


def parse_point(text: str) -> tuple[ElementId, ...]:
    """``--point 0,1``: comma-separated element ids; empty for the empty tuple."""
    return tuple(p.strip() for p in text.split(",") if p.strip())


def run_config(ctx: typer.Context) -> RunConfig:
    """RunConfig resolved by the root callback, or a fresh one."""
    obj = ctx.find_root().obj
    if isinstance(obj, RunConfig):
        return obj
    return resolve_run_config()


def refusal_message(exc: AmalgamationRefusedError) -> str:
    lines = [escape(str(exc))]
    cex = exc.report.counterexample
    if cex is not None:
        lines.append(f"counterexample: {escape(cex.reason)}")
        for label, s in (("A", cex.base), ("B1", cex.left), ("B2", cex.right)):
            if s is not None:
                lines.append(f"  {label}: {escape(json.dumps(structure_to_dict(s)))}")
    return "\n".join(lines)


@contextmanager
def handled() -> Generator[None, None, None]:
    """Map library exceptions to an error panel and their exit code."""
    try:
        yield
    except AmalgamationRefusedError as exc:
        err_console.print(err_panel(refusal_message(exc), title=type(exc).__name__))
        raise typer.Exit(exit_code_for(exc))
    except FMTBenchError as exc:
        err_console.print(err_panel(str(exc), title=type(exc).__name__))
        raise typer.Exit(exit_code_for(exc))
    except ValidationError as exc:
        err_console.print(err_panel(str(exc), title="Invalid input"))
        raise typer.Exit(3)


@contextmanager
def spinner(message: str) -> Generator[Any, None, None]:
    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        TimeElapsedColumn(),
        console=err_console,
        transient=True,
    ) as progress:
        progress.add_task(message, total=None)
        yield progress
