"""
Rich console helpers and JSON output.

Every command renders a table by default. ``--format json`` (or ``--json``)
emits JSON to stdout instead: sorted keys, no Rich markup, byte-identical
across runs with the same inputs and seed.
"""

from __future__ import annotations

import json
from typing import Any, Iterable, Optional

from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from fmtbench.structures import Structure

console = Console()
err_console = Console(stderr=True)


# ---------------------------------------------------------------------------
# JSON output (pipe-safe, bypasses Rich)
# ---------------------------------------------------------------------------

class _SetEncoder(json.JSONEncoder):
    def default(self, obj: Any) -> Any:
        if isinstance(obj, (set, frozenset)):
            return sorted(obj)
        return super().default(obj)


def print_json(data: Any) -> None:
    """Emit data as JSON to stdout. Bypasses Rich entirely, safe to pipe to jq."""
    print(json.dumps(data, cls=_SetEncoder, indent=2, ensure_ascii=False, sort_keys=True))


# ---------------------------------------------------------------------------
# Panels
# ---------------------------------------------------------------------------

def success_panel(message: str, title: str = "") -> Panel:
    return Panel(message, border_style="green", title=title or None, expand=False)


def err_panel(message: str, title: str = "Error") -> Panel:
    return Panel(message, border_style="red", title=title, expand=False)


def warn_panel(message: str, title: str = "Warning") -> Panel:
    return Panel(message, border_style="yellow", title=title, expand=False)


def verdict_panel(holds: bool, yes: str, no: str) -> Panel:
    return success_panel(yes) if holds else warn_panel(no, title="Verdict")


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------

def kv_table(rows: Iterable[tuple[str, Any]], title: str = "") -> Table:
    """Two-column key-value detail table (no header)."""
    t = Table(box=box.SIMPLE, show_header=False, title=title or None, expand=False)
    t.add_column(style="dim", no_wrap=True, min_width=18)
    t.add_column()
    for k, v in rows:
        t.add_row(k, _cell(v))
    return t


def _cell(v: Any) -> str:
    if isinstance(v, bool):
        return "[green]yes[/green]" if v else "[red]no[/red]"
    if v is None:
        return "—"
    return str(v)


def map_table(mapping: dict[str, str], title: str = "", headers: tuple[str, str] = ("x", "f(x)")) -> Table:
    t = Table(box=box.SIMPLE, title=title or None)
    t.add_column(headers[0], style="bold")
    t.add_column(headers[1])
    for x, y in sorted(mapping.items()):
        t.add_row(x, y)
    return t


def structure_table(s: Structure, title: str = "") -> Table:
    """One row per symbol: arity, tuple count and the tuples themselves."""
    t = Table(box=box.SIMPLE, title=title or f"Structure ({s.size} elements)")
    t.add_column("Symbol", style="bold")
    t.add_column("Arity", justify="right")
    t.add_column("Tuples", justify="right")
    t.add_column("Interpretation", style="dim")
    for sym in s.signature:
        tuples = sorted(s.rel(sym.name))
        shown = ", ".join("(" + ",".join(tup) + ")" for tup in tuples[:12])
        if len(tuples) > 12:
            shown += ", …"
        t.add_row(sym.name, str(sym.arity), str(len(tuples)), shown)
    return t


def rows_table(rows: list[dict[str, Any]], title: str = "", columns: Optional[list[str]] = None) -> Table:
    """Plain table from a list of flat dicts."""
    t = Table(box=box.SIMPLE, title=title or None)
    cols = columns or (list(rows[0]) if rows else [])
    for c in cols:
        t.add_column(c, justify="right" if rows and isinstance(rows[0].get(c), int) else "left")
    for r in rows:
        t.add_row(*(_cell(r.get(c)) for c in cols))
    return t
