"""
CLI configuration.

Run settings live in ~/.config/fmtbench/config.toml (via platformdirs),
section ``[default]``.

Fallback chain per setting (enforced in ``resolve_run_config``):
  1. global CLI flag (--seed, --node-budget, --time-budget, --format)
  2. environment variable (FMTBENCH_SEED, FMTBENCH_NODE_BUDGET, ...)
  3. config.toml
  4. built-in default
"""

from __future__ import annotations

import os
import sys

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib  # type: ignore[no-reattr]
from pathlib import Path
from typing import Any, Optional

from platformdirs import user_config_dir
from pydantic import Field, field_validator

from fmtbench._search import DEFAULT_NODE_BUDGET, DEFAULT_TIME_BUDGET, SearchBudget
from fmtbench.models import BaseSchema, OutputFormat

_APP = "fmtbench"

# Setting name → environment variable.
ENV_VARS: dict[str, str] = {
    "seed": "FMTBENCH_SEED",
    "node_budget": "FMTBENCH_NODE_BUDGET",
    "time_budget": "FMTBENCH_TIME_BUDGET",
    "output_format": "FMTBENCH_FORMAT",
}


class RunConfig(BaseSchema):
    seed: int = 0
    node_budget: int = Field(DEFAULT_NODE_BUDGET, gt=0, description="Search nodes per command")
    time_budget: float = Field(DEFAULT_TIME_BUDGET, gt=0, description="Seconds per command")
    output_format: OutputFormat = OutputFormat.TABLE

    @field_validator("output_format", mode="before")
    @classmethod
    def _lower(cls, v: Any) -> Any:
        return v.lower() if isinstance(v, str) else v

    def budget(self) -> SearchBudget:
        return SearchBudget(self.node_budget, self.time_budget)


# ---------------------------------------------------------------------------
# Paths
# ---------------------------------------------------------------------------

def config_path() -> Path:
    override = os.getenv("FMTBENCH_CONFIG", "").strip()
    if override:
        return Path(override)
    return Path(user_config_dir(_APP)) / "config.toml"


# ---------------------------------------------------------------------------
# TOML config
# ---------------------------------------------------------------------------

def load_config() -> dict[str, Any]:
    path = config_path()
    if not path.exists():
        return {}
    with open(path, "rb") as f:
        return tomllib.load(f).get("default", {})


def save_config(updates: dict[str, Any]) -> None:
    path = config_path()
    path.parent.mkdir(parents=True, exist_ok=True)

    existing: dict[str, Any] = {}
    if path.exists():
        with open(path, "rb") as f:
            existing = tomllib.load(f)

    section: dict[str, Any] = existing.get("default", {})
    section.update({k: v for k, v in updates.items() if v is not None})
    existing["default"] = section

    # Write beside the target, then rename over it.
    tmp = path.with_suffix(".tmp")
    with open(tmp, "wb") as f:
        tomli_w.dump(existing, f)
    tmp.replace(path)


# ---------------------------------------------------------------------------
# Resolution
# ---------------------------------------------------------------------------

def resolve_run_config(flags: Optional[dict[str, Any]] = None) -> RunConfig:
    """
    Merge flag values (``None`` = not given), environment and config file.

    Raises ``ValidationError`` when a resolved value is out of range, e.g. a
    zero budget.
    """
    flags = flags or {}
    cfg = load_config()
    values: dict[str, Any] = {}
    for name, env in ENV_VARS.items():
        if flags.get(name) is not None:
            values[name] = flags[name]
            continue
        raw = os.getenv(env, "").strip()
        if raw:
            values[name] = raw
        elif name in cfg:
            values[name] = cfg[name]
    return RunConfig(**values)


def validate_setting(key: str, value: str) -> Any:
    """Parse one ``config set`` value through ``RunConfig``; unknown keys raise KeyError."""
    if key not in ENV_VARS:
        raise KeyError(key)
    out = getattr(RunConfig(**{key: value}), key)
    return out.value if isinstance(out, OutputFormat) else out
