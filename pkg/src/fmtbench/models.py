"""
Shared pydantic base, enums and the validation-error translator.

Every public type of fmtbench derives from ``BaseSchema``. Validators raise
``PydanticCustomError`` with a stable error type; ``raise_input_error``
turns the first such error of a ``ValidationError`` into the exception class
registered in ``fmtbench.exceptions.VALIDATION_ERROR_MAP``.
"""
from __future__ import annotations

from enum import Enum
from typing import NoReturn

from pydantic import BaseModel, ConfigDict, ValidationError

from .exceptions import VALIDATION_ERROR_MAP, StructureParseError


class BaseSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")


# --- Consumable Enums ---

class MorphismKind(str, Enum):
    HOM = "hom"
    MONO = "mono"
    EMBEDDING = "embedding"
    ISO = "iso"

    @property
    def strength(self) -> int:
        return _STRENGTH[self]


_STRENGTH = {
    MorphismKind.HOM: 0,
    MorphismKind.MONO: 1,
    MorphismKind.EMBEDDING: 2,
    MorphismKind.ISO: 3,
}


class ClassProperty(str, Enum):
    HP = "HP"
    JEP = "JEP"
    AP = "AP"
    HAP = "HAP"
    FREE_AP = "FreeAP"


class OrbitMode(str, Enum):
    STRONG = "strong"
    COLOR = "color"


class OutputFormat(str, Enum):
    JSON = "json"
    TABLE = "table"
    DOT = "dot"


# ---------------------------------------------------------------------------
# ValidationError → typed exception
# ---------------------------------------------------------------------------

def _location(loc: tuple) -> str:
    return ".".join(str(part) for part in loc)


def raise_input_error(exc: ValidationError) -> NoReturn:
    """
    Re-raise a pydantic ``ValidationError`` as the matching ``InputError``.

    Custom error types listed in ``VALIDATION_ERROR_MAP`` keep their class;
    anything else (missing field, wrong JSON type) becomes a
    ``StructureParseError`` carrying the field path.
    """
    first = exc.errors()[0]
    field = _location(first.get("loc", ()))
    ctx = first.get("ctx") or {}
    if ctx.get("field"):
        field = ".".join(p for p in (field, str(ctx["field"])) if p)
    cls = VALIDATION_ERROR_MAP.get(first["type"])
    if cls is None:
        raise StructureParseError(first["msg"], field=field or None) from exc
    err = cls(first["msg"])
    if hasattr(err, "field"):
        err.field = field or None
    if "violation" in ctx and hasattr(err, "violation"):
        err.violation = ctx["violation"]
    raise err from exc
