"""
fmtbench - Exception Taxonomy
=============================
Every exception maps 1-to-1 to an actionable failure mode.

Two families exist:

- Input errors (``InputError``): the caller handed over something that is
  not a valid structure, morphism, coloring or class specification. The CLI
  exits with code 3 on these.
- Computation outcomes: the search ran out of budget
  (``BudgetExceededError``, exit code 2) or a construction was refused
  because its precondition fails at the requested bound
  (``AmalgamationRefusedError``). A refusal carries the failing
  ``AmalgamReport``, counterexample included, so the CLI treats it as a
  negative verdict and exits 1.

Critical facts
--------------
- "Absent" is never an exception. ``find_homomorphism`` returns ``None``
  only after a complete search. Running out of nodes or time raises
  ``BudgetExceededError`` instead, so a caller can always tell "no
  homomorphism exists" from "we gave up".

- pydantic validators raise ``PydanticCustomError`` with the error types
  listed in ``VALIDATION_ERROR_MAP``. Public parsing entry points translate
  the first such error into the matching class below.
"""
from __future__ import annotations

from typing import Any, Optional


# ---------------------------------------------------------------------------
# Base
# ---------------------------------------------------------------------------

class FMTBenchError(Exception):
    """Root exception for all fmtbench errors."""


class InputError(FMTBenchError):
    """Invalid input: malformed JSON, a broken invariant, a bad map."""


# ---------------------------------------------------------------------------
# Input errors (structures / signatures)
# ---------------------------------------------------------------------------

class StructureParseError(InputError):
    """
    The serialized form could not be parsed or failed validation.

    ``field`` is the dotted location inside the document (``relations.E.0``),
    ``line``/``column`` are set for JSON syntax errors.
    """
    def __init__(
        self,
        message: str,
        field: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ):
        self.field = field
        self.line = line
        self.column = column
        where = []
        if field:
            where.append(f"field {field}")
        if line is not None:
            where.append(f"line {line}, column {column}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class UnknownElementError(InputError):
    """A tuple or a map mentions an element that is not in the carrier."""
    def __init__(self, message: str = "unknown element", field: Optional[str] = None):
        self.field = field
        super().__init__(message)


class ArityMismatchError(InputError):
    """A tuple's length differs from its symbol's arity."""
    def __init__(self, message: str = "arity mismatch", field: Optional[str] = None):
        self.field = field
        super().__init__(message)


class UnknownSymbolError(InputError):
    """A relation is interpreted for a symbol missing from the signature."""
    def __init__(self, message: str = "unknown symbol", field: Optional[str] = None):
        self.field = field
        super().__init__(message)


class SignatureMismatchError(InputError):
    """Two structures that must share a signature do not."""
    def __init__(self, message: str = "signature mismatch"):
        super().__init__(message)


class PartialMapError(InputError):
    """A partial map is not functional or points outside a carrier."""


class ClassSpecError(InputError):
    """
    A class specification violates its invariants, e.g. a KLF link that is
    not a link-structure or a forbidden structure that is not packed.
    """


class MorphismKindError(InputError):
    """A map does not satisfy the invariants of its claimed kind."""
    def __init__(self, message: str, kind: Optional[str] = None):
        self.kind = kind
        super().__init__(message)


class ColoringError(InputError):
    """
    The color map is not a homomorphism into the template.

    ``violation`` holds ``(symbol, tuple)`` for the first tuple whose image
    is missing from the template's relation, or ``None`` when the map is
    not total / leaves the template's carrier.
    """
    def __init__(self, message: str, violation: Optional[tuple[str, tuple[str, ...]]] = None):
        self.violation = violation
        super().__init__(message)


class DecodeError(InputError):
    """
    An R-hat structure does not decode to a colored structure: some element
    lies in zero or several color predicates, or the induced color map
    breaks a tuple. ``link`` is the offending link substructure when known.
    """
    def __init__(self, message: str, link: Any = None):
        self.link = link
        super().__init__(message)


# ---------------------------------------------------------------------------
# Computation outcomes
# ---------------------------------------------------------------------------

class BudgetExceededError(FMTBenchError):
    """
    The search exhausted its node or time budget before finishing.

    This is a third outcome next to "found" and "absent", never a synonym
    for "absent".
    """
    def __init__(self, nodes: int, elapsed: float, limit: str):
        self.nodes = nodes
        self.elapsed = elapsed
        self.limit = limit
        super().__init__(
            f"search budget exceeded ({limit}): {nodes} nodes in {elapsed:.2f}s"
        )


class AmalgamationRefusedError(FMTBenchError):
    """
    The class fails HP, JEP or AP at the requested bound, so a Fraïssé
    approximant cannot be built for it. ``report`` is the failing
    ``AmalgamReport``.
    """
    def __init__(self, report: Any):
        self.report = report
        super().__init__(
            f"construction refused: class fails {report.property} up to size "
            f"{report.size_bound}"
        )


# ---------------------------------------------------------------------------
# Maps
# ---------------------------------------------------------------------------

# pydantic custom error type → exception class raised by parse entry points.
VALIDATION_ERROR_MAP: dict[str, type[InputError]] = {
    "unknown_element": UnknownElementError,
    "arity_mismatch": ArityMismatchError,
    "unknown_symbol": UnknownSymbolError,
    "signature_mismatch": SignatureMismatchError,
    "partial_map": PartialMapError,
    "class_spec": ClassSpecError,
    "morphism_kind": MorphismKindError,
    "coloring": ColoringError,
}

# Exception family → CLI exit code. 1 is the "no" verdict; a refusal
# carries its counterexample and counts as one.
EXIT_CODE_MAP: dict[type[FMTBenchError], int] = {
    BudgetExceededError: 2,
    AmalgamationRefusedError: 1,
    InputError: 3,
}


def exit_code_for(exc: FMTBenchError) -> int:
    """Resolve the CLI exit code of an exception through ``EXIT_CODE_MAP``."""
    for cls in type(exc).__mro__:
        if cls in EXIT_CODE_MAP:
            return EXIT_CODE_MAP[cls]
    return 3
