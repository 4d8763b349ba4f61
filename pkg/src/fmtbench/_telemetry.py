"""
Optional OpenTelemetry spans around fmtbench searches and sweeps.

Without ``opentelemetry-api`` installed ``span`` yields ``None`` and
``set_attribute`` ignores it, so callers never branch on availability.

    pip install fmtbench[otel]

Span names are ``fmtbench.<operation>``. Attribute values are coerced to
what OTel accepts: enums become their value, ``None`` is dropped, anything
else that is not a primitive is stringified. A search that gives up leaves
``search.nodes``, ``search.elapsed`` and ``budget.limit`` on its span.
"""

from contextlib import contextmanager
from enum import Enum
from typing import Any, Generator, Optional

from .exceptions import BudgetExceededError

try:
    from opentelemetry import trace
    from opentelemetry.trace import StatusCode

    _tracer = trace.get_tracer("fmtbench", "0.1.0")
    _OTEL_AVAILABLE = True
except ImportError:
    _tracer = None  # type: ignore[assignment]
    _OTEL_AVAILABLE = False

_PRIMITIVES = (bool, int, float, str)


def _otel_value(value: Any) -> Any:
    if isinstance(value, Enum):
        value = value.value
    if value is None or isinstance(value, _PRIMITIVES):
        return value
    return str(value)


def set_attribute(current_span: Any, key: str, value: Any) -> None:
    """Set one attribute on a span from :func:`span`; no-op without OTel."""
    if current_span is None:
        return
    value = _otel_value(value)
    if value is not None:
        current_span.set_attribute(key, value)


@contextmanager
def span(
    name: str,
    attributes: Optional[dict[str, Any]] = None,
) -> Generator[Any, None, None]:
    """
    Wrap a block in a span.

    Usage::

        with span("fmtbench.core", {"structure.size": a.size}) as sp:
            ...
            set_attribute(sp, "core.size", c.size)

    Exceptions mark the span ERROR and are recorded, then re-raised.
    """
    if not _OTEL_AVAILABLE:
        yield None
        return

    with _tracer.start_as_current_span(name) as current_span:  # type: ignore[union-attr]
        for key, value in (attributes or {}).items():
            set_attribute(current_span, key, value)
        try:
            yield current_span
        except BudgetExceededError as exc:
            set_attribute(current_span, "search.nodes", exc.nodes)
            set_attribute(current_span, "search.elapsed", exc.elapsed)
            set_attribute(current_span, "budget.limit", exc.limit)
            current_span.set_status(StatusCode.ERROR, str(exc))
            current_span.record_exception(exc)
            raise
        except Exception as exc:
            current_span.set_status(StatusCode.ERROR, str(exc))
            current_span.record_exception(exc)
            raise
