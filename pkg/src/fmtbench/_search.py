"""
Backtracking homomorphism search with forward checking.

``HomSearch`` enumerates maps ``A → B`` that preserve every relation,
optionally injective (monomorphisms) and relation-reflecting (embeddings),
extending a fixed partial map and respecting per-element candidate lists
(used for color constraints). Variables are A's elements ordered by
descending Gaifman degree, ties broken by id. After each assignment every
tuple constraint touching the assigned element is re-filtered and the
candidate lists of its still-free elements shrink to the values some
compatible B-tuple allows.

Every node explored ticks a ``SearchBudget``; exhaustion raises
``BudgetExceededError`` rather than reporting "no solution".
"""
from __future__ import annotations

import os
import time
from typing import Iterator, Mapping, Optional

from .exceptions import BudgetExceededError, PartialMapError
from .structures import ElementId, Structure, Tuple, require_same_signature

DEFAULT_NODE_BUDGET = 10_000_000
DEFAULT_TIME_BUDGET = 60.0

Assignment = dict[ElementId, ElementId]
Domains = dict[ElementId, list[ElementId]]
_Key = tuple[str, Tuple]


def _env_positive(name: str, default: float, cast: type) -> float:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        value = cast(raw)
    except ValueError:
        return default
    return value if value > 0 else default


class SearchBudget:
    """
    Node and wall-clock allowance for one computation.

    A single budget is threaded through every search a composite operation
    performs (``core`` runs many retraction searches, ``check_woRN`` many hom
    searches), so the limits bound the whole computation.

    Defaults come from ``FMTBENCH_NODE_BUDGET`` / ``FMTBENCH_TIME_BUDGET``
    when set, else 10**7 nodes and 60 seconds.
    """

    __slots__ = ("node_budget", "time_budget", "nodes", "_started")

    def __init__(self, node_budget: Optional[int] = None, time_budget: Optional[float] = None):
        self.node_budget = int(
            node_budget if node_budget is not None
            else _env_positive("FMTBENCH_NODE_BUDGET", DEFAULT_NODE_BUDGET, int)
        )
        self.time_budget = float(
            time_budget if time_budget is not None
            else _env_positive("FMTBENCH_TIME_BUDGET", DEFAULT_TIME_BUDGET, float)
        )
        if self.node_budget <= 0 or self.time_budget <= 0:
            raise ValueError("search budgets must be positive")
        self.nodes = 0
        self._started = time.monotonic()

    @property
    def elapsed(self) -> float:
        return time.monotonic() - self._started

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.node_budget:
            raise BudgetExceededError(self.nodes, self.elapsed, "nodes")
        if not self.nodes & 1023:
            self.check_time()

    def check_time(self) -> None:
        if self.elapsed > self.time_budget:
            raise BudgetExceededError(self.nodes, self.elapsed, "time")


def resolve_budget(budget: Optional[SearchBudget]) -> SearchBudget:
    return budget if budget is not None else SearchBudget()


def normalize_partial_map(
    fixed: Optional[Mapping[ElementId, ElementId]],
    source: Structure,
    target: Structure,
) -> Assignment:
    """Validate a partial map ``source → target`` and return it as a dict of ids."""
    if not fixed:
        return {}
    pairs = fixed.items() if isinstance(fixed, Mapping) else fixed
    out: Assignment = {}
    for x, y in pairs:
        x, y = str(x), str(y)
        if x not in source.element_set:
            raise PartialMapError(f"partial map source {x} is not in the domain")
        if y not in target.element_set:
            raise PartialMapError(f"partial map target {y} is not in the codomain")
        if out.setdefault(x, y) != y:
            raise PartialMapError(f"partial map sends {x} to both {out[x]} and {y}")
    return out


def variable_order(s: Structure) -> list[ElementId]:
    return sorted(s.elements, key=lambda x: (-len(s.neighbors[x]), x))


def _respects_equalities(t: Tuple, b: Tuple) -> bool:
    seen: dict[ElementId, ElementId] = {}
    for x, y in zip(t, b):
        if seen.setdefault(x, y) != y:
            return False
    return True


class HomSearch:
    """
    One search problem ``source → target``.

    ``solutions()`` is a generator; the first item is the first witness in
    the documented variable order, and exhausting it proves completeness.
    """

    def __init__(
        self,
        source: Structure,
        target: Structure,
        *,
        injective: bool = False,
        reflect: bool = False,
        fixed: Optional[Mapping[ElementId, ElementId]] = None,
        domains: Optional[Mapping[ElementId, list[ElementId]]] = None,
        budget: Optional[SearchBudget] = None,
    ):
        require_same_signature(source, target)
        self.source = source
        self.target = target
        self.reflect = reflect
        self.injective = injective or reflect
        self.budget = resolve_budget(budget)
        self.fixed = normalize_partial_map(fixed, source, target)
        self._restrict = domains

        self._constraints: dict[ElementId, list[_Key]] = {x: [] for x in source.elements}
        self._compatible: dict[_Key, list[Tuple]] = {}
        self._position: dict[_Key, dict[ElementId, int]] = {}
        for sym in source.signature:
            target_tuples = sorted(target.rel(sym.name))
            for t in sorted(source.rel(sym.name)):
                key = (sym.name, t)
                self._compatible[key] = [b for b in target_tuples if _respects_equalities(t, b)]
                positions: dict[ElementId, int] = {}
                for i, x in enumerate(t):
                    positions.setdefault(x, i)
                self._position[key] = positions
                for x in positions:
                    self._constraints[x].append(key)

    # --- setup ---

    def _initial_domains(self) -> Optional[Domains]:
        if self.injective and self.source.size > self.target.size:
            return None
        domains: Domains = {}
        for x in self.source.elements:
            if self._restrict is not None and x in self._restrict:
                allowed = set(self._restrict[x])
                values = [y for y in self.target.elements if y in allowed]
            else:
                values = list(self.target.elements)
            for key in self._constraints[x]:
                pos = self._position[key][x]
                support = {b[pos] for b in self._compatible[key]}
                values = [y for y in values if y in support]
            if not values:
                return None
            domains[x] = values
        return domains

    # --- propagation ---

    def _reflects(self, x: ElementId, y: ElementId, assignment: Assignment) -> bool:
        image = {v: k for k, v in assignment.items()}
        for name, by_elem in self.target.tuples_by_element.items():
            source_rel = self.source.rel(name)
            for b in by_elem.get(y, ()):
                if all(e in image for e in b):
                    if tuple(image[e] for e in b) not in source_rel:
                        return False
        return True

    def _assign(
        self, x: ElementId, y: ElementId, assignment: Assignment, domains: Domains
    ) -> Optional[Domains]:
        """Record ``x ↦ y`` and forward-check; ``None`` signals a dead end."""
        assignment[x] = y
        if self.reflect and not self._reflects(x, y, assignment):
            return None
        new = dict(domains)
        new[x] = [y]
        for key in self._constraints[x]:
            t = key[1]
            candidates = [
                b for b in self._compatible[key]
                if all(assignment.get(e, v) == v for e, v in zip(t, b))
            ]
            if not candidates:
                return None
            for z, pos in self._position[key].items():
                if z in assignment:
                    continue
                support = {b[pos] for b in candidates}
                pruned = [v for v in new[z] if v in support]
                if not pruned:
                    return None
                new[z] = pruned
        if self.injective:
            for z, values in new.items():
                if z not in assignment and y in values:
                    pruned = [v for v in values if v != y]
                    if not pruned:
                        return None
                    new[z] = pruned
        return new

    # --- enumeration ---

    def solutions(self) -> Iterator[Assignment]:
        domains = self._initial_domains()
        if domains is None:
            return
        assignment: Assignment = {}
        for x, y in self.fixed.items():
            self.budget.tick()
            if y not in domains[x]:
                return
            next_domains = self._assign(x, y, assignment, domains)
            if next_domains is None:
                return
            domains = next_domains
        order = [x for x in variable_order(self.source) if x not in self.fixed]
        yield from self._extend(order, 0, assignment, domains)

    def _extend(
        self, order: list[ElementId], depth: int, assignment: Assignment, domains: Domains
    ) -> Iterator[Assignment]:
        if depth == len(order):
            yield dict(assignment)
            return
        x = order[depth]
        for y in domains[x]:
            self.budget.tick()
            next_domains = self._assign(x, y, assignment, domains)
            if next_domains is not None:
                yield from self._extend(order, depth + 1, assignment, next_domains)
            del assignment[x]

    def first(self) -> Optional[Assignment]:
        return next(self.solutions(), None)

    def count(self) -> int:
        return sum(1 for _ in self.solutions())
