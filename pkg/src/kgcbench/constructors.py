"""Class-constructor test-case families and their membership oracle.

Twelve families of class expressions over a knowledge graph, named
``tc01`` through ``tc12``.  Each family is parameterised by at most a
relation ``r``, a focus entity ``e``, a qualifying class ``T`` and a
minimum cardinality, and defines a crisp membership predicate under
closed-world semantics:

========  ==========================================================
family    an entity x is a member iff
========  ==========================================================
tc01      x has at least one outgoing r edge
tc02      x has at least one ingoing r edge
tc03      tc01 or tc02
tc04      x is directly connected to e by any relation, either way
tc05      x reaches e over a same-direction two-hop chain (both
          edges forward, or both edges backward)
tc06      x has an outgoing r edge to e itself
tc07      x has an outgoing r edge to some y of asserted type T
tc08      x has an ingoing r edge from some y of asserted type T
tc09      x has at least minCard outgoing r edges
tc10      x has at least minCard ingoing r edges
tc11      x has at least minCard outgoing r edges to type-T entities
tc12      x has at least minCard ingoing r edges from type-T entities
========  ==========================================================

Type membership is read off direct type assertions through the graph's
designated type predicate; no subclass closure or other inference is
applied.  The oracle is deliberately brute force: it is the ground
truth that generation and evaluation are validated against.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, FrozenSet, Optional, Set

from kgcbench.graph import ANY, KnowledgeGraph, validate_uri

FAMILIES = (
    "tc01",
    "tc02",
    "tc03",
    "tc04",
    "tc05",
    "tc06",
    "tc07",
    "tc08",
    "tc09",
    "tc10",
    "tc11",
    "tc12",
)

# Which parameters each family binds.  Families tc04/tc05 quantify over
# all relations, so they carry no r; minCard is fixed to 2 in gold
# standard v1 but stays a parameter of the expression.
_REQUIRED_FIELDS: Dict[str, FrozenSet[str]] = {
    "tc01": frozenset({"r"}),
    "tc02": frozenset({"r"}),
    "tc03": frozenset({"r"}),
    "tc04": frozenset({"e"}),
    "tc05": frozenset({"e"}),
    "tc06": frozenset({"r", "e"}),
    "tc07": frozenset({"r", "T"}),
    "tc08": frozenset({"r", "T"}),
    "tc09": frozenset({"r", "min_card"}),
    "tc10": frozenset({"r", "min_card"}),
    "tc11": frozenset({"r", "T", "min_card"}),
    "tc12": frozenset({"r", "T", "min_card"}),
}


class ExprError(ValueError):
    """Raised when a constructor expression is malformed."""


@dataclass(frozen=True)
class ConstructorExpr:
    """One bound test-case expression.

    Exactly the fields required by the family may be set.  ``min_card``
    accepts any value >= 1 so that degenerate parameterisations (which
    must coincide with the purely existential families) remain
    expressible; the gold-standard generator itself only emits
    ``min_card`` >= 2.
    """

    family: str
    r: Optional[str] = None
    e: Optional[str] = None
    T: Optional[str] = None
    min_card: Optional[int] = None

    def __post_init__(self) -> None:
        if self.family not in _REQUIRED_FIELDS:
            raise ExprError(f"unknown family: {self.family!r}")
        required = _REQUIRED_FIELDS[self.family]
        present = {
            name
            for name in ("r", "e", "T", "min_card")
            if getattr(self, name) is not None
        }
        if present != required:
            raise ExprError(
                f"{self.family} requires fields {sorted(required)}, got {sorted(present)}"
            )
        for name in ("r", "e", "T"):
            value = getattr(self, name)
            if value is not None:
                validate_uri(value)
        if self.min_card is not None and self.min_card < 1:
            raise ExprError(f"min_card must be >= 1, got {self.min_card}")

    def to_text(self) -> str:
        """Canonical one-line form, e.g. ``tc07 r=<...> T=<...>``."""
        parts = [self.family]
        if self.r is not None:
            parts.append(f"r=<{self.r}>")
        if self.e is not None:
            parts.append(f"e=<{self.e}>")
        if self.T is not None:
            parts.append(f"T=<{self.T}>")
        if self.min_card is not None:
            parts.append(f"minCard={self.min_card}")
        return " ".join(parts)

    @classmethod
    def from_text(cls, text: str) -> "ConstructorExpr":
        tokens = text.split()
        if not tokens:
            raise ExprError("empty expression text")
        family = tokens[0]
        kwargs: Dict[str, object] = {}
        for token in tokens[1:]:
            match = re.fullmatch(r"(r|e|T)=<([^<>]+)>|minCard=(\d+)", token)
            if match is None:
                raise ExprError(f"unparseable token: {token!r}")
            if match.group(3) is not None:
                kwargs["min_card"] = int(match.group(3))
            else:
                kwargs[match.group(1)] = match.group(2)
        return cls(family=family, **kwargs)  # type: ignore[arg-type]


def matches(graph: KnowledgeGraph, expr: ConstructorExpr, entity: str) -> bool:
    """Decide membership of ``entity`` in ``expr`` over ``graph``."""
    family = expr.family
    if family == "tc01":
        return len(graph.successors(entity, expr.r)) > 0
    if family == "tc02":
        return len(graph.predecessors(entity, expr.r)) > 0
    if family == "tc03":
        return (
            len(graph.successors(entity, expr.r)) > 0
            or len(graph.predecessors(entity, expr.r)) > 0
        )
    if family == "tc04":
        return (
            expr.e in graph.successors(entity, ANY)
            or expr.e in graph.predecessors(entity, ANY)
        )
    if family == "tc05":
        # forward chain x -> z -> e, or backward chain x <- z <- e
        if graph.successors(entity, ANY) & graph.predecessors(expr.e, ANY):
            return True
        return bool(graph.predecessors(entity, ANY) & graph.successors(expr.e, ANY))
    if family == "tc06":
        return expr.e in graph.successors(entity, expr.r)
    if family == "tc07":
        return any(
            expr.T in graph.types_of(y) for y in graph.successors(entity, expr.r)
        )
    if family == "tc08":
        return any(
            expr.T in graph.types_of(y) for y in graph.predecessors(entity, expr.r)
        )
    if family == "tc09":
        return len(graph.successors(entity, expr.r)) >= expr.min_card
    if family == "tc10":
        return len(graph.predecessors(entity, expr.r)) >= expr.min_card
    if family == "tc11":
        hits = sum(
            1 for y in graph.successors(entity, expr.r) if expr.T in graph.types_of(y)
        )
        return hits >= expr.min_card
    if family == "tc12":
        hits = sum(
            1 for y in graph.predecessors(entity, expr.r) if expr.T in graph.types_of(y)
        )
        return hits >= expr.min_card
    raise ExprError(f"unknown family: {family!r}")


def enumerate_members(graph: KnowledgeGraph, expr: ConstructorExpr) -> Set[str]:
    """All entities of the graph for which :func:`matches` holds."""
    return {entity for entity in graph.entities() if matches(graph, expr, entity)}
