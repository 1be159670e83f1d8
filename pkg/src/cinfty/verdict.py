"""Three-valued certified answers and query budgets."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable

from cinfty.interval import Box, Interval


class Kind(enum.Enum):
    PROVED = "PROVED"
    REFUTED = "REFUTED"
    UNKNOWN = "UNKNOWN"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class QueryBudget:
    max_depth: int = 40
    min_width: Fraction = Fraction(1, 2 ** 40)
    max_boxes: int = 10 ** 6
    workers: int = 1

    def __post_init__(self):
        if self.max_depth <= 0 or self.min_width <= 0 or self.max_boxes <= 0 or self.workers <= 0:
            raise ValueError("budget fields must be positive")

    def scaled(self, factor: int) -> "QueryBudget":
        """A budget ``factor`` times larger in every dimension."""
        return QueryBudget(self.max_depth * factor, self.min_width / factor,
                           self.max_boxes * factor, self.workers)


DEFAULT_BUDGET = QueryBudget()


@dataclass(frozen=True)
class Witness:
    """A point (degenerate box) or an isolating box for a refutation."""

    box: Box
    note: str = ""

    @classmethod
    def at(cls, point, note: str = "") -> "Witness":
        return cls(Box.point(point), note)

    @property
    def exact(self) -> bool:
        return all(iv.is_point() for iv in self.box.intervals)

    @property
    def point(self) -> tuple[Fraction, ...]:
        return self.box.center()

    def lift(self, index: int, side: Interval) -> "Witness":
        """Insert a coordinate at position ``index``."""
        sides = self.box.intervals
        return Witness(Box(sides[:index] + (side,) + sides[index:]), self.note)

    def with_side(self, index: int, side: Interval) -> "Witness":
        return Witness(self.box.replace(index, side), self.note)

    def to_json(self) -> Any:
        if self.exact:
            return {"point": [str(v) for v in self.point]}
        return {"box": [[str(iv.lo), str(iv.hi)] for iv in self.box.intervals]}

    def __str__(self) -> str:
        if self.exact:
            return "(" + ", ".join(str(v) for v in self.point) + ")"
        return str(self.box)


@dataclass(frozen=True)
class Verdict:
    kind: Kind
    witness: Witness | None = None
    certificate: Any = None
    report: dict = field(default_factory=dict)

    @property
    def proved(self) -> bool:
        return self.kind is Kind.PROVED

    @property
    def refuted(self) -> bool:
        return self.kind is Kind.REFUTED

    @property
    def unknown(self) -> bool:
        return self.kind is Kind.UNKNOWN

    @property
    def decided(self) -> bool:
        return self.kind is not Kind.UNKNOWN

    def negate(self) -> "Verdict":
        """Swap PROVED and REFUTED; used when a query is the negation of another."""
        flip = {Kind.PROVED: Kind.REFUTED, Kind.REFUTED: Kind.PROVED, Kind.UNKNOWN: Kind.UNKNOWN}
        return Verdict(flip[self.kind], self.witness, self.certificate, self.report)

    def __str__(self) -> str:
        if self.kind is Kind.REFUTED and self.witness is not None:
            return f"REFUTED (witness {self.witness})"
        return self.kind.value


def proved(certificate=None) -> Verdict:
    return Verdict(Kind.PROVED, certificate=certificate)


def refuted(witness: Witness | None, certificate=None) -> Verdict:
    return Verdict(Kind.REFUTED, witness=witness, certificate=certificate)


def unknown(**report) -> Verdict:
    return Verdict(Kind.UNKNOWN, report=report)


def meet(verdicts: Iterable[Verdict]) -> Verdict:
    """Conjunction: any REFUTED wins, all PROVED gives PROVED, else UNKNOWN."""
    verdicts = list(verdicts)
    for v in verdicts:
        if v.refuted:
            return v
    for v in verdicts:
        if v.unknown:
            return v
    return proved({"rule": "meet", "parts": [v.certificate for v in verdicts]})


def join(verdicts: Iterable[Verdict]) -> Verdict:
    """Disjunction: any PROVED wins, all REFUTED gives REFUTED, else UNKNOWN."""
    verdicts = list(verdicts)
    for v in verdicts:
        if v.proved:
            return v
    for v in verdicts:
        if v.unknown:
            return v
    return verdicts[0] if verdicts else refuted(None)
