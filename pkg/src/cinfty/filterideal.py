"""Filters of closed sets and the Galois connection with ideals.

Closed sets are only ever zero sets of explicit terms.  A filter is given by
generators c_1..c_m and contains every closed set that includes Z(sum c_i^2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from cinfty import terms
from cinfty.cring import Presentation
from cinfty.interval import Box
from cinfty.radical import radical_member
from cinfty.terms import ONE, Term
from cinfty.verdict import DEFAULT_BUDGET, QueryBudget, Verdict, meet, proved


@dataclass(frozen=True)
class ClosedSetFilter:
    arity: int
    box: Box
    generators: tuple[Term, ...] = ()

    @property
    def minimum(self) -> Term:
        """A term whose zero set is the smallest member of the filter."""
        return terms.sum_of_squares(self.generators)

    @property
    def presentation(self) -> Presentation:
        """C^oo(R^n) modulo the generators: its zero set is the minimum."""
        return Presentation(self.arity, self.generators, self.box)

    def proper(self, budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
        """The empty set is not a member."""
        return self.presentation.subset([], ONE, budget).negate()

    def contains_set(self, c: Term, budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
        """Z(c) belongs to the filter."""
        return check(self, c, budget)

    def with_generator(self, c: Term) -> "ClosedSetFilter":
        return ClosedSetFilter(self.arity, self.box, self.generators + (c,))


def hat(p: Presentation) -> ClosedSetFilter:
    """The filter of zero sets of members of I."""
    return ClosedSetFilter(p.arity, p.box, tuple(p.relations))


def check(f: ClosedSetFilter, t: Term, budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
    """t belongs to the ideal of the filter: Z(t) is a member."""
    if t.arity_needed() > f.arity:
        raise ValueError(f"term {t} exceeds arity {f.arity}")
    return f.presentation.subset([], t, budget)


@dataclass
class AdjunctionReport:
    left: Verdict
    right: Verdict

    @property
    def agree(self) -> bool:
        return self.left.kind == self.right.kind


def galois_adjunction_test(p: Presentation, f: ClosedSetFilter,
                           budget: QueryBudget = DEFAULT_BUDGET) -> AdjunctionReport:
    """hat(I) within F  versus  I within the ideal of F."""
    if p.arity != f.arity or p.box != f.box:
        raise ValueError("presentation and filter must share arity and box")
    # every member of hat(I) contains Z(I); the filter contains them all
    # exactly when its minimum lies inside Z(I)
    left = f.presentation.subset([], terms.sum_of_squares(p.relations), budget)
    parts = [check(f, g, budget) for g in p.relations]
    right = meet(parts) if parts else proved({"rule": "no-relations"})
    return AdjunctionReport(left, right)


@dataclass
class ClosureReport:
    rows: list[tuple[Term, Verdict, Verdict]] = field(default_factory=list)

    @property
    def agree(self) -> bool:
        return all(a.kind == b.kind for _, a, b in self.rows)

    def agreement_rate(self) -> float:
        decided = [(a, b) for _, a, b in self.rows if a.decided or b.decided]
        if not decided:
            return 1.0
        return sum(a.kind == b.kind for a, b in decided) / len(decided)


def closure_equals_radical(p: Presentation, samples: Sequence[Term],
                           budget: QueryBudget = DEFAULT_BUDGET) -> ClosureReport:
    """The ideal of hat(I) agrees with the C-infinity radical of I."""
    f = hat(p)
    return ClosureReport([(t, check(f, t, budget), radical_member(p, t, budget)) for t in samples])
