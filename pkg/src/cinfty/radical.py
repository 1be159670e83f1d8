"""C-infinity radicals and smooth saturations, decided on zero sets.

f lies in the C-infinity radical of I exactly when f vanishes on Z(I); g
lies in the smooth saturation of S modulo I exactly when g has no zero on
Z(I) away from Z(prod S).  Both are answered as certified containments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from cinfty import terms
from cinfty.cring import Presentation, RingElement, is_invertible
from cinfty.terms import ONE, Term
from cinfty.verdict import DEFAULT_BUDGET, QueryBudget, Verdict, meet, proved


def _term(x: RingElement | Term) -> Term:
    return x.term if isinstance(x, RingElement) else x


@dataclass(frozen=True)
class RadicalPredicate:
    """The C-infinity radical of the relation ideal, tested by query."""

    presentation: Presentation

    def __call__(self, f: Term, budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
        return radical_member(self.presentation, f, budget)


@dataclass(frozen=True)
class SaturationPredicate:
    """The smooth saturation of a finite set S, stored as the product of S."""

    presentation: Presentation
    product: Term

    @classmethod
    def of(cls, p: Presentation, s: Sequence[RingElement | Term]) -> "SaturationPredicate":
        return cls(p, terms.product(_term(x) for x in s))

    def __call__(self, g: Term, budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
        return self.presentation.subset([g], self.product, budget)


def radical_member(p: Presentation, f: RingElement | Term,
                   budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
    return p.subset([], _term(f), budget)


def saturation_member(p: Presentation, s: Sequence[RingElement | Term], g: RingElement | Term,
                      budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
    if not s:
        raise ValueError("the inverted set must be nonempty")
    return SaturationPredicate.of(p, s)(_term(g), budget)


def radical_compare(p_i: Presentation, p_j: Presentation,
                    budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
    """Is the radical of I contained in the radical of J?  Decided as Z(J) in Z(I)."""
    if p_i.arity != p_j.arity or p_i.box != p_j.box:
        raise ValueError("presentations must share arity and box")
    parts = [p_j.subset([], g, budget) for g in p_i.relations]
    return meet(parts) if parts else proved({"rule": "no-relations"})


def nullstellensatz_check(p: Presentation, budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
    """PROVED exactly when Z(I) n box is empty, i.e. 1 is in the radical."""
    return p.is_trivial(budget)


@dataclass
class SeparationReport:
    monoid_side: Verdict
    saturation_side: Verdict

    @property
    def agree(self) -> bool:
        return self.monoid_side.kind == self.saturation_side.kind

    @property
    def intersects(self) -> bool | None:
        if not self.agree or self.monoid_side.unknown:
            return None
        return self.monoid_side.proved


def separation_check(p: Presentation, s: Sequence[RingElement | Term],
                     budget: QueryBudget = DEFAULT_BUDGET) -> SeparationReport:
    """Radical meets the monoid generated by S  versus  radical meets sat(S).

    Both sides reduce to Z(I) in Z(prod S); they are computed separately so
    the agreement is an observation rather than an identity.
    """
    prod = terms.product(_term(x) for x in s)
    monoid = radical_member(p, prod, budget)
    # some c in sat(S) lies in the radical iff c = prod S itself does
    sat = p.subset([], prod, budget)
    return SeparationReport(monoid, sat)


def semireal_check(p: Presentation, fs: Sequence[RingElement | Term],
                   budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
    """1 + sum f_i^2 is a unit."""
    return is_invertible(p.element(ONE + terms.sum_of_squares(_term(f) for f in fs)), budget)
