"""Point-level order theory: the preorder f < g, point orderings and support."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from cinfty.cring import Presentation
from cinfty.interval import Box
from cinfty.points import SpectrumPoint
from cinfty.spectrum import BasicOpen, point_in_open
from cinfty.terms import Term
from cinfty.verdict import DEFAULT_BUDGET, QueryBudget, Verdict, Witness, proved, refuted, unknown


def precedes(f: Term, g: Term, p: Presentation, budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
    """f < g: g - f is strictly positive on Z(I) n box.

    REFUTED only with a certified point of Z(I) where g - f <= 0; a touching
    zero that is not exactly certified stays UNKNOWN."""
    return p.positive(g - f, budget)


@dataclass(frozen=True)
class PointOrdering:
    """P_x = {f : f(x) >= 0}."""

    point: SpectrumPoint

    def __str__(self) -> str:
        return f"P_{self.point}"


def _sign_verdict(x: SpectrumPoint, t: Term, accept: set[int]) -> Verdict:
    s = x.sign(t)
    if s is None:
        return unknown(reason="sign not certified", point=str(x), term=str(t))
    if s in accept:
        return proved({"rule": "sign-at-point", "sign": s})
    return refuted(Witness(Box(x.sides)), {"rule": "sign-at-point", "sign": s})


def ordering_member(o: PointOrdering, f: Term, budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
    return _sign_verdict(o.point, f, {0, 1})


def harrison_member(o: PointOrdering, a: Term, budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
    """P_x lies in H(a): a is in P_x but not in its support."""
    return _sign_verdict(o.point, a, {1})


def supp_of(o: PointOrdering) -> SpectrumPoint:
    """supp(P_x) = P_x n -P_x = m_x."""
    return o.point


@dataclass
class SuppSpectralReport:
    rows: list[tuple[SpectrumPoint, Verdict, Verdict, Verdict]] = field(default_factory=list)

    @property
    def agree(self) -> bool:
        for _, in_open, pos, neg in self.rows:
            if not (in_open.decided and pos.decided and neg.decided):
                continue
            if in_open.proved != (pos.proved or neg.proved):
                return False
        return True


def supp_spectral_check(p: Presentation, a: Term, points: Sequence[SpectrumPoint],
                        budget: QueryBudget = DEFAULT_BUDGET) -> SuppSpectralReport:
    """supp^-1 of D(a) is H(a) u H(-a), pointwise."""
    u = BasicOpen(p, a)
    rep = SuppSpectralReport()
    for x in points:
        o = PointOrdering(x)
        rep.rows.append((x, point_in_open(supp_of(o), u), harrison_member(o, a, budget),
                         harrison_member(o, -a, budget)))
    return rep


@dataclass
class SuppBijectionReport:
    size: int
    injective: bool
    surjective: bool

    @property
    def ok(self) -> bool:
        return self.injective and self.surjective


def _distinct(x: SpectrumPoint, y: SpectrumPoint) -> bool:
    for i, (sx, sy) in enumerate(zip(x.sides, y.sides)):
        if sx.hi < sy.lo or sy.hi < sx.lo:
            return True
        if sx.is_point() and y.sign(Term.var(i) - sx.lo) not in (0, None):
            return True
    return False


def supp_bijection_check(p: Presentation, points: Sequence[SpectrumPoint]) -> SuppBijectionReport:
    """P_x |-> m_x is injective on the samples and hits every sampled m_x once."""
    orderings = [PointOrdering(x) for x in points]
    supports = [supp_of(o) for o in orderings]
    injective = all(_distinct(supports[i], supports[j])
                    for i in range(len(points)) for j in range(i))
    hits = [sum(1 for s in supports if not _distinct(s, x)) for x in points]
    return SuppBijectionReport(len(points), injective, all(h == 1 for h in hits))
