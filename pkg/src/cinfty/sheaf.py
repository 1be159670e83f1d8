"""Sections of the structure presheaf over basic opens.

A section over D(a) is a single fraction n/d whose denominator lies in the
smooth saturation of {a}, i.e. d has no zero on Z(I) n Coz(a).  Restriction
to a smaller basic open keeps the fraction and re-certifies the denominator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from cinfty.cring import LocalizedPresentation, localize
from cinfty.interval import Interval
from cinfty.points import SpectrumPoint, sample_points
from cinfty.spectrum import BasicOpen, basic_leq, point_in_open
from cinfty.terms import ONE, Term, _coerce
from cinfty.verdict import DEFAULT_BUDGET, QueryBudget, Verdict, meet, proved, refuted, unknown


class SectionError(ValueError):
    def __init__(self, message: str, verdict: Verdict | None = None):
        self.verdict = verdict
        super().__init__(message if verdict is None else f"{message}: {verdict}")


@dataclass(frozen=True)
class SectionOnBasic:
    open: BasicOpen
    numerator: Term
    denominator: Term = ONE
    certificate: Verdict | None = None

    def __str__(self) -> str:
        if self.denominator == ONE:
            return f"{self.numerator} on {self.open}"
        return f"({self.numerator})/({self.denominator}) on {self.open}"

    def same_fraction(self, other: "SectionOnBasic") -> bool:
        return self.numerator == other.numerator and self.denominator == other.denominator

    def __add__(self, other: "SectionOnBasic") -> "SectionOnBasic":
        _check_same_open(self, other)
        n = self.numerator * other.denominator + other.numerator * self.denominator
        return SectionOnBasic(self.open, n, self.denominator * other.denominator)

    def __mul__(self, other: "SectionOnBasic") -> "SectionOnBasic":
        _check_same_open(self, other)
        return SectionOnBasic(self.open, self.numerator * other.numerator,
                              self.denominator * other.denominator)

    def __neg__(self) -> "SectionOnBasic":
        return SectionOnBasic(self.open, -self.numerator, self.denominator, self.certificate)


def _check_same_open(s: SectionOnBasic, t: SectionOnBasic) -> None:
    if s.open != t.open:
        raise SectionError("sections live over different opens")


def denominator_ok(u: BasicOpen, d: Term, budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
    """d belongs to the smooth saturation of {a}: Z(d) n Z(I) lies in Z(a)."""
    return u.presentation.subset([d], u.term, budget)


def section(u: BasicOpen, numerator: Term | int | Fraction, denominator: Term | int | Fraction = ONE,
            budget: QueryBudget = DEFAULT_BUDGET) -> SectionOnBasic:
    p = u.presentation
    numerator, denominator = _coerce(numerator), _coerce(denominator)
    p.check_term(numerator)
    p.check_term(denominator)
    v = denominator_ok(u, denominator, budget)
    if not v.proved:
        raise SectionError(f"denominator {denominator} is not certified invertible on {u}", v)
    return SectionOnBasic(u, numerator, denominator, v)


def section_ring(u: BasicOpen) -> LocalizedPresentation:
    return localize(u.presentation, u.term)


@dataclass(frozen=True)
class GermValue:
    value: Fraction | Interval
    invertible: Verdict

    @property
    def exact(self) -> bool:
        return isinstance(self.value, Fraction)

    def as_float(self) -> float:
        if isinstance(self.value, Fraction):
            return float(self.value)
        return float(self.value.mid)


def _as_interval(v: Fraction | Interval) -> Interval:
    return v if isinstance(v, Interval) else Interval.point(v)


def _divide(n: Interval, d: Interval) -> Interval:
    lo, hi = sorted((1 / d.lo, 1 / d.hi))
    return n * Interval(lo, hi)


def germ_eval(s: SectionOnBasic, x: SpectrumPoint) -> GermValue:
    """Residue value n(x)/d(x) of the germ of s at m_x."""
    inside = point_in_open(x, s.open)
    if not inside.proved:
        raise SectionError(f"point {x} is not certified to lie in {s.open}", inside)
    nv, dv = x.exact_value(s.numerator), x.exact_value(s.denominator)
    if nv is not None and dv is not None and dv != 0:
        value: Fraction | Interval = nv / dv
        inv = proved({"rule": "nonzero-value"}) if value != 0 else refuted(None, {"rule": "zero-value"})
        return GermValue(value, inv)
    sd = x.sign(s.denominator)
    if sd in (0, None):
        raise SectionError(f"denominator is not certified nonzero at {x}")
    sn = x.sign(s.numerator)
    enc = _divide(_as_interval(x.value(s.numerator)), _as_interval(x.value(s.denominator)))
    if sn is None:
        return GermValue(enc, unknown(reason="numerator sign not certified"))
    inv = proved({"rule": "nonzero-value"}) if sn != 0 else refuted(None, {"rule": "zero-value"})
    return GermValue(Interval.point(0) if sn == 0 else enc, inv)


def _sample_open(u: BasicOpen, resolution: int, budget: QueryBudget) -> list[SpectrumPoint]:
    """Points of Z(I) n Coz(a), without the slice coordinate."""
    n = u.presentation.arity
    pts = sample_points(localize(u.presentation, u.term).presentation, resolution, budget)
    return [SpectrumPoint(p.sides[:n], p.algebraic) for p in pts]


@dataclass
class RestrictionResult:
    section: SectionOnBasic
    leq: Verdict
    samples: int
    max_error: float


def restrict(s: SectionOnBasic, target: BasicOpen, budget: QueryBudget = DEFAULT_BUDGET,
             resolution: int = 32, tol: float = 1e-9) -> RestrictionResult:
    """The unique restriction map from D(b) down to a smaller D(a)."""
    if target == s.open:
        return RestrictionResult(s, proved({"rule": "identity"}), 0, 0.0)
    leq = basic_leq(target, s.open, budget)
    if not leq.proved:
        raise SectionError(f"{target} is not certified to lie inside {s.open}", leq)
    v = denominator_ok(target, s.denominator, budget)
    if not v.proved:
        raise SectionError("denominator could not be re-certified on the smaller open", v)
    out = SectionOnBasic(target, s.numerator, s.denominator, v)
    worst = 0.0
    count = 0
    for x in _sample_open(target, resolution, budget):
        a, b = germ_eval(s, x), germ_eval(out, x)
        worst = max(worst, abs(a.as_float() - b.as_float()))
        count += 1
    if worst > tol:
        raise SectionError(f"restriction disagrees at sample points (max error {worst})")
    return RestrictionResult(out, leq, count, worst)


@dataclass
class FunctorialityReport:
    leqs: Verdict
    syntactic: bool
    samples: int
    max_error: float

    @property
    def ok(self) -> bool:
        return self.leqs.proved and self.syntactic and self.max_error <= 1e-9


def functoriality_check(chain: Sequence[BasicOpen], sections: Sequence[SectionOnBasic],
                        budget: QueryBudget = DEFAULT_BUDGET, resolution: int = 16) -> FunctorialityReport:
    """For D(a) <= D(b) <= D(c): restricting c->b->a equals restricting c->a."""
    small, mid, big = chain
    leqs = meet([basic_leq(small, mid, budget), basic_leq(mid, big, budget)])
    if not leqs.proved:
        return FunctorialityReport(leqs, False, 0, 0.0)
    syntactic = True
    worst = 0.0
    count = 0
    pts = _sample_open(small, resolution, budget)
    for s in sections:
        if s.open != big:
            raise SectionError("sections must live on the largest open of the chain")
        two = restrict(restrict(s, mid, budget, resolution).section, small, budget, resolution).section
        one = restrict(s, small, budget, resolution).section
        syntactic = syntactic and two.same_fraction(one)
        for x in pts:
            worst = max(worst, abs(germ_eval(two, x).as_float() - germ_eval(one, x).as_float()))
            count += 1
    return FunctorialityReport(leqs, syntactic, count, worst)
