"""Basic opens, covers and the point-level spectrum.

D(a) is the set of primes not containing a.  Inclusion of basic opens is
decided through zero sets: D(a) <= D(b) iff Z(b) n Z(I) lies in Z(a).  The
only primes represented individually are the point ideals m_x.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from cinfty import terms, upoly
from cinfty.cring import Hom, Presentation, RingElement
from cinfty.interval import Box, Interval
from cinfty.points import SpectrumPoint, sample_points
from cinfty.terms import ONE, ZERO, Term
from cinfty.verdict import (DEFAULT_BUDGET, QueryBudget, Verdict, Witness, meet, proved,
                            refuted, unknown)


@dataclass(frozen=True)
class BasicOpen:
    presentation: Presentation
    term: Term

    @classmethod
    def of(cls, p: Presentation, a: RingElement | Term | str) -> "BasicOpen":
        if isinstance(a, str):
            a = p.parse(a)
        if isinstance(a, RingElement):
            a = a.term
        return cls(p, p.check_term(a))

    def __str__(self) -> str:
        return f"D({self.term})"


def _same(u: BasicOpen, v: BasicOpen) -> Presentation:
    if u.presentation != v.presentation:
        raise ValueError("basic opens over different presentations")
    return u.presentation


def basic_leq(u: BasicOpen, v: BasicOpen, budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
    """D(a) <= D(b)."""
    p = _same(u, v)
    return p.subset([v.term], u.term, budget)


def basic_equal(u: BasicOpen, v: BasicOpen, budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
    return meet([basic_leq(u, v, budget), basic_leq(v, u, budget)])


def basic_meet(u: BasicOpen, v: BasicOpen) -> BasicOpen:
    return BasicOpen(_same(u, v), u.term * v.term)


def basic_join(u: BasicOpen, v: BasicOpen) -> BasicOpen:
    return BasicOpen(_same(u, v), u.term * u.term + v.term * v.term)


@dataclass
class CoverResult:
    verdict: Verdict
    subcover: tuple[int, ...] = ()
    # 1 = sum lambda_i * a_i (+ sum mu_j * g_j over relations), when found
    combination: tuple[Term, ...] | None = None

    @property
    def proved(self) -> bool:
        return self.verdict.proved


def _bezout(polys: list[list[Fraction]]) -> list[list[Fraction]] | None:
    """Coefficients c_i with sum c_i * p_i = 1, if the gcd is a constant."""
    g, coeffs = polys[0], [[Fraction(1)]]
    for p in polys[1:]:
        g2, s, t = upoly.extended_gcd(g, p)
        coeffs = [upoly.mul(c, s) for c in coeffs] + [t]
        g = g2
    if upoly.degree(g) != 0:
        return None
    return [upoly.scale(c, 1 / g[0]) for c in coeffs]


def _combination(p: Presentation, cover: list[Term]) -> tuple[Term, ...] | None:
    gens = cover + list(p.relations)
    vs = set()
    for t in gens:
        vs |= t.variables()
    if len(vs) > 1 or not all(t.is_polynomial() for t in gens):
        return None
    j = next(iter(vs)) if vs else 0
    polys = [terms.as_univariate(t, j) for t in gens]
    if any(not q for q in polys):
        return None
    cs = _bezout(polys)
    if cs is None:
        return None
    lams = tuple(terms.from_univariate(c, j) for c in cs)
    if sum((l * t for l, t in zip(lams, gens)), ZERO) != ONE:
        return None
    return lams[:len(cover)]


def covers(p: Presentation, opens: Sequence[Term | BasicOpen],
           budget: QueryBudget = DEFAULT_BUDGET) -> CoverResult:
    """Do the D(a_i) cover the spectrum?  Equivalently, the a_i have no common
    zero on Z(I) n box.  A PROVED cover is pruned greedily to a minimal one."""
    ts = [o.term if isinstance(o, BasicOpen) else o for o in opens]
    if not ts:
        raise ValueError("cover needs at least one open")
    v = p.subset(ts, ONE, budget)
    if not v.proved:
        return CoverResult(v)
    keep = list(range(len(ts)))
    for i in range(len(ts)):
        trial = [k for k in keep if k != i]
        if trial and p.subset([ts[k] for k in trial], ONE, budget).proved:
            keep = trial
    sub = [ts[k] for k in keep]
    return CoverResult(v, tuple(keep), _combination(p, sub))


def point_in_open(x: SpectrumPoint, u: BasicOpen) -> Verdict:
    """m_x lies in D(a) iff a(x) != 0."""
    s = x.sign(u.term)
    if s is None:
        return unknown(reason="sign of the term at the point is not certified", point=str(x))
    if s == 0:
        return refuted(Witness(Box(x.sides)), {"rule": "vanishes-at-point"})
    return proved({"rule": "nonzero-at-point", "sign": s})


def separating_open(p: Presentation, x: SpectrumPoint, y: SpectrumPoint) -> BasicOpen | None:
    """Some D(x_i - c) containing y but not x (a T0 witness)."""
    for i, (sx, sy) in enumerate(zip(x.sides, y.sides)):
        if sx.is_point():
            t = Term.var(i) - sx.lo
            if y.sign(t) not in (0, None):
                return BasicOpen(p, t)
    return None


# -- products ------------------------------------------------------------------------

def _indicator(i: int, k: int, e: Term) -> Term:
    """Lagrange polynomial in e: 1 at e = i, 0 at the other labels 0..k-1."""
    out = ONE
    for j in range(k):
        if j != i:
            out = out * (e - j) * Fraction(1, i - j)
    return out


@dataclass
class FormalProduct:
    """A finite product A_0 x ... x A_{k-1}, realised on the disjoint union of
    the zero sets: coordinates (u_0..u_{N-1}, e) with e labelling the factor."""

    factors: tuple[Presentation, ...]
    presentation: Presentation = field(init=False)

    def __post_init__(self):
        k = len(self.factors)
        n = max((f.arity for f in self.factors), default=0)
        e = Term.var(n)
        rels = [terms.product(e - i for i in range(k))]
        for i, f in enumerate(self.factors):
            li = _indicator(i, k, e)
            rels += [li * g for g in f.relations]
            rels += [li * Term.var(m) for m in range(f.arity, n)]
        sides = []
        for m in range(n):
            lo, hi = Fraction(0), Fraction(0)
            for f in self.factors:
                if m < f.arity:
                    lo, hi = min(lo, f.box[m].lo), max(hi, f.box[m].hi)
            sides.append(Interval(lo, hi))
        sides.append(Interval(Fraction(0), Fraction(max(k - 1, 0))))
        self.presentation = Presentation(n + 1, tuple(rels), Box(tuple(sides)))

    @property
    def label_var(self) -> int:
        return self.presentation.arity - 1

    def element(self, components: Sequence[Term]) -> Term:
        """The tuple (a_0, ..., a_{k-1}) as a single term."""
        if len(components) != len(self.factors):
            raise ValueError("one component per factor required")
        e = Term.var(self.label_var)
        return sum((_indicator(i, len(self.factors), e) * a for i, a in enumerate(components)), ZERO)

    def embed(self, i: int, x: SpectrumPoint) -> SpectrumPoint:
        n = self.label_var
        sides = list(x.sides) + [Interval.point(0)] * (n - x.dim) + [Interval.point(i)]
        return SpectrumPoint(tuple(sides), x.algebraic)

    def points(self, resolution: int = 8, budget: QueryBudget = DEFAULT_BUDGET):
        out = []
        for i, f in enumerate(self.factors):
            for x in sample_points(f, resolution, budget):
                out.append((i, x, self.embed(i, x)))
        return out


@dataclass
class ProductReport:
    product: FormalProduct
    points: list[tuple[int, SpectrumPoint, SpectrumPoint]]
    embedded: Verdict
    opens_checked: int
    mismatches: list[str]
    discrete: bool

    @property
    def ok(self) -> bool:
        return self.embedded.proved and not self.mismatches


def product_spectrum(*factors: Presentation, opens: Sequence[Sequence[Term]] | None = None,
                     resolution: int = 8, budget: QueryBudget = DEFAULT_BUDGET) -> ProductReport:
    """Spec(A_0 x ... x A_{k-1}) against the disjoint union of the Spec(A_i).

    For each sampled tuple (a_0, ..., a_{k-1}) the open D((a_i)) must contain
    exactly the points (x, i) with x in D(a_i)."""
    prod = FormalProduct(tuple(factors))
    pts = prod.points(resolution, budget)
    bad = [str(y) for _, _, y in pts if not all(y.vanishes(g) for g in prod.presentation.relations)]
    embedded = proved({"rule": "embedded", "points": len(pts)}) if not bad else \
        refuted(None, {"rule": "point-off-product", "points": bad})
    if opens is None:
        opens = _default_opens(factors)
    mismatches = []
    for comps in opens:
        u = BasicOpen(prod.presentation, prod.element(comps))
        for i, x, y in pts:
            lhs = point_in_open(y, u)
            rhs = point_in_open(x, BasicOpen(factors[i], comps[i]))
            if lhs.kind != rhs.kind:
                mismatches.append(f"{u} at {y}: {lhs.kind} vs {rhs.kind}")
    discrete = all(
        [j for j, _, z in pts if point_in_open(z, BasicOpen(prod.presentation, _indicator(
            i, len(factors), Term.var(prod.label_var)))).proved] == [i]
        for i, _, _ in pts) if all(f.arity == 0 for f in factors) else False
    return ProductReport(prod, pts, embedded, len(opens), mismatches, discrete)


def _default_opens(factors: Sequence[Presentation]) -> list[list[Term]]:
    """Ten component tuples mixing 0, 1 and the coordinate functions."""
    k = len(factors)
    cands: list[list[Term]] = []
    for f in factors:
        opts = [ZERO, ONE]
        if f.arity:
            x = Term.var(0)
            opts += [x, x - 1, x * x + 1, x + 1]
        cands.append(opts)
    out = []
    for r in range(10):
        out.append([cands[i][(r * (i + 1) + i) % len(cands[i])] for i in range(k)])
    return out


# -- spectral maps ----------------------------------------------------------------------

@dataclass
class SpectralMapReport:
    preimage: BasicOpen
    verdict: Verdict
    checked: int


def _image_point(h: Hom, y: SpectrumPoint) -> SpectrumPoint:
    if y.exact:
        vals = [terms.exact_value(t, y.point) for t in h.images]
        if all(v is not None for v in vals):
            return SpectrumPoint.at(vals)
    return SpectrumPoint(tuple(y.enclosure(t) for t in h.images))


def spectral_map(h: Hom, u: BasicOpen, resolution: int = 8,
                 budget: QueryBudget = DEFAULT_BUDGET) -> SpectralMapReport:
    """The preimage of D(a) under Spec(h) is D(h(a)), checked at target points."""
    if u.presentation != h.source:
        raise ValueError("open is not over the source of the map")
    pre = BasicOpen(h.target, h.apply_term(u.term))
    pts = sample_points(h.target, resolution, budget)
    parts = []
    for y in pts:
        lhs = point_in_open(y, pre)
        rhs = point_in_open(_image_point(h, y), u)
        if lhs.decided and rhs.decided and lhs.kind != rhs.kind:
            parts.append(refuted(Witness(Box(y.sides)), {"rule": "preimage-mismatch"}))
        elif not (lhs.decided and rhs.decided):
            parts.append(unknown(reason="undecided membership", point=str(y)))
    v = meet(parts) if parts else proved({"rule": "preimage-agrees", "points": len(pts)})
    if v.proved:
        v = proved({"rule": "preimage-agrees", "points": len(pts)})
    return SpectralMapReport(pre, v, len(pts))


# -- constructible basis ----------------------------------------------------------------

@dataclass(frozen=True)
class ConstructibleBasic:
    """D(a) n Z(b)."""

    presentation: Presentation
    a: Term
    b: Term

    def contains(self, x: SpectrumPoint) -> Verdict:
        sa, sb = x.sign(self.a), x.sign(self.b)
        if sa is None or sb is None:
            return unknown(reason="undetermined sign", point=str(x))
        if sa != 0 and sb == 0:
            return proved({"rule": "in-constructible"})
        return refuted(Witness(Box(x.sides)), {"rule": "not-in-constructible"})

    def __str__(self) -> str:
        return f"D({self.a}) n Z({self.b})"


def constructible_meet(c1: ConstructibleBasic, c2: ConstructibleBasic) -> ConstructibleBasic:
    if c1.presentation != c2.presentation:
        raise ValueError("constructible sets over different presentations")
    return ConstructibleBasic(c1.presentation, c1.a * c2.a, c1.b * c1.b + c2.b * c2.b)


def constructible_meet_check(c1: ConstructibleBasic, c2: ConstructibleBasic,
                             resolution: int = 8) -> Verdict:
    """Point membership in the meet equals membership in both."""
    m = constructible_meet(c1, c2)
    free = Presentation(m.presentation.arity, (), m.presentation.box)
    pts = sample_points(m.presentation if m.presentation.relations else free, resolution)
    for x in pts:
        both = meet([c1.contains(x), c2.contains(x)])
        got = m.contains(x)
        if both.decided and got.decided and both.kind != got.kind:
            return refuted(Witness(Box(x.sides)), {"rule": "meet-mismatch"})
    return proved({"rule": "meet-agrees", "points": len(pts)})


# -- nilradical ----------------------------------------------------------------------------

@dataclass
class NilradicalReport:
    membership: Verdict
    points: int
    nonvanishing: list[SpectrumPoint]
    consistent: bool


def nilradical_point_test(p: Presentation, f: Term, resolution: int = 8,
                          budget: QueryBudget = DEFAULT_BUDGET) -> NilradicalReport:
    """Radical membership against vanishing at the sampled points of Z(I)."""
    v = p.radical_zero(f, budget)
    pts = sample_points(p, resolution, budget)
    if v.refuted and v.witness is not None and v.witness.exact:
        w = SpectrumPoint.at(v.witness.point)
        if all(w.vanishes(g) for g in p.relations) and w not in pts:
            pts.append(w)
    bad = [x for x in pts if x.sign(f) not in (0, None)]
    if v.proved:
        ok = not bad
    elif v.refuted:
        ok = bool(bad) or (v.witness is not None and not v.witness.exact)
    else:
        ok = True
    return NilradicalReport(v, len(pts), bad, ok)
