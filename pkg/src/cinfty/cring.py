"""Finitely presented C-infinity rings C^oo(R^n)/<g_1..g_k> and their constructions.

Element equality is radical equality: a difference is zero when it vanishes
on the zero set of the relations inside the presentation's box.  Rings of
fractions adjoin one fresh variable y per inverted element together with the
relation y*a - 1.  Queries on such rings substitute y := 1/a and clear
denominators (the "slice" reading) instead of searching the huge y-interval.
"""

from __future__ import annotations

import contextlib
import contextvars
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from cinfty import terms
from cinfty.interval import Box, Interval
from cinfty.parsing import parse_term
from cinfty.terms import ONE, ZERO, Term
from cinfty.verdict import DEFAULT_BUDGET, QueryBudget, Verdict, Witness, meet, proved, refuted
from cinfty import zerocert

DEFAULT_SIDE = (Fraction(-2), Fraction(2))
SLICE_SIDE = (Fraction(-2 ** 20), Fraction(2 ** 20))


_recorder: contextvars.ContextVar[list | None] = contextvars.ContextVar("queries", default=None)


@contextlib.contextmanager
def recording():
    """Collect (presentation, kind, extra, target, verdict) for every query
    issued inside the block."""
    log: list = []
    token = _recorder.set(log)
    try:
        yield log
    finally:
        _recorder.reset(token)


def _record(p, kind, extra, target, verdict) -> None:
    log = _recorder.get()
    if log is not None:
        log.append((p, kind, tuple(extra), target, verdict))


class PresentationError(ValueError):
    pass


class NotIdempotent(PresentationError):
    def __init__(self, verdict: Verdict):
        self.verdict = verdict
        super().__init__(f"element is not idempotent: e^2 - e is {verdict}")


def _normalize_relations(relations: Iterable[Term]) -> tuple[Term, ...]:
    seen = {}
    for r in relations:
        if r.is_zero():
            continue
        c = r.constant_value()
        if c is not None:
            return (ONE,)
        seen.setdefault(r.key, r)
    return tuple(seen[k] for k in sorted(seen))


class _Unslicable(Exception):
    pass


def _clear_slice(t: Term, j: int, a: Term) -> tuple[Term, int]:
    """Numerator N and degree d with t(y := 1/a) = N / a^d."""
    d = t.degree_in(j)
    if d is None:
        raise _Unslicable
    if d == 0:
        return t, 0
    out = ZERO
    for k, c in t.coefficients_in(j).items():
        out = out + c * a ** (d - k)
    return out, d


@dataclass(frozen=True)
class Presentation:
    """C^oo(R^arity) / <relations>, certified relative to ``box``.

    ``slices`` lists (variable, inverted term) pairs introduced by
    localization, oldest first.
    """

    arity: int
    relations: tuple[Term, ...] = ()
    box: Box | None = None
    names: tuple[str, ...] = ()
    slices: tuple[tuple[int, Term], ...] = ()

    def __post_init__(self):
        rels = _normalize_relations(self.relations)
        for r in rels:
            if r.arity_needed() > self.arity:
                raise PresentationError(f"relation {r} exceeds arity {self.arity}")
        object.__setattr__(self, "relations", rels)
        box = self.box if self.box is not None else Box.cube(self.arity, *DEFAULT_SIDE)
        if box.dim != self.arity:
            raise PresentationError(f"box has dimension {box.dim}, arity is {self.arity}")
        object.__setattr__(self, "box", box)
        names = tuple(self.names) or tuple(f"x{i}" for i in range(self.arity))
        if len(names) != self.arity:
            raise PresentationError("one name per variable required")
        object.__setattr__(self, "names", names)

    @classmethod
    def free(cls, arity: int, box: Box | None = None) -> "Presentation":
        return cls(arity, (), box)

    @property
    def is_trivial_syntactically(self) -> bool:
        return self.relations == (ONE,)

    def parse(self, text: str) -> Term:
        return parse_term(text, self.arity)

    def element(self, term: Term | str) -> "RingElement":
        if isinstance(term, str):
            term = self.parse(term)
        return RingElement(self, term)

    def check_term(self, t: Term) -> Term:
        if t.arity_needed() > self.arity:
            raise PresentationError(f"term {t} exceeds arity {self.arity}")
        return t

    def __str__(self) -> str:
        rels = "; ".join(str(r) for r in self.relations)
        return f"C^oo(R^{self.arity})/<{rels}>"

    # -- zero-set reductions --------------------------------------------------

    def _reduce(self, constraints: list[Term], targets: list[Term]):
        """Eliminate slice variables: (constraints, cozero terms, target numerators)."""
        cs = list(constraints)
        ts = list(targets)
        coz: list[Term] = []
        for j, a in reversed(self.slices):
            cs = [_clear_slice(c, j, a)[0] for c in cs]
            ts = [_clear_slice(t, j, a)[0] for t in ts]
            coz = [_clear_slice(d, j, a)[0] for d in coz] + [a]
        return cs, coz, ts

    def subset(self, extra: Sequence[Term], target: Term,
               budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
        """Z(relations + extra) n box  is contained in  Z(target)."""
        v = self._subset(extra, target, budget)
        _record(self, "subset", extra, target, v)
        return v

    def positive(self, p: Term, budget: QueryBudget = DEFAULT_BUDGET,
                 extra: Sequence[Term] = ()) -> Verdict:
        """p > 0 on Z(relations + extra) n box."""
        v = self._positive(p, budget, extra)
        _record(self, "positive", extra, p, v)
        return v

    def _subset(self, extra, target, budget) -> Verdict:
        cs = list(self.relations) + list(extra)
        try:
            red_cs, coz, (t,) = self._reduce(cs, [target])
        except _Unslicable:
            return self._lift(zerocert.subset_query(cs, target, self.box, budget))
        return self._lift(zerocert.subset_query(red_cs, t * terms.product(coz), self.box, budget))

    def _positive(self, p, budget, extra) -> Verdict:
        cs = list(self.relations) + list(extra)
        if not self.slices:
            return zerocert.positive_query(p, cs, self.box, budget)
        try:
            red_cs, coz, _ = self._reduce(cs, [])
            q = p
            for j, a in reversed(self.slices):
                n, d = _clear_slice(q, j, a)
                # sign(n / a^d) = sign(n * a^d) wherever a != 0
                q = n * a ** (d % 2)
        except _Unslicable:
            return zerocert.positive_query(p, cs, self.box, budget)
        return self._lift(zerocert.positive_query(q, red_cs, self.box, budget, coz))

    def radical_zero(self, t: Term, budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
        return self.subset([], t, budget)

    def is_trivial(self, budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
        """1 is radical-zero, i.e. Z(I) n box is empty."""
        return self.subset([], ONE, budget)

    def _lift(self, v: Verdict) -> Verdict:
        if not (v.refuted and v.witness is not None and self.slices):
            return v
        return Verdict(v.kind, self.complete_witness(v.witness), v.certificate, v.report)

    def complete_witness(self, w: Witness) -> Witness:
        """Fill slice coordinates y = 1/a(x) of a witness found on the base."""
        from cinfty.interval import eval_interval

        sides = list(w.box.intervals)
        for j, a in self.slices:
            if all(s.is_point() for s in sides):
                v = terms.exact_value(a, [s.lo for s in sides])
                if v is not None and v != 0:
                    sides[j] = Interval.point(1 / v)
                    continue
            enc = eval_interval(a, sides)
            if enc.excludes_zero() and enc.is_bounded():
                lo, hi = sorted((1 / enc.lo, 1 / enc.hi))
                sides[j] = Interval(lo, hi)
        return Witness(Box(tuple(sides)), w.note)

    def base_arity(self) -> int:
        return self.arity - len(self.slices)


@dataclass(frozen=True)
class RingElement:
    ring: Presentation
    term: Term

    def __post_init__(self):
        self.ring.check_term(self.term)

    def _other(self, other) -> Term:
        if isinstance(other, RingElement):
            if other.ring is not self.ring and other.ring != self.ring:
                raise PresentationError("elements of different rings")
            return other.term
        return terms._coerce(other)

    def __add__(self, other):
        return RingElement(self.ring, self.term + self._other(other))

    def __sub__(self, other):
        return RingElement(self.ring, self.term - self._other(other))

    def __mul__(self, other):
        return RingElement(self.ring, self.term * self._other(other))

    def __neg__(self):
        return RingElement(self.ring, -self.term)

    def __pow__(self, n: int):
        return RingElement(self.ring, self.term ** n)

    __radd__ = __add__
    __rmul__ = __mul__

    def equals(self, other, budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
        return self.ring.radical_zero(self.term - self._other(other), budget)

    def is_zero(self, budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
        return self.ring.radical_zero(self.term, budget)

    def __str__(self) -> str:
        return str(self.term)


@dataclass(frozen=True)
class Hom:
    """Ring map determined by generator images: source x_i |-> images[i]."""

    source: Presentation
    target: Presentation
    images: tuple[Term, ...]

    def __post_init__(self):
        if len(self.images) != self.source.arity:
            raise PresentationError("one image per source generator required")
        for t in self.images:
            self.target.check_term(t)

    @classmethod
    def identity(cls, p: Presentation) -> "Hom":
        return cls(p, p, tuple(Term.var(i) for i in range(p.arity)))

    def apply_term(self, t: Term) -> Term:
        return t.substitute(self.images)

    def __call__(self, e: RingElement | Term) -> RingElement:
        if isinstance(e, RingElement):
            if e.ring != self.source:
                raise PresentationError("element is not in the source ring")
            e = e.term
        return RingElement(self.target, self.apply_term(e))

    def then(self, g: "Hom") -> "Hom":
        """g after self."""
        return hom_compose(g, self)

    def well_defined(self, budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
        """Every source relation maps to a radical-zero element of the target."""
        return meet([self.target.radical_zero(self.apply_term(r), budget)
                     for r in self.source.relations] or [proved({"rule": "no-relations"})])


def hom_apply(h: Hom, e: RingElement) -> RingElement:
    return h(e)


def hom_compose(g: Hom, h: Hom) -> Hom:
    """g o h."""
    if h.target != g.source:
        raise PresentationError("cannot compose: target of h is not the source of g")
    return Hom(h.source, g.target, tuple(g.apply_term(t) for t in h.images))


@dataclass(frozen=True)
class LocalizedPresentation:
    """A ring of fractions A{S^-1} with its canonical map eta: A -> A{S^-1}."""

    presentation: Presentation
    base: Presentation
    inverted: tuple[Term, ...]
    eta: Hom
    fresh: tuple[int, ...]

    @property
    def inverted_product(self) -> Term:
        return terms.product(self.inverted)

    def element(self, term: Term | str) -> RingElement:
        return self.presentation.element(term)


# -- constructions -------------------------------------------------------------

def quotient(p: Presentation, extra: Sequence[Term]) -> tuple[Presentation, Hom]:
    extra = [p.check_term(t) for t in extra]
    q = Presentation(p.arity, p.relations + tuple(extra), p.box, p.names, p.slices)
    return q, Hom(p, q, tuple(Term.var(i) for i in range(p.arity)))


def adjoin_variables(p: Presentation, k: int, side=DEFAULT_SIDE) -> tuple[Presentation, Hom]:
    if k < 0:
        raise PresentationError("cannot adjoin a negative number of variables")
    box = p.box + Box.cube(k, *side)
    names = p.names + tuple(f"x{p.arity + i}" for i in range(k))
    q = Presentation(p.arity + k, p.relations, box, names, p.slices)
    return q, Hom(p, q, tuple(Term.var(i) for i in range(p.arity)))


def coproduct(p1: Presentation, p2: Presentation) -> tuple[Presentation, Hom, Hom]:
    n1 = p1.arity
    rels = p1.relations + tuple(r.shift(n1) for r in p2.relations)
    slices = p1.slices + tuple((j + n1, a.shift(n1)) for j, a in p2.slices)
    names = p1.names + tuple(_fresh_name(nm, p1.names) for nm in p2.names)
    q = Presentation(n1 + p2.arity, rels, p1.box + p2.box, names, slices)
    i1 = Hom(p1, q, tuple(Term.var(i) for i in range(n1)))
    i2 = Hom(p2, q, tuple(Term.var(n1 + i) for i in range(p2.arity)))
    return q, i1, i2


def _fresh_name(name: str, taken: Sequence[str]) -> str:
    out = name
    while out in taken:
        out += "'"
    return out


def localize_set(p: Presentation, elements: Sequence[RingElement | Term]) -> LocalizedPresentation:
    """Invert every listed element, one fresh variable y_s with y_s * s - 1 each."""
    ts = [e.term if isinstance(e, RingElement) else p.check_term(e) for e in elements]
    n = p.arity
    rels = list(p.relations)
    slices = list(p.slices)
    names = list(p.names)
    for k, a in enumerate(ts):
        y = n + k
        rels.append(Term.var(y) * a - 1)
        slices.append((y, a))
        names.append(_fresh_name("y" if len(ts) == 1 else f"y{k}", names))
    box = p.box + Box.cube(len(ts), *SLICE_SIDE)
    q = Presentation(n + len(ts), tuple(rels), box, tuple(names), tuple(slices))
    eta = Hom(p, q, tuple(Term.var(i) for i in range(n)))
    return LocalizedPresentation(q, p, tuple(ts), eta, tuple(range(n, n + len(ts))))


def localize(p: Presentation, a: RingElement | Term) -> LocalizedPresentation:
    return localize_set(p, [a])


def is_invertible(e: RingElement, budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
    """e has no zero on Z(I) n box, hence a multiplicative inverse in the ring."""
    return e.ring.subset([e.term], ONE, budget)


def lift_from_cring(n: int, relations: Sequence[Term | str | dict], box: Box | None = None) -> Presentation:
    """Read integer polynomial relations of Z[x_0..x_{n-1}] as a C^oo presentation."""
    out = []
    for r in relations:
        if isinstance(r, str):
            r = parse_term(r, n)
        elif isinstance(r, dict):
            r = terms.from_polynomial(r)
        if r.has_primitives():
            raise PresentationError(f"{r} is not a polynomial")
        if any(c.denominator != 1 for _, c in r.items()):
            raise PresentationError(f"{r} does not have integer coefficients")
        out.append(r)
    return Presentation(n, tuple(out), box)


# -- structural comparison -----------------------------------------------------

def _var_signature(p: Presentation, i: int) -> tuple:
    return (tuple(sorted(r.degree_in(i) if r.degree_in(i) is not None else -1 for r in p.relations)),
            str(p.box[i]))


def renaming_between(p: Presentation, q: Presentation) -> dict[int, int] | None:
    """A variable permutation carrying p's relations and box onto q's, if any."""
    if p.arity != q.arity or len(p.relations) != len(q.relations):
        return None
    target = set(q.relations)
    sig_q = [_var_signature(q, j) for j in range(q.arity)]
    choices = [[j for j in range(q.arity) if sig_q[j] == _var_signature(p, i)] for i in range(p.arity)]
    if any(not c for c in choices):
        return None
    for perm in itertools.product(*choices):
        if len(set(perm)) != len(perm):
            continue
        mapping = dict(enumerate(perm))
        if {r.rename(mapping) for r in p.relations} == target:
            return mapping
    return None


def same_presentation(p: Presentation, q: Presentation) -> bool:
    return renaming_between(p, q) is not None


# -- commutation reports ---------------------------------------------------------

@dataclass
class ChainReport:
    iterated: LocalizedPresentation
    direct: LocalizedPresentation
    forward: Hom
    backward: Hom
    homs: Verdict
    zero_sets: Verdict
    samples: int
    max_error: float
    agree: bool

    @property
    def ok(self) -> bool:
        return self.homs.proved and self.zero_sets.proved and self.agree


def localize_chain(p: Presentation, b: Term, c: Term, budget: QueryBudget = DEFAULT_BUDGET,
                   resolution: int = 24, tol: float = 1e-9) -> ChainReport:
    """Compare (A{b^-1}){eta(c)^-1} with A{(b*c)^-1}."""
    from cinfty.points import sample_points

    l1 = localize(p, b)
    l2 = localize(l1.presentation, l1.eta.apply_term(c))
    l3 = localize(p, b * c)
    n = p.arity
    x = [Term.var(i) for i in range(n)]
    y1, y2, z = Term.var(n), Term.var(n + 1), Term.var(n)
    # l3 -> l2: z |-> y1*y2 ;  l2 -> l3: y1 |-> z*c, y2 |-> z*b
    forward = Hom(l3.presentation, l2.presentation, tuple(x) + (y1 * y2,))
    backward = Hom(l2.presentation, l3.presentation, tuple(x) + (z * c, z * b))
    homs = meet([forward.well_defined(budget), backward.well_defined(budget)])
    round_trips = []
    for i in range(l3.presentation.arity):
        g = Term.var(i)
        round_trips.append(l3.presentation.radical_zero(
            hom_compose(backward, forward).apply_term(g) - g, budget))
    for i in range(l2.presentation.arity):
        g = Term.var(i)
        round_trips.append(l2.presentation.radical_zero(
            hom_compose(forward, backward).apply_term(g) - g, budget))
    zero_sets = meet(round_trips)

    worst = 0.0
    count = 0
    agree = True
    for pt in sample_points(p, resolution, budget):
        bv, cv = pt.exact_value(b), pt.exact_value(c)
        if bv is None or cv is None or bv == 0 or cv == 0:
            continue
        base = list(pt.point)
        pt2 = base + [1 / bv, 1 / cv]
        pt3 = base + [1 / (bv * cv)]
        for elem in (z, z * b, x[0] * z if x else z):
            v3 = terms.exact_value(elem, pt3)
            v2 = terms.exact_value(forward.apply_term(elem), pt2)
            err = abs(float(v3 - v2))
            worst = max(worst, err)
            agree = agree and err <= tol
        for elem in (y1, y2, y1 * y2 * b):
            v2 = terms.exact_value(elem, pt2)
            v3 = terms.exact_value(backward.apply_term(elem), pt3)
            err = abs(float(v2 - v3))
            worst = max(worst, err)
            agree = agree and err <= tol
        count += 1
    return ChainReport(l2, l3, forward, backward, homs, zero_sets, count, worst, agree)


@dataclass
class CommuteReport:
    left: Presentation
    right: Presentation
    renaming: dict[int, int] | None
    checks: list[tuple[str, Verdict]] = field(default_factory=list)
    samples: int = 0
    max_error: float = 0.0

    @property
    def structurally_equal(self) -> bool:
        return self.renaming is not None

    @property
    def ok(self) -> bool:
        return self.structurally_equal and all(v.proved for _, v in self.checks)


def quotient_localize_commute(p: Presentation, extra: Sequence[Term], a: Term,
                              budget: QueryBudget = DEFAULT_BUDGET, members: int = 3) -> CommuteReport:
    """(A/I){(a+I)^-1} versus A{a^-1}/<eta(I)>, plus the fraction form of eta(I)."""
    q, _ = quotient(p, extra)
    left = localize(q, a).presentation
    la = localize(p, a)
    right, _ = quotient(la.presentation, [la.eta.apply_term(t) for t in extra])
    report = CommuteReport(left, right, renaming_between(left, right))

    # members of <eta(I)>: sum_i m_i(x) y^k_i eta(g_i) = eta(b)/eta(a^K) with b in I
    y = Term.var(p.arity)
    for k in range(min(members, len(extra))):
        g = extra[k]
        mult = Term.var(0) + k if p.arity else Term.const(k + 1)
        member = mult * y ** (k + 1) * g
        b = mult * g
        d = a ** (k + 1)
        v = la.presentation.radical_zero(member * d - b, budget)
        report.checks.append((f"member {member} = eta({b})/eta({d})", v))
    return report


def coproduct_localize_commute(p1: Presentation, s1: Sequence[Term], p2: Presentation,
                               s2: Sequence[Term], budget: QueryBudget = DEFAULT_BUDGET,
                               resolution: int = 4) -> CommuteReport:
    """A1{S1^-1} (x) A2{S2^-1} versus (A1 (x) A2){(i1 S1 u i2 S2)^-1}."""
    from cinfty.points import sample_points

    left, _, _ = coproduct(localize_set(p1, s1).presentation, localize_set(p2, s2).presentation)
    cop, i1, i2 = coproduct(p1, p2)
    right = localize_set(cop, [i1.apply_term(s) for s in s1] + [i2.apply_term(s) for s in s2]).presentation
    mapping = renaming_between(left, right)
    report = CommuteReport(left, right, mapping)
    if mapping is None:
        return report
    inverse = {v: k for k, v in mapping.items()}
    probe = [Term.var(i) for i in range(left.arity)]
    for pt in sample_points(left, resolution, budget)[:40]:
        if not pt.exact:
            continue
        xs = pt.point
        ys = [xs[inverse[j]] for j in range(right.arity)]
        for t in probe + list(left.relations):
            lv = terms.exact_value(t, xs)
            rv = terms.exact_value(t.rename(mapping), ys)
            if lv is None or rv is None:
                continue
            report.max_error = max(report.max_error, abs(float(lv - rv)))
        report.samples += 1
    if report.max_error <= 1e-9:
        agreement = proved({"rule": "sample-agreement", "samples": report.samples})
    else:
        agreement = refuted(None, {"rule": "sample-agreement", "max_error": report.max_error})
    report.checks.append(("sample agreement", agreement))
    return report


# -- idempotents and fraction axioms -------------------------------------------

@dataclass
class IdempotentReport:
    quotient: Presentation
    localized: LocalizedPresentation
    idempotent: Verdict
    zero_sets: Verdict


def invert_idempotent(p: Presentation, e: RingElement | Term,
                      budget: QueryBudget = DEFAULT_BUDGET) -> IdempotentReport:
    """A{e^-1} and A/(1-e) for an idempotent e."""
    t = e.term if isinstance(e, RingElement) else e
    idem = p.radical_zero(t * t - t, budget)
    if not idem.proved:
        raise NotIdempotent(idem)
    q, _ = quotient(p, [1 - t])
    loc = localize(p, t)
    # Z(I, 1-e) misses Z(e), and Z(I) n Coz(e) lies in Z(1-e)
    v1 = p.subset([1 - t, t], ONE, budget)
    v2 = loc.presentation.radical_zero(1 - t, budget)
    return IdempotentReport(q, loc, idem, meet([v1, v2]))


@dataclass
class FractionWitness:
    element: Term
    denominator: Term
    numerator: Term
    clears: Verdict
    in_saturation: Verdict
    annihilator: Term | None = None
    annihilates: Verdict | None = None


def check_fraction_axioms(loc: LocalizedPresentation, samples: Sequence[RingElement | Term],
                          budget: QueryBudget = DEFAULT_BUDGET) -> list[FractionWitness]:
    """Exhibit c in the saturation and d in A with beta * eta(c) = eta(d), and
    an annihilator for samples that vanish in the ring of fractions."""
    p = loc.base
    lp = loc.presentation
    out = []
    for s in samples:
        beta = s.term if isinstance(s, RingElement) else s
        c = ONE
        d = beta
        for j, a in reversed(lp.slices[len(p.slices):]):
            n, deg = _clear_slice(d, j, a)
            d = n
            c = c * a ** deg
        clears = lp.radical_zero(beta * c - d, budget)
        sat = p.subset([c], loc.inverted_product, budget)
        w = FractionWitness(beta, c, d, clears, sat)
        if lp.radical_zero(beta, budget).proved:
            w.annihilator = loc.inverted_product
            w.annihilates = p.radical_zero(w.annihilator * d, budget)
        out.append(w)
    return out
