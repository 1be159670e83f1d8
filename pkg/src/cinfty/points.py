"""Certified sample points of Z(I) inside the box.

A point stands for the maximal ideal m_x = ker(ev_x).  Coordinates are exact
rationals where possible; an irrational coordinate is an algebraic number
kept as (square-free polynomial, isolating interval) so that vanishing of a
polynomial at it can still be decided exactly by a gcd.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Sequence

from cinfty import upoly
from cinfty.interval import Interval, eval_interval
from cinfty.terms import Term, as_univariate, exact_value
from cinfty.verdict import DEFAULT_BUDGET, QueryBudget

if TYPE_CHECKING:
    from cinfty.cring import Presentation

MAX_POINTS = 4096
_REFINE_WIDTHS = [Fraction(1, 2 ** k) for k in (16, 40, 80, 160)]


@dataclass(frozen=True)
class SpectrumPoint:
    """A point x of Z(I) n box.  ``algebraic`` maps coordinate index to the
    square-free polynomial whose root the coordinate interval isolates."""

    sides: tuple[Interval, ...]
    algebraic: tuple[tuple[int, tuple[Fraction, ...]], ...] = ()

    @classmethod
    def at(cls, coords: Sequence) -> "SpectrumPoint":
        return cls(tuple(Interval.point(Fraction(c)) for c in coords))

    @property
    def exact(self) -> bool:
        return all(s.is_point() for s in self.sides)

    @property
    def dim(self) -> int:
        return len(self.sides)

    @property
    def point(self) -> tuple[Fraction, ...]:
        """Exact coordinates, or interval midpoints for algebraic ones."""
        return tuple(s.mid for s in self.sides)

    def floats(self) -> tuple[float, ...]:
        return tuple(float(v) for v in self.point)

    def exact_value(self, t: Term) -> Fraction | None:
        if not self.exact:
            return None
        return exact_value(t, self.point)

    def enclosure(self, t: Term) -> Interval:
        return eval_interval(t, self.sides)

    def refined(self, width: Fraction) -> "SpectrumPoint":
        sides = list(self.sides)
        for i, q in self.algebraic:
            s = sides[i]
            if s.width > width:
                a, b = upoly.refine(list(q), (s.lo, s.hi), width)
                sides[i] = Interval(a, b)
        return SpectrumPoint(tuple(sides), self.algebraic)

    def _algebraic_zero(self, t: Term) -> bool | None:
        """Exact vanishing test when t depends on at most one algebraic coordinate."""
        alg = dict(self.algebraic)
        used = [i for i in t.variables() if i in alg]
        if len(used) != 1:
            return None
        i = used[0]
        images = {j: Term.const(self.sides[j].lo) for j in t.variables() if j != i}
        coeffs = as_univariate(t.substitute(images), i)
        if coeffs is None:
            return None
        if not coeffs:
            return True
        g = upoly.gcd(coeffs, list(alg[i]))
        s = self.sides[i]
        return upoly.degree(g) > 0 and upoly.count_roots(g, s.lo, s.hi) > 0

    def sign(self, t: Term) -> int | None:
        """Certified sign of t(x), or None."""
        v = self.exact_value(t)
        if v is not None:
            return (v > 0) - (v < 0)
        if self.algebraic and self._algebraic_zero(t):
            return 0
        pt = self
        for w in [None] + _REFINE_WIDTHS:
            if w is not None:
                if not self.algebraic:
                    break
                pt = self.refined(w)
            enc = pt.enclosure(t)
            if enc.lo > 0:
                return 1
            if enc.hi < 0:
                return -1
            if enc.is_zero():
                return 0
        return None

    def vanishes(self, t: Term) -> bool | None:
        s = self.sign(t)
        return None if s is None else s == 0

    def value(self, t: Term) -> Fraction | Interval:
        v = self.exact_value(t)
        if v is not None:
            return v
        return self.refined(_REFINE_WIDTHS[1]).enclosure(t)

    def format(self) -> str:
        if self.exact:
            return " ".join(str(v) for v in self.point)
        return " ".join(str(v) if s.is_point() else repr(float(v))
                        for s, v in zip(self.sides, self.point))

    def __str__(self) -> str:
        return "(" + ", ".join(str(v) if s.is_point() else f"~{float(v):.12g}"
                               for s, v in zip(self.sides, self.point)) + ")"


def _axis_candidates(cs: Sequence[Term], i: int, side: Interval, resolution: int):
    """Candidate coordinates for x_i: roots of univariate constraints, else a grid."""
    polys = []
    for c in cs:
        if c.variables() == {i} and c.is_polynomial():
            polys.append(as_univariate(c, i))
    if polys:
        g = upoly.squarefree(upoly.gcd_many(polys))
        if upoly.degree(g) <= 0:
            return []
        out = []
        for a, b in upoly.isolate_roots(g, side.lo, side.hi):
            if a == b:
                out.append((Interval.point(a), None))
            else:
                a, b = upoly.refine(g, (a, b), _REFINE_WIDTHS[0])
                out.append((Interval(a, b), tuple(g)))
        return out
    if side.is_point() or resolution <= 0:
        return [(Interval.point(side.mid), None)]
    step = side.width / resolution
    return [(Interval.point(side.lo + k * step), None) for k in range(resolution + 1)]


def sample_points(p: "Presentation", resolution: int = 8,
                  budget: QueryBudget = DEFAULT_BUDGET, limit: int = MAX_POINTS) -> list[SpectrumPoint]:
    """Certified points of Z(relations) n box, in lexicographic candidate order."""
    from cinfty.cring import _Unslicable

    try:
        cs, coz, _ = p._reduce(list(p.relations), [])
    except _Unslicable:
        cs, coz = list(p.relations), []
    slice_vars = {j for j, _ in p.slices}
    axes = [i for i in range(p.arity) if i not in slice_vars]
    per_axis = [_axis_candidates(cs, i, p.box[i], resolution) for i in axes]
    out: list[SpectrumPoint] = []
    for combo in itertools.product(*per_axis):
        if len(out) >= limit:
            break
        sides = [Interval.point(0)] * p.arity
        alg = []
        for i, (iv, q) in zip(axes, combo):
            sides[i] = iv
            if q is not None:
                alg.append((i, q))
        pt = SpectrumPoint(tuple(sides), tuple(alg))
        if not all(pt.vanishes(c) for c in cs):
            continue
        if not all(pt.sign(d) not in (0, None) for d in coz):
            continue
        pt = _fill_slices(p, pt)
        if pt is not None:
            out.append(pt)
    return out


def _fill_slices(p: "Presentation", pt: SpectrumPoint) -> SpectrumPoint | None:
    sides = list(pt.sides)
    for j, a in p.slices:
        cur = SpectrumPoint(tuple(sides), pt.algebraic)
        v = cur.exact_value(a)
        if v is not None:
            if v == 0:
                return None
            sides[j] = Interval.point(1 / v)
            continue
        enc = cur.refined(_REFINE_WIDTHS[1]).enclosure(a)
        if not enc.excludes_zero() or not enc.is_bounded():
            return None
        lo, hi = sorted((1 / enc.lo, 1 / enc.hi))
        sides[j] = Interval(lo, hi)
    return SpectrumPoint(tuple(sides), pt.algebraic)


def export_points(points: Sequence[SpectrumPoint]) -> str:
    """One rational (or decimal, for algebraic coordinates) vector per line."""
    return "".join(pt.format() + "\n" for pt in points)
