"""Outward-rounded interval enclosures of terms over boxes.

Bounds are exact Fractions (or +-inf).  Polynomial arithmetic on Fractions is
exact; whenever a bound's denominator grows too large it is rounded outward
to a dyadic rational.  Transcendental primitives go through mpmath's interval
context at a fixed precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
from mpmath import libmp

from cinfty import terms
from cinfty.terms import Term, Var

PREC = 113
_ROUND_BITS = 160
_HUGE_BITS = 512

_iv = type(mpmath.iv)()
_iv._mp = mpmath.mp
_iv._iv = _iv
_iv.prec = PREC

INF = math.inf


def _round_down(q):
    if isinstance(q, float) or q.denominator.bit_length() <= _ROUND_BITS:
        return q
    return Fraction(math.floor(q * (1 << _ROUND_BITS)), 1 << _ROUND_BITS)


def _round_up(q):
    if isinstance(q, float) or q.denominator.bit_length() <= _ROUND_BITS:
        return q
    return Fraction(math.ceil(q * (1 << _ROUND_BITS)), 1 << _ROUND_BITS)


def _clamp(q, up: bool):
    # magnitudes beyond 2^512 are treated as unbounded
    if isinstance(q, float):
        return q
    if q.numerator.bit_length() - q.denominator.bit_length() > _HUGE_BITS:
        return INF if q > 0 else -INF
    return _round_up(q) if up else _round_down(q)


def _mul_bound(a, b):
    if a == 0 or b == 0:
        return Fraction(0)
    return a * b


@dataclass(frozen=True)
class Interval:
    lo: Fraction | float
    hi: Fraction | float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x) -> "Interval":
        x = Fraction(x)
        return cls(x, x)

    @classmethod
    def of(cls, lo, hi) -> "Interval":
        return cls(Fraction(lo), Fraction(hi))

    # -- predicates -----------------------------------------------------------

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def excludes_zero(self) -> bool:
        return self.lo > 0 or self.hi < 0

    def is_zero(self) -> bool:
        return self.lo == 0 and self.hi == 0

    def is_point(self) -> bool:
        return self.lo == self.hi

    def is_bounded(self) -> bool:
        return not (isinstance(self.lo, float) or isinstance(self.hi, float))

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        if not self.is_bounded():
            lo = self.lo if not isinstance(self.lo, float) else None
            hi = self.hi if not isinstance(self.hi, float) else None
            if lo is None and hi is None:
                return Fraction(0)
            return (lo if hi is None else hi)
        return (self.lo + self.hi) / 2

    def magnitude(self):
        return max(abs(self.lo), abs(self.hi))

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def split(self, ratio: Fraction = Fraction(1, 2)) -> tuple["Interval", "Interval"]:
        m = self.mid if ratio == Fraction(1, 2) else self.lo + (self.hi - self.lo) * ratio
        return Interval(self.lo, m), Interval(m, self.hi)

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other) -> "Interval":
        other = _as_interval(other)
        return Interval(_clamp(self.lo + other.lo, False), _clamp(self.hi + other.hi, True))

    __radd__ = __add__

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other) -> "Interval":
        return self + (-_as_interval(other))

    def __mul__(self, other) -> "Interval":
        other = _as_interval(other)
        if self.is_zero() or other.is_zero():
            return ZERO_INTERVAL
        products = [_mul_bound(a, b) for a in (self.lo, self.hi) for b in (other.lo, other.hi)]
        return Interval(_clamp(min(products), False), _clamp(max(products), True))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Interval":
        if n == 0:
            return Interval.point(1)
        if n == 1:
            return self
        lo, hi = self.lo, self.hi
        if n % 2 == 0:
            if lo >= 0:
                return Interval(_clamp(lo ** n, False), _clamp(hi ** n, True))
            if hi <= 0:
                return Interval(_clamp(hi ** n, False), _clamp(lo ** n, True))
            return Interval(Fraction(0), _clamp(max(-lo, hi) ** n, True))
        return Interval(_clamp(lo ** n, False), _clamp(hi ** n, True))

    def __str__(self) -> str:
        return f"[{_fmt(self.lo)}, {_fmt(self.hi)}]"


def _fmt(x) -> str:
    if isinstance(x, float):
        return str(x)
    return f"{float(x):.17g}"


def _as_interval(x) -> Interval:
    if isinstance(x, Interval):
        return x
    return Interval.point(x)


ZERO_INTERVAL = Interval(Fraction(0), Fraction(0))


@dataclass(frozen=True)
class Box:
    """Closed rational box, one interval per variable."""

    intervals: tuple[Interval, ...]

    def __post_init__(self):
        for iv in self.intervals:
            if not iv.is_bounded():
                raise ValueError("box sides must be bounded")

    @classmethod
    def of(cls, *sides) -> "Box":
        return cls(tuple(Interval.of(lo, hi) for lo, hi in sides))

    @classmethod
    def cube(cls, n: int, lo=-2, hi=2) -> "Box":
        return cls(tuple(Interval.of(lo, hi) for _ in range(n)))

    @classmethod
    def point(cls, x: Sequence) -> "Box":
        return cls(tuple(Interval.point(v) for v in x))

    @property
    def dim(self) -> int:
        return len(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __getitem__(self, i) -> Interval:
        return self.intervals[i]

    def __add__(self, other: "Box") -> "Box":
        return Box(self.intervals + other.intervals)

    def contains(self, x: Sequence) -> bool:
        return len(x) == self.dim and all(iv.contains(v) for iv, v in zip(self.intervals, x))

    def center(self) -> tuple[Fraction, ...]:
        return tuple(iv.mid for iv in self.intervals)

    def corners(self) -> list[tuple[Fraction, ...]]:
        from itertools import product
        return list(product(*[(iv.lo, iv.hi) for iv in self.intervals]))

    def max_width(self, axes: Sequence[int] | None = None):
        axes = range(self.dim) if axes is None else axes
        return max((self.intervals[i].width for i in axes), default=Fraction(0))

    def widest_axis(self, axes: Sequence[int] | None = None) -> int:
        axes = list(range(self.dim)) if axes is None else list(axes)
        return max(axes, key=lambda i: (self.intervals[i].width, -i))

    def split(self, axis: int, ratio: Fraction = Fraction(1, 2)) -> tuple["Box", "Box"]:
        left, right = self.intervals[axis].split(ratio)
        return (Box(self.intervals[:axis] + (left,) + self.intervals[axis + 1:]),
                Box(self.intervals[:axis] + (right,) + self.intervals[axis + 1:]))

    def replace(self, axis: int, iv: Interval) -> "Box":
        return Box(self.intervals[:axis] + (iv,) + self.intervals[axis + 1:])

    def __str__(self) -> str:
        return "x".join(str(iv) for iv in self.intervals)


# -- mpmath bridge --------------------------------------------------------------

def _raw(q, rnd: str):
    # raw mpf tuples: wrapping them in mpmath.mpf would re-round at the global
    # precision, to nearest, and lose the outward rounding
    if isinstance(q, float):
        return libmp.from_float(q)
    return libmp.from_rational(q.numerator, q.denominator, PREC, rnd)


def _to_iv(x: Interval):
    return _iv.make_mpf((_raw(x.lo, "f"), _raw(x.hi, "c")))


def _mpf_tuple_to_bound(t, up: bool):
    if t == libmp.finf:
        return INF
    if t == libmp.fninf:
        return -INF
    if t == libmp.fnan:
        return INF if up else -INF
    sign, man, exp, bc = t
    if man and exp + bc > _HUGE_BITS:
        return (-INF if sign else INF)
    p, q = libmp.to_rational(t)
    return Fraction(int(p), int(q))


def _from_iv(v) -> Interval:
    lo, hi = v._mpi_
    return Interval(_mpf_tuple_to_bound(lo, False), _mpf_tuple_to_bound(hi, True))


# -- primitive enclosures ---------------------------------------------------------

def _exp(x: Interval) -> Interval:
    if x.is_zero():
        return Interval.point(1)
    r = _from_iv(_iv.exp(_to_iv(x)))
    return Interval(max(r.lo, Fraction(0)), r.hi)


def _sin(x: Interval) -> Interval:
    if x.is_zero():
        return ZERO_INTERVAL
    if not x.is_bounded():
        return Interval.of(-1, 1)
    r = _from_iv(_iv.sin(_to_iv(x)))
    return Interval(max(r.lo, Fraction(-1)), min(r.hi, Fraction(1)))


def _cos(x: Interval) -> Interval:
    if x.is_zero():
        return Interval.point(1)
    if not x.is_bounded():
        return Interval.of(-1, 1)
    r = _from_iv(_iv.cos(_to_iv(x)))
    return Interval(max(r.lo, Fraction(-1)), min(r.hi, Fraction(1)))


def _bump_point_iv(t: Fraction):
    """mpmath interval for bump(t) at an exact point."""
    if abs(t) >= 1:
        return _iv.mpf(0)
    tt = _to_iv(Interval.point(t))
    return _iv.exp(-1 / (1 - tt * tt))


def _bump(x: Interval) -> Interval:
    one = Fraction(1)
    if x.lo >= one or x.hi <= -one:
        return ZERO_INTERVAL
    a, b = max(x.lo, -one), min(x.hi, one)
    near = Fraction(0) if a <= 0 <= b else (a if a > 0 else b)
    far = a if abs(a) >= abs(b) else b
    hi = _from_iv(_bump_point_iv(near)).hi
    lo = _from_iv(_bump_point_iv(far)).lo
    return Interval(max(lo, Fraction(0)), hi)


_BUMP_POLYS: dict[int, list] = {}


def _bump_poly(order: int) -> list:
    if order not in _BUMP_POLYS:
        _BUMP_POLYS[order] = terms._bump_derivative_poly(order)
    return _BUMP_POLYS[order]


def _poly_iv(coeffs: list, x: Interval) -> Interval:
    acc = ZERO_INTERVAL
    for k, c in enumerate(coeffs):
        if c:
            acc = acc + (x ** k) * c
    return acc


def _bump_deriv_inner(x: Interval, order: int) -> Interval:
    # |t| < 1 throughout x: direct formula P_k(t) / u^(2k) * bump(t)
    u = Interval.point(1) - x ** 2
    p = _poly_iv(_bump_poly(order), x)
    uiv = _to_iv(u)
    val = _to_iv(p) / (uiv ** (2 * order)) * _iv.exp(-1 / uiv)
    return _from_iv(val)


def _bump_deriv_edge(x: Interval, order: int, inner_end: Fraction) -> Interval:
    # x reaches |t| >= 1; bound |P_k| * s^(2k) e^(-s) with s = 1/u >= 1/u_max
    u_max = 1 - inner_end ** 2
    if u_max <= 0:
        return ZERO_INTERVAL
    clipped = Interval(max(x.lo, Fraction(-1)), min(x.hi, Fraction(1)))
    m = _poly_iv(_bump_poly(order), clipped).magnitude()
    s0 = 1 / u_max
    k2 = 2 * order
    s = s0 if s0 >= k2 else Fraction(k2)
    m_iv = _to_iv(Interval.point(Fraction(m) if not isinstance(m, float) else Fraction(10 ** 9)))
    s_iv = _to_iv(Interval.point(s))
    bound = m_iv * s_iv ** k2 * _iv.exp(-s_iv)
    b = _from_iv(bound).hi
    return Interval(-b, b)


def _bump_deriv(x: Interval, order: int) -> Interval:
    one = Fraction(1)
    if x.lo >= one or x.hi <= -one:
        return ZERO_INTERVAL
    if x.lo > -one and x.hi < one:
        return _bump_deriv_inner(x, order)
    pieces = []
    zero = Fraction(0)
    halves = []
    if x.lo <= zero:
        halves.append(Interval(x.lo, min(x.hi, zero)))
    if x.hi >= zero:
        halves.append(Interval(max(x.lo, zero), x.hi))
    for part in halves:
        if part.lo <= -one:
            pieces.append(_bump_deriv_edge(part, order, abs(part.hi)))
        elif part.hi >= one:
            pieces.append(_bump_deriv_edge(part, order, abs(part.lo)))
        else:
            pieces.append(_bump_deriv_inner(part, order))
    out = pieces[0]
    for p in pieces[1:]:
        out = out.hull(p)
    return out


def primitive_enclosure(name: str, order: int, x: Interval) -> Interval:
    if name == "exp":
        return _exp(x)
    if name == "sin":
        return _sin(x)
    if name == "cos":
        return _cos(x)
    if not x.is_bounded():
        x = Interval(max(x.lo, Fraction(-2)), min(x.hi, Fraction(2)))
    return _bump(x) if order == 0 else _bump_deriv(x, order)


# -- term evaluation --------------------------------------------------------------

def eval_interval(t: Term, box: Box | Sequence[Interval]) -> Interval:
    """Enclosure of the range of ``t`` over ``box``."""
    sides = box.intervals if isinstance(box, Box) else tuple(box)
    cache: dict = {}

    def atom_iv(atom) -> Interval:
        if atom in cache:
            return cache[atom]
        if isinstance(atom, Var):
            if atom.index >= len(sides):
                raise IndexError(f"x{atom.index} outside box of dimension {len(sides)}")
            v = sides[atom.index]
        else:
            v = primitive_enclosure(atom.name, atom.order, eval_interval(atom.arg, sides))
        cache[atom] = v
        return v

    acc = ZERO_INTERVAL
    for mono, c in t.items():
        term_iv = Interval.point(c)
        for atom, e in mono:
            term_iv = term_iv * (atom_iv(atom) ** e)
        acc = acc + term_iv
    return acc


def evaluate(t: Term, point: Sequence, tol=Fraction(1, 10 ** 12)) -> Fraction | Interval:
    """Exact rational value when available, else an enclosure at the point.

    The enclosure width is whatever the fixed working precision achieves; the
    caller compares it against ``tol`` (see :func:`within_tolerance`).
    """
    exact = terms.exact_value(t, point)
    if exact is not None:
        return exact
    return eval_interval(t, Box.point(point))


def within_tolerance(value, tol) -> bool:
    return not isinstance(value, Interval) or value.width <= tol


def to_float(value) -> float:
    if isinstance(value, Interval):
        return float(value.mid)
    return float(value)
