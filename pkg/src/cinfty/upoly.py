"""Dense univariate polynomials over Q and Sturm-sequence root isolation.

Polynomials are lists of Fractions, constant coefficient first, with no
trailing zeros; the zero polynomial is ``[]``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Poly = list


def trim(p: Sequence) -> Poly:
    p = [Fraction(c) for c in p]
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p: Poly) -> int:
    return len(p) - 1


def add(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def scale(p: Poly, c) -> Poly:
    return trim([c * a for a in p])


def sub(p: Poly, q: Poly) -> Poly:
    return add(p, scale(q, -1))


def mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return trim(out)


def derivative(p: Poly) -> Poly:
    return trim([i * c for i, c in enumerate(p)][1:])


def evaluate(p: Poly, x) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def divmod_(p: Poly, q: Poly) -> tuple[Poly, Poly]:
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    p = list(p)
    quot = [Fraction(0)] * max(len(p) - len(q) + 1, 0)
    lead = q[-1]
    while len(p) >= len(q) and p:
        c = p[-1] / lead
        k = len(p) - len(q)
        quot[k] = c
        for i, b in enumerate(q):
            p[i + k] -= c * b
        p = trim(p)
    return trim(quot), p


def rem(p: Poly, q: Poly) -> Poly:
    return divmod_(p, q)[1]


def monic(p: Poly) -> Poly:
    return [c / p[-1] for c in p] if p else []


def gcd(p: Poly, q: Poly) -> Poly:
    p, q = trim(p), trim(q)
    while q:
        p, q = q, rem(p, q)
    return monic(p)


def gcd_many(polys: Sequence[Poly]) -> Poly:
    g: Poly = []
    for p in polys:
        g = gcd(g, p)
        if g == [1]:
            break
    return g


def extended_gcd(p: Poly, q: Poly) -> tuple[Poly, Poly, Poly]:
    """Return (g, s, t) with s*p + t*q = g monic."""
    r0, r1 = trim(p), trim(q)
    s0, s1 = [Fraction(1)], []
    t0, t1 = [], [Fraction(1)]
    while r1:
        quo, r = divmod_(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(quo, s1))
        t0, t1 = t1, sub(t0, mul(quo, t1))
    if not r0:
        return [], s0, t0
    lc = r0[-1]
    return monic(r0), scale(s0, 1 / lc), scale(t0, 1 / lc)


def squarefree(p: Poly) -> Poly:
    p = trim(p)
    if len(p) <= 1:
        return monic(p)
    g = gcd(p, derivative(p))
    return monic(divmod_(p, g)[0])


def sturm_sequence(p: Poly) -> list[Poly]:
    """Sturm chain of the square-free part of ``p``."""
    p = squarefree(p)
    seq = [p, derivative(p)]
    while seq[-1]:
        seq.append(scale(rem(seq[-2], seq[-1]), -1))
    return seq[:-1]


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def variations(seq: list[Poly], x) -> int:
    signs = [s for s in (_sign(evaluate(p, x)) for p in seq) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(p: Poly, lo, hi, seq: list[Poly] | None = None) -> int:
    """Number of distinct real roots in the closed interval [lo, hi]."""
    p = trim(p)
    if not p:
        raise ValueError("zero polynomial has infinitely many roots")
    if lo > hi:
        return 0
    seq = seq or sturm_sequence(p)
    n = variations(seq, lo) - variations(seq, hi)
    return n + (1 if evaluate(p, lo) == 0 else 0)


def root_bound(p: Poly) -> Fraction:
    """Cauchy bound: every real root has |x| < bound."""
    p = trim(p)
    lead = abs(p[-1])
    return 1 + max((abs(c) / lead for c in p[:-1]), default=Fraction(0))


def isolate_roots(p: Poly, lo, hi, max_width: Fraction | None = None) -> list[tuple[Fraction, Fraction]]:
    """Disjoint sorted intervals [a, b], each holding exactly one distinct root
    of ``p`` in [lo, hi]; exact rational roots come back as [r, r]."""
    p = trim(p)
    if not p:
        raise ValueError("zero polynomial")
    lo, hi = Fraction(lo), Fraction(hi)
    sq = squarefree(p)
    if len(sq) <= 1:
        return []
    seq = sturm_sequence(sq)
    out: list[tuple[Fraction, Fraction]] = []
    if evaluate(sq, lo) == 0:
        out.append((lo, lo))

    # stack of half-open (a, b] pieces with their root counts
    stack = [(lo, hi, variations(seq, lo) - variations(seq, hi))]
    found = []
    while stack:
        a, b, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            found.append(_finish_isolation(sq, seq, a, b, max_width))
            continue
        m = (a + b) / 2
        vm = variations(seq, m)
        stack.append((m, b, vm - variations(seq, b)))
        stack.append((a, m, variations(seq, a) - vm))
    out.extend(sorted(found))
    return out


_EXACT_DENOMINATOR_LIMIT = 64
_EXACT_SEARCH_WIDTH = Fraction(1, 2 * _EXACT_DENOMINATOR_LIMIT ** 2)


def _small_rational_root(sq: Poly, a: Fraction, b: Fraction) -> Fraction | None:
    mid = (a + b) / 2
    for q in range(1, _EXACT_DENOMINATOR_LIMIT + 1):
        r = Fraction(round(mid * q), q)
        if a < r < b and evaluate(sq, r) == 0:
            return r
    return None


def _finish_isolation(sq: Poly, seq: list[Poly], a: Fraction, b: Fraction,
                      max_width: Fraction | None) -> tuple[Fraction, Fraction]:
    # the single root lies in (a, b]; bisect far enough that any root with a
    # small denominator is recognised exactly
    target = _EXACT_SEARCH_WIDTH if max_width is None else min(max_width, _EXACT_SEARCH_WIDTH)
    if evaluate(sq, b) == 0:
        return (b, b)
    while True:
        m = (a + b) / 2
        if evaluate(sq, m) == 0:
            return (m, m)
        if variations(seq, m) - variations(seq, b) == 1:
            a = m
        else:
            b = m
        if b - a <= target:
            break
    r = _small_rational_root(sq, a, b)
    if r is not None:
        return (r, r)
    if max_width is not None and b - a > max_width:
        return refine(sq, (a, b), max_width, seq)
    return (a, b)


def refine(p: Poly, interval: tuple[Fraction, Fraction], width: Fraction,
           seq: list[Poly] | None = None) -> tuple[Fraction, Fraction]:
    """Shrink an isolating interval (root in (a, b] or exact) below ``width``."""
    a, b = interval
    if a == b:
        return interval
    sq = squarefree(p)
    seq = seq or sturm_sequence(sq)
    if evaluate(sq, b) == 0:
        return (b, b)
    while b - a > width:
        m = (a + b) / 2
        fm = evaluate(sq, m)
        if fm == 0:
            return (m, m)
        if variations(seq, a) - variations(seq, m) == 1:
            b = m
        else:
            a = m
    return (a, b)


def from_roots(roots: Sequence) -> Poly:
    out = [Fraction(1)]
    for r in roots:
        out = mul(out, [-Fraction(r), Fraction(1)])
    return out
