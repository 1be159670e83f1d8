"""Certified decisions about zero sets inside a compact box.

Every query reduces to one of two statements:

* ``subset_query(cs, g, B)``: the common zero set of the constraints ``cs``
  inside ``B`` lies in Z(g);
* ``positive_query(p, cs, B, coz)``: ``p > 0`` on the common zero set of
  ``cs`` inside ``B``, away from the zeros of the ``coz`` terms.

Polynomial constraints in a single variable are split into their (exact or
isolated) roots.  When everything left is a univariate polynomial the answer
comes from gcds and Sturm counts; otherwise a deterministic breadth-first
interval subdivision runs within the budget.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from cinfty import upoly
from cinfty.interval import Box, Interval, eval_interval
from cinfty.terms import ONE, Term, as_univariate, divide, exact_value
from cinfty.verdict import (DEFAULT_BUDGET, QueryBudget, Verdict, Witness, meet, proved,
                            refuted, unknown)

_PINNED_WIDTHS = [Fraction(1, 2 ** k) for k in (12, 24, 48, 96)]
# off-centre subdivision: split points never land on simple rationals such as
# 1/2, where a root of a term like bump(x0) - bump(1/2) has no certifiable sign
_SPLIT_RATIO = Fraction(33, 64)


@dataclass(frozen=True)
class RootIsolation:
    """Disjoint sorted isolating intervals; ``entire`` marks the zero polynomial."""

    intervals: tuple[tuple[Fraction, Fraction], ...]
    entire: bool = False

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)


def _coeffs(p) -> list:
    if isinstance(p, Term):
        vs = p.variables()
        coeffs = as_univariate(p, next(iter(vs)) if vs else 0)
        if coeffs is None:
            raise ValueError("not a univariate polynomial")
        return coeffs
    return upoly.trim(p)


def isolate_roots(p, side: Interval | Box | tuple, max_width: Fraction | None = None) -> RootIsolation:
    """Isolate the distinct real roots of a univariate polynomial in a closed
    interval (multiplicity is erased first)."""
    if isinstance(side, Box):
        side = side[0]
    if isinstance(side, tuple):
        side = Interval.of(*side)
    coeffs = _coeffs(p)
    if not coeffs:
        return RootIsolation(((side.lo, side.hi),), entire=True)
    return RootIsolation(tuple(upoly.isolate_roots(coeffs, side.lo, side.hi, max_width)))


def _constant_enclosure(t: Term) -> Fraction | Interval:
    c = t.constant_value()
    if c is not None:
        return c
    return eval_interval(t, Box(()))


def _sign_of(value) -> int | None:
    """+1, -1, 0 when certified; None when an enclosure straddles zero."""
    if isinstance(value, Interval):
        if value.is_zero():
            return 0
        if value.lo > 0:
            return 1
        if value.hi < 0:
            return -1
        return None
    return (value > 0) - (value < 0)


def _univariate_in(t: Term, j: int) -> list | None:
    if t.variables() <= {j} and t.is_polynomial() and t.variables():
        return as_univariate(t, j)
    return None


def _fmt_box(box: Box) -> list:
    return [[str(iv.lo), str(iv.hi)] for iv in box.intervals]


class _Engine:
    def __init__(self, budget: QueryBudget):
        self.budget = budget
        self.boxes = 0
        self.max_depth_seen = 0
        self._pool = ThreadPoolExecutor(budget.workers) if budget.workers > 1 else None

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()

    def _map(self, fn, items):
        if self._pool is None or len(items) < 2:
            return [fn(x) for x in items]
        return list(self._pool.map(fn, items))

    # -- containment ------------------------------------------------------------

    def subset(self, cs: list[Term], g: Term, box: Box, split: frozenset, pinned: frozenset) -> Verdict:
        kept = []
        for c in cs:
            if c.is_zero():
                continue
            if not c.variables():
                s = _sign_of(_constant_enclosure(c))
                if s == 0:
                    continue
                if s is not None:
                    return proved({"rule": "empty-constraint", "constraint": str(c)})
            kept.append(c)
        cs = kept
        if g.is_zero():
            return proved({"rule": "zero-target"})
        rule = self._symbolic(cs, g)
        if rule is not None:
            return proved(rule)

        active = set(g.variables())
        for c in cs:
            active |= c.variables()
        free = active - pinned
        if not free and not pinned:
            return self._decide_constant(cs, g, box)

        if len(free) == 1 and not pinned:
            j = next(iter(free))
            cps = [_univariate_in(c, j) for c in cs]
            gp = as_univariate(g, j) if g.variables() <= {j} and g.is_polynomial() else None
            if gp is not None and all(p is not None for p in cps):
                return self._sturm_subset(cps, gp, j, box)

        for j in sorted(free - split):
            univ = [p for p in (_univariate_in(c, j) for c in cs) if p is not None]
            if univ:
                return self._split_subset(cs, g, j, upoly.gcd_many(univ), box, split, pinned)

        return self._boxes_subset(cs, g, box, sorted(free), pinned)

    def _symbolic(self, cs: list[Term], g: Term) -> dict | None:
        for i, c in enumerate(cs):
            if c == g:
                return {"rule": "reflexive", "constraint": i}
            for k in (1, 2, 3):
                q = divide(g ** k if k > 1 else g, c)
                if q is not None:
                    return {"rule": "divides", "constraint": i, "power": k,
                            "divisor": str(c), "target": str(g), "quotient": str(q)}
        return None

    def _decide_constant(self, cs: list[Term], g: Term, box: Box) -> Verdict:
        if cs:
            return unknown(reason="undetermined constant constraint",
                           constraints=[str(c) for c in cs])
        s = _sign_of(_constant_enclosure(g))
        if s == 0:
            return proved({"rule": "zero-target"})
        if s is None:
            return unknown(reason="constant target straddles zero", target=str(g))
        return refuted(Witness.at(box.center()), {"rule": "constant-target", "target": str(g)})

    def _sturm_subset(self, cps: list[list], gp: list, j: int, box: Box) -> Verdict:
        side = box[j]
        if not cps:
            if not gp:
                return proved({"rule": "zero-target"})
            for t in _probe_points(side, len(gp) + 1):
                if upoly.evaluate(gp, t) != 0:
                    return refuted(_point_witness(box, j, t), {"rule": "unconstrained", "var": j})
        f = upoly.gcd_many(cps)
        cert = {"rule": "sturm", "var": j, "side": [str(side.lo), str(side.hi)],
                "constraint_gcd": [str(c) for c in f]}
        if len(f) <= 1:
            return proved({**cert, "roots": 0})
        sq = upoly.squarefree(f)
        n_f = upoly.count_roots(sq, side.lo, side.hi)
        if n_f == 0 or not gp:
            return proved({**cert, "roots": n_f})
        h = upoly.gcd(sq, gp)
        n_h = upoly.count_roots(h, side.lo, side.hi) if len(h) > 1 else 0
        if n_h == n_f:
            return proved({**cert, "roots": n_f, "shared": n_h})
        q = upoly.divmod_(sq, h)[0]
        a, b = upoly.isolate_roots(q, side.lo, side.hi)[0]
        a, b = _separate(q, gp, a, b)
        cert = {**cert, "roots": n_f, "shared": n_h, "witness_poly": [str(c) for c in q]}
        return refuted(_interval_witness(box, j, a, b), cert)

    def _split_subset(self, cs, g, j, f, box, split, pinned) -> Verdict:
        side = box[j]
        cert = {"rule": "split", "var": j, "poly": [str(c) for c in f], "branches": []}
        if len(f) <= 1:
            return proved({**cert, "roots": 0})
        roots = upoly.isolate_roots(f, side.lo, side.hi)
        if not roots:
            return proved({**cert, "roots": 0})
        verdicts = []
        for a, b in roots:
            if a == b:
                sub = {j: Term.const(a)}
                v = self.subset([c.substitute(sub) for c in cs], g.substitute(sub),
                                box.replace(j, Interval.point(a)), split | {j}, pinned)
                if v.refuted and v.witness is not None:
                    v = Verdict(v.kind, v.witness.with_side(j, Interval.point(a)), v.certificate)
            else:
                rest = [c for c in cs if _univariate_in(c, j) is None]
                v = None
                for width in _PINNED_WIDTHS:
                    a, b = upoly.refine(f, (a, b), width)
                    if a == b:
                        sub = {j: Term.const(a)}
                        v = self.subset([c.substitute(sub) for c in cs], g.substitute(sub),
                                        box.replace(j, Interval.point(a)), split | {j}, pinned)
                        break
                    v = self.subset(rest, g, box.replace(j, Interval(a, b)), split | {j}, pinned | {j})
                    if v.decided:
                        break
            cert["branches"].append({"root": [str(a), str(b)], "verdict": str(v.kind),
                                     "certificate": v.certificate})
            verdicts.append(v)
            if v.refuted:
                return refuted(v.witness, cert)
        m = meet(verdicts)
        return proved(cert) if m.proved else m

    def _boxes_subset(self, cs, g, box, axes, pinned) -> Verdict:
        def classify(b: Box):
            for i, c in enumerate(cs):
                if eval_interval(c, b).excludes_zero():
                    return ("discard", i)
            giv = eval_interval(g, b)
            if giv.is_zero():
                return ("discard", "target")
            if giv.excludes_zero():
                w = _zero_point(cs, b, axes, pinned)
                if w is not None:
                    return ("refute", w)
            return ("split", None)

        return self._search(box, axes, classify, {"rule": "boxes", "constraints": [str(c) for c in cs],
                                                    "target": str(g)})

    def _search(self, box: Box, axes: list[int], classify, cert: dict) -> Verdict:
        level = [box]
        depth = 0
        discarded = []
        unresolved = []
        while level:
            self.boxes += len(level)
            results = self._map(classify, level)
            nxt = []
            for b, (what, info) in zip(level, results):
                if what == "refute":
                    return refuted(info, {**cert, "depth": depth})
                if what == "discard":
                    discarded.append([_fmt_box(b), info])
                elif (not axes or depth >= self.budget.max_depth
                      or b.max_width(axes) <= self.budget.min_width):
                    unresolved.append(b)
                else:
                    nxt.extend(b.split(b.widest_axis(axes), _SPLIT_RATIO))
            self.max_depth_seen = max(self.max_depth_seen, depth)
            if self.boxes + len(nxt) > self.budget.max_boxes:
                return unknown(depth=depth, boxes_remaining=len(nxt) + len(unresolved),
                               boxes_processed=self.boxes, reason="box budget exhausted")
            level = nxt
            depth += 1
        if unresolved:
            return unknown(depth=depth - 1, boxes_remaining=len(unresolved),
                           boxes_processed=self.boxes, reason="undecided boxes at resolution limit",
                           sample=_fmt_box(unresolved[0]))
        return proved({**cert, "discarded": discarded})

    # -- positivity -------------------------------------------------------------

    def positive(self, p: Term, cs: list[Term], coz: list[Term], box: Box,
                 split: frozenset, pinned: frozenset) -> Verdict:
        kept = []
        for c in cs:
            if c.is_zero():
                continue
            if not c.variables():
                s = _sign_of(_constant_enclosure(c))
                if s == 0:
                    continue
                if s is not None:
                    return proved({"rule": "empty-constraint", "constraint": str(c)})
            kept.append(c)
        cs = kept
        live_coz = []
        for d in coz:
            if not d.variables():
                s = _sign_of(_constant_enclosure(d))
                if s == 0:
                    return proved({"rule": "empty-cozero", "term": str(d)})
                if s is not None:
                    continue
            live_coz.append(d)
        coz = live_coz

        active = set(p.variables())
        for t in cs + coz:
            active |= t.variables()
        free = active - pinned
        if not free and not pinned:
            if cs or coz:
                return unknown(reason="undetermined constant constraint")
            s = _sign_of(_constant_enclosure(p))
            if s == 1:
                return proved({"rule": "positive-constant", "value": str(p)})
            if s is None:
                return unknown(reason="constant straddles zero", value=str(p))
            return refuted(Witness.at(box.center()), {"rule": "nonpositive-constant", "value": str(p)})

        if len(free) == 1 and not pinned and not coz and not cs:
            j = next(iter(free))
            pp = as_univariate(p, j) if p.is_polynomial() else None
            if pp is not None:
                return self._sturm_positive(pp, j, box)

        for j in sorted(free - split):
            univ = [q for q in (_univariate_in(c, j) for c in cs) if q is not None]
            if univ:
                return self._split_positive(p, cs, coz, j, upoly.gcd_many(univ), box, split, pinned)
        return self._boxes_positive(p, cs, coz, box, sorted(free), pinned)

    def _sturm_positive(self, pp: list, j: int, box: Box) -> Verdict:
        side = box[j]
        cert = {"rule": "sturm-positive", "var": j, "poly": [str(c) for c in pp]}
        if not pp:
            return refuted(Witness.at(box.center()), {**cert, "reason": "zero polynomial"})
        roots = upoly.isolate_roots(pp, side.lo, side.hi) if len(pp) > 1 else []
        if roots:
            a, b = roots[0]
            return refuted(_interval_witness(box, j, a, b), {**cert, "reason": "root in box"})
        if upoly.evaluate(pp, side.lo) > 0:
            return proved(cert)
        return refuted(_point_witness(box, j, side.lo), {**cert, "reason": "negative"})

    def _split_positive(self, p, cs, coz, j, f, box, split, pinned) -> Verdict:
        side = box[j]
        cert = {"rule": "split-positive", "var": j, "poly": [str(c) for c in f], "branches": []}
        if len(f) <= 1:
            return proved({**cert, "roots": 0})
        roots = upoly.isolate_roots(f, side.lo, side.hi)
        verdicts = []
        for a, b in roots:
            if a == b:
                sub = {j: Term.const(a)}
                v = self.positive(p.substitute(sub), [c.substitute(sub) for c in cs],
                                  [d.substitute(sub) for d in coz], box.replace(j, Interval.point(a)),
                                  split | {j}, pinned)
                if v.refuted and v.witness is not None:
                    v = Verdict(v.kind, v.witness.with_side(j, Interval.point(a)), v.certificate)
            else:
                rest = [c for c in cs if _univariate_in(c, j) is None]
                v = None
                pp = as_univariate(p, j) if p.is_polynomial() and p.variables() <= {j} else None
                if pp is not None and not rest and not coz and len(upoly.gcd(f, pp)) > 1 \
                        and upoly.count_roots(upoly.gcd(f, pp), a, b) > 0:
                    v = refuted(_interval_witness(box, j, a, b),
                                {"rule": "shared-root", "var": j})
                else:
                    for width in _PINNED_WIDTHS:
                        a, b = upoly.refine(f, (a, b), width)
                        v = self.positive(p, rest, coz, box.replace(j, Interval(a, b)),
                                          split | {j}, pinned | {j})
                        if v.decided:
                            break
            cert["branches"].append({"root": [str(a), str(b)], "verdict": str(v.kind),
                                     "certificate": v.certificate})
            verdicts.append(v)
            if v.refuted:
                return refuted(v.witness, cert)
        m = meet(verdicts)
        return proved(cert) if m.proved else m

    def _boxes_positive(self, p, cs, coz, box, axes, pinned) -> Verdict:
        def classify(b: Box):
            for i, c in enumerate(cs):
                if eval_interval(c, b).excludes_zero():
                    return ("discard", i)
            for d in coz:
                if eval_interval(d, b).is_zero():
                    return ("discard", "cozero")
            piv = eval_interval(p, b)
            if piv.lo > 0:
                return ("discard", "positive")
            if piv.hi <= 0 and all(eval_interval(d, b).excludes_zero() for d in coz):
                w = _zero_point(cs, b, axes, pinned)
                if w is not None:
                    return ("refute", w)
            if not pinned and cs:
                for pt in _candidate_points(b, axes):
                    if all(exact_value(c, pt) == 0 for c in cs):
                        pv = exact_value(p, pt)
                        cz = [exact_value(d, pt) for d in coz]
                        if pv is not None and pv <= 0 and all(v is not None and v != 0 for v in cz):
                            return ("refute", Witness.at(pt))
            return ("split", None)

        return self._search(box, axes, classify, {"rule": "boxes-positive", "target": str(p),
                                                    "constraints": [str(c) for c in cs]})


def _probe_points(side: Interval, count: int) -> list[Fraction]:
    pts = [side.lo, side.hi, side.mid]
    n = 2
    while len(pts) < count + 3:
        pts.extend(side.lo + side.width * k / n for k in range(1, n))
        n *= 2
    return pts


def _point_witness(box: Box, j: int, t: Fraction) -> Witness:
    return Witness(Box.point(box.center()).replace(j, Interval.point(t)))


def _interval_witness(box: Box, j: int, a: Fraction, b: Fraction) -> Witness:
    return Witness(Box.point(box.center()).replace(j, Interval(a, b)),
                   "" if a == b else "isolating interval")


def _separate(q: list, gp: list, a: Fraction, b: Fraction) -> tuple[Fraction, Fraction]:
    """Shrink the isolating interval of a root of q until gp is certified nonzero on it."""
    from cinfty.interval import _poly_iv
    while a != b and _poly_iv(gp, Interval(a, b)).contains_zero():
        a, b = upoly.refine(q, (a, b), (b - a) / 2)
    return a, b


def _candidate_points(b: Box, axes: Sequence[int]) -> list[tuple]:
    center = b.center()
    pts = [center]
    for axis in axes:
        for end in (b[axis].lo, b[axis].hi):
            pt = list(center)
            pt[axis] = end
            pts.append(tuple(pt))
    return pts


def _zero_point(cs: list[Term], b: Box, axes: Sequence[int], pinned: frozenset) -> Witness | None:
    """A certified point of Z(cs) inside ``b``, as an exact point or a thin box."""
    base = [Interval.point(iv.mid) if i not in pinned else iv for i, iv in enumerate(b.intervals)]
    if not cs:
        return Witness(Box(tuple(base)))
    if not pinned:
        for pt in _candidate_points(b, axes):
            if all(exact_value(c, pt) == 0 for c in cs):
                return Witness.at(pt)
    if len(cs) == 1:
        c = cs[0]
        for axis in axes:
            lo_side = list(base)
            hi_side = list(base)
            lo_side[axis] = Interval.point(b[axis].lo)
            hi_side[axis] = Interval.point(b[axis].hi)
            s_lo = _sign_of(eval_interval(c, lo_side))
            s_hi = _sign_of(eval_interval(c, hi_side))
            if s_lo == 0 and not any(i in pinned for i in range(len(base))):
                return Witness(Box(tuple(lo_side)))
            if s_lo is not None and s_hi is not None and s_lo * s_hi < 0:
                seg = list(base)
                seg[axis] = b[axis]
                return Witness(Box(tuple(seg)), "sign change")
    return None


# -- public API -------------------------------------------------------------------

def subset_query(constraints: Iterable[Term], target: Term, box: Box,
                 budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
    """Z(constraints) n box  is contained in  Z(target)."""
    engine = _Engine(budget)
    try:
        return engine.subset(list(constraints), target, box, frozenset(), frozenset())
    finally:
        engine.close()


def positive_query(p: Term, constraints: Iterable[Term], box: Box,
                   budget: QueryBudget = DEFAULT_BUDGET, coz: Iterable[Term] = ()) -> Verdict:
    """p > 0 on Z(constraints) n box, away from the zeros of ``coz``."""
    engine = _Engine(budget)
    try:
        return engine.positive(p, list(constraints), list(coz), box, frozenset(), frozenset())
    finally:
        engine.close()


def is_empty_zero_set(f: Term, box: Box, budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
    return subset_query([f], ONE, box, budget)


def zero_subset(f: Term, g: Term, box: Box, budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
    """Z(f) n box  is contained in  Z(g)."""
    return subset_query([f], g, box, budget)


def zero_equal(f: Term, g: Term, box: Box, budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
    return meet([zero_subset(f, g, box, budget), zero_subset(g, f, box, budget)])


def nonvanishing_on(h: Term, constraints: Sequence[Term], box: Box,
                    budget: QueryBudget = DEFAULT_BUDGET) -> Verdict:
    """h has no zero on the common zero set of ``constraints`` inside ``box``."""
    return subset_query(list(constraints) + [h], ONE, box, budget)
