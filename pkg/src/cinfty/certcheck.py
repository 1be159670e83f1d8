"""Independent re-validation of query certificates.

Refutations with an exact witness point are checked by exact evaluation of
every relation and of the target.  Thin-box witnesses are checked with a
Sturm count (polynomial constraints) or a sign change (one constraint).
Everything else, PROVED included, is re-derived with a doubled budget and
spot-checked at sample points.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import TextIO

from cinfty import upoly
from cinfty.cli import ring_from_json
from cinfty.cring import Presentation
from cinfty.interval import Box, Interval, eval_interval
from cinfty.parsing import parse_term
from cinfty.points import sample_points
from cinfty.terms import Term, as_univariate, exact_value
from cinfty.verdict import DEFAULT_BUDGET, Kind


def _sign(t: Term, sides) -> int | None:
    enc = eval_interval(t, sides)
    if enc.lo > 0:
        return 1
    if enc.hi < 0:
        return -1
    if enc.is_zero():
        return 0
    return None


def _point_check(p: Presentation, kind: str, extra: list[Term], target: Term,
                 point: list[Fraction]) -> bool | None:
    if not p.box.contains(point):
        return False
    for c in list(p.relations) + extra:
        v = exact_value(c, point)
        if v is None:
            if _sign(c, [Interval.point(x) for x in point]) != 0:
                return None
        elif v != 0:
            return False
    v = exact_value(target, point)
    s = ((v > 0) - (v < 0)) if v is not None else _sign(target, [Interval.point(x) for x in point])
    if s is None:
        return None
    return s != 0 if kind == "subset" else s <= 0


def _thin_box_check(p: Presentation, kind: str, extra: list[Term], target: Term,
                    box: Box) -> bool | None:
    """One non-degenerate side: the constraints share a root there and the
    target keeps a strict sign on the whole box."""
    wide = [i for i, s in enumerate(box.intervals) if not s.is_point()]
    if len(wide) != 1 or p.slices:
        return None
    j = wide[0]
    side = box[j]
    s = _sign(target, box.intervals)
    if s is None or (kind == "subset" and s == 0) or (kind == "positive" and s > 0):
        return None
    images = {i: Term.const(box[i].lo) for i in range(p.arity) if i != j}
    cs = [c.substitute(images) for c in list(p.relations) + extra]
    cs = [c for c in cs if not c.is_zero()]
    polys = [as_univariate(c, j) for c in cs]
    if cs and all(q is not None for q in polys):
        g = upoly.gcd_many(polys)
        return upoly.degree(g) > 0 and upoly.count_roots(g, side.lo, side.hi) > 0
    if len(cs) == 1:
        lo = _sign(cs[0], box.replace(j, Interval.point(side.lo)).intervals)
        hi = _sign(cs[0], box.replace(j, Interval.point(side.hi)).intervals)
        if lo is not None and hi is not None and lo * hi < 0:
            return True
    return None


def _rerun(p: Presentation, kind: str, extra: list[Term], target: Term, expected: str) -> bool:
    budget = DEFAULT_BUDGET.scaled(2)
    v = p.subset(extra, target, budget) if kind == "subset" else p.positive(target, budget, extra)
    if v.kind.value != expected:
        return False
    if expected != Kind.PROVED.value:
        return True
    q = Presentation(p.arity, tuple(p.relations) + tuple(extra), p.box, (), p.slices)
    for x in sample_points(q, 8):
        s = x.sign(target)
        if s is None:
            continue
        if (kind == "subset" and s != 0) or (kind == "positive" and s <= 0):
            return False
    return True


def check_query(rec: dict) -> tuple[bool, str]:
    p = ring_from_json(rec["ring"])
    extra = [parse_term(t, p.arity) for t in rec["extra"]]
    target = parse_term(rec["target"], p.arity)
    kind, verdict = rec["kind"], rec["verdict"]
    if verdict == Kind.UNKNOWN.value:
        return True, "unknown (nothing to check)"
    w = rec.get("witness")
    if verdict == Kind.REFUTED.value and w:
        if "point" in w:
            ok = _point_check(p, kind, extra, target, [Fraction(v) for v in w["point"]])
            if ok is not None:
                return ok, "exact witness"
        else:
            box = Box.of(*[(Fraction(lo), Fraction(hi)) for lo, hi in w["box"]])
            ok = _thin_box_check(p, kind, extra, target, box)
            if ok:
                return True, "isolated witness"
    return _rerun(p, kind, extra, target, verdict), "re-derived"


def check_stream(text: str, out: TextIO) -> int:
    bad = 0
    total = 0
    for raw in text.splitlines():
        raw = raw.strip()
        if not raw.startswith("{"):
            continue
        rec = json.loads(raw)
        for k, q in enumerate(rec.get("trace", [])):
            total += 1
            ok, how = check_query(q)
            bad += not ok
            out.write(f"line {rec.get('line')} query {k}: {'OK' if ok else 'FAILED'} ({how})\n")
    out.write(f"{total - bad}/{total} certificates valid\n")
    return 0 if bad == 0 else 1
