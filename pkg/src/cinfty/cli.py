"""Command-line driver for session scripts.

    cinfty run [options] SCRIPT      execute a script ("-" reads stdin)
    cinfty check FILE                re-validate certificates from structured output

One command per line; ``#`` starts a comment.  Arguments are ``key=value``;
a value is a bare word, a double-quoted string or a bracketed list whose
items are separated by ``;``.  A trailing ``expect KIND`` checks the verdict.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, TextIO

from cinfty import cring, filterideal, order, radical, sheaf, spectrum
from cinfty.cring import Hom, Presentation
from cinfty.interval import Box
from cinfty.parsing import TermSyntaxError, parse_term
from cinfty.points import SpectrumPoint, export_points, sample_points
from cinfty.terms import Term
from cinfty.verdict import DEFAULT_BUDGET, Kind, QueryBudget, Verdict, proved, unknown

EXIT_OK, EXIT_EXPECT, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 64


class ScriptError(Exception):
    def __init__(self, message: str, line: int, column: int = 1):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


# -- tokenizing -------------------------------------------------------------------

@dataclass
class Arg:
    value: str
    column: int


@dataclass
class Command:
    line: int
    name: str
    positional: list[Arg]
    kwargs: dict[str, Arg]
    expect: Kind | None = None
    column: int = 1


def _read_value(text: str, i: int, line: int) -> tuple[str, int]:
    if i < len(text) and text[i] == "[":
        depth = 0
        for k in range(i, len(text)):
            if text[k] == "[":
                depth += 1
            elif text[k] == "]":
                depth -= 1
                if depth == 0:
                    return text[i:k + 1], k + 1
        raise ScriptError("unclosed '['", line, i + 1)
    if i < len(text) and text[i] == '"':
        k = text.find('"', i + 1)
        if k < 0:
            raise ScriptError("unclosed '\"'", line, i + 1)
        return text[i + 1:k], k + 1
    k = i
    while k < len(text) and not text[k].isspace():
        k += 1
    return text[i:k], k


def tokenize(text: str, line: int) -> Command | None:
    """Split one script line into a command, or None for blank/comment lines."""
    if "#" in text:
        # a '#' inside brackets or quotes is not a comment
        depth, quoted = 0, False
        for k, ch in enumerate(text):
            if ch == '"':
                quoted = not quoted
            elif not quoted and ch == "[":
                depth += 1
            elif not quoted and ch == "]":
                depth -= 1
            elif ch == "#" and not quoted and depth == 0:
                text = text[:k]
                break
    words: list[tuple[str | None, str, int]] = []
    i = 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        start = i
        k = i
        while k < len(text) and not text[k].isspace() and text[k] not in "=[\"":
            k += 1
        if k < len(text) and text[k] == "=":
            key = text[i:k]
            value, i = _read_value(text, k + 1, line)
            words.append((key, value, k + 2))
        else:
            value, i = _read_value(text, i, line)
            words.append((None, value, start + 1))
    if not words:
        return None
    if words[0][0] is not None:
        raise ScriptError("a line must start with a command name", line, words[0][2])
    cmd = Command(line, words[0][1], [], {}, column=words[0][2])
    rest = words[1:]
    if len(rest) >= 2 and rest[-2][0] is None and rest[-2][1] == "expect":
        kind = rest[-1][1]
        try:
            cmd.expect = Kind(kind)
        except ValueError:
            raise ScriptError(f"unknown verdict {kind!r} after expect", line, rest[-1][2]) from None
        rest = rest[:-2]
    for key, value, col in rest:
        if key is None:
            cmd.positional.append(Arg(value, col))
        elif key in cmd.kwargs:
            raise ScriptError(f"duplicate argument {key!r}", line, col)
        else:
            cmd.kwargs[key] = Arg(value, col)
    return cmd


def split_list(value: str) -> list[str]:
    v = value.strip()
    if v.startswith("[") and v.endswith("]"):
        v = v[1:-1]
    parts = [p.strip() for p in v.split(";")]
    return [p for p in parts if p]


def parse_box(value: str, arity: int, line: int, column: int) -> Box:
    sides = []
    for part in split_list(value):
        bits = part.split(",")
        if len(bits) != 2:
            raise ScriptError(f"box side {part!r} is not lo,hi", line, column)
        try:
            lo, hi = Fraction(bits[0].strip()), Fraction(bits[1].strip())
        except (ValueError, ZeroDivisionError):
            raise ScriptError(f"box side {part!r} is not rational", line, column) from None
        if lo > hi:
            raise ScriptError(f"box side {part!r} is empty", line, column)
        sides.append((lo, hi))
    if len(sides) == 1 and arity != 1:
        sides = sides * arity
    if len(sides) != arity:
        raise ScriptError(f"box has {len(sides)} sides, ring has {arity} variables", line, column)
    return Box.of(*sides)


# -- results ----------------------------------------------------------------------

@dataclass
class Result:
    verdict: Verdict | None
    text: str
    data: dict = field(default_factory=dict)


def _verdict_json(v: Verdict) -> dict:
    out: dict[str, Any] = {"verdict": v.kind.value}
    if v.witness is not None:
        out["witness"] = v.witness.to_json()
    return out


def ring_json(p: Presentation) -> dict:
    return {
        "arity": p.arity,
        "relations": [str(r) for r in p.relations],
        "box": [[str(iv.lo), str(iv.hi)] for iv in p.box.intervals],
        "slices": [[j, str(a)] for j, a in p.slices],
    }


def ring_from_json(d: dict) -> Presentation:
    n = d["arity"]
    rels = tuple(parse_term(r, n) for r in d["relations"])
    box = Box.of(*[(Fraction(lo), Fraction(hi)) for lo, hi in d["box"]])
    slices = tuple((j, parse_term(a, n)) for j, a in d.get("slices", []))
    return Presentation(n, rels, box, (), slices)


def query_json(entry) -> dict:
    p, kind, extra, target, v = entry
    out = {"kind": kind, "ring": ring_json(p), "extra": [str(t) for t in extra], "target": str(target)}
    out.update(_verdict_json(v))
    return out


# -- the session ------------------------------------------------------------------

class Session:
    def __init__(self, budget: QueryBudget = DEFAULT_BUDGET, box: str | None = None):
        self.budget = budget
        self.box = box
        self.bindings: dict[str, tuple[str, Any]] = {}
        self.handlers: dict[str, Callable[[Command], Result]] = {
            "ring": self.do_ring, "elem": self.do_elem, "localize": self.do_localize,
            "quotient": self.do_quotient, "coproduct": self.do_coproduct,
            "adjoin": self.do_adjoin, "idempotent-invert": self.do_idempotent, "hom": self.do_hom,
            "radical-member": self.do_radical_member, "sat-member": self.do_sat_member,
            "radical-compare": self.do_radical_compare, "nullstellensatz": self.do_nullstellensatz,
            "separation": self.do_separation, "semireal": self.do_semireal,
            "filter": self.do_filter, "filter-hat": self.do_filter_hat,
            "filter-check": self.do_filter_check, "galois": self.do_galois,
            "open": self.do_open, "leq": self.do_leq, "meet": self.do_meet, "join": self.do_join,
            "covers": self.do_covers, "points": self.do_points,
            "product-spectrum": self.do_product_spectrum, "spectral-map": self.do_spectral_map,
            "constructible-meet": self.do_constructible_meet, "nilradical": self.do_nilradical,
            "section": self.do_section, "restrict": self.do_restrict, "germ": self.do_germ,
            "precedes": self.do_precedes, "ordering": self.do_ordering,
            "harrison": self.do_harrison, "supp": self.do_supp,
        }

    # argument helpers

    def arg(self, cmd: Command, key: str, default: str | None = None) -> Arg:
        if key in cmd.kwargs:
            return cmd.kwargs[key]
        if default is not None:
            return Arg(default, cmd.column)
        raise ScriptError(f"{cmd.name} needs {key}=...", cmd.line, cmd.column)

    def name(self, cmd: Command) -> str:
        if len(cmd.positional) != 1:
            raise ScriptError(f"{cmd.name} needs exactly one name", cmd.line, cmd.column)
        nm = cmd.positional[0]
        if nm.value in self.bindings:
            raise ScriptError(f"name {nm.value!r} is already bound", cmd.line, nm.column)
        if not nm.value.replace("_", "a").replace("-", "a").isalnum():
            raise ScriptError(f"bad name {nm.value!r}", cmd.line, nm.column)
        return nm.value

    def no_positional(self, cmd: Command) -> None:
        if cmd.positional:
            raise ScriptError(f"unexpected word {cmd.positional[0].value!r}", cmd.line,
                              cmd.positional[0].column)

    def lookup(self, cmd: Command, key: str, kind: str) -> Any:
        a = self.arg(cmd, key)
        if a.value not in self.bindings:
            raise ScriptError(f"unknown name {a.value!r}", cmd.line, a.column)
        k, obj = self.bindings[a.value]
        if k != kind:
            raise ScriptError(f"{a.value!r} is a {k}, expected a {kind}", cmd.line, a.column)
        return obj

    def term_of(self, cmd: Command, a: Arg, p: Presentation) -> Term:
        if a.value in self.bindings:
            k, obj = self.bindings[a.value]
            if k == "elem":
                if obj.ring.arity > p.arity:
                    raise ScriptError(f"element {a.value!r} does not fit this ring", cmd.line, a.column)
                return obj.term
        try:
            return parse_term(a.value, p.arity)
        except TermSyntaxError as e:
            raise ScriptError(str(e), cmd.line, a.column + e.offset) from None

    def term(self, cmd: Command, key: str, p: Presentation, default: str | None = None) -> Term:
        return self.term_of(cmd, self.arg(cmd, key, default), p)

    def terms(self, cmd: Command, key: str, p: Presentation, default: str | None = None) -> list[Term]:
        a = self.arg(cmd, key, default)
        out = []
        inner = a.value[1:] if a.value.startswith("[") else a.value
        offset = a.column + (1 if a.value.startswith("[") else 0)
        for part in inner.rstrip("]").split(";"):
            stripped = part.strip()
            if stripped:
                col = offset + (len(part) - len(part.lstrip()))
                out.append(self.term_of(cmd, Arg(stripped, col), p))
            offset += len(part) + 1
        return out

    def point(self, cmd: Command, p: Presentation) -> SpectrumPoint:
        a = self.arg(cmd, "point")
        try:
            coords = [Fraction(c.strip()) for c in a.value.strip("[]").replace(";", ",").split(",")
                      if c.strip()]
        except (ValueError, ZeroDivisionError):
            raise ScriptError(f"bad point {a.value!r}", cmd.line, a.column) from None
        if len(coords) != p.arity:
            raise ScriptError(f"point has {len(coords)} coordinates, ring has {p.arity}",
                              cmd.line, a.column)
        x = SpectrumPoint.at(coords)
        if not p.box.contains(x.point) or not all(x.vanishes(g) for g in p.relations):
            raise ScriptError(f"point {x} is not certified to lie in Z(I) n box", cmd.line, a.column)
        return x

    def bind(self, name: str, kind: str, obj: Any) -> None:
        self.bindings[name] = (kind, obj)

    # construction commands

    def do_ring(self, cmd: Command) -> Result:
        nm = self.name(cmd)
        try:
            n = int(self.arg(cmd, "vars").value)
        except ValueError:
            a = self.arg(cmd, "vars")
            raise ScriptError("vars must be a natural number", cmd.line, a.column) from None
        if n < 0:
            raise ScriptError("vars must be a natural number", cmd.line, self.arg(cmd, "vars").column)
        free = Presentation(n, (), Box.cube(n))
        rels = self.terms(cmd, "relations", free, "[]")
        box_arg = cmd.kwargs.get("box") or (Arg(self.box, cmd.column) if self.box else None)
        box = parse_box(box_arg.value, n, cmd.line, box_arg.column) if box_arg else None
        p = Presentation(n, tuple(rels), box)
        self.bind(nm, "ring", p)
        return Result(None, f"{nm} := {p}")

    def do_elem(self, cmd: Command) -> Result:
        nm = self.name(cmd)
        p = self.lookup(cmd, "ring", "ring")
        e = p.element(self.term(cmd, "term", p))
        self.bind(nm, "elem", e)
        return Result(None, f"{nm} := {e}")

    def do_localize(self, cmd: Command) -> Result:
        nm = self.name(cmd)
        p = self.lookup(cmd, "ring", "ring")
        loc = cring.localize(p, self.term(cmd, "at", p))
        self.bind(nm, "ring", loc.presentation)
        return Result(None, f"{nm} := {loc.presentation}")

    def do_quotient(self, cmd: Command) -> Result:
        nm = self.name(cmd)
        p = self.lookup(cmd, "ring", "ring")
        q, _ = cring.quotient(p, self.terms(cmd, "relations", p))
        self.bind(nm, "ring", q)
        return Result(None, f"{nm} := {q}")

    def do_coproduct(self, cmd: Command) -> Result:
        nm = self.name(cmd)
        q, _, _ = cring.coproduct(self.lookup(cmd, "left", "ring"), self.lookup(cmd, "right", "ring"))
        self.bind(nm, "ring", q)
        return Result(None, f"{nm} := {q}")

    def do_adjoin(self, cmd: Command) -> Result:
        nm = self.name(cmd)
        p = self.lookup(cmd, "ring", "ring")
        try:
            k = int(self.arg(cmd, "count").value)
            q, _ = cring.adjoin_variables(p, k)
        except (ValueError, cring.PresentationError):
            a = self.arg(cmd, "count")
            raise ScriptError("count must be a natural number", cmd.line, a.column) from None
        self.bind(nm, "ring", q)
        return Result(None, f"{nm} := {q}")

    def do_idempotent(self, cmd: Command) -> Result:
        nm = self.name(cmd)
        p = self.lookup(cmd, "ring", "ring")
        e = self.term(cmd, "at", p)
        try:
            rep = cring.invert_idempotent(p, e, self.budget)
        except cring.NotIdempotent as err:
            v = err.verdict
            kind = Verdict(Kind.REFUTED if v.refuted else Kind.UNKNOWN, v.witness, v.certificate, v.report)
            return Result(kind, f"{kind} (not idempotent)")
        self.bind(nm, "ring", rep.quotient)
        return Result(rep.zero_sets, f"{rep.zero_sets} ({nm} := {rep.quotient})")

    def do_hom(self, cmd: Command) -> Result:
        nm = self.name(cmd)
        src = self.lookup(cmd, "source", "ring")
        tgt = self.lookup(cmd, "target", "ring")
        images = self.terms(cmd, "images", tgt)
        try:
            h = Hom(src, tgt, tuple(images))
        except cring.PresentationError as e:
            raise ScriptError(str(e), cmd.line, self.arg(cmd, "images").column) from None
        v = h.well_defined(self.budget)
        self.bind(nm, "hom", h)
        return Result(v, f"{v} ({nm} well defined)" if v.proved else f"{v}")

    # radical commands

    def do_radical_member(self, cmd: Command) -> Result:
        self.no_positional(cmd)
        p = self.lookup(cmd, "ring", "ring")
        v = radical.radical_member(p, self.term(cmd, "f", p), self.budget)
        return Result(v, str(v))

    def do_sat_member(self, cmd: Command) -> Result:
        p = self.lookup(cmd, "ring", "ring")
        s = self.terms(cmd, "S", p)
        if not s:
            raise ScriptError("S must be nonempty", cmd.line, self.arg(cmd, "S").column)
        v = radical.saturation_member(p, s, self.term(cmd, "g", p), self.budget)
        return Result(v, str(v))

    def do_radical_compare(self, cmd: Command) -> Result:
        pi, pj = self.lookup(cmd, "left", "ring"), self.lookup(cmd, "right", "ring")
        try:
            v = radical.radical_compare(pi, pj, self.budget)
        except ValueError as e:
            raise ScriptError(str(e), cmd.line, cmd.column) from None
        return Result(v, str(v))

    def do_nullstellensatz(self, cmd: Command) -> Result:
        v = radical.nullstellensatz_check(self.lookup(cmd, "ring", "ring"), self.budget)
        return Result(v, f"{v} (ring trivial)" if v.proved else str(v))

    def do_separation(self, cmd: Command) -> Result:
        p = self.lookup(cmd, "ring", "ring")
        rep = radical.separation_check(p, self.terms(cmd, "S", p), self.budget)
        if not rep.agree:
            v = unknown(reason="the two sides disagree")
            return Result(v, "UNKNOWN (sides disagree)")
        v = rep.monoid_side
        note = "radical meets S" if v.proved else "radical misses S" if v.refuted else "undecided"
        return Result(v, f"{v} ({note}; both sides agree)")

    def do_semireal(self, cmd: Command) -> Result:
        p = self.lookup(cmd, "ring", "ring")
        v = radical.semireal_check(p, self.terms(cmd, "fs", p, "[]"), self.budget)
        return Result(v, str(v))

    # filters

    def do_filter(self, cmd: Command) -> Result:
        nm = self.name(cmd)
        n = int(self.arg(cmd, "vars").value)
        free = Presentation(n, (), Box.cube(n))
        gens = self.terms(cmd, "gens", free, "[]")
        box_arg = cmd.kwargs.get("box") or (Arg(self.box, cmd.column) if self.box else None)
        box = parse_box(box_arg.value, n, cmd.line, box_arg.column) if box_arg else free.box
        f = filterideal.ClosedSetFilter(n, box, tuple(gens))
        self.bind(nm, "filter", f)
        return Result(None, f"{nm} := filter generated by [{'; '.join(map(str, gens))}]")

    def do_filter_hat(self, cmd: Command) -> Result:
        nm = self.name(cmd)
        f = filterideal.hat(self.lookup(cmd, "ring", "ring"))
        self.bind(nm, "filter", f)
        proper = f.proper(self.budget)
        return Result(proper, f"{proper} ({nm} proper)" if proper.proved else
                      f"{proper} ({nm} improper)" if proper.refuted else str(proper))

    def do_filter_check(self, cmd: Command) -> Result:
        f = self.lookup(cmd, "filter", "filter")
        v = filterideal.check(f, self.term(cmd, "f", f.presentation), self.budget)
        return Result(v, str(v))

    def do_galois(self, cmd: Command) -> Result:
        p = self.lookup(cmd, "ring", "ring")
        f = self.lookup(cmd, "filter", "filter")
        try:
            rep = filterideal.galois_adjunction_test(p, f, self.budget)
        except ValueError as e:
            raise ScriptError(str(e), cmd.line, cmd.column) from None
        if not rep.agree:
            return Result(unknown(reason="adjunction sides disagree"), "UNKNOWN (sides disagree)")
        return Result(rep.left, f"{rep.left} (both sides agree)")

    # spectrum

    def do_open(self, cmd: Command) -> Result:
        nm = self.name(cmd)
        p = self.lookup(cmd, "ring", "ring")
        u = spectrum.BasicOpen(p, self.term(cmd, "term", p))
        self.bind(nm, "open", u)
        return Result(None, f"{nm} := {u}")

    def do_leq(self, cmd: Command) -> Result:
        u, w = self.lookup(cmd, "left", "open"), self.lookup(cmd, "right", "open")
        self._same_ring(cmd, u.presentation, w.presentation)
        v = spectrum.basic_leq(u, w, self.budget)
        return Result(v, str(v))

    def _same_ring(self, cmd: Command, p: Presentation, q: Presentation) -> None:
        if p != q:
            raise ScriptError("opens live over different rings", cmd.line, cmd.column)

    def _lattice(self, cmd: Command, op) -> Result:
        nm = self.name(cmd)
        u, w = self.lookup(cmd, "left", "open"), self.lookup(cmd, "right", "open")
        self._same_ring(cmd, u.presentation, w.presentation)
        out = op(u, w)
        self.bind(nm, "open", out)
        return Result(None, f"{nm} := {out}")

    def do_meet(self, cmd: Command) -> Result:
        return self._lattice(cmd, spectrum.basic_meet)

    def do_join(self, cmd: Command) -> Result:
        return self._lattice(cmd, spectrum.basic_join)

    def do_covers(self, cmd: Command) -> Result:
        p = self.lookup(cmd, "ring", "ring")
        ts = self.terms(cmd, "opens", p)
        if not ts:
            raise ScriptError("opens must be nonempty", cmd.line, self.arg(cmd, "opens").column)
        res = spectrum.covers(p, ts, self.budget)
        text = str(res.verdict)
        data: dict[str, Any] = {}
        if res.proved:
            data["subcover"] = list(res.subcover)
            text += f" (subcover {','.join(map(str, res.subcover))}"
            if res.combination is not None:
                lam = [str(l) for l in res.combination]
                data["combination"] = lam
                parts = [f"({l})*({ts[k]})" for l, k in zip(lam, res.subcover)]
                text += "; 1 = " + " + ".join(parts) + (" mod I" if p.relations else "")
            text += ")"
        return Result(res.verdict, text, data)

    def do_points(self, cmd: Command) -> Result:
        p = self.lookup(cmd, "ring", "ring")
        try:
            res = int(self.arg(cmd, "resolution", "8").value)
        except ValueError:
            raise ScriptError("resolution must be a natural number", cmd.line,
                              self.arg(cmd, "resolution").column) from None
        pts = sample_points(p, res, self.budget)
        if "out" in cmd.kwargs:
            with open(cmd.kwargs["out"].value, "w") as fh:
                fh.write(export_points(pts))
        if cmd.positional:
            nm = self.name(cmd)
            self.bind(nm, "points", pts)
        lines = [f"{len(pts)} points"] + [f"  {x}" for x in pts]
        return Result(None, "\n".join(lines), {"points": [x.format() for x in pts]})

    def do_product_spectrum(self, cmd: Command) -> Result:
        a = self.arg(cmd, "rings")
        rings = []
        for part in split_list(a.value):
            if part not in self.bindings or self.bindings[part][0] != "ring":
                raise ScriptError(f"unknown ring {part!r}", cmd.line, a.column)
            rings.append(self.bindings[part][1])
        rep = spectrum.product_spectrum(*rings, budget=self.budget)
        v = proved({"rule": "product-spectrum"}) if rep.ok else \
            (rep.embedded if not rep.embedded.proved else unknown(reason="open mismatch"))
        labels = [f"({x}; {i})" for i, x, _ in rep.points]
        text = f"{v} ({len(rep.points)} points, {rep.opens_checked} opens checked" + \
            (", discrete" if rep.discrete else "") + ")"
        return Result(v, text, {"points": labels, "mismatches": rep.mismatches})

    def do_spectral_map(self, cmd: Command) -> Result:
        h = self.lookup(cmd, "hom", "hom")
        u = self.lookup(cmd, "open", "open")
        if u.presentation != h.source:
            raise ScriptError("open is not over the source of the map", cmd.line, cmd.column)
        rep = spectrum.spectral_map(h, u, budget=self.budget)
        if cmd.positional:
            self.bind(self.name(cmd), "open", rep.preimage)
        return Result(rep.verdict, f"{rep.verdict} (preimage {rep.preimage}, {rep.checked} points)")

    def do_constructible_meet(self, cmd: Command) -> Result:
        p = self.lookup(cmd, "ring", "ring")
        left, right = self.terms(cmd, "left", p), self.terms(cmd, "right", p)
        if len(left) != 2 or len(right) != 2:
            raise ScriptError("constructible sets are given as [a; b]", cmd.line, cmd.column)
        c1 = spectrum.ConstructibleBasic(p, *left)
        c2 = spectrum.ConstructibleBasic(p, *right)
        m = spectrum.constructible_meet(c1, c2)
        v = spectrum.constructible_meet_check(c1, c2)
        return Result(v, f"{v} ({m})")

    def do_nilradical(self, cmd: Command) -> Result:
        p = self.lookup(cmd, "ring", "ring")
        rep = spectrum.nilradical_point_test(p, self.term(cmd, "f", p), budget=self.budget)
        note = "consistent" if rep.consistent else "INCONSISTENT"
        return Result(rep.membership, f"{rep.membership} ({rep.points} points, {note})")

    # sheaf

    def do_section(self, cmd: Command) -> Result:
        nm = self.name(cmd)
        u = self.lookup(cmd, "open", "open")
        p = u.presentation
        num = self.term(cmd, "num", p)
        den = self.term(cmd, "den", p, "1")
        try:
            s = sheaf.section(u, num, den, self.budget)
        except sheaf.SectionError as e:
            return Result(e.verdict, f"{e.verdict} (denominator not invertible on {u})")
        self.bind(nm, "section", s)
        return Result(s.certificate, f"{s.certificate} ({nm} := {s})")

    def do_restrict(self, cmd: Command) -> Result:
        nm = self.name(cmd)
        s = self.lookup(cmd, "section", "section")
        u = self.lookup(cmd, "to", "open")
        try:
            r = sheaf.restrict(s, u, self.budget)
        except sheaf.SectionError as e:
            v = e.verdict or unknown(reason=str(e))
            return Result(v, f"{v} ({e})")
        self.bind(nm, "section", r.section)
        return Result(r.leq, f"{r.leq} ({nm} := {r.section}; {r.samples} points agree)")

    def do_germ(self, cmd: Command) -> Result:
        s = self.lookup(cmd, "section", "section")
        x = self.point(cmd, s.open.presentation)
        try:
            g = sheaf.germ_eval(s, x)
        except sheaf.SectionError as e:
            raise ScriptError(str(e), cmd.line, self.arg(cmd, "point").column) from None
        return Result(g.invertible, f"{g.value} (germ invertible: {g.invertible.kind})",
                      {"value": str(g.value)})

    # order

    def do_precedes(self, cmd: Command) -> Result:
        p = self.lookup(cmd, "ring", "ring")
        v = order.precedes(self.term(cmd, "f", p), self.term(cmd, "g", p), p, self.budget)
        return Result(v, str(v))

    def do_ordering(self, cmd: Command) -> Result:
        p = self.lookup(cmd, "ring", "ring")
        v = order.ordering_member(order.PointOrdering(self.point(cmd, p)), self.term(cmd, "f", p))
        return Result(v, str(v))

    def do_harrison(self, cmd: Command) -> Result:
        p = self.lookup(cmd, "ring", "ring")
        v = order.harrison_member(order.PointOrdering(self.point(cmd, p)), self.term(cmd, "a", p))
        return Result(v, str(v))

    def do_supp(self, cmd: Command) -> Result:
        p = self.lookup(cmd, "ring", "ring")
        x = order.supp_of(order.PointOrdering(self.point(cmd, p)))
        v = proved({"rule": "point-in-zero-set"})
        return Result(v, f"{v} (supp = m_{x})")

    def run(self, cmd: Command) -> Result:
        handler = self.handlers.get(cmd.name)
        if handler is None:
            raise ScriptError(f"unknown command {cmd.name!r}", cmd.line, cmd.column)
        try:
            return handler(cmd)
        except cring.PresentationError as e:
            raise ScriptError(str(e), cmd.line, cmd.column) from None


# -- driver -----------------------------------------------------------------------

@dataclass
class RunOptions:
    fmt: str = "text"
    strict: bool = False
    certificates: bool = False
    timing: bool = True


def run_script(text: str, out: TextIO, err: TextIO, session: Session | None = None,
               options: RunOptions | None = None) -> int:
    session = session or Session()
    options = options or RunOptions()
    failed_expect = False
    saw_unknown = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        try:
            cmd = tokenize(raw, lineno)
            if cmd is None:
                continue
            start = time.perf_counter()
            with cring.recording() as log:
                res = session.run(cmd)
            elapsed = time.perf_counter() - start
        except ScriptError as e:
            err.write(f"error: {e}\n")
            return EXIT_USAGE
        expect_ok = None
        if res.verdict is not None and res.verdict.unknown:
            saw_unknown = True
        if cmd.expect is not None:
            expect_ok = res.verdict is not None and res.verdict.kind is cmd.expect
            failed_expect = failed_expect or not expect_ok
        certs = [query_json(e) for e in log]
        if options.fmt == "structured":
            rec: dict[str, Any] = {"line": lineno, "command": cmd.name}
            rec["verdict"] = res.verdict.kind.value if res.verdict is not None else None
            if res.verdict is not None and res.verdict.witness is not None:
                rec["witness"] = res.verdict.witness.to_json()
            rec["text"] = res.text
            if res.data:
                rec["data"] = res.data
            if cmd.expect is not None:
                rec["expect"] = cmd.expect.value
                rec["expect_ok"] = expect_ok
            if options.certificates:
                rec["trace"] = certs
            if options.timing:
                rec["timing"] = round(elapsed, 6)
            out.write(json.dumps(rec, sort_keys=True, default=str) + "\n")
        else:
            line = res.text
            if cmd.expect is not None and not expect_ok:
                line += f"  [expected {cmd.expect.value}]"
            out.write(line + "\n")
            if options.certificates:
                for c in certs:
                    out.write("  certificate: " + json.dumps(c, sort_keys=True, default=str) + "\n")
    if failed_expect:
        return EXIT_EXPECT
    if options.strict and saw_unknown:
        return EXIT_UNKNOWN
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _budget_args(ns) -> QueryBudget:
    kwargs = {}
    if ns.depth is not None:
        kwargs["max_depth"] = ns.depth
    if ns.min_width is not None:
        kwargs["min_width"] = Fraction(ns.min_width)
    kwargs["workers"] = ns.workers
    return QueryBudget(**kwargs)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="cinfty", description="Certified queries on finitely presented C-infinity rings.")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    run = sub.add_parser("run", help="execute a session script")
    run.add_argument("script", help="script path, or - for stdin")
    run.add_argument("--box", help="default box, lo,hi[;lo,hi...]")
    run.add_argument("--depth", type=int, help="maximum subdivision depth")
    run.add_argument("--min-width", help="smallest box side to split (rational)")
    run.add_argument("--workers", type=int, default=1, help="threads per query")
    run.add_argument("--format", choices=("text", "structured"), default="text")
    run.add_argument("--strict", action="store_true", help="exit 2 if any verdict is UNKNOWN")
    run.add_argument("--certificates", action="store_true", help="emit query certificates")
    run.add_argument("--no-timing", action="store_true", help="omit timings from structured output")
    chk = sub.add_parser("check", help="re-validate certificates in structured output")
    chk.add_argument("file", help="structured output produced with --certificates, or -")
    return ap


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    if ns.cmd == "check":
        from cinfty.certcheck import check_stream
        text = sys.stdin.read() if ns.file == "-" else open(ns.file).read()
        return check_stream(text, sys.stdout)
    try:
        budget = _budget_args(ns)
    except (ValueError, ZeroDivisionError) as e:
        sys.stderr.write(f"cinfty: error: {e}\n")
        return EXIT_USAGE
    if ns.box:
        try:
            parse_box(ns.box, len(split_list(ns.box)), 0, 0)
        except ScriptError as e:
            sys.stderr.write(f"cinfty: error: bad --box: {e}\n")
            return EXIT_USAGE
    try:
        text = sys.stdin.read() if ns.script == "-" else open(ns.script).read()
    except OSError as e:
        sys.stderr.write(f"cinfty: error: {e}\n")
        return EXIT_USAGE
    opts = RunOptions(ns.format, ns.strict, ns.certificates, not ns.no_timing)
    return run_script(text, sys.stdout, sys.stderr, Session(budget, ns.box), opts)


if __name__ == "__main__":
    sys.exit(main())
