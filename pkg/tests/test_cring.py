from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from cinfty.cring import (Hom, NotIdempotent, Presentation, PresentationError, adjoin_variables,
                          check_fraction_axioms, coproduct, coproduct_localize_commute, hom_apply,
                          hom_compose, invert_idempotent, is_invertible, lift_from_cring, localize,
                          localize_chain, quotient, quotient_localize_commute, same_presentation)
from cinfty.interval import Box
from cinfty.points import sample_points
from cinfty.terms import ONE, Term, bump, var
from cinfty.zerocert import is_empty_zero_set

from conftest import poly_from_roots, roots, term_trees

x0, x1 = var(0), var(1)
R = Presentation.free(1)


def _zeros(p: Presentation) -> list:
    return sorted(pt.point for pt in sample_points(p, 8) if pt.exact)


# presentations

def test_relations_normalized():
    p = Presentation(1, (x0 * 2, Term.const(0), 2 * x0, x0 ** 2 - 1))
    assert len(p.relations) == 2
    assert Presentation(1, (x0, Term.const(3))).relations == (ONE,)


def test_relation_arity_checked():
    with pytest.raises(PresentationError):
        Presentation(1, (x1,))


# quotient

def test_quotient_by_x():
    q, h = quotient(R, [x0])
    assert q.relations == (x0,)
    assert _zeros(q) == [(0,)]
    assert h.images == (x0,)


def test_quotient_idempotent():
    q1, _ = quotient(R, [x0])
    q2, _ = quotient(q1, [x0])
    assert q1 == q2


def test_quotient_by_positive_is_empty():
    p = Presentation(1, (), Box.of((-10, 10)))
    q, _ = quotient(p, [x0 ** 2 + 1])
    assert is_empty_zero_set(q.relations[0], q.box).proved
    assert q.is_trivial().proved


def test_quotient_arity_mismatch():
    with pytest.raises(Exception):
        quotient(R, [x1])


# adjoin / coproduct

def test_adjoin_one_is_free_plane():
    q, iota = adjoin_variables(R, 1)
    assert same_presentation(q, Presentation.free(2))
    assert iota.apply_term(x0) == x0


def test_adjoin_zero_is_identity():
    q, _ = adjoin_variables(R, 0)
    assert q == R


def test_adjoin_composes():
    a, _ = adjoin_variables(R, 2)
    b, _ = adjoin_variables(a, 1)
    c, _ = adjoin_variables(R, 3)
    assert same_presentation(b, c)


def test_coproduct_examples():
    q, _, _ = coproduct(R, R)
    assert same_presentation(q, Presentation.free(2))
    a, _ = quotient(R, [x0])
    b, _ = quotient(R, [x0 - 1])
    ab, i1, i2 = coproduct(a, b)
    assert set(ab.relations) == {x0, x1 - 1}
    assert _zeros(ab) == [(0, 1)]
    assert i2.apply_term(x0) == x1
    assert ab.names == ("x0", "x0'")


def test_coproduct_with_initial():
    init = Presentation(0)
    a, _ = quotient(R, [x0 ** 2 - 1])
    c, _, _ = coproduct(a, init)
    assert same_presentation(c, a)


# localization

def test_localize_free_at_x():
    loc = localize(R, x0)
    p = loc.presentation
    assert p.arity == 2
    assert set(p.relations) == {x1 * x0 - 1}
    assert loc.eta.apply_term(x0) == x0


def test_localize_at_one_is_iso():
    loc = localize(R, ONE)
    assert loc.presentation.relations == (x1 - 1,)
    assert not loc.presentation.is_trivial().decided or loc.presentation.is_trivial().refuted


def test_localize_at_zero_of_quotient_is_trivial():
    q, _ = quotient(R, [x0])
    assert localize(q, x0).presentation.is_trivial().proved


@pytest.mark.parametrize("b,c", [(x0, x0 - 1), (x0, x0), (ONE, x0 ** 2 - Fraction(1, 4))])
def test_localize_chain(b, c):
    rep = localize_chain(R, b, c)
    assert rep.ok
    assert rep.samples >= 20
    assert rep.max_error <= 1e-9


def test_quotient_localize_commute_examples():
    rep = quotient_localize_commute(R, [x0 * (x0 - 1)], x0)
    assert rep.ok
    assert set(rep.left.relations) == {x0 * (x0 - 1), x1 * x0 - 1}
    assert quotient_localize_commute(R, [], x0 ** 2 + 1).ok


def test_quotient_localize_point_value():
    rep = quotient_localize_commute(R, [x0], x0 - 1)
    assert rep.ok
    for p in (rep.left, rep.right):
        pts = _zeros(p)
        assert pts == [(0, -1)]
        # (x0-1)^-1 evaluated there
        assert pts[0][1] * (pts[0][0] - 1) == 1


@pytest.mark.parametrize("s1,s2,rels", [
    ([], [], ([], [])),
    ([x0], [x0 + 1], ([], [])),
    ([x0 - 1], [x0], ([x0 * (x0 - 1) * (x0 + 1)], [x0 ** 2 - Fraction(1, 4)])),
])
def test_coproduct_localize_commute(s1, s2, rels):
    p1 = Presentation(1, tuple(rels[0]))
    p2 = Presentation(1, tuple(rels[1]))
    rep = coproduct_localize_commute(p1, s1, p2, s2)
    assert rep.structurally_equal
    assert rep.ok
    assert rep.max_error <= 1e-9


@st.composite
def commute_cases(draw):
    rs = draw(st.lists(roots, max_size=2))
    extra = [poly_from_roots(rs)] if rs else []
    a = poly_from_roots(draw(st.lists(roots, max_size=2)), draw(st.sampled_from([1, -1, 2])))
    return extra, a


@given(commute_cases())
def test_quotient_localize_structural(case):
    extra, a = case
    assert quotient_localize_commute(R, extra, a).structurally_equal


# invertibility

def test_invertibility_examples():
    for p in (R, quotient(R, [x0 ** 2 - 1])[0], Presentation.free(2)):
        assert is_invertible(p.element(1 + x0 ** 2)).proved
    q, _ = quotient(R, [x0 - 1])
    assert is_invertible(q.element(x0)).proved
    small = Presentation(1, (), Box.of((-1, 1)))
    v = is_invertible(small.element(x0))
    assert v.refuted and v.witness.box[0].contains(0)


# idempotents

def test_invert_idempotent_nontrivial():
    p = Presentation(1, (x0 ** 2 - x0,))
    rep = invert_idempotent(p, x0)
    assert rep.idempotent.proved and rep.zero_sets.proved
    assert _zeros(rep.quotient) == [(1,)]
    assert {pt[0] for pt in _zeros(rep.localized.presentation)} == {1}


def test_invert_idempotent_units_and_zero():
    p = Presentation(1, (x0 ** 2 - x0,))
    one = invert_idempotent(p, ONE)
    assert one.quotient == p and one.zero_sets.proved
    zero = invert_idempotent(p, Term.const(0))
    assert zero.quotient.is_trivial().proved
    assert zero.localized.presentation.is_trivial().proved


def test_invert_idempotent_rejects():
    with pytest.raises(NotIdempotent) as err:
        invert_idempotent(R, x0)
    assert err.value.verdict.refuted


# fraction axioms

def test_fraction_axioms_examples():
    loc = localize(R, x0)
    y = var(1)
    inv, plain, killed = check_fraction_axioms(loc, [y, x0 ** 2 + 3, x0 * (1 - y * x0)])
    assert inv.denominator == x0 and inv.numerator == ONE
    assert inv.clears.proved and inv.in_saturation.proved
    assert plain.denominator == ONE and plain.numerator == x0 ** 2 + 3
    assert killed.annihilator == x0 and killed.annihilates.proved


# lifting from commutative rings

def test_lift_from_cring_examples():
    p = lift_from_cring(1, ["x0^2 - 2"])
    xs = sympy.real_roots(sympy.Poly(sympy.Symbol("x") ** 2 - 2))
    pts = sorted(sample_points(p, 8), key=lambda q: q.floats()[0])
    assert len(pts) == len(xs) == 2
    for pt, r in zip(pts, sorted(xs)):
        assert abs(pt.floats()[0] - float(r)) < 1e-4
    assert lift_from_cring(1, []) == R
    assert _zeros(lift_from_cring(1, ["2*x0 - 1"])) == [(Fraction(1, 2),)]


# homomorphisms

def test_identity_and_substitution():
    e = R.element(x0 ** 3 - bump(x0))
    assert hom_apply(Hom.identity(R), e).term == e.term
    sq = Hom(R, R, (x0 ** 2,))
    assert hom_apply(sq, R.element(x0 - 1)).term == x0 ** 2 - 1


@given(term_trees(arity=2), term_trees(arity=2), term_trees(arity=2), term_trees(arity=2),
       term_trees(arity=2))
def test_composition_is_substitution(t, a, b, c, d):
    p = Presentation.free(2)
    h = Hom(p, p, (a, b))
    g = Hom(p, p, (c, d))
    assert hom_compose(g, h).apply_term(t) == g.apply_term(h.apply_term(t))


def test_well_definedness():
    a, _ = quotient(R, [x0 ** 2 - 1])
    b, _ = quotient(R, [x0 - 1])
    assert Hom(a, b, (x0,)).well_defined().proved
    assert Hom(b, a, (x0,)).well_defined().refuted
    c, _ = quotient(R, [x0 ** 2 - 1])
    g = Hom(b, c, (x0 ** 2,))
    h = Hom(a, b, (x0,))
    assert g.well_defined().proved
    assert hom_compose(g, h).well_defined().proved


# properties

@st.composite
def quotient_and_pair(draw):
    rs = draw(st.lists(roots, min_size=1, max_size=3))
    p = Presentation(1, (poly_from_roots(rs),), Box.of((-8, 8)))
    f = poly_from_roots(draw(st.lists(st.sampled_from(rs), max_size=2)))
    k = draw(st.integers(1, 2))
    g = f + poly_from_roots(rs) ** k * draw(st.sampled_from([1, x0, x0 ** 2 + 1]))
    a = poly_from_roots(draw(st.lists(roots, max_size=2)), draw(st.sampled_from([1, 3])))
    return p, f, g, a


@given(quotient_and_pair())
def test_localization_epimorphism_shadow(case):
    p, f, g, a = case
    assert p.radical_zero(f - g).proved
    loc = localize(p, a)
    v = loc.presentation.radical_zero(loc.eta.apply_term(f) - loc.eta.apply_term(g))
    assert not v.refuted


@given(quotient_and_pair())
def test_trivial_iff_radical_zero(case):
    p, _, _, a = case
    trivial = localize(p, a).presentation.is_trivial()
    zero = p.radical_zero(a)
    if trivial.decided and zero.decided:
        assert trivial.proved == zero.proved
