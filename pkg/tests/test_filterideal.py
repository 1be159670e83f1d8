from fractions import Fraction

from hypothesis import given, strategies as st

from cinfty.cring import Presentation
from cinfty.filterideal import (ClosedSetFilter, check, closure_equals_radical,
                                galois_adjunction_test, hat)
from cinfty.interval import Box
from cinfty.radical import radical_member
from cinfty.terms import Term, var

from conftest import poly_from_roots, roots

x0 = var(0)
BOX = Box.of((-8, 8))


def _p(*rels) -> Presentation:
    return Presentation(1, tuple(rels), BOX)


def _f(*gens) -> ClosedSetFilter:
    return ClosedSetFilter(1, BOX, tuple(gens))


def test_hat_examples():
    f = hat(_p(x0 * (x0 - 1)))
    assert f.contains_set(x0 * (x0 - 1) * (x0 + 3)).proved
    assert f.contains_set(x0).refuted
    assert f.proper().proved
    whole = hat(_p())
    assert whole.generators == ()
    assert whole.contains_set(Term.const(0)).proved
    assert whole.contains_set(x0).refuted
    assert hat(_p(x0 ** 2 + 1)).proper().refuted


def test_check_examples():
    f = hat(_p(x0 * (x0 - 1)))
    assert check(f, x0 ** 2 * (x0 - 1)).proved
    v = check(f, x0)
    assert v.refuted and v.witness.box[0].contains(1)
    for g in (f, _f(), _f(x0 - 3)):
        assert check(g, Term.const(0)).proved


def test_adjunction_examples():
    a = galois_adjunction_test(_p(x0), hat(_p(x0)))
    assert a.left.proved and a.right.proved
    b = galois_adjunction_test(_p(x0), _f(x0 - 1))
    assert b.left.refuted and b.right.refuted
    c = galois_adjunction_test(_p(x0 * (x0 - 1)), _f(x0))
    assert c.left.proved and c.right.proved


def test_closure_equals_radical_examples():
    p = _p(x0 ** 2 * (x0 - 1) ** 2)
    rep = closure_equals_radical(p, [x0 * (x0 - 1), x0, Term.const(0)])
    assert rep.agree
    assert [v.kind.value for _, v, _ in rep.rows] == ["PROVED", "REFUTED", "PROVED"]


def test_point_filter_is_principal():
    f = hat(_p(x0 - Fraction(3, 2)))
    assert f.contains_set((x0 - Fraction(3, 2)) * (x0 + 5)).proved
    assert f.contains_set(x0 + 5).refuted


@st.composite
def pairs(draw):
    i = poly_from_roots(draw(st.lists(roots, min_size=1, max_size=3)))
    gens = [poly_from_roots(draw(st.lists(roots, min_size=1, max_size=2)))
            for _ in range(draw(st.integers(1, 2)))]
    return _p(i), _f(*gens)


@given(pairs())
def test_adjunction_law(pair):
    p, f = pair
    rep = galois_adjunction_test(p, f)
    assert rep.left.decided and rep.right.decided
    assert rep.agree


@given(pairs())
def test_unit_and_counit(pair):
    p, f = pair
    for g in p.relations:
        assert check(hat(p), g).proved
    # counit: the filter of a sampled member of the ideal of F lies inside F
    for t in list(f.generators) + [f.minimum * (x0 - 7), x0]:
        if check(f, t).proved:
            assert galois_adjunction_test(_p(t), f).left.proved


@given(pairs(), st.lists(roots, max_size=3))
def test_filter_axioms(pair, more):
    _, f = pair
    assert f.contains_set(f.minimum).proved
    c = poly_from_roots(more) * f.generators[0]
    # Z(c) contains the minimum, so adding it keeps the filter
    g = f.with_generator(c)
    for t in (f.minimum, x0, x0 - 1, c):
        a, b = f.contains_set(t), g.contains_set(t)
        if a.decided and b.decided:
            assert a.kind == b.kind


@given(pairs(), st.lists(roots, max_size=3))
def test_closure_mirrors_radical(pair, rs):
    p, _ = pair
    samples = [poly_from_roots(rs), x0, p.relations[0] * (x0 + 1)]
    rep = closure_equals_radical(p, samples)
    assert rep.agreement_rate() == 1.0
    for t, a, b in rep.rows:
        assert a.kind == radical_member(p, t).kind == b.kind
