from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from cinfty.cring import Hom, Presentation, quotient
from cinfty.interval import Box
from cinfty.points import SpectrumPoint, export_points, sample_points
from cinfty.spectrum import (BasicOpen, ConstructibleBasic, basic_equal, basic_join, basic_leq,
                             basic_meet, constructible_meet, constructible_meet_check, covers,
                             nilradical_point_test, point_in_open, product_spectrum,
                             separating_open, spectral_map)
from cinfty.terms import ONE, ZERO, bump, var
from cinfty.zerocert import zero_equal

from conftest import poly_from_roots, roots

x0 = var(0)
R = Presentation.free(1)
BOX = Box.of((-8, 8))
RB = Presentation(1, (), BOX)


def D(a, p=R) -> BasicOpen:
    return BasicOpen(p, a)


# order on basic opens

def test_leq_examples():
    assert basic_leq(D(x0 ** 2), D(x0)).proved and basic_leq(D(x0), D(x0 ** 2)).proved
    assert basic_leq(D(x0 * (x0 - 1)), D(x0)).proved
    assert basic_leq(D(x0), D(x0 * (x0 - 1))).refuted
    assert basic_leq(D(bump(x0)), D(bump(x0))).proved


def test_meet_join_examples():
    assert basic_meet(D(x0), D(x0 - 1)).term == x0 * (x0 - 1)
    j = basic_join(D(x0), D(x0 - 1))
    assert j.term == x0 ** 2 + (x0 - 1) ** 2
    assert R.positive(j.term).proved
    assert basic_equal(basic_meet(D(bump(x0)), D(ONE)), D(bump(x0))).proved


# covers

def test_cover_examples():
    c = covers(R, [x0, x0 - 1])
    assert c.proved and c.subcover == (0, 1)
    lam, mu = c.combination
    assert lam * x0 + mu * (x0 - 1) == ONE
    v = covers(R, [x0]).verdict
    assert v.refuted and v.witness.box[0].contains(0)
    m0, _ = quotient(R, [x0])
    assert covers(m0, [x0 - 1]).proved


def test_cover_prunes():
    c = covers(R, [x0, x0 - 1, x0 + 1, 1 + x0 ** 2])
    assert c.proved and c.subcover == (3,)


def test_cover_rejects_empty_list():
    with pytest.raises(ValueError):
        covers(R, [])


# points

def test_sample_points_examples():
    pts = sample_points(Presentation(1, (x0 * (x0 - 1),)), 8)
    assert sorted(p.point for p in pts) == [(0,), (1,)]
    assert sample_points(Presentation(1, (x0 ** 2 + 1,)), 8) == []
    grid = sample_points(Presentation(1, (), Box.of((0, 1))), 5)
    assert [p.point[0] for p in grid] == [Fraction(k, 5) for k in range(6)]


def test_export_points():
    pts = sample_points(Presentation(1, (x0 * (2 * x0 - 1),)), 8)
    assert export_points(pts).splitlines() == ["0", "1/2"]


def test_point_in_open_examples():
    assert point_in_open(SpectrumPoint.at([0]), D(x0)).refuted
    assert point_in_open(SpectrumPoint.at([1]), D(x0)).proved
    assert point_in_open(SpectrumPoint.at([Fraction(1, 2)]), D(bump(x0))).proved


def test_t0_shadow():
    pts = sample_points(Presentation(1, (), Box.of((-1, 1))), 6)
    for x, y in combinations(pts, 2):
        u = separating_open(R, x, y)
        assert u is not None
        assert point_in_open(y, u).proved and point_in_open(x, u).refuted


# products

def test_two_factor_product():
    a, _ = quotient(R, [x0])
    b, _ = quotient(R, [x0 - 1])
    rep = product_spectrum(a, b)
    assert rep.ok and rep.opens_checked == 10
    assert [(i, x.point) for i, x, _ in rep.points] == [(0, (0,)), (1, (1,))]
    u = BasicOpen(rep.product.presentation, rep.product.element([ONE, ZERO]))
    assert [point_in_open(y, u).proved for _, _, y in rep.points] == [True, False]
    w = BasicOpen(rep.product.presentation, rep.product.element([ONE, ONE]))
    assert all(point_in_open(y, w).proved for _, _, y in rep.points)


def test_three_fold_power_is_discrete():
    pt = Presentation(0)
    rep = product_spectrum(pt, pt, pt)
    assert rep.ok and rep.discrete
    assert len(rep.points) == 3


# spectral maps

def test_spectral_map_examples():
    sq = Hom(R, R, (x0 ** 2,))
    rep = spectral_map(sq, D(x0))
    assert rep.preimage.term == x0 ** 2 and rep.verdict.proved
    y = SpectrumPoint.at([2])
    assert point_in_open(y, rep.preimage).proved
    ident = spectral_map(Hom.identity(R), D(x0 - 1))
    assert ident.preimage == D(x0 - 1) and ident.verdict.proved
    m0, _ = quotient(R, [x0])
    ev = Hom(R, m0, (x0,))
    rep = spectral_map(ev, D(x0 - 1))
    assert rep.verdict.proved
    assert covers(m0, [rep.preimage.term]).proved


@given(st.lists(roots, max_size=2), st.lists(roots, max_size=2))
def test_preimage_of_meet(ra, rb):
    h = Hom(RB, RB, (x0 ** 2 - 1,))
    a, b = poly_from_roots(ra), poly_from_roots(rb)
    lhs = spectral_map(h, basic_meet(D(a, RB), D(b, RB))).preimage
    rhs = basic_meet(spectral_map(h, D(a, RB)).preimage, spectral_map(h, D(b, RB)).preimage)
    assert lhs.term == rhs.term


# constructible basis

def test_constructible_examples():
    c1 = ConstructibleBasic(R, x0, ZERO)
    c2 = ConstructibleBasic(R, x0 - 1, ZERO)
    m = constructible_meet(c1, c2)
    assert (m.a, m.b) == (x0 * (x0 - 1), ZERO)
    assert constructible_meet_check(c1, c2).proved
    assert constructible_meet_check(c1, c1).proved
    assert constructible_meet_check(ConstructibleBasic(R, x0, x0 - 1),
                                    ConstructibleBasic(R, ONE, x0 + 1)).proved


# nilradical

def test_nilradical_examples():
    p = Presentation(1, (x0 ** 2 * (x0 - 1) ** 2,))
    a = nilradical_point_test(p, x0 * (x0 - 1))
    assert a.membership.proved and a.consistent and not a.nonvanishing
    b = nilradical_point_test(p, x0)
    assert b.membership.refuted and b.consistent and b.nonvanishing
    c = nilradical_point_test(p, ZERO)
    assert c.membership.proved and c.consistent


# lattice laws on zero sets

@st.composite
def triples(draw):
    return tuple(poly_from_roots(draw(st.lists(roots, max_size=2)), draw(st.sampled_from([1, -2])))
                 for _ in range(3))


def _eq(u: BasicOpen, v: BasicOpen) -> bool:
    return zero_equal(u.term, v.term, BOX).proved


@given(triples())
def test_lattice_laws(abc):
    a, b, c = (D(t, RB) for t in abc)
    m, j = basic_meet, basic_join
    assert _eq(m(a, b), m(b, a)) and _eq(j(a, b), j(b, a))
    assert _eq(m(a, m(b, c)), m(m(a, b), c)) and _eq(j(a, j(b, c)), j(j(a, b), c))
    assert _eq(m(a, j(a, b)), a) and _eq(j(a, m(a, b)), a)
    assert _eq(m(a, a), a) and _eq(j(a, a), a)
    assert _eq(m(a, j(b, c)), j(m(a, b), m(a, c)))


@given(triples())
def test_compactness_shadow(abc):
    c = covers(RB, list(abc))
    if c.proved:
        sub = [abc[i] for i in c.subcover]
        assert len(sub) <= 2
        joined = sub[0] if len(sub) == 1 else basic_join(D(sub[0], RB), D(sub[1], RB)).term
        assert covers(RB, [joined]).proved
