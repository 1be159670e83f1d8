from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, strategies as st

from cinfty.interval import Box, Interval, eval_interval, evaluate, to_float
from cinfty.parsing import TermSyntaxError, parse_term
from cinfty.terms import (Term, as_polynomial, as_univariate, bump, cos, differentiate, exp,
                          format_term, sin, var)

from conftest import small_rationals, term_trees

x0, x1 = var(0), var(1)


def _sympy_value(t: Term, point):
    """Independent evaluation: print, parse with sympy, evaluate with mpmath at 50 digits."""
    syms = sympy.symbols(f"x0:{max(len(point), 1)}")
    text = format_term(t).replace("^", "**")
    bump_fn = sympy.Function("bump")
    expr = sympy.sympify(text, locals={"bump": bump_fn, **{f"x{i}": s for i, s in enumerate(syms)}})
    expr = expr.subs({s: sympy.Rational(v.numerator, v.denominator) for s, v in zip(syms, point)})

    def bump_eval(u):
        u = sympy.nsimplify(u) if u.is_number else u
        return sympy.exp(-1 / (1 - u ** 2)) if abs(u) < 1 else sympy.Integer(0)

    expr = expr.replace(bump_fn, lambda u: bump_eval(sympy.N(u, 60)))
    return mpmath.mpf(str(sympy.N(expr, 50)))


# parse_term

def test_parse_polynomial():
    t = parse_term("x0^2 - 1", 1)
    assert t == x0 ** 2 - 1
    assert as_univariate(t) == [-1, 0, 1]


def test_parse_primitive():
    assert parse_term("bump(x0)", 1) == bump(x0)
    assert parse_term("exp(sin(x0)) * cos(x1)", 2) == exp(sin(x0)) * cos(x1)


def test_parse_unknown_variable():
    with pytest.raises(TermSyntaxError) as err:
        parse_term("y0 * x0 - 1", 1)
    assert "y0" in str(err.value)
    assert err.value.offset == 0


def test_parse_arity_overflow():
    with pytest.raises(TermSyntaxError) as err:
        parse_term("x0 + x3", 2)
    assert err.value.offset == 5


@pytest.mark.parametrize("text", ["x0 +", "(x0", "x0 / 2", "1/0", "exp x0", "x0 ^ -1", "x0 x0"])
def test_parse_errors_have_positions(text):
    with pytest.raises(TermSyntaxError) as err:
        parse_term(text, 1)
    assert 0 <= err.value.offset <= len(text)


def test_parse_rationals_and_unary_minus():
    assert parse_term("-3/4 * x0", 1) == Fraction(-3, 4) * x0
    assert parse_term("--x0", 1) == x0
    assert parse_term("-x0^2", 1) == -(x0 ** 2)


def test_bump_derivative_names_round_trip():
    t = differentiate(differentiate(bump(x0), 0), 0)
    assert parse_term(format_term(t), 1) == t
    assert "bump_d2" in format_term(t)


@given(term_trees(arity=2))
def test_print_parse_round_trip(t):
    assert parse_term(format_term(t), 2) == t


@given(term_trees(arity=2))
def test_normalization_idempotent(t):
    again = parse_term(str(parse_term(str(t), 2)), 2)
    assert again == t and again.key == t.key


@given(st.lists(small_rationals, min_size=1, max_size=4))
def test_normalization_confluence(rs):
    # product of linear factors versus its sympy expansion, spelled differently
    prod = Term.const(1)
    for r in rs:
        prod = prod * (x0 - r)
    s = sympy.Symbol("x0")
    expanded = sympy.Poly(sympy.prod([s - sympy.Rational(r.numerator, r.denominator) for r in rs]), s)
    text = " + ".join(f"({c})*x0^{k}" for (k,), c in expanded.terms())
    assert as_polynomial(parse_term(text, 1)) == as_polynomial(prod)
    assert parse_term(text, 1) == prod


# evaluation

def test_eval_polynomial_exact():
    assert evaluate(x0 ** 2 - 1, [1]) == 0
    assert evaluate(x0 * x1 + Fraction(1, 3), [2, Fraction(1, 2)]) == Fraction(4, 3)


def _encloses(v: Interval, truth) -> bool:
    return (mpmath.mpf(v.lo.numerator) / v.lo.denominator <= truth
            <= mpmath.mpf(v.hi.numerator) / v.hi.denominator)


def test_eval_bump_at_zero_encloses_inverse_e():
    v = evaluate(bump(x0), [0])
    assert isinstance(v, Interval)
    with mpmath.workdps(50):
        assert _encloses(v, 1 / mpmath.e)
    assert v.width < Fraction(1, 10 ** 30)


def test_eval_bump_at_half_is_exp_minus_four_thirds():
    v = evaluate(bump(x0), [Fraction(1, 2)])
    with mpmath.workdps(50):
        assert _encloses(v, mpmath.exp(mpmath.mpf(-4) / 3))
    assert v.width < Fraction(1, 10 ** 30)


def test_bump_vanishes_outside_unit_interval():
    assert evaluate(bump(x0), [1]) == 0
    assert evaluate(bump(x0), [Fraction(-5, 3)]) == 0
    assert eval_interval(bump(x0), Box.of((1, 2))).is_zero()


def test_eval_interval_examples():
    assert eval_interval(1 + x0 ** 2, Box.of((-3, 3))).lo >= 1
    assert eval_interval(x0, Box.of((2, 5))) == Interval.of(2, 5)
    enc = eval_interval(x0 * (x0 - 1), Box.of((0, 1)))
    # exact range is [-1/4, 0]; dense sampling oracle
    samples = [float(k / 1000 * (k / 1000 - 1)) for k in range(1001)]
    assert enc.lo <= min(samples) and max(samples) <= enc.hi
    assert enc.lo <= Fraction(-1, 4) and enc.hi >= 0


@st.composite
def term_box_point(draw):
    t = draw(term_trees(arity=2))
    sides = []
    for _ in range(2):
        lo = draw(small_rationals)
        w = draw(st.sampled_from([Fraction(0), Fraction(1, 8), Fraction(1, 2), Fraction(2)]))
        sides.append((lo, lo + w))
    fr = [draw(st.fractions(0, 1, max_denominator=16)) for _ in range(2)]
    point = [lo + f * (hi - lo) for (lo, hi), f in zip(sides, fr)]
    return t, Box.of(*sides), point


@given(term_box_point())
def test_enclosure_soundness(case):
    t, box, point = case
    enc = eval_interval(t, box)
    at = evaluate(t, point)
    if isinstance(at, Interval):
        assert enc.lo <= at.hi and at.lo <= enc.hi
    else:
        assert enc.contains(at)


@given(term_box_point())
def test_point_enclosure_matches_independent_oracle(case):
    t, _, point = case
    at = evaluate(t, point)
    with mpmath.workdps(50):
        truth = _sympy_value(t, point)
        lo = at.lo if isinstance(at, Interval) else at
        hi = at.hi if isinstance(at, Interval) else at
        if isinstance(lo, float) or isinstance(hi, float):
            return  # an infinite bound is vacuously sound
        slack = mpmath.mpf(10) ** -25 * (1 + abs(truth))
        assert mpmath.mpf(lo.numerator) / lo.denominator - slack <= truth
        assert truth <= mpmath.mpf(hi.numerator) / hi.denominator + slack


# differentiation

def test_derivative_examples():
    assert differentiate(x0 ** 2 - 1, 0) == 2 * x0
    assert differentiate(exp(x0), 0) == exp(x0)
    assert differentiate(sin(x0), 0) == cos(x0)
    assert differentiate(cos(x0), 0) == -sin(x0)
    d = evaluate(differentiate(bump(x0), 0), [0])
    assert d == 0 or (isinstance(d, Interval) and d.contains(0) and d.width < Fraction(1, 10 ** 20))


def _central_difference(t, point, i, h=1e-6):
    def f(v):
        q = list(point)
        q[i] = Fraction(v)
        return to_float(evaluate(t, q))
    c = float(point[i])
    return (f(c + h) - f(c - h)) / (2 * h)


@given(term_trees(arity=2, primitives=False), st.lists(small_rationals, min_size=2, max_size=2),
       st.integers(0, 1))
def test_polynomial_derivative_matches_finite_difference(t, point, i):
    exact = to_float(evaluate(differentiate(t, i), point))
    approx = _central_difference(t, point, i)
    assert abs(exact - approx) <= 1e-4 * (1 + abs(exact))


@given(st.fractions(Fraction(-9, 10), Fraction(9, 10), max_denominator=20), st.integers(0, 3))
def test_bump_derivatives_match_finite_difference(c, k):
    t = bump(x0)
    for _ in range(k):
        t = differentiate(t, 0)
    exact = to_float(evaluate(differentiate(t, 0), [c]))
    approx = _central_difference(t, [c], 0, h=1e-5)
    assert abs(exact - approx) <= 1e-4 * (1 + abs(exact))


def test_bump_derivative_zero_outside():
    d = differentiate(bump(x0), 0)
    assert evaluate(d, [Fraction(3, 2)]) == 0
    assert eval_interval(d, Box.of((1, 2))).is_zero()


# polynomial extraction

def test_as_polynomial_examples():
    assert as_univariate(x0 ** 2 - 1) == [-1, 0, 1]
    assert as_polynomial(bump(x0)) is None
    assert as_univariate((x0 - 1) * (x0 + 1)) == [-1, 0, 1]


@given(term_trees(arity=2, primitives=False), st.lists(small_rationals, min_size=2, max_size=2))
def test_as_polynomial_agrees_pointwise(t, point):
    poly = as_polynomial(t, 2)
    assert poly is not None
    value = sum(c * point[0] ** e[0] * point[1] ** e[1] for e, c in poly.items())
    assert value == evaluate(t, point)


@given(term_trees(arity=1))
def test_as_polynomial_iff_primitive_free(t):
    assert (as_polynomial(t) is not None) == (not t.has_primitives())
