import os
from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

from cinfty.terms import Term, bump, cos, exp, sin

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.register_profile("ci", deadline=None, max_examples=200,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

small_rationals = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))
roots = st.builds(Fraction, st.integers(-7, 7), st.sampled_from([1, 2, 3, 4]))


def poly_from_roots(rs, lead=1):
    x = Term.var(0)
    out = Term.const(lead)
    for r in rs:
        out = out * (x - r)
    return out


@st.composite
def rooted_polys(draw, min_roots=0, max_roots=4):
    rs = draw(st.lists(roots, min_size=min_roots, max_size=max_roots))
    lead = draw(st.sampled_from([1, -1, 2, Fraction(1, 3)]))
    extra = draw(st.sampled_from([None, 1, 2]))
    p = poly_from_roots(rs, lead)
    if extra is not None:
        p = p * (Term.var(0) ** 2 + extra)
    return p, sorted(set(rs))


def term_trees(arity=1, primitives=True):
    leaves = st.one_of(
        small_rationals.map(Term.const),
        st.integers(0, arity - 1).map(Term.var),
    )

    def extend(children):
        ops = [
            st.tuples(children, children).map(lambda p: p[0] + p[1]),
            st.tuples(children, children).map(lambda p: p[0] * p[1]),
            st.tuples(children, children).map(lambda p: p[0] - p[1]),
            st.tuples(children, st.integers(0, 3)).map(lambda p: p[0] ** p[1]),
        ]
        if primitives:
            ops += [children.map(f) for f in (exp, sin, cos, bump)]
        return st.one_of(*ops)

    return st.recursive(leaves, extend, max_leaves=6)


def pytest_terminal_summary(terminalreporter):
    import sys
    lines = getattr(sys.modules.get("test_acceptance"), "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance")
        for line in lines:
            terminalreporter.write_line(line)
