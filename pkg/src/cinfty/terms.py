"""Symbolic smooth functions R^n -> R in a polynomial-over-atoms normal form.

A term is stored as a finite map from monomials to nonzero rational
coefficients.  A monomial is a sorted tuple of ``(atom, exponent)`` pairs, and
an atom is either a variable or a smooth primitive applied to a term.  Every
constructor normalizes, so structural equality of two terms is equality of
their normal forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

PRIMITIVES = ("exp", "sin", "cos", "bump")


@dataclass(frozen=True)
class Var:
    index: int

    @property
    def key(self) -> tuple:
        return (0, self.index)

    def __str__(self) -> str:
        return f"x{self.index}"


@dataclass(frozen=True)
class Prim:
    """A primitive applied to a term.

    ``order`` is only nonzero for ``bump``: ``bump`` with order k is the k-th
    derivative of the flat bump, which keeps derivatives inside the language.
    """

    name: str
    arg: "Term"
    order: int = 0

    @property
    def key(self) -> tuple:
        return (1, self.name, self.order, self.arg.key)

    @property
    def label(self) -> str:
        return self.name if self.order == 0 else f"{self.name}_d{self.order}"

    def __str__(self) -> str:
        return f"{self.label}({self.arg})"


Atom = Var | Prim
Monomial = tuple  # tuple[tuple[Atom, int], ...] sorted by atom key


def _mono_key(mono: Monomial) -> tuple:
    return tuple((atom.key, e) for atom, e in mono)


def _mono_degree(mono: Monomial) -> int:
    return sum(e for _, e in mono)


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    powers: dict = {}
    for atom, e in a + b:
        powers[atom] = powers.get(atom, 0) + e
    return tuple(sorted(powers.items(), key=lambda p: p[0].key))


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


class Term:
    """Immutable normalized term.  Build with :meth:`const`, :meth:`var`,
    :meth:`prim` and the arithmetic operators."""

    __slots__ = ("_poly", "_key", "_hash")

    def __init__(self, poly: Mapping[Monomial, Fraction] | None = None):
        # Callers pass already-merged monomials; zero coefficients are dropped.
        self._poly = {m: c for m, c in (poly or {}).items() if c != 0}
        self._key = None
        self._hash = None

    # -- construction -------------------------------------------------------

    @classmethod
    def const(cls, value) -> "Term":
        return cls({(): _as_fraction(value)})

    @classmethod
    def var(cls, index: int) -> "Term":
        if index < 0:
            raise ValueError("variable index must be nonnegative")
        return cls({((Var(index), 1),): Fraction(1)})

    @classmethod
    def prim(cls, name: str, arg: "Term", order: int = 0) -> "Term":
        if name not in PRIMITIVES:
            raise ValueError(f"unknown primitive {name!r}")
        if order and name != "bump":
            raise ValueError("only bump carries a derivative order")
        arg = _coerce(arg)
        c = arg.constant_value()
        if c is not None:
            folded = _fold_primitive(name, order, c)
            if folded is not None:
                return cls.const(folded)
        return cls({((Prim(name, arg, order), 1),): Fraction(1)})

    # -- inspection -----------------------------------------------------------

    @property
    def monomials(self) -> dict:
        return dict(self._poly)

    def items(self):
        return self._poly.items()

    @property
    def key(self) -> tuple:
        if self._key is None:
            self._key = tuple(sorted((_mono_key(m), c) for m, c in self._poly.items()))
        return self._key

    def is_zero(self) -> bool:
        return not self._poly

    def constant_value(self) -> Fraction | None:
        if not self._poly:
            return Fraction(0)
        if len(self._poly) == 1 and () in self._poly:
            return self._poly[()]
        return None

    def is_constant(self) -> bool:
        return self.constant_value() is not None

    def atoms(self) -> set:
        return {atom for m in self._poly for atom, _ in m}

    def variables(self) -> set[int]:
        out: set[int] = set()
        for atom in self.atoms():
            if isinstance(atom, Var):
                out.add(atom.index)
            else:
                out |= atom.arg.variables()
        return out

    def arity_needed(self) -> int:
        vs = self.variables()
        return max(vs) + 1 if vs else 0

    def has_primitives(self) -> bool:
        return any(isinstance(a, Prim) for a in self.atoms())

    def is_polynomial(self) -> bool:
        return not self.has_primitives()

    def degree(self) -> int:
        return max((_mono_degree(m) for m in self._poly), default=0)

    def degree_in(self, index: int) -> int | None:
        """Degree as a polynomial in variable ``index``; None if the variable
        occurs inside a primitive argument."""
        deg = 0
        for m in self._poly:
            for atom, e in m:
                if isinstance(atom, Var):
                    if atom.index == index:
                        deg = max(deg, e)
                elif index in atom.arg.variables():
                    return None
        return deg

    def coefficients_in(self, index: int) -> dict[int, "Term"]:
        """Split as sum_k c_k * x_index^k; the variable must not occur inside
        primitives."""
        if self.degree_in(index) is None:
            raise ValueError(f"x{index} occurs inside a primitive")
        parts: dict[int, dict] = {}
        v = Var(index)
        for m, c in self._poly.items():
            k = 0
            rest = []
            for atom, e in m:
                if atom == v:
                    k = e
                else:
                    rest.append((atom, e))
            parts.setdefault(k, {})[tuple(rest)] = c
        return {k: Term(p) for k, p in parts.items()}

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other) -> "Term":
        other = _coerce(other)
        poly = dict(self._poly)
        for m, c in other._poly.items():
            poly[m] = poly.get(m, 0) + c
        return Term(poly)

    __radd__ = __add__

    def __neg__(self) -> "Term":
        return Term({m: -c for m, c in self._poly.items()})

    def __sub__(self, other) -> "Term":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "Term":
        return _coerce(other) - self

    def __mul__(self, other) -> "Term":
        other = _coerce(other)
        poly: dict = {}
        for m1, c1 in self._poly.items():
            for m2, c2 in other._poly.items():
                m = _mono_mul(m1, m2)
                poly[m] = poly.get(m, 0) + c1 * c2
        return Term(poly)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Term":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        if len(self._poly) == 1:
            (m, c), = self._poly.items()
            return Term({tuple((a, e * n) for a, e in m) if n else (): c ** n})
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Term.const(other)
        if not isinstance(other, Term):
            return NotImplemented
        return self._poly == other._poly

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.key)
        return self._hash

    def __repr__(self) -> str:
        return f"Term({str(self)!r})"

    def __str__(self) -> str:
        return format_term(self)

    # -- structural maps ------------------------------------------------------

    def substitute(self, images: Sequence["Term"] | Mapping[int, "Term"]) -> "Term":
        """Replace variable i by ``images[i]``; unmapped variables stay put
        when a mapping is given."""
        if isinstance(images, Mapping):
            lookup = images
        else:
            lookup = dict(enumerate(images))
        cache: dict = {}

        def atom_image(atom) -> Term:
            if atom in cache:
                return cache[atom]
            if isinstance(atom, Var):
                if atom.index in lookup:
                    img = _coerce(lookup[atom.index])
                elif isinstance(images, Mapping):
                    img = Term.var(atom.index)
                else:
                    raise IndexError(f"no image for x{atom.index}")
            else:
                img = Term.prim(atom.name, atom.arg.substitute(images), atom.order)
            cache[atom] = img
            return img

        result = ZERO
        for m, c in self._poly.items():
            prod = Term.const(c)
            for atom, e in m:
                prod = prod * atom_image(atom) ** e
            result = result + prod
        return result

    def shift(self, offset: int) -> "Term":
        if offset == 0:
            return self
        return self.substitute({i: Term.var(i + offset) for i in self.variables()})

    def rename(self, mapping: Mapping[int, int]) -> "Term":
        return self.substitute({i: Term.var(j) for i, j in mapping.items()})


def _coerce(value) -> Term:
    if isinstance(value, Term):
        return value
    return Term.const(value)


def _fold_primitive(name: str, order: int, c: Fraction) -> Fraction | None:
    if name == "bump":
        return Fraction(0) if abs(c) >= 1 else None
    if c == 0:
        return {"exp": Fraction(1), "sin": Fraction(0), "cos": Fraction(1)}[name]
    return None


ZERO = Term()
ONE = Term.const(1)


def var(index: int) -> Term:
    return Term.var(index)


def const(value) -> Term:
    return Term.const(value)


def exp(t) -> Term:
    return Term.prim("exp", _coerce(t))


def sin(t) -> Term:
    return Term.prim("sin", _coerce(t))


def cos(t) -> Term:
    return Term.prim("cos", _coerce(t))


def bump(t, order: int = 0) -> Term:
    return Term.prim("bump", _coerce(t), order)


def product(terms: Iterable) -> Term:
    out = ONE
    for t in terms:
        out = out * t
    return out


def sum_of_squares(terms: Iterable) -> Term:
    out = ZERO
    for t in terms:
        t = _coerce(t)
        out = out + t * t
    return out


# -- printing -----------------------------------------------------------------

def _format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_monomial(mono: Monomial) -> str:
    parts = []
    for atom, e in mono:
        s = str(atom)
        parts.append(s if e == 1 else f"{s}^{e}")
    return "*".join(parts)


def _print_order(t: Term) -> list:
    return sorted(t.items(), key=lambda mc: (-_mono_degree(mc[0]), _mono_key(mc[0])))


def format_term(t: Term) -> str:
    if t.is_zero():
        return "0"
    out = []
    for i, (m, c) in enumerate(_print_order(t)):
        neg = c < 0
        mag = -c if neg else c
        if not m:
            body = _format_rational(mag)
        elif mag == 1:
            body = _format_monomial(m)
        else:
            body = f"{_format_rational(mag)}*{_format_monomial(m)}"
        if i == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


# -- calculus and polynomial views --------------------------------------------

def _bump_derivative_poly(order: int) -> list[Fraction]:
    """Coefficients (low to high) of P_k with bump^(k)(t) = P_k(t) / (1-t^2)^(2k) * bump(t)."""
    from cinfty import upoly

    p = [Fraction(1)]
    u = [Fraction(1), Fraction(0), Fraction(-1)]
    t = [Fraction(0), Fraction(1)]
    for k in range(order):
        # P_{k+1} = P_k' u^2 + (4k t u - 2t) P_k
        lhs = upoly.mul(upoly.derivative(p), upoly.mul(u, u))
        factor = upoly.sub(upoly.scale(upoly.mul(t, u), 4 * k), upoly.scale(t, 2))
        p = upoly.add(lhs, upoly.mul(factor, p))
    return p


def _atom_derivative(atom, index: int) -> Term:
    if isinstance(atom, Var):
        return ONE if atom.index == index else ZERO
    inner = differentiate(atom.arg, index)
    if inner.is_zero():
        return ZERO
    arg = atom.arg
    if atom.name == "exp":
        outer = exp(arg)
    elif atom.name == "sin":
        outer = cos(arg)
    elif atom.name == "cos":
        outer = -sin(arg)
    else:
        outer = bump(arg, atom.order + 1)
    return outer * inner


def differentiate(t: Term, index: int) -> Term:
    """Partial derivative with respect to variable ``index``."""
    result = ZERO
    for m, c in t.items():
        for j, (atom, e) in enumerate(m):
            d = _atom_derivative(atom, index)
            if d.is_zero():
                continue
            rest = m[:j] + ((atom, e - 1),) + m[j + 1:] if e > 1 else m[:j] + m[j + 1:]
            result = result + Term({rest: c * e}) * d
    return result


def as_polynomial(t: Term, arity: int | None = None) -> dict[tuple[int, ...], Fraction] | None:
    """Sparse exponent-vector form, or None when a primitive occurs."""
    if t.has_primitives():
        return None
    n = arity if arity is not None else t.arity_needed()
    out = {}
    for m, c in t.items():
        exps = [0] * n
        for atom, e in m:
            exps[atom.index] = e
        out[tuple(exps)] = c
    return out


def as_univariate(t: Term, index: int = 0) -> list[Fraction] | None:
    """Dense coefficients (constant first) when ``t`` is a polynomial in the
    single variable ``index``; None otherwise."""
    if t.has_primitives() or not t.variables() <= {index}:
        return None
    if t.is_zero():
        return []
    coeffs = [Fraction(0)] * (t.degree() + 1)
    for m, c in t.items():
        coeffs[m[0][1] if m else 0] = c
    return coeffs


def from_univariate(coeffs: Sequence, index: int = 0) -> Term:
    return Term({((Var(index), k),) if k else (): Fraction(c) for k, c in enumerate(coeffs) if c})


def from_polynomial(poly: Mapping[tuple[int, ...], object]) -> Term:
    out = {}
    for exps, c in poly.items():
        mono = tuple((Var(i), e) for i, e in enumerate(exps) if e)
        out[mono] = out.get(mono, 0) + _as_fraction(c)
    return Term(out)


def exact_value(t: Term, point: Sequence) -> Fraction | None:
    """Exact value at a rational point when the normal form collapses to a
    rational constant (polynomials, and primitives at their exact points)."""
    return t.substitute([Term.const(v) for v in point]).constant_value()


def _lex_vector(mono: Monomial, atoms: list) -> tuple:
    d = dict(mono)
    return tuple(d.get(a, 0) for a in atoms)


def divide(p: Term, d: Term) -> Term | None:
    """Exact quotient p / d in the polynomial ring over atoms, or None.

    Atoms are treated as independent indeterminates, so a quotient found here
    is also a quotient of the underlying functions.
    """
    if d.is_zero():
        return None
    if p.is_zero():
        return ZERO
    atoms = sorted(p.atoms() | d.atoms(), key=lambda a: a.key)
    vec = {m: _lex_vector(m, atoms) for m in d.monomials}
    lead_d = max(vec, key=vec.get)
    lead_vec, lead_c = vec[lead_d], d.monomials[lead_d]
    quotient = ZERO
    rest = p
    while not rest.is_zero():
        mono = max(rest.monomials, key=lambda m: _lex_vector(m, atoms))
        mvec = _lex_vector(mono, atoms)
        if any(a < b for a, b in zip(mvec, lead_vec)):
            return None
        factor_mono = tuple((a, e - f) for a, e, f in zip(atoms, mvec, lead_vec) if e - f)
        factor = Term({factor_mono: rest.monomials[mono] / lead_c})
        quotient = quotient + factor
        rest = rest - factor * d
    return quotient
