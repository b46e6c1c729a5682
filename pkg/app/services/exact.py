"""
Exact arithmetic primitives

Every number in the engine is a sympy ``Rational``; univariate and bivariate
polynomials are sympy ``Poly`` objects over QQ in the variables ``u`` and
``v``. Nothing here ever rounds.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import sympy as sp
from sympy import Poly, QQ, Rational

from app.services.errors import ExactError

logger = logging.getLogger(__name__)

U, V = sp.symbols("u v")

# UniPoly / BiPoly are plain sympy polynomials in u and (u, v)
UniPoly = Poly
BiPoly = Poly


class Sign(str, Enum):
    NONNEGATIVE = "nonnegative"
    NONPOSITIVE = "nonpositive"
    MIXED = "mixed"


def to_rational(value) -> Rational:
    """
    Convert corpus literals ("5/2", "-3", 7) into an exact Rational.

    Floats are rejected: they cannot come from a printed fraction.
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise ExactError(f"not an exact rational: {value!r}")
    if isinstance(value, Fraction):
        return Rational(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        try:
            result = sp.Rational(text)
        except (TypeError, ValueError, SyntaxError) as e:
            raise ExactError(f"not an exact rational: {value!r}") from e
        return result
    try:
        result = sp.Rational(value)
    except (TypeError, ValueError) as e:
        raise ExactError(f"not an exact rational: {value!r}") from e
    return result


def format_rational(value) -> str:
    """Render as "p/q", or "p" for integers."""
    q = sp.Rational(value)
    if q.q == 1:
        return str(q.p)
    return f"{q.p}/{q.q}"


def uni(expr) -> UniPoly:
    """Build a UniPoly in u from a sympy expression or number."""
    if isinstance(expr, Poly):
        expr = expr.as_expr()
    expr = sp.sympify(expr)
    extra = expr.free_symbols - {U}
    if extra:
        raise ExactError(f"expected a polynomial in u, got symbols {sorted(map(str, extra))}")
    return Poly(sp.expand(expr), U, domain=QQ)


def bi(expr) -> BiPoly:
    """Build a BiPoly in (u, v)."""
    if isinstance(expr, Poly):
        expr = expr.as_expr()
    expr = sp.sympify(expr)
    extra = expr.free_symbols - {U, V}
    if extra:
        raise ExactError(f"expected a polynomial in u, v, got symbols {sorted(map(str, extra))}")
    return Poly(sp.expand(expr), U, V, domain=QQ)


@dataclass(frozen=True)
class AffineUV:
    """c0 + cu*u + cv*v"""
    c0: Rational = Rational(0)
    cu: Rational = Rational(0)
    cv: Rational = Rational(0)

    @classmethod
    def from_expr(cls, expr) -> "AffineUV":
        poly = bi(expr)
        if not poly.is_zero and poly.total_degree() > 1:
            raise ExactError(f"expression is not affine in u, v: {expr}")
        return cls(
            Rational(poly.coeff_monomial(1)),
            Rational(poly.coeff_monomial(U)),
            Rational(poly.coeff_monomial(V)),
        )

    @classmethod
    def constant(cls, value) -> "AffineUV":
        return cls(to_rational(value))

    def as_expr(self):
        return self.c0 + self.cu * U + self.cv * V

    def at(self, u, v=0) -> Rational:
        return self.c0 + self.cu * u + self.cv * v

    def uni(self) -> UniPoly:
        if self.cv != 0:
            raise ExactError(f"bound depends on v: {self.as_expr()}")
        return uni(self.as_expr())

    def __add__(self, other: "AffineUV") -> "AffineUV":
        return AffineUV(self.c0 + other.c0, self.cu + other.cu, self.cv + other.cv)

    def __sub__(self, other: "AffineUV") -> "AffineUV":
        return AffineUV(self.c0 - other.c0, self.cu - other.cu, self.cv - other.cv)

    def __neg__(self) -> "AffineUV":
        return AffineUV(-self.c0, -self.cu, -self.cv)

    def __mul__(self, scalar) -> "AffineUV":
        k = to_rational(scalar) if not isinstance(scalar, sp.Basic) else sp.Rational(scalar)
        return AffineUV(k * self.c0, k * self.cu, k * self.cv)

    __rmul__ = __mul__

    def __str__(self) -> str:
        return str(self.as_expr())


@dataclass(frozen=True)
class Chamber2D:
    """Region u_lo <= u <= u_hi, v_lo(u) <= v <= v_hi(u)."""
    u_lo: Rational
    u_hi: Rational
    v_lo: AffineUV
    v_hi: AffineUV

    def __post_init__(self):
        if not self.u_lo < self.u_hi:
            raise ExactError(f"empty u-range [{self.u_lo}, {self.u_hi}]")
        if self.v_lo.cv != 0 or self.v_hi.cv != 0:
            raise ExactError("chamber bounds must not depend on v")
        for u in (self.u_lo, self.u_hi):
            if self.v_lo.at(u) > self.v_hi.at(u):
                raise ExactError(f"v_lo > v_hi at u={u}")

    def vertices(self) -> list[tuple[Rational, Rational]]:
        points = []
        for u in (self.u_lo, self.u_hi):
            for bound in (self.v_lo, self.v_hi):
                point = (u, bound.at(u))
                if point not in points:
                    points.append(point)
        return points


def integrate_uni(p: UniPoly, a, b) -> Rational:
    """
    Exact definite integral of p over [a, b].

    Args:
        p: polynomial in u
        a: lower bound
        b: upper bound, a <= b

    Returns:
        The integral as a Rational
    """
    a, b = sp.Rational(a), sp.Rational(b)
    if a > b:
        raise ExactError(f"integration bounds out of order: [{a}, {b}]")
    p = p if isinstance(p, Poly) else uni(p)
    if p.is_zero:
        return Rational(0)
    antiderivative = p.integrate()
    return Rational(antiderivative.eval(b) - antiderivative.eval(a))


def integrate_chamber(f, ch: Chamber2D) -> Rational:
    """
    Integrate f(u, v) over a chamber: first in v between the affine bounds,
    then in u.
    """
    expr = f.as_expr() if isinstance(f, Poly) else sp.sympify(f)
    antiderivative = sp.integrate(sp.expand(expr), V)
    inner = antiderivative.subs(V, ch.v_hi.as_expr()) - antiderivative.subs(V, ch.v_lo.as_expr())
    return integrate_uni(uni(inner), ch.u_lo, ch.u_hi)


def _sign_changes(sequence: list[Poly], x: Rational) -> int:
    values = [s.eval(x) for s in sequence]
    values = [value for value in values if value != 0]
    return sum(1 for left, right in zip(values, values[1:]) if (left < 0) != (right < 0))


def count_roots_open(q: Poly, a: Rational, b: Rational) -> int:
    """Distinct roots of a squarefree q in the open interval (a, b), by Sturm's theorem."""
    sequence = sp.sturm(q)
    # V(a) - V(b) counts roots in (a, b]
    count = _sign_changes(sequence, a) - _sign_changes(sequence, b)
    if q.eval(b) == 0:
        count -= 1
    return count


def sign_on_interval(p: UniPoly, a, b) -> Sign:
    """
    Classify the sign of p on [a, b].

    Factors of even multiplicity never change sign, so the root count is
    taken on the product of the odd-multiplicity squarefree factors.
    """
    a, b = sp.Rational(a), sp.Rational(b)
    if a > b:
        raise ExactError(f"interval out of order: [{a}, {b}]")
    p = p if isinstance(p, Poly) else uni(p)
    if p.is_zero:
        return Sign.NONNEGATIVE
    if a == b:
        return Sign.NONNEGATIVE if p.eval(a) >= 0 else Sign.NONPOSITIVE

    coeff, factors = p.sqf_list()
    odd_part = Poly(coeff, U, domain=QQ)
    for factor, multiplicity in factors:
        if multiplicity % 2:
            odd_part = odd_part * factor

    if odd_part.degree() <= 0:
        return Sign.NONNEGATIVE if coeff > 0 else Sign.NONPOSITIVE

    roots = count_roots_open(odd_part, a, b)
    logger.debug(f"sign_on_interval: {p.as_expr()} has {roots} sign changes in ({a}, {b})")
    if roots > 0:
        return Sign.MIXED
    middle = (a + b) / 2
    return Sign.NONNEGATIVE if odd_part.eval(middle) > 0 else Sign.NONPOSITIVE


def is_identically_zero(expr) -> bool:
    return sp.expand(sp.sympify(expr)) == 0
