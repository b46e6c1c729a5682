import random

import pytest
from sympy import Rational

from app.services.errors import ExactError
from app.services.exact import (
    AffineUV,
    Chamber2D,
    Sign,
    U,
    V,
    count_roots_open,
    format_rational,
    integrate_chamber,
    integrate_uni,
    sign_on_interval,
    to_rational,
    uni,
)


def test_to_rational_accepts_exact_literals():
    assert to_rational("5/2") == Rational(5, 2)
    assert to_rational(" -3 ") == -3
    assert to_rational(7) == 7


@pytest.mark.parametrize("value", [0.5, True, "abc"])
def test_to_rational_rejects_inexact_values(value):
    with pytest.raises(ExactError):
        to_rational(value)


def test_format_rational():
    assert format_rational(Rational(-1, 40)) == "-1/40"
    assert format_rational(Rational(4, 2)) == "2"


def test_integrate_uni_volume_of_first_chamber():
    # u^4/2 - 2u^3 - 9u^2 + 30u at u = 1
    assert integrate_uni(uni(2 * U**3 - 6 * U**2 - 18 * U + 30), 0, 1) == Rational(39, 2)


def test_integrate_uni_second_chamber_and_zero():
    assert integrate_uni(uni(8 * (2 - U) ** 3), 1, 2) == 2
    assert integrate_uni(uni(0), Rational(1, 3), 5) == 0


def test_integrate_uni_rejects_reversed_bounds():
    with pytest.raises(ExactError):
        integrate_uni(uni(U), 1, 0)


def test_integrate_chamber():
    box = Chamber2D(Rational(0), Rational(1), AffineUV(), AffineUV(Rational(1)))
    assert integrate_chamber(1, box) == 1

    triangle = Chamber2D(Rational(0), Rational(2), AffineUV(), AffineUV.from_expr(U))
    assert integrate_chamber(V, triangle) == Rational(4, 3)

    strip = Chamber2D(Rational(0), Rational(1), AffineUV.from_expr(U), AffineUV.from_expr(2 + U))
    assert integrate_chamber((2 + U - V) ** 2, strip) == Rational(8, 3)


def test_chamber_rejects_empty_ranges():
    with pytest.raises(ExactError):
        Chamber2D(Rational(1), Rational(1), AffineUV(), AffineUV(Rational(1)))
    with pytest.raises(ExactError):
        Chamber2D(Rational(0), Rational(1), AffineUV(Rational(2)), AffineUV.from_expr(U))


def test_affine_from_expr():
    t = AffineUV.from_expr("2 + u - v/2")
    assert (t.c0, t.cu, t.cv) == (2, 1, Rational(-1, 2))
    assert t.at(1, 2) == 2
    with pytest.raises(ExactError):
        AffineUV.from_expr(U * V)
    with pytest.raises(ExactError):
        t.uni()


@pytest.mark.parametrize(
    "expr, lo, hi, expected",
    [
        (2 - U, 0, 2, Sign.NONNEGATIVE),
        (U - 1, 0, 2, Sign.MIXED),
        (U**2 - 10 * U + 22, 1, 2, Sign.NONNEGATIVE),
        ((U - 1) ** 2, 0, 2, Sign.NONNEGATIVE),
        (-((U - 1) ** 2) * (3 - U), 0, 2, Sign.NONPOSITIVE),
        (U * (2 - U), 0, 2, Sign.NONNEGATIVE),
    ],
)
def test_sign_on_interval(expr, lo, hi, expected):
    assert sign_on_interval(uni(expr), lo, hi) == expected


def test_count_roots_open_excludes_endpoints():
    assert count_roots_open(uni(U * (U - 1) * (U - 2)), Rational(0), Rational(2)) == 1


def _random_rational(rng, span=6, denominator=7):
    return Rational(rng.randint(-span * denominator, span * denominator), rng.randint(1, denominator))


def _random_poly(rng, degree=6):
    return uni(sum(_random_rational(rng) * U**k for k in range(rng.randint(0, degree) + 1)))


@pytest.mark.parametrize("seed", range(20))
def test_integrate_uni_is_additive(seed):
    rng = random.Random(seed)
    p = _random_poly(rng)
    a, b, c = sorted(_random_rational(rng) for _ in range(3))
    assert integrate_uni(p, a, c) == integrate_uni(p, a, b) + integrate_uni(p, b, c)


@pytest.mark.parametrize("seed", range(10))
def test_integrate_uni_within_riemann_bracket(seed):
    rng = random.Random(seed)
    p = _random_poly(rng, degree=4)
    a = _random_rational(rng, span=2)
    b = a + Rational(rng.randint(1, 12), rng.randint(1, 4))
    pieces = 200
    h = (b - a) / pieces
    left_sum = h * sum(p.eval(a + k * h) for k in range(pieces))
    # |p'| <= M on [a, b], so each piece is off by at most M h^2 / 2
    radius = max(abs(a), abs(b), 1)
    slope = sum(abs(c) * k * radius ** (k - 1) for (k,), c in p.terms() if k > 0)
    error = slope * (b - a) * h / 2
    assert left_sum - error <= integrate_uni(p, a, b) <= left_sum + error


def _sampled_sign(p, a, b, step):
    values = [p.eval(a + k * step) for k in range(int((b - a) / step) + 1)]
    if any(value > 0 for value in values) and any(value < 0 for value in values):
        return Sign.MIXED
    return Sign.NONPOSITIVE if any(value < 0 for value in values) else Sign.NONNEGATIVE


@pytest.mark.parametrize("seed", range(40))
def test_sign_on_interval_matches_dense_sampling(seed):
    # 根都在 1/8 网格上, 以 1/16 步长采样不会漏掉变号
    rng = random.Random(seed)
    expr = rng.choice([-1, 1]) * rng.randint(1, 5)
    for _ in range(rng.randint(1, 5)):
        expr *= (U - Rational(rng.randint(-20, 20), 8)) ** rng.randint(1, 3)
    if rng.random() < 0.3:
        expr *= U**2 + rng.randint(1, 4)
    lo, hi = sorted(rng.sample(range(-16, 17), 2))
    a, b = Rational(lo, 8), Rational(hi, 8)
    p = uni(expr)
    assert sign_on_interval(p, a, b) == _sampled_sign(p, a, b, Rational(1, 16))
