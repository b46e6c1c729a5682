import random

import pytest
import sympy as sp
from sympy import Rational

from app.services.errors import ExactError
from app.services.pfaffian import (
    GENERATORS,
    STATED_RELATIONS,
    a,
    b,
    check_specialization,
    multipoly,
    pfaffians_5,
    poly_identity,
    search_relation_variants,
    smoothing_matrix,
    smoothing_pfaffians,
    x1,
    x2,
    x3,
    y1,
    y2,
    y3,
    z1,
    z2,
    z3,
)


@pytest.fixture(scope="module")
def pfaffians():
    return smoothing_pfaffians()


@pytest.mark.parametrize(
    "index, expected",
    [
        (0, (b - a) * x2 * y3 - (b + a) * x3 * y2 - 2 * a * x1 * y1),
        (1, (b - a) * y2 * z3 - (b + a) * y3 * z2 - 2 * a * y1 * z1),
        (2, (b - a) * x2 * z3 - (b + a) * x3 * z2 + 2 * a * x1 * z1),
        (3, b * x1 * y1 * z3 + b * x1 * y3 * z1 + b * x3 * y1 * z1 + b * x3 * y2 * z3),
        (4, x1 * y1 * z2 + x1 * y2 * z1 + x2 * y1 * z1 + x2 * y3 * z2),
    ],
)
def test_labelled_pfaffians_of_the_family(pfaffians, index, expected):
    assert poly_identity(pfaffians[index], expected)


@pytest.mark.parametrize("seed", range(5))
def test_pfaffian_squares_are_principal_minors(seed):
    rng = random.Random(seed)
    point = {g: Rational(rng.randint(-30, 30), rng.randint(1, 9)) for g in GENERATORS}
    matrix = smoothing_matrix()
    numeric = sp.Matrix(5, 5, lambda i, j: sp.sympify(matrix[i][j]).subs(point))
    for deleted, pf in enumerate(pfaffians_5(matrix)):
        keep = [k for k in range(5) if k != deleted]
        minor = numeric.extract(keep, keep)
        assert pf.as_expr().subs(point) ** 2 == minor.det()


def test_pf1_of_special_member():
    assert poly_identity(smoothing_pfaffians(0, 1)[0], x2 * y3 - x3 * y2)


def test_specialization_matches_all_five_equations():
    assert check_specialization() == [True] * 5


def test_zero_matrix_has_zero_pfaffians():
    zero = [[sp.Integer(0)] * 5 for _ in range(5)]
    assert all(pf.is_zero for pf in pfaffians_5(zero))


def test_non_skew_matrix_is_rejected():
    matrix = smoothing_matrix()
    matrix[4][0] = x2
    with pytest.raises(ExactError):
        pfaffians_5(matrix)


def test_poly_identity_is_reflexive():
    p = multipoly((x1 + 2 * y3) ** 3 - z1)
    assert poly_identity(p, p)
    assert not poly_identity(p, p + 1)


@pytest.mark.parametrize("label", sorted(STATED_RELATIONS))
def test_stated_relation_or_its_variants_hold(label, pfaffians):
    relation = STATED_RELATIONS[label]
    if relation.holds(pfaffians):
        return
    for variant in search_relation_variants(relation, pfaffians, seed=7):
        assert variant.holds(pfaffians)
        assert [sign for sign, _, _ in variant.terms] == [sign for sign, _, _ in relation.terms]
        assert (variant.scale, variant.target, variant.prefactor) == (
            relation.scale,
            relation.target,
            relation.prefactor,
        )


def test_variant_search_does_not_depend_on_seed(pfaffians):
    relation = STATED_RELATIONS["Pf4"]
    first = [v.key() for v in search_relation_variants(relation, pfaffians, seed=7)]
    second = [v.key() for v in search_relation_variants(relation, pfaffians, seed=11)]
    assert first == second
