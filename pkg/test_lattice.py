from dataclasses import replace

import pytest
from sympy import Rational

from app.services.errors import LatticeError
from app.services.exact import U, uni
from app.services.lattice import (
    DivisorClass,
    ThreefoldGeometry,
    blowup_along_curve,
    blowup_at_point,
    check_restriction,
    monoid_decompose,
    parse_class,
    positive_grading,
    triple_eval,
    volume_poly,
    zero_class,
)


@pytest.fixture
def p3():
    return ThreefoldGeometry("P3", ("H",), {(0, 0, 0): 1}, DivisorClass((4,)))


@pytest.fixture
def quadric():
    return ThreefoldGeometry("Q", ("H",), {(0, 0, 0): 2}, DivisorClass((3,)))


def test_blowup_of_conic(p3):
    g = blowup_along_curve(p3, "E", 0, {"H": 2}, canonical_dot=-8)
    h, e = g.index("H"), g.index("E")
    assert g.triple(e, e, e) == -6
    assert g.triple(h, e, e) == -2
    assert g.triple(h, h, e) == 0
    assert g.anticanonical_cube() == 46


def test_blowup_of_line(p3):
    g = blowup_along_curve(p3, "F", 0, {"H": 1})
    f = g.index("F")
    assert g.triple(f, f, f) == -2
    assert g.triple(g.index("H"), f, f) == -1


def test_blowup_rejects_inconsistent_canonical_degree(p3):
    with pytest.raises(LatticeError):
        blowup_along_curve(p3, "E", 0, {"H": 2}, canonical_dot=-6)
    with pytest.raises(LatticeError):
        blowup_along_curve(p3, "u", 0, {"H": 1})


def test_three_points_then_conic_on_quadric(quadric):
    g = quadric
    for name in ("E1", "E2", "E3"):
        g = blowup_at_point(g, name)
    assert g.anticanonical_cube() == 30
    h = g.basis_class("H")
    for name in ("E1", "E2", "E3"):
        i = g.index(name)
        assert g.triple(i, i, i) == 1
        assert triple_eval(g, g.basis_class(name), h, h).eval(0) == 0
    assert triple_eval(g, g.basis_class("E1"), g.basis_class("E1"), g.basis_class("E2")).eval(0) == 0

    v = blowup_along_curve(g, "E", 0, {"H": 2, "E1": 1, "E2": 1, "E3": 1}, canonical_dot=0)
    e = v.index("E")
    assert v.triple(e, e, e) == 2
    assert v.triple(v.index("H"), e, e) == -2
    assert v.triple(v.index("E1"), e, e) == -1
    assert v.anticanonical_cube() == 28


def test_corpus_blowups_match_printed_table(corpus):
    g = corpus.geometries["2.22/Xtilde"]
    e = g.index("E")
    assert g.triple(g.index("H"), g.index("H"), g.index("H")) == 1
    assert g.triple(e, e, e) == -4
    assert g.anticanonical_cube() == 30


def test_triple_eval_is_multilinear(corpus):
    g = corpus.geometries["2.22/Xtilde"]
    d = g.class_of("H - E")
    assert triple_eval(g, zero_class(g.rank), d, d).is_zero
    doubled = triple_eval(g, d * 2, d, g.anticanonical)
    assert doubled == triple_eval(g, d, d, g.anticanonical) * 2


def test_volume_polynomials(corpus):
    xtilde = corpus.geometries["2.22/Xtilde"]
    p = xtilde.class_of("(4 - 2*u)*H + (u - 1)*(E + F1 + F2)")
    assert volume_poly(xtilde, p) == uni(2 * U**3 - 6 * U**2 - 18 * U + 30)

    xbar = corpus.geometries["2.22/Xbar"]
    q = xbar.class_of("(2 - u)*(E + Q + 2*HC)")
    assert volume_poly(xbar, q) == uni(6 * (2 - U) ** 3)

    assert corpus.geometries["4.13/Xbar"].anticanonical_cube() == 26


def test_parse_class():
    basis = ("H", "E")
    named = {"Q": DivisorClass((2, -1))}
    c = parse_class("(2-u)*Q + E", basis, named)
    assert c.coords == (4 - 2 * U, U - 1)
    assert parse_class("Q - H", basis, named) == DivisorClass((1, -1))
    with pytest.raises(LatticeError):
        parse_class("H + X", basis)
    with pytest.raises(LatticeError):
        parse_class("H*E", basis)
    with pytest.raises(LatticeError):
        parse_class("H + 1", basis)


def test_restriction_to_hc(corpus):
    g = corpus.geometries["2.22/Xtilde"]
    s = corpus.surfaces["2.22/HC"]
    r = s.restriction
    assert check_restriction(g, s, r)

    images = list(r.images)
    images[g.index("E")] = s.class_of("2*Ct")
    assert not check_restriction(g, s, replace(r, images=tuple(images)))


def test_restriction_to_quadric_surface(corpus):
    g = corpus.geometries["3.12/Xbar"]
    s = corpus.surfaces["3.12/S_EL"]
    assert check_restriction(g, s, s.restriction)


@pytest.mark.parametrize(
    "target, expected",
    [
        ("4*H - E - F1 - F2", (1, 2, 2)),
        ("Q", (1, 0, 0)),
        ("H - 5*E", None),
    ],
)
def test_monoid_decompose(corpus, target, expected):
    g = corpus.geometries["2.22/Xtilde"]
    generators = [g.class_of(name) for name in ("Q", "HC", "E")]
    assert monoid_decompose(g.class_of(target), generators) == expected


def test_monoid_decompose_with_mixed_signs():
    # 系数超过 max|target| / min|坐标|
    generators = [DivisorClass((2, -1)), DivisorClass((-3, 2))]
    assert monoid_decompose(DivisorClass((0, 1)), generators) == (3, 2)
    assert monoid_decompose(DivisorClass((0, -1)), generators) is None


def test_dependent_generators_get_a_grading(corpus):
    g = corpus.geometries["3.12/Xbar"]
    generators = [g.class_of(text) for text in ("E2", "Q", "HL", "H2", "H12 + H23")]
    assert positive_grading(generators) == (1, 1, 1, 2, 1)
    assert monoid_decompose(g.class_of("H"), generators) == (1, 0, 0, 1, 0)


def test_monoid_decompose_rejects_unbounded_search():
    with pytest.raises(LatticeError, match="grading"):
        monoid_decompose(DivisorClass((1,)), [DivisorClass((1,)), DivisorClass((-1,))])


def test_monoid_decompose_needs_integral_classes():
    with pytest.raises(LatticeError):
        monoid_decompose(DivisorClass((Rational(1, 2),)), [DivisorClass((1,))])
