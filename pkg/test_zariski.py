import random

import pytest
import sympy as sp
from sympy import Rational

from app.services.errors import LatticeError, NotPseudoEffectiveError
from app.services.lattice import DivisorClass, SurfaceGeometry
from app.services.zariski import is_nef_at, vol_at, zariski_at


@pytest.fixture
def hc(corpus):
    return corpus.surfaces["2.22/HC"]


def test_decomposition_on_blown_up_plane(hc):
    result = zariski_at(hc, hc.class_of("3/2*h + 1/2*f1 + 1/2*f2"))
    assert result.positive == hc.class_of("3/2*h")
    assert result.negative == {"f1": Rational(1, 2), "f2": Rational(1, 2)}
    assert result.negative_class(hc) == hc.class_of("1/2*(f1 + f2)")


def test_nef_class_has_no_negative_part(hc):
    d = hc.class_of("5/2*h - f1 - f2")
    assert is_nef_at(hc, d)
    result = zariski_at(hc, d)
    assert result.positive == d
    assert result.negative == {}
    assert vol_at(hc, d) == Rational(17, 4)


def test_nef_checks(hc):
    assert is_nef_at(hc, hc.class_of("h"))
    assert not is_nef_at(hc, hc.class_of("-f1"))


def test_volume(hc):
    assert vol_at(hc, hc.class_of("3/2*h + 1/2*f1 + 1/2*f2")) == Rational(9, 4)
    # threshold of the line flag at u = 1/2: only exceptional curves remain
    assert vol_at(hc, hc.class_of("2*f1 + 2*f2")) == 0


def test_not_pseudo_effective(hc):
    with pytest.raises(NotPseudoEffectiveError):
        zariski_at(hc, hc.class_of("-h"))


def test_requires_complete_cone():
    plane = SurfaceGeometry("P2", ("h",), sp.Matrix([[1]]), {})
    with pytest.raises(LatticeError):
        zariski_at(plane, plane.class_of("h"))


def test_requires_constant_class(hc):
    with pytest.raises(LatticeError):
        zariski_at(hc, hc.class_of("u*h"))


def test_quintic_surface_decomposition(corpus):
    s = corpus.surfaces["2.22/SHCp"]
    # positive part of the second v-chamber of the O-prime flag at u = 1/2, v = 5/4
    d = s.class_of("(4 - 1/2 - 5/4)*h - (e2 + e2p) + 1/4*f1 + 1/2*g1")
    result = zariski_at(s, d)
    assert result.negative == {"f1": Rational(1, 4), "g1": Rational(1, 2)}


def _decompositions(s, seed, count=30):
    rng = random.Random(seed)
    results = []
    for _ in range(count):
        coords = [Rational(rng.randint(2, 12), 2)] + [Rational(rng.randint(-6, 6), 2) for _ in range(s.rank - 1)]
        d = DivisorClass(tuple(coords))
        try:
            results.append((d, zariski_at(s, d)))
        except NotPseudoEffectiveError:
            continue
    assert results
    return results


@pytest.mark.parametrize("surface", ["2.22/HC", "2.22/SHCp"])
def test_positive_part_is_orthogonal_to_the_support(corpus, surface):
    s = corpus.surfaces[surface]
    for d, result in _decompositions(s, seed=11):
        assert (result.positive + result.negative_class(s)).same_as(d)
        assert is_nef_at(s, result.positive)
        for name, coefficient in result.negative.items():
            assert coefficient > 0
            assert s.dot(result.positive, s.curve(name).cls) == 0


@pytest.mark.parametrize("surface", ["2.22/HC", "2.22/SHCp"])
def test_decomposition_is_idempotent(corpus, surface):
    s = corpus.surfaces[surface]
    for _, result in _decompositions(s, seed=5):
        again = zariski_at(s, result.positive)
        assert again.positive == result.positive
        assert again.negative == {}


def test_volume_decreases_along_a_ray(hc):
    # 3h - v(f1 + f2): nef up to v = 3/2, then l joins the support
    volumes = [vol_at(hc, hc.class_of(f"3*h - {Rational(k, 8)}*(f1 + f2)")) for k in range(25)]
    assert all(left >= right for left, right in zip(volumes, volumes[1:]))
    assert volumes[12] == Rational(9, 2)
    assert volumes[16] == 2
    assert volumes[24] == 0
    assert zariski_at(hc, hc.class_of("3*h - 2*(f1 + f2)")).negative == {"l": 1}
