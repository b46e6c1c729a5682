"""
Zariski decomposition on surfaces with a declared Mori cone

The oracle is the classical iteration: solve (D - N).C = 0 on the current
support, add every cone curve that the positive part meets negatively, and
repeat until nothing is added.
"""
import logging
from dataclasses import dataclass, field

import sympy as sp
from sympy import Rational

from app.services.errors import LatticeError, NotPseudoEffectiveError
from app.services.lattice import DivisorClass, PolyClass, SurfaceCurve, SurfaceGeometry, zero_class

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ZariskiResult:
    positive: DivisorClass
    negative: dict[str, Rational] = field(default_factory=dict)

    def negative_class(self, s: SurfaceGeometry) -> DivisorClass:
        total = zero_class(s.rank)
        for name, coefficient in self.negative.items():
            total = total + coefficient * s.curve(name).cls
        return total


def _require_cone(s: SurfaceGeometry) -> None:
    if not s.cone_complete:
        raise LatticeError(f"{s.name}: curve list is not declared to generate the Mori cone")


def _constant(s: SurfaceGeometry, d: PolyClass) -> DivisorClass:
    if len(d) != s.rank:
        raise LatticeError(f"{s.name}: class of length {len(d)} on a rank {s.rank} lattice")
    if not isinstance(d, DivisorClass):
        raise LatticeError(f"{s.name}: Zariski decomposition needs a class with constant coordinates")
    return d


def zariski_at(s: SurfaceGeometry, d: PolyClass) -> ZariskiResult:
    """
    Zariski decomposition of a fixed class.

    Args:
        s: surface whose curve list generates the Mori cone
        d: pseudo-effective class with rational coordinates

    Returns:
        ZariskiResult with the positive part and the negative coefficients
        keyed by curve name, in curve-list order

    Raises:
        NotPseudoEffectiveError: the iteration proves d is not pseudo-effective
    """
    _require_cone(s)
    d = _constant(s, d)
    cone = s.cone_curves()
    order = {c.name: n for n, c in enumerate(cone)}
    support: list[SurfaceCurve] = []
    coefficients: dict[str, Rational] = {}

    for _ in range(len(cone) + 1):
        if support:
            gram = sp.Matrix([[s.dot(c1.cls, c2.cls) for c2 in support] for c1 in support])
            if not (-gram).is_positive_definite:
                names = ", ".join(c.name for c in support)
                raise NotPseudoEffectiveError(f"support {{{names}}} is not negative definite")
            rhs = sp.Matrix([s.dot(d, c.cls) for c in support])
            solution = gram.LUsolve(rhs)
            coefficients = {c.name: Rational(x) for c, x in zip(support, solution)}
            for name, x in coefficients.items():
                if x < 0:
                    raise NotPseudoEffectiveError(f"coefficient of {name} would be {x}")

        negative = zero_class(s.rank)
        for c in support:
            negative = negative + coefficients[c.name] * c.cls
        positive = d - negative

        violating = [c for c in cone if s.dot(positive, c.cls) < 0]
        if not violating:
            result = {name: x for name, x in coefficients.items() if x != 0}
            logger.debug(f"Zariski decomposition on {s.name}: support {list(result)}")
            return ZariskiResult(positive, result)

        for c in violating:
            if s.dot(c.cls, c.cls) >= 0:
                raise NotPseudoEffectiveError(f"{c.name} is nef but meets the positive part negatively")
            if c in support:
                raise NotPseudoEffectiveError(f"{c.name} stays negative after joining the support")
            support.append(c)
        support.sort(key=lambda c: order[c.name])

    raise NotPseudoEffectiveError("iteration did not reach a fixpoint")


def is_nef_at(s: SurfaceGeometry, d: PolyClass) -> bool:
    _require_cone(s)
    d = _constant(s, d)
    return all(s.dot(d, c.cls) >= 0 for c in s.cone_curves())


def vol_at(s: SurfaceGeometry, d: PolyClass) -> Rational:
    result = zariski_at(s, d)
    return Rational(s.dot(result.positive, result.positive))
