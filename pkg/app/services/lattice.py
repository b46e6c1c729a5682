"""
Divisor lattices of threefolds and surfaces

Classes are coordinate vectors over a named basis. Threefolds carry a
symmetric trilinear form stored by its nonzero entries; surfaces carry a
Gram matrix and a list of named curves.
"""
import itertools
import logging
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

import sympy as sp
from sympy import Rational
from sympy.parsing.sympy_parser import parse_expr, standard_transformations

from app.services.errors import LatticeError
from app.services.exact import U, V, UniPoly, uni

logger = logging.getLogger(__name__)

RESERVED_NAMES = {"u", "v"}


@dataclass(frozen=True)
class PolyClass:
    """Class with coordinates that may depend on u (threefold) or on u, v (surface)."""
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(sp.expand(sp.sympify(c)) for c in self.coords))

    def __len__(self) -> int:
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def _check(self, other: "PolyClass") -> None:
        if len(self) != len(other):
            raise LatticeError(f"dimension mismatch: {len(self)} vs {len(other)}")

    def __add__(self, other: "PolyClass") -> "PolyClass":
        self._check(other)
        return _wrap(a + b for a, b in zip(self.coords, other.coords))

    def __sub__(self, other: "PolyClass") -> "PolyClass":
        self._check(other)
        return _wrap(a - b for a, b in zip(self.coords, other.coords))

    def __neg__(self) -> "PolyClass":
        return _wrap(-a for a in self.coords)

    def __mul__(self, scalar) -> "PolyClass":
        k = sp.sympify(scalar)
        return _wrap(k * a for a in self.coords)

    __rmul__ = __mul__

    def at(self, u=None, v=None) -> "DivisorClass":
        subs = {}
        if u is not None:
            subs[U] = sp.Rational(u)
        if v is not None:
            subs[V] = sp.Rational(v)
        return DivisorClass(tuple(sp.sympify(c).subs(subs) for c in self.coords))

    def subs(self, mapping: dict) -> "PolyClass":
        return _wrap(sp.sympify(c).subs(mapping) for c in self.coords)

    def is_zero(self) -> bool:
        return all(sp.expand(c) == 0 for c in self.coords)

    def same_as(self, other: "PolyClass") -> bool:
        """Identical as classes, identically in u and v."""
        self._check(other)
        return (self - other).is_zero()

    def render(self, basis: Iterable[str]) -> str:
        terms = []
        for name, c in zip(basis, self.coords):
            if c == 0:
                continue
            terms.append(f"({c})*{name}")
        return " + ".join(terms) if terms else "0"


@dataclass(frozen=True)
class DivisorClass(PolyClass):
    """Class with constant rational coordinates."""

    def __post_init__(self):
        super().__post_init__()
        for c in self.coords:
            if c.free_symbols:
                raise LatticeError(f"divisor class coordinate is not constant: {c}")


def _wrap(values) -> PolyClass:
    coords = tuple(sp.expand(sp.sympify(c)) for c in values)
    if any(c.free_symbols for c in coords):
        return PolyClass(coords)
    return DivisorClass(coords)


def zero_class(n: int) -> DivisorClass:
    return DivisorClass(tuple(Rational(0) for _ in range(n)))


def unit_class(n: int, i: int) -> DivisorClass:
    return DivisorClass(tuple(Rational(1 if k == i else 0) for k in range(n)))


def parse_class(text: str, basis: tuple[str, ...], named: Optional[dict[str, PolyClass]] = None) -> PolyClass:
    """
    Parse a linear combination such as "(2-u)*Q + E + F1" into coordinates.

    Args:
        text: expression over basis names, named classes and the variables u, v
        basis: ordered basis names
        named: extra names (divisors or curves) mapped to their classes

    Returns:
        The class, a DivisorClass when no coordinate depends on u or v
    """
    named = named or {}
    symbols = {name: sp.Symbol(name) for name in basis}
    local_dict = dict(symbols)
    for name in named:
        local_dict.setdefault(name, sp.Symbol(name))
    local_dict["u"] = U
    local_dict["v"] = V
    try:
        expr = parse_expr(str(text), local_dict=local_dict, transformations=standard_transformations)
    except Exception as e:
        raise LatticeError(f"cannot parse class expression {text!r}: {e}") from e

    substitutions = {}
    for name, cls in named.items():
        if name in symbols:
            continue
        substitutions[local_dict[name]] = sum(c * symbols[b] for b, c in zip(basis, cls.coords))
    expr = sp.expand(sp.sympify(expr).subs(substitutions))

    basis_symbols = [symbols[name] for name in basis]
    unknown = expr.free_symbols - set(basis_symbols) - {U, V}
    if unknown:
        raise LatticeError(f"unknown names in {text!r}: {sorted(map(str, unknown))}")
    poly = sp.Poly(expr, *basis_symbols)
    if not poly.is_zero and (poly.total_degree() > 1 or poly.coeff_monomial(1) != 0):
        raise LatticeError(f"expression is not a linear combination of classes: {text!r}")
    return _wrap(poly.coeff_monomial(s) for s in basis_symbols)


@dataclass(frozen=True)
class ThreefoldCurve:
    """A curve on a threefold, stored as its intersection vector against the basis."""
    name: str
    functional: tuple
    model: str = "base"

    def dot(self, divisor: PolyClass):
        if len(self.functional) != len(divisor):
            raise LatticeError(f"curve {self.name}: dimension mismatch")
        return sp.expand(sum(f * c for f, c in zip(self.functional, divisor.coords)))

    def negated(self) -> "ThreefoldCurve":
        return ThreefoldCurve(f"-{self.name}", tuple(-f for f in self.functional), self.model)


@dataclass
class ThreefoldGeometry:
    name: str
    basis: tuple[str, ...]
    triples: dict[tuple[int, int, int], Rational]
    anticanonical: DivisorClass
    anticanonical_cube_expected: Optional[Rational] = None
    test_curves: dict[str, ThreefoldCurve] = field(default_factory=dict)
    divisors: dict[str, DivisorClass] = field(default_factory=dict)
    family: str = ""
    description: str = ""

    def __post_init__(self):
        normalized = {}
        for key, value in self.triples.items():
            value = sp.Rational(value)
            if value == 0:
                continue
            sorted_key = tuple(sorted(key))
            if sorted_key in normalized and normalized[sorted_key] != value:
                raise LatticeError(f"{self.name}: conflicting triple entries for {sorted_key}")
            normalized[sorted_key] = value
        self.triples = normalized
        if len(self.anticanonical) != len(self.basis):
            raise LatticeError(f"{self.name}: anticanonical class has wrong length")

    @property
    def rank(self) -> int:
        return len(self.basis)

    def index(self, name: str) -> int:
        try:
            return self.basis.index(name)
        except ValueError as e:
            raise LatticeError(f"{self.name}: unknown basis divisor {name}") from e

    def triple(self, i: int, j: int, k: int) -> Rational:
        return self.triples.get(tuple(sorted((i, j, k))), Rational(0))

    def class_of(self, text: str) -> PolyClass:
        return parse_class(text, self.basis, self.divisors)

    def basis_class(self, name: str) -> DivisorClass:
        return unit_class(self.rank, self.index(name))

    def curves_for(self, model: str = "base") -> list[ThreefoldCurve]:
        return [c for c in self.test_curves.values() if c.model == model]

    def anticanonical_cube(self) -> Rational:
        return Rational(volume_poly(self, self.anticanonical).eval(0))


def triple_eval(g: ThreefoldGeometry, d1: PolyClass, d2: PolyClass, d3: PolyClass) -> UniPoly:
    """
    Trilinear extension of the stored intersection table.

    Returns:
        A polynomial in u (constant for constant classes)
    """
    for d in (d1, d2, d3):
        if len(d) != g.rank:
            raise LatticeError(f"{g.name}: class of length {len(d)} on a rank {g.rank} lattice")
    total = sp.Integer(0)
    for key, value in g.triples.items():
        for i, j, k in set(itertools.permutations(key)):
            c1, c2, c3 = d1.coords[i], d2.coords[j], d3.coords[k]
            if c1 == 0 or c2 == 0 or c3 == 0:
                continue
            total += value * c1 * c2 * c3
    return uni(total)


def volume_poly(g: ThreefoldGeometry, p: PolyClass) -> UniPoly:
    return triple_eval(g, p, p, p)


def _extend(cls: DivisorClass, value=0) -> DivisorClass:
    return DivisorClass(cls.coords + (sp.Rational(value),))


def blowup_along_curve(
    g: ThreefoldGeometry,
    name: str,
    genus: int,
    degrees: dict[str, Rational],
    canonical_dot: Optional[Rational] = None,
) -> ThreefoldGeometry:
    """
    Blow up a smooth curve C and add its exceptional divisor as a new basis element.

    Args:
        g: ambient geometry
        name: name of the exceptional divisor
        genus: genus of C
        degrees: D.C for the basis divisors D that meet C (others are 0)
        canonical_dot: K.C if known; checked against the anticanonical class

    Returns:
        Geometry with E^3 = -deg N, (pi*D).E^2 = -D.C and (pi*D).(pi*D').E = 0
    """
    if name in g.basis or name in RESERVED_NAMES:
        raise LatticeError(f"{g.name}: basis name {name} already used or reserved")
    unknown = set(degrees) - set(g.basis)
    if unknown:
        raise LatticeError(f"{g.name}: blowup center {name} refers to unknown divisors {sorted(unknown)}")

    dots = [sp.Rational(degrees.get(b, 0)) for b in g.basis]
    anticanonical_dot = sum(a * d for a, d in zip(g.anticanonical.coords, dots))
    if canonical_dot is not None and sp.Rational(canonical_dot) != -anticanonical_dot:
        raise LatticeError(
            f"{g.name}: inconsistent center {name}: K.C={canonical_dot} but -K.C={anticanonical_dot}"
        )
    normal_degree = anticanonical_dot + 2 * genus - 2

    n = g.rank
    triples = dict(g.triples)
    triples[(n, n, n)] = -normal_degree
    for i, d in enumerate(dots):
        if d != 0:
            triples[(i, n, n)] = -d

    exceptional = unit_class(n + 1, n)
    logger.debug(f"Blowup of {g.name} along {name}: E^3={-normal_degree}")
    return replace(
        g,
        name=f"{g.name}+{name}",
        basis=g.basis + (name,),
        triples=triples,
        anticanonical=_extend(g.anticanonical) - exceptional,
        anticanonical_cube_expected=None,
        test_curves={},
        divisors={},
    )


def blowup_at_point(g: ThreefoldGeometry, name: str) -> ThreefoldGeometry:
    """Blow up a smooth point: E^3 = 1, every product with pullbacks vanishes."""
    if name in g.basis or name in RESERVED_NAMES:
        raise LatticeError(f"{g.name}: basis name {name} already used or reserved")
    n = g.rank
    triples = dict(g.triples)
    triples[(n, n, n)] = Rational(1)
    exceptional = unit_class(n + 1, n)
    logger.debug(f"Blowup of {g.name} at point {name}")
    return replace(
        g,
        name=f"{g.name}+{name}",
        basis=g.basis + (name,),
        triples=triples,
        anticanonical=_extend(g.anticanonical) - 2 * exceptional,
        anticanonical_cube_expected=None,
        test_curves={},
        divisors={},
    )


@dataclass(frozen=True)
class SurfaceCurve:
    name: str
    cls: DivisorClass
    cone: bool = True


@dataclass(frozen=True)
class RestrictionMap:
    """Linear map from the threefold basis to the surface basis, plus the class of S."""
    geometry: str
    divisor: DivisorClass
    images: tuple[DivisorClass, ...]

    def apply(self, d: PolyClass) -> PolyClass:
        if len(d) != len(self.images):
            raise LatticeError(f"restriction expects {len(self.images)} coordinates, got {len(d)}")
        width = len(self.images[0]) if self.images else 0
        result = [sp.Integer(0)] * width
        for c, image in zip(d.coords, self.images):
            if c == 0:
                continue
            for k in range(width):
                result[k] += c * image.coords[k]
        return _wrap(result)


@dataclass
class SurfaceGeometry:
    name: str
    basis: tuple[str, ...]
    gram: sp.Matrix
    curves: dict[str, SurfaceCurve]
    cone_complete: bool = False
    restriction: Optional[RestrictionMap] = None
    family: str = ""
    description: str = ""

    def __post_init__(self):
        n = len(self.basis)
        if self.gram.shape != (n, n):
            raise LatticeError(f"{self.name}: Gram matrix must be {n}x{n}")
        if self.gram != self.gram.T:
            raise LatticeError(f"{self.name}: Gram matrix is not symmetric")
        for curve in self.curves.values():
            if len(curve.cls) != n:
                raise LatticeError(f"{self.name}: curve {curve.name} has wrong length")
            if curve.cone and self.dot(curve.cls, curve.cls) > 0:
                raise LatticeError(f"{self.name}: cone curve {curve.name} has positive self-intersection")

    @property
    def rank(self) -> int:
        return len(self.basis)

    def dot(self, d1: PolyClass, d2: PolyClass):
        if len(d1) != self.rank or len(d2) != self.rank:
            raise LatticeError(f"{self.name}: dimension mismatch")
        total = sp.Integer(0)
        for i, j in itertools.product(range(self.rank), repeat=2):
            g = self.gram[i, j]
            if g != 0 and d1.coords[i] != 0 and d2.coords[j] != 0:
                total += g * d1.coords[i] * d2.coords[j]
        return sp.expand(total)

    def cone_curves(self) -> list[SurfaceCurve]:
        return [c for c in self.curves.values() if c.cone]

    def negative_curves(self) -> list[SurfaceCurve]:
        """Cone curves allowed in a Zariski support; 0-curves never are."""
        return [c for c in self.cone_curves() if self.dot(c.cls, c.cls) < 0]

    def curve(self, name: str) -> SurfaceCurve:
        try:
            return self.curves[name]
        except KeyError as e:
            raise LatticeError(f"{self.name}: unknown curve {name}") from e

    def class_of(self, text: str) -> PolyClass:
        named = {name: c.cls for name, c in self.curves.items()}
        return parse_class(text, self.basis, named)


def check_restriction(g: ThreefoldGeometry, s: SurfaceGeometry, r: RestrictionMap) -> bool:
    """
    True iff D1.D2.S on the threefold equals res(D1).res(D2) on the surface
    for every pair of basis divisors.
    """
    if len(r.images) != g.rank or len(r.divisor) != g.rank:
        raise LatticeError(f"restriction to {s.name} does not match the basis of {g.name}")
    if any(len(image) != s.rank for image in r.images):
        raise LatticeError(f"restriction images do not match the basis of {s.name}")
    for i, j in itertools.combinations_with_replacement(range(g.rank), 2):
        threefold = triple_eval(g, g.basis_class(g.basis[i]), g.basis_class(g.basis[j]), r.divisor).eval(0)
        surface = s.dot(r.images[i], r.images[j])
        if threefold != surface:
            logger.debug(
                f"Restriction {g.name} -> {s.name} fails at ({g.basis[i]}, {g.basis[j]}): {threefold} != {surface}"
            )
            return False
    return True


GRADING_SEARCH = 4


def positive_grading(generators: list[DivisorClass]) -> Optional[tuple[int, ...]]:
    """
    Positive integer weights c_j with sum(c_j * k_j) determined by sum(k_j * g_j).

    That holds iff c is orthogonal to every linear relation among the
    generators. Weights up to GRADING_SEARCH are tried in lexicographic order.
    """
    if not generators:
        return ()
    relations = sp.Matrix([list(g.coords) for g in generators]).T.nullspace()
    for weights in itertools.product(range(1, GRADING_SEARCH + 1), repeat=len(generators)):
        if all(sum(w * z for w, z in zip(weights, relation)) == 0 for relation in relations):
            return weights
    return None


def monoid_decompose(target: DivisorClass, generators: list[DivisorClass]) -> Optional[tuple[int, ...]]:
    """
    Express target as a nonnegative integer combination of generators.

    A positive grading c bounds every solution: sum(c_j * k_j) equals the
    degree of the target, so the search is finite and exhaustive for any
    signs of the generator coordinates. Coefficients are enumerated in
    lexicographic order.

    Returns:
        The first coefficient tuple found, or None

    Raises:
        LatticeError: non-integral classes, or generators admitting no positive grading
    """
    vectors = [target] + list(generators)
    for vector in vectors:
        vector._check(target)
        if any(not sp.Rational(c).is_integer for c in vector.coords):
            raise LatticeError("monoid decomposition needs integral classes")

    grading = positive_grading(generators)
    if grading is None:
        raise LatticeError("generators admit no positive grading, the search would not terminate")
    if not generators:
        return () if target.is_zero() else None

    # w 满足 G^T w = c, 于是 w.target = sum c_j k_j
    transposed = sp.Matrix([list(g.coords) for g in generators])
    solution, params = transposed.gauss_jordan_solve(sp.Matrix(grading))
    w = solution.subs({p: 0 for p in params})
    degree = sum((wi * ti for wi, ti in zip(w, target.coords)), sp.Integer(0))
    if degree < 0:
        return None
    logger.debug(f"Monoid search with grading {grading}, target degree {degree}")

    goal = tuple(sp.Rational(c) for c in target.coords)
    coords = [tuple(sp.Rational(c) for c in g.coords) for g in generators]

    def search(j: int, budget, partial: tuple) -> Optional[tuple[int, ...]]:
        if j == len(coords):
            return () if partial == goal else None
        for k in range(int(sp.floor(budget / grading[j])) + 1):
            step = tuple(p + k * c for p, c in zip(partial, coords[j]))
            rest = search(j + 1, budget - k * grading[j], step)
            if rest is not None:
                return (k,) + rest
        return None

    return search(0, degree, tuple(sp.Integer(0) for _ in goal))
