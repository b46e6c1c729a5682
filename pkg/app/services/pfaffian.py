"""
Pfaffian systems of 5x5 skew-symmetric matrices

A 4x4 Pfaffian of the rows/columns i<j<k<l is m_ij*m_kl - m_ik*m_jl + m_il*m_jk.
``pfaffians_5`` returns the raw Pfaffians obtained by deleting row and column
0..4. The smoothing family below labels them Pf1..Pf5 with the fixed
convention ``SMOOTHING_LABELS`` (deleted index, scale).
"""
import itertools
import logging
import random
from dataclasses import dataclass

import sympy as sp
from sympy import Poly, QQ, Rational

from app.services.errors import ExactError

logger = logging.getLogger(__name__)

x1, x2, x3, y1, y2, y3, z1, z2, z3 = sp.symbols("x1 x2 x3 y1 y2 y3 z1 z2 z3")
a, b = sp.symbols("a b")

COORDINATES = (x1, x2, x3, y1, y2, y3, z1, z2, z3)
GENERATORS = COORDINATES + (a, b)

# Pf_n = scale * (Pfaffian with row/column `deleted` removed)
SMOOTHING_LABELS = (
    (2, Rational(1)),
    (0, Rational(1)),
    (1, Rational(1)),
    (4, Rational(-1, 2)),
    (3, Rational(-1, 2)),
)

MultiPoly = Poly


def multipoly(expr) -> MultiPoly:
    """Canonical sparse form over QQ in x1..z3, a, b."""
    if isinstance(expr, Poly):
        expr = expr.as_expr()
    return Poly(sp.expand(sp.sympify(expr)), *GENERATORS, domain=QQ)


def smoothing_matrix(a_value=a, b_value=b) -> list[list]:
    """
    Skew-symmetric matrix whose Pfaffians cut out the smoothing family.

    The last row is the negated last column, (-x2, -y2, -z2, -a, 0).
    """
    upper = {
        (0, 1): -(2 * x1 * y1 + x2 * y3 + x3 * y2),
        (0, 2): 2 * x1 * z1 - x2 * z3 - x3 * z2,
        (0, 3): b_value * x3,
        (0, 4): x2,
        (1, 2): -(2 * y1 * z1 + y2 * z3 + y3 * z2),
        (1, 3): b_value * y3,
        (1, 4): y2,
        (2, 3): b_value * z3,
        (2, 4): z2,
        (3, 4): a_value,
    }
    matrix = [[sp.Integer(0)] * 5 for _ in range(5)]
    for (i, j), entry in upper.items():
        matrix[i][j] = sp.sympify(entry)
        matrix[j][i] = -sp.sympify(entry)
    return matrix


def _check_skew(matrix) -> None:
    if len(matrix) != 5 or any(len(row) != 5 for row in matrix):
        raise ExactError("expected a 5x5 matrix")
    for i in range(5):
        if sp.expand(matrix[i][i]) != 0:
            raise ExactError(f"diagonal entry ({i + 1},{i + 1}) is not zero")
        for j in range(i + 1, 5):
            if sp.expand(matrix[i][j] + matrix[j][i]) != 0:
                raise ExactError(f"entries ({i + 1},{j + 1}) and ({j + 1},{i + 1}) are not opposite")


def pfaffian_4(matrix, rows: tuple[int, int, int, int]):
    i, j, k, l = rows
    m = matrix
    return m[i][j] * m[k][l] - m[i][k] * m[j][l] + m[i][l] * m[j][k]


def pfaffians_5(matrix) -> list[MultiPoly]:
    """
    The five 4x4 diagonal Pfaffians of a 5x5 skew-symmetric matrix.

    Args:
        matrix: 5x5 nested list of sympy expressions

    Returns:
        Raw Pfaffians, the i-th one with row/column i deleted
    """
    _check_skew(matrix)
    result = []
    for deleted in range(5):
        rows = tuple(r for r in range(5) if r != deleted)
        result.append(multipoly(pfaffian_4(matrix, rows)))
    return result


def labelled_pfaffians(raw: list[MultiPoly], labels=SMOOTHING_LABELS) -> list[MultiPoly]:
    return [raw[deleted] * scale for deleted, scale in labels]


def smoothing_pfaffians(a_value=a, b_value=b) -> list[MultiPoly]:
    """Pf1..Pf5 of the smoothing family, as a 0-indexed list."""
    return labelled_pfaffians(pfaffians_5(smoothing_matrix(a_value, b_value)))


def poly_identity(lhs, rhs) -> bool:
    """True iff lhs - rhs expands to the zero polynomial."""
    return (multipoly(lhs) - multipoly(rhs)).is_zero


# Equations of the special member a=0, b=1, as written in its defining system
NON_TORIC_EQUATIONS = (
    x2 * y3 - x3 * y2,
    y2 * z3 - y3 * z2,
    x2 * z3 - x3 * z2,
    x1 * y1 * z3 + x1 * y3 * z1 + x3 * y1 * z1 + x3 * y2 * z3,
    x1 * y1 * z2 + x1 * y2 * z1 + x2 * y1 * z1 + x2 * y3 * z2,
)


def check_specialization() -> list[bool]:
    """Compare Pf1..Pf5 at a=0, b=1 with the non-toric equations, one verdict each."""
    special = smoothing_pfaffians(0, 1)
    return [poly_identity(pf, eq) for pf, eq in zip(special, NON_TORIC_EQUATIONS)]


@dataclass(frozen=True)
class Relation:
    """
    scale * Pf[target] = prefactor * sum(sign * variable * Pf[index] for each term)

    Pfaffian indices are 1-based, as in Pf1..Pf5.
    """
    scale: sp.Expr
    target: int
    prefactor: sp.Expr
    terms: tuple[tuple[int, sp.Symbol, int], ...]

    def sides(self, pfaffians: list[MultiPoly]) -> tuple:
        lhs = self.scale * pfaffians[self.target - 1].as_expr()
        rhs = self.prefactor * sum(
            sign * variable * pfaffians[index - 1].as_expr() for sign, variable, index in self.terms
        )
        return lhs, rhs

    def holds(self, pfaffians: list[MultiPoly]) -> bool:
        lhs, rhs = self.sides(pfaffians)
        return poly_identity(lhs, rhs)

    def key(self) -> tuple:
        return tuple(sorted((sign, str(variable), index) for sign, variable, index in self.terms))

    def render(self) -> str:
        body = ""
        for n, (sign, variable, index) in enumerate(self.terms):
            term = f"{variable}*Pf{index}"
            if n == 0:
                body = term if sign > 0 else f"-{term}"
            else:
                body += f" + {term}" if sign > 0 else f" - {term}"
        return f"{self.scale}*Pf{self.target} = {self.prefactor}*({body})"


# The two relations stated alongside the smoothing family
STATED_RELATIONS = {
    "Pf5": Relation(2 * a, 5, sp.Integer(-1), ((1, z2, 1), (-1, y2, 3), (1, x2, 2))),
    "Pf4": Relation(2 * a, 4, -b, ((1, z2, 1), (-1, y3, 3), (1, z3, 1))),
}


def _random_point(rng: random.Random) -> dict:
    return {g: Rational(rng.randint(-40, 40), rng.randint(1, 13)) for g in GENERATORS}


def search_relation_variants(relation: Relation, pfaffians: list[MultiPoly], seed: int = 7) -> list[Relation]:
    """
    Search the relations obtained by replacing each (variable, Pfaffian) pair of
    the stated relation while keeping its signs, scale and prefactor.

    Only Pfaffians whose degree fits the homogeneity of the target take part.
    Candidates are filtered numerically at random rational points and then
    confirmed by exact expansion.
    """
    target_degree = (relation.scale * pfaffians[relation.target - 1].as_expr()).as_poly(*GENERATORS).total_degree()
    prefactor_degree = sp.Poly(relation.prefactor, *GENERATORS).total_degree()
    indices = [
        n + 1 for n, pf in enumerate(pfaffians)
        if not pf.is_zero and pf.total_degree() + 1 + prefactor_degree == target_degree
    ]
    candidates = [(variable, index) for variable in COORDINATES for index in indices]
    logger.debug(f"Relation search over {len(candidates) ** len(relation.terms)} variants, Pfaffians {indices}")

    rng = random.Random(seed)
    points = [_random_point(rng) for _ in range(3)]
    values = [
        {
            "pf": [pf.as_expr().subs(point) for pf in pfaffians],
            "point": point,
            "scale": relation.scale.subs(point),
            "prefactor": relation.prefactor.subs(point),
        }
        for point in points
    ]

    found: dict[tuple, Relation] = {}
    for choice in itertools.product(candidates, repeat=len(relation.terms)):
        terms = tuple(
            (sign, variable, index)
            for (sign, _, _), (variable, index) in zip(relation.terms, choice)
        )
        variant = Relation(relation.scale, relation.target, relation.prefactor, terms)
        if variant.key() in found:
            continue
        if not all(_holds_at(variant, value) for value in values):
            continue
        if variant.holds(pfaffians):
            found[variant.key()] = variant
    logger.info(f"Relation search for Pf{relation.target}: {len(found)} variant(s) hold")
    return sorted(found.values(), key=lambda r: r.key())


def _holds_at(relation: Relation, value: dict) -> bool:
    point = value["point"]
    pf = value["pf"]
    lhs = value["scale"] * pf[relation.target - 1]
    rhs = value["prefactor"] * sum(
        sign * point[variable] * pf[index - 1] for sign, variable, index in relation.terms
    )
    return lhs == rhs
