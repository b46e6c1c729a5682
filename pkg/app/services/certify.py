"""
Certificates and their verification

Three kinds of certificate are supported:

* divisorial: the decomposition P(u) + N(u) of  A - uD  over u-chambers tiling
  [0, tau], from which S(D) and beta(D) = A_X(D) - S(D) follow;
* flag: a surface S = D, a curve C on it and the decomposition of P(u)|_S - vC
  over (u, v)-chambers, from which S(W;C), F_P, S(W;P) and a delta bound follow;
* upper_bound: a nef interval plus a pseudo-effectivity witness, giving an
  upper estimate for S and hence a lower bound for beta.

Verification never raises on a failed check: every check is reported by name.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import sympy as sp
from sympy import Rational

from app.models.schemas import CheckResult, InvariantReport, PrintedDiscrepancy
from app.services.exact import (
    AffineUV,
    Chamber2D,
    Sign,
    U,
    V,
    UniPoly,
    bi,
    format_rational,
    integrate_chamber,
    integrate_uni,
    sign_on_interval,
    uni,
)
from app.services.lattice import (
    DivisorClass,
    PolyClass,
    SurfaceGeometry,
    ThreefoldCurve,
    ThreefoldGeometry,
    check_restriction,
    triple_eval,
    volume_poly,
    zero_class,
)

logger = logging.getLogger(__name__)

DIMENSION = 3
TAU_FACTOR = Rational(DIMENSION, DIMENSION + 1)

VERDICT_BETA_POSITIVE = "beta>0"
VERDICT_BETA_NONPOSITIVE = "beta<=0"
VERDICT_DELTA = "delta>1"
VERDICT_STRICT_REMARK = "pass-by-strict-remark"
VERDICT_INCONCLUSIVE = "inconclusive"
VERDICT_BETA_BOUND = "beta>=bound"


# ---------------------------------------------------------------------------
# Certificate model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NegativeTerm:
    """coefficient(u) * component"""
    name: str
    cls: DivisorClass
    coefficient: sp.Expr


@dataclass(frozen=True)
class UChamber:
    u_lo: Rational
    u_hi: Rational
    positive: PolyClass
    negative: tuple[NegativeTerm, ...] = ()
    flops: tuple[ThreefoldCurve, ...] = ()
    volume: Optional[UniPoly] = None

    def negative_class(self, rank: int) -> PolyClass:
        total = zero_class(rank)
        for term in self.negative:
            total = total + term.coefficient * term.cls
        return total

    def contains(self, lo, hi) -> bool:
        return self.u_lo <= lo and hi <= self.u_hi


@dataclass
class DivisorialCertificate:
    name: str
    family: str
    geometry: ThreefoldGeometry
    divisor_name: str
    divisor: DivisorClass
    polarization: DivisorClass
    log_discrepancy: Rational
    tau: Rational
    chambers: list[UChamber]
    expected_S: Rational
    expected_beta: Rational
    printed: dict[str, Rational] = field(default_factory=dict)
    note: str = ""
    kind: str = "divisorial"

    def chamber_at(self, lo, hi) -> Optional[UChamber]:
        for chamber in self.chambers:
            if chamber.contains(lo, hi):
                return chamber
        return None


@dataclass(frozen=True)
class VChamber:
    v_lo: AffineUV
    v_hi: AffineUV
    positive: PolyClass
    negative: tuple[tuple[str, AffineUV], ...] = ()
    ord: AffineUV = AffineUV()


@dataclass(frozen=True)
class FlagUChamber:
    u_lo: Rational
    u_hi: Rational
    t: AffineUV
    v_chambers: tuple[VChamber, ...]
    restricted_negative: tuple[tuple[str, sp.Expr], ...] = ()
    restricted: Optional[PolyClass] = None
    d: Optional[sp.Expr] = None


@dataclass
class FlagCertificate:
    name: str
    family: str
    divisorial: DivisorialCertificate
    surface: SurfaceGeometry
    curve_name: str
    chambers: list[FlagUChamber]
    expected_S_curve: Rational
    expected_F_P: Optional[Rational] = None
    expected_S_point: Optional[Rational] = None
    printed: dict[str, Rational] = field(default_factory=dict)
    note: str = ""
    kind: str = "flag"

    @property
    def curve(self) -> DivisorClass:
        return self.surface.curve(self.curve_name).cls

    @property
    def has_point_data(self) -> bool:
        return self.expected_F_P is not None


@dataclass
class UpperBoundCertificate:
    name: str
    family: str
    geometry: ThreefoldGeometry
    divisor_name: str
    divisor: DivisorClass
    polarization: DivisorClass
    log_discrepancy: Rational
    nef_end: Rational
    tau_bound: Rational
    expected_S_bound: Rational
    expected_beta_bound: Rational
    claimed_beta: Optional[Rational] = None
    volume: Optional[UniPoly] = None
    printed: dict[str, Rational] = field(default_factory=dict)
    note: str = ""
    kind: str = "upper_bound"

    @property
    def moving_class(self) -> PolyClass:
        return self.polarization - U * self.divisor


Certificate = Union[DivisorialCertificate, FlagCertificate, UpperBoundCertificate]


# ---------------------------------------------------------------------------
# Check bookkeeping
# ---------------------------------------------------------------------------

class _Checks:
    def __init__(self, certificate: str):
        self.certificate = certificate
        self.results: list[CheckResult] = []

    def run(self, name: str, check: Callable[[], list[str]]) -> bool:
        try:
            failures = check()
        except Exception as e:
            logger.error(f"Check {name} on {self.certificate} raised: {str(e)}", exc_info=True)
            failures = [f"{type(e).__name__}: {e}"]
        passed = not failures
        detail = ""
        if failures:
            detail = failures[0] if len(failures) == 1 else f"{failures[0]} (+{len(failures) - 1} more)"
        logger.debug(f"{self.certificate}: {name} {'ok' if passed else 'FAILED ' + detail}")
        self.results.append(CheckResult(name=name, passed=passed, detail=detail))
        return passed

    def expect(self, name: str, computed: Optional[Rational], expected: Optional[Rational], deltas: dict) -> None:
        def check() -> list[str]:
            if computed is None:
                return ["value could not be computed"]
            if computed != expected:
                deltas[name.removeprefix("expected-")] = format_rational(expected - computed)
                return [f"computed {format_rational(computed)}, expected {format_rational(expected)}"]
            return []
        self.run(name, check)


def _interval(lo, hi) -> str:
    return f"[{format_rational(lo)},{format_rational(hi)}]"


def _tiling(pieces: list[tuple], start, end) -> list[str]:
    failures = []
    if not pieces:
        return ["no chambers"]
    if pieces[0][0] != start:
        failures.append(f"first chamber starts at {format_rational(pieces[0][0])}, not {format_rational(start)}")
    if pieces[-1][1] != end:
        failures.append(f"last chamber ends at {format_rational(pieces[-1][1])}, not {format_rational(end)}")
    for lo, hi in pieces:
        if not lo < hi:
            failures.append(f"empty chamber {_interval(lo, hi)}")
    for (_, hi), (lo, _) in zip(pieces, pieces[1:]):
        if hi != lo:
            failures.append(f"gap or overlap between {format_rational(hi)} and {format_rational(lo)}")
    return failures


def _is_zero(expr) -> bool:
    return sp.expand(expr) == 0


# ---------------------------------------------------------------------------
# Divisorial certificates
# ---------------------------------------------------------------------------

def polarization_cube(geometry: ThreefoldGeometry, polarization: DivisorClass) -> Rational:
    return Rational(volume_poly(geometry, polarization).eval(0))


def chamber_volume(geometry: ThreefoldGeometry, chamber: UChamber) -> UniPoly:
    """P^3, minus (P.r)^3 for every flopped curve r."""
    volume = volume_poly(geometry, chamber.positive)
    for curve in chamber.flops:
        volume = volume - uni(curve.dot(chamber.positive) ** 3)
    return volume


def nef_test_curves(geometry: ThreefoldGeometry, chamber: UChamber) -> list[ThreefoldCurve]:
    if chamber.flops:
        return geometry.curves_for("flop") + [curve.negated() for curve in chamber.flops]
    return geometry.curves_for("base")


def eval_S_divisor(cert: DivisorialCertificate) -> tuple[Rational, Rational]:
    """
    S = (1/A^3) * sum of the chamber integrals of vol(u), beta = A_X - S.

    Returns:
        (S, beta)
    """
    g = cert.geometry
    total = sum(
        (integrate_uni(chamber_volume(g, chamber), chamber.u_lo, chamber.u_hi) for chamber in cert.chambers),
        Rational(0),
    )
    s_value = total / polarization_cube(g, cert.polarization)
    return s_value, cert.log_discrepancy - s_value


def bound_S_by_tau(cert: Certificate) -> Rational:
    """
    The bound S <= n/(n+1) * tau with n = 3.

    For an upper-bound certificate the sharper of this bound and the
    certificate's own estimate is returned.
    """
    if isinstance(cert, UpperBoundCertificate):
        return min(TAU_FACTOR * cert.tau_bound, upper_bound_estimate(cert))
    if isinstance(cert, FlagCertificate):
        cert = cert.divisorial
    return TAU_FACTOR * cert.tau


def verify_divisorial(cert: DivisorialCertificate) -> InvariantReport:
    """
    Run the consistency checks of a divisorial certificate and evaluate it.

    Args:
        cert: the certificate

    Returns:
        InvariantReport with tau, S_S, beta and one CheckResult per named check
    """
    g = cert.geometry
    checks = _Checks(cert.name)
    target = cert.polarization - U * cert.divisor
    chambers = cert.chambers

    checks.run("tiling", lambda: _tiling([(c.u_lo, c.u_hi) for c in chambers], Rational(0), cert.tau))

    def class_identity() -> list[str]:
        return [
            f"P + N differs from A - uD on {_interval(c.u_lo, c.u_hi)}"
            for c in chambers
            if not (c.positive + c.negative_class(g.rank)).same_as(target)
        ]

    def nefness() -> list[str]:
        failures = []
        for c in chambers:
            for curve in nef_test_curves(g, c):
                value = uni(curve.dot(c.positive))
                if sign_on_interval(value, c.u_lo, c.u_hi) != Sign.NONNEGATIVE:
                    failures.append(f"P.{curve.name} = {value.as_expr()} is negative on {_interval(c.u_lo, c.u_hi)}")
        return failures

    def orthogonality() -> list[str]:
        failures = []
        for c in chambers:
            for term in c.negative:
                value = triple_eval(g, c.positive, c.positive, term.cls)
                if not value.is_zero:
                    failures.append(f"P^2.{term.name} = {value.as_expr()} on {_interval(c.u_lo, c.u_hi)}")
        return failures

    def continuity() -> list[str]:
        return [
            f"P jumps at u={format_rational(left.u_hi)}"
            for left, right in zip(chambers, chambers[1:])
            if not left.positive.at(left.u_hi).same_as(right.positive.at(left.u_hi))
        ]

    def negative_nonnegative() -> list[str]:
        failures = []
        for c in chambers:
            for term in c.negative:
                if sign_on_interval(uni(term.coefficient), c.u_lo, c.u_hi) != Sign.NONNEGATIVE:
                    failures.append(f"coefficient of {term.name} is negative on {_interval(c.u_lo, c.u_hi)}")
        return failures

    volumes = []

    def volume_continuity() -> list[str]:
        volumes.extend(chamber_volume(g, c) for c in chambers)
        return [
            f"volume jumps at u={format_rational(left.u_hi)}"
            for (left, vl), vr in zip(zip(chambers, volumes), volumes[1:])
            if vl.eval(left.u_hi) != vr.eval(left.u_hi)
        ]

    def volume_vanishes() -> list[str]:
        value = chamber_volume(g, chambers[-1]).eval(cert.tau)
        return [] if value == 0 else [f"vol(tau) = {format_rational(value)}"]

    def volume_match() -> list[str]:
        return [
            f"volume on {_interval(c.u_lo, c.u_hi)} is {chamber_volume(g, c).as_expr()}, declared {c.volume.as_expr()}"
            for c in chambers
            if c.volume is not None and chamber_volume(g, c) != c.volume
        ]

    def derivative_identity() -> list[str]:
        failures = []
        for c in chambers:
            if c.flops:
                continue
            derivative = volume_poly(g, c.positive).diff(U)
            expected = -3 * triple_eval(g, c.positive, c.positive, cert.divisor)
            if derivative != expected:
                failures.append(f"d(P^3)/du != -3 P^2.D on {_interval(c.u_lo, c.u_hi)}")
        return failures

    checks.run("class-identity", class_identity)
    checks.run("nef", nefness)
    checks.run("orthogonality", orthogonality)
    checks.run("continuity", continuity)
    checks.run("negative-nonneg", negative_nonnegative)
    checks.run("volume-continuity", volume_continuity)
    checks.run("volume-vanishes", volume_vanishes)
    checks.run("volume-match", volume_match)
    checks.run("derivative-identity", derivative_identity)

    s_value = beta = None
    try:
        s_value, beta = eval_S_divisor(cert)
    except Exception as e:
        logger.error(f"Could not evaluate S for {cert.name}: {str(e)}", exc_info=True)

    def tau_bound() -> list[str]:
        bound = bound_S_by_tau(cert)
        if s_value is None or s_value > bound:
            return [f"S exceeds (3/4)tau = {format_rational(bound)}"]
        return []

    def beta_consistency() -> list[str]:
        if cert.expected_beta != cert.log_discrepancy - cert.expected_S:
            return ["expected_beta differs from A - expected_S"]
        return []

    deltas: dict[str, str] = {}
    checks.run("tau-bound", tau_bound)
    checks.run("beta-consistency", beta_consistency)
    checks.expect("expected-S", s_value, cert.expected_S, deltas)
    checks.expect("expected-beta", beta, cert.expected_beta, deltas)

    report = InvariantReport(
        family=cert.family,
        certificate=cert.name,
        kind=cert.kind,
        tau=format_rational(cert.tau),
        S_S=format_rational(s_value) if s_value is not None else None,
        beta=format_rational(beta) if beta is not None else None,
        checks=checks.results,
        deltas=deltas,
        note=cert.note,
    )
    report.discrepancies = printed_discrepancies(cert, {"S": s_value, "beta": beta})
    logger.info(f"Verified divisorial certificate {cert.family}/{cert.name}: valid={report.valid}")
    return report


# ---------------------------------------------------------------------------
# Flag certificates
# ---------------------------------------------------------------------------

def restricted_positive(cert: FlagCertificate, chamber: FlagUChamber) -> PolyClass:
    """P(u)|_S computed from the divisorial certificate."""
    source = cert.divisorial.chamber_at(chamber.u_lo, chamber.u_hi)
    if source is None:
        raise ValueError(f"no divisorial chamber contains {_interval(chamber.u_lo, chamber.u_hi)}")
    return cert.surface.restriction.apply(source.positive)


def curve_order(cert: FlagCertificate, chamber: FlagUChamber) -> sp.Expr:
    """d(u): the coefficient of the flag curve in N(u)|_S."""
    for name, coefficient in chamber.restricted_negative:
        if name == cert.curve_name:
            return coefficient
    return sp.Integer(0)


def v_region(chamber: FlagUChamber, vch: VChamber) -> Chamber2D:
    return Chamber2D(chamber.u_lo, chamber.u_hi, vch.v_lo, vch.v_hi)


def v_negative_class(s: SurfaceGeometry, vch: VChamber) -> PolyClass:
    total = zero_class(s.rank)
    for name, coefficient in vch.negative:
        total = total + coefficient.as_expr() * s.curve(name).cls
    return total


def _at(expr, point) -> Rational:
    u, v = point
    return sp.sympify(expr).subs({U: u, V: v})


def _normalizer(cert: FlagCertificate) -> Rational:
    d = cert.divisorial
    return Rational(DIMENSION) / polarization_cube(d.geometry, d.polarization)


def eval_S_curve(cert: FlagCertificate) -> Rational:
    """
    S(W;C) = 3/A^3 * ( sum of int d(u) P(u,0)^2 du + sum of int int P(u,v)^2 dv du )
    """
    s = cert.surface
    total = Rational(0)
    for chamber in cert.chambers:
        first = chamber.v_chambers[0]
        at_zero = first.positive.subs({V: 0})
        total += integrate_uni(uni(curve_order(cert, chamber) * s.dot(at_zero, at_zero)), chamber.u_lo, chamber.u_hi)
        for vch in chamber.v_chambers:
            total += integrate_chamber(bi(s.dot(vch.positive, vch.positive)), v_region(chamber, vch))
    return _normalizer(cert) * total


def eval_F_P(cert: FlagCertificate) -> Rational:
    """F_P = 6/A^3 * sum of int int (P.C) * ord_P dv du"""
    s = cert.surface
    total = Rational(0)
    for chamber in cert.chambers:
        for vch in chamber.v_chambers:
            if vch.ord == AffineUV():
                continue
            integrand = s.dot(vch.positive, cert.curve) * vch.ord.as_expr()
            total += integrate_chamber(bi(integrand), v_region(chamber, vch))
    return 2 * _normalizer(cert) * total


def eval_S_point(cert: FlagCertificate) -> Rational:
    """S(W;P) = 3/A^3 * sum of int int (P.C)^2 dv du + F_P"""
    s = cert.surface
    total = Rational(0)
    for chamber in cert.chambers:
        for vch in chamber.v_chambers:
            integrand = s.dot(vch.positive, cert.curve) ** 2
            total += integrate_chamber(bi(integrand), v_region(chamber, vch))
    return _normalizer(cert) * total + eval_F_P(cert)


def delta_bound(values: list[Optional[Rational]]) -> Optional[Rational]:
    """Minimum of 1/S over the available positive S-values."""
    reciprocals = [1 / value for value in values if value is not None and value > 0]
    return min(reciprocals) if reciprocals else None


def flag_verdict(delta: Optional[Rational]) -> str:
    if delta is None or delta < 1:
        return VERDICT_INCONCLUSIVE
    if delta == 1:
        return VERDICT_STRICT_REMARK
    return VERDICT_DELTA


def verify_flag(cert: FlagCertificate, divisorial_report: Optional[InvariantReport] = None) -> InvariantReport:
    """
    Verify a flag certificate against its surface, restriction map and
    divisorial certificate, then evaluate S(W;C), F_P, S(W;P) and delta.
    """
    s = cert.surface
    d = cert.divisorial
    checks = _Checks(cert.name)
    if divisorial_report is None:
        divisorial_report = verify_divisorial(d)
    curve = cert.curve

    checks.run(
        "divisorial-verified",
        lambda: [] if divisorial_report.valid else [f"{d.name} fails {divisorial_report.failed()[0].name}"],
    )

    def restriction() -> list[str]:
        r = s.restriction
        if r is None:
            return [f"{s.name} has no embedding"]
        failures = []
        if r.geometry != d.geometry.name:
            failures.append(f"{s.name} embeds in {r.geometry}, not {d.geometry.name}")
        if not r.divisor.same_as(d.divisor):
            failures.append(f"{s.name} is not the divisor {d.divisor_name}")
        if not check_restriction(d.geometry, s, r):
            failures.append(f"restriction to {s.name} is incompatible with the intersection table")
        return failures

    checks.run("restriction", restriction)
    checks.run("u-tiling", lambda: _tiling([(c.u_lo, c.u_hi) for c in cert.chambers], Rational(0), d.tau))

    def restricted_classes() -> list[str]:
        failures = []
        for chamber in cert.chambers:
            where = _interval(chamber.u_lo, chamber.u_hi)
            source = d.chamber_at(chamber.u_lo, chamber.u_hi)
            if source is None:
                failures.append(f"{where} is not inside one divisorial chamber")
                continue
            positive = s.restriction.apply(source.positive)
            if chamber.restricted is not None and not chamber.restricted.same_as(positive):
                failures.append(f"declared P(u)|_S differs on {where}")
            declared = zero_class(s.rank)
            for name, coefficient in chamber.restricted_negative:
                declared = declared + coefficient * s.curve(name).cls
            if not declared.same_as(s.restriction.apply(source.negative_class(d.geometry.rank))):
                failures.append(f"declared N(u)|_S differs on {where}")
        return failures

    def d_consistency() -> list[str]:
        return [
            f"d(u) = {c.d} but the coefficient of {cert.curve_name} is {curve_order(cert, c)}"
            for c in cert.chambers
            if c.d is not None and not _is_zero(c.d - curve_order(cert, c))
        ]

    def v_tiling() -> list[str]:
        failures = []
        for chamber in cert.chambers:
            where = _interval(chamber.u_lo, chamber.u_hi)
            vchs = chamber.v_chambers
            if not vchs:
                failures.append(f"no v-chambers on {where}")
                continue
            if vchs[0].v_lo != AffineUV():
                failures.append(f"first v-chamber on {where} starts at {vchs[0].v_lo}")
            if vchs[-1].v_hi != chamber.t:
                failures.append(f"last v-chamber on {where} ends at {vchs[-1].v_hi}, not t(u) = {chamber.t}")
            for left, right in zip(vchs, vchs[1:]):
                if left.v_hi != right.v_lo:
                    failures.append(f"gap between v = {left.v_hi} and v = {right.v_lo} on {where}")
            for vch in vchs:
                v_region(chamber, vch)
        return failures

    def v_class_identity() -> list[str]:
        failures = []
        for chamber in cert.chambers:
            target = restricted_positive(cert, chamber) - V * curve
            for vch in chamber.v_chambers:
                if not (vch.positive + v_negative_class(s, vch)).same_as(target):
                    failures.append(f"P + N differs from P(u)|_S - vC for v in [{vch.v_lo}, {vch.v_hi}]")
        return failures

    def v_nef() -> list[str]:
        failures = []
        for chamber in cert.chambers:
            for vch in chamber.v_chambers:
                vertices = v_region(chamber, vch).vertices()
                for cone_curve in s.cone_curves():
                    value = s.dot(vch.positive, cone_curve.cls)
                    for point in vertices:
                        if _at(value, point) < 0:
                            failures.append(f"P.{cone_curve.name} < 0 at (u,v) = {point}")
        return failures

    def v_orthogonality() -> list[str]:
        failures = []
        for chamber in cert.chambers:
            for vch in chamber.v_chambers:
                for name, _ in vch.negative:
                    value = s.dot(vch.positive, s.curve(name).cls)
                    if not _is_zero(value):
                        failures.append(f"P.{name} = {value} for v in [{vch.v_lo}, {vch.v_hi}]")
        return failures

    def v_negative_nonnegative() -> list[str]:
        failures = []
        for chamber in cert.chambers:
            for vch in chamber.v_chambers:
                vertices = v_region(chamber, vch).vertices()
                for name, coefficient in vch.negative:
                    if any(coefficient.at(*point) < 0 for point in vertices):
                        failures.append(f"coefficient of {name} is negative for v in [{vch.v_lo}, {vch.v_hi}]")
        return failures

    def support_definite() -> list[str]:
        failures = []
        for chamber in cert.chambers:
            for vch in chamber.v_chambers:
                names = [name for name, _ in vch.negative]
                if not names:
                    continue
                gram = sp.Matrix([[s.dot(s.curve(a).cls, s.curve(b).cls) for b in names] for a in names])
                if not (-gram).is_positive_definite:
                    failures.append(f"support {names} is not negative definite")
        return failures

    def t_vanishing() -> list[str]:
        failures = []
        for chamber in cert.chambers:
            last = chamber.v_chambers[-1]
            at_t = last.positive.subs({V: chamber.t.as_expr()})
            square = s.dot(at_t, at_t)
            if not _is_zero(square):
                failures.append(f"P(u,t(u))^2 = {sp.factor(square)} on {_interval(chamber.u_lo, chamber.u_hi)}")
        return failures

    def ord_nonnegative() -> list[str]:
        failures = []
        for chamber in cert.chambers:
            for vch in chamber.v_chambers:
                if any(vch.ord.at(*point) < 0 for point in v_region(chamber, vch).vertices()):
                    failures.append(f"ord_P is negative for v in [{vch.v_lo}, {vch.v_hi}]")
        return failures

    checks.run("restricted-class", restricted_classes)
    checks.run("d-consistency", d_consistency)
    checks.run("v-tiling", v_tiling)
    checks.run("v-class-identity", v_class_identity)
    checks.run("v-nef", v_nef)
    checks.run("v-orthogonality", v_orthogonality)
    checks.run("v-negative-nonneg", v_negative_nonnegative)
    checks.run("v-support-definite", support_definite)
    checks.run("t-vanishing", t_vanishing)
    checks.run("ord-nonneg", ord_nonnegative)

    s_divisor = Rational(divisorial_report.S_S) if divisorial_report.S_S is not None else None
    s_curve = f_p = s_point = None
    try:
        s_curve = eval_S_curve(cert)
        if cert.has_point_data:
            f_p = eval_F_P(cert)
            s_point = eval_S_point(cert)
    except Exception as e:
        logger.error(f"Could not evaluate flag invariants for {cert.name}: {str(e)}", exc_info=True)

    deltas: dict[str, str] = {}
    checks.expect("expected-S-curve", s_curve, cert.expected_S_curve, deltas)
    if cert.has_point_data:
        checks.expect("expected-F-P", f_p, cert.expected_F_P, deltas)
        checks.expect("expected-S-point", s_point, cert.expected_S_point, deltas)

    delta = delta_bound([s_divisor, s_curve] + ([s_point] if cert.has_point_data else []))
    report = InvariantReport(
        family=cert.family,
        certificate=cert.name,
        kind=cert.kind,
        tau=format_rational(d.tau),
        S_S=divisorial_report.S_S,
        S_WC=format_rational(s_curve) if s_curve is not None else None,
        F_P=format_rational(f_p) if f_p is not None else None,
        S_WP=format_rational(s_point) if s_point is not None else None,
        delta_bound=format_rational(delta) if delta is not None else None,
        checks=checks.results,
        deltas=deltas,
        note=cert.note,
    )
    report.discrepancies = printed_discrepancies(
        cert, {"S_curve": s_curve, "F_P": f_p, "S_point": s_point, "delta": delta}
    )
    logger.info(f"Verified flag certificate {cert.family}/{cert.name}: valid={report.valid}")
    return report


# ---------------------------------------------------------------------------
# Upper-bound certificates
# ---------------------------------------------------------------------------

def tau_witness(cert: UpperBoundCertificate) -> UniPoly:
    """P(nef_end)^2 . (A - uD): nonnegative wherever A - uD is pseudo-effective."""
    g = cert.geometry
    movable = cert.moving_class.at(cert.nef_end)
    return triple_eval(g, movable, movable, cert.moving_class)


def upper_bound_estimate(cert: UpperBoundCertificate) -> Rational:
    """
    (1/A^3) * ( int_0^nef_end vol du + (tau_bound - nef_end) * vol(nef_end) )

    The volume is non-increasing in u, so vol(nef_end) bounds the tail.
    """
    g = cert.geometry
    volume = volume_poly(g, cert.moving_class)
    head = integrate_uni(volume, 0, cert.nef_end)
    tail = (cert.tau_bound - cert.nef_end) * volume.eval(cert.nef_end)
    return (head + tail) / polarization_cube(g, cert.polarization)


def verify_upper_bound(cert: UpperBoundCertificate) -> InvariantReport:
    g = cert.geometry
    checks = _Checks(cert.name)

    def nef_interval() -> list[str]:
        failures = []
        if not 0 < cert.nef_end <= cert.tau_bound:
            failures.append("nef interval must satisfy 0 < nef_end <= tau_bound")
        for curve in g.curves_for("base"):
            value = uni(curve.dot(cert.moving_class))
            if sign_on_interval(value, 0, cert.nef_end) != Sign.NONNEGATIVE:
                failures.append(f"A - uD meets {curve.name} negatively on {_interval(0, cert.nef_end)}")
        return failures

    def witness() -> list[str]:
        w = tau_witness(cert)
        if w.degree() != 1 or w.LC() >= 0:
            return [f"witness {w.as_expr()} is not strictly decreasing and affine"]
        if w.eval(cert.tau_bound) != 0:
            return [f"witness {w.as_expr()} does not vanish at tau_bound"]
        return []

    def volume_match() -> list[str]:
        computed = volume_poly(g, cert.moving_class)
        if cert.volume is not None and computed != cert.volume:
            return [f"volume on {_interval(0, cert.nef_end)} is {computed.as_expr()}, declared {cert.volume.as_expr()}"]
        return []

    checks.run("nef-interval", nef_interval)
    checks.run("tau-witness", witness)
    checks.run("volume-match", volume_match)

    s_bound = beta_bound = None
    try:
        s_bound = upper_bound_estimate(cert)
        beta_bound = cert.log_discrepancy - s_bound
    except Exception as e:
        logger.error(f"Could not evaluate the estimate for {cert.name}: {str(e)}", exc_info=True)

    checks.run(
        "tau-bound",
        lambda: [] if s_bound is not None and s_bound <= TAU_FACTOR * cert.tau_bound else ["S bound exceeds (3/4)tau"],
    )
    deltas: dict[str, str] = {}
    checks.expect("expected-S-bound", s_bound, cert.expected_S_bound, deltas)
    checks.expect("expected-beta-bound", beta_bound, cert.expected_beta_bound, deltas)
    if cert.claimed_beta is not None:
        checks.run(
            "claimed-beta",
            lambda: [] if beta_bound is not None and cert.claimed_beta <= beta_bound
            else [f"claimed beta >= {format_rational(cert.claimed_beta)} is not implied"],
        )

    report = InvariantReport(
        family=cert.family,
        certificate=cert.name,
        kind=cert.kind,
        tau=format_rational(cert.tau_bound),
        S_bound=format_rational(s_bound) if s_bound is not None else None,
        beta_bound=format_rational(beta_bound) if beta_bound is not None else None,
        checks=checks.results,
        deltas=deltas,
        note=cert.note,
    )
    report.discrepancies = printed_discrepancies(cert, {"S_bound": s_bound, "beta_bound": beta_bound})
    logger.info(f"Verified upper-bound certificate {cert.family}/{cert.name}: valid={report.valid}")
    return report


# ---------------------------------------------------------------------------
# Shared
# ---------------------------------------------------------------------------

PRINTED_KEYS = {
    "divisorial": ("S", "beta"),
    "flag": ("S_curve", "F_P", "S_point", "delta"),
    "upper_bound": ("S_bound", "beta_bound"),
}


def printed_discrepancies(cert: Certificate, computed: dict[str, Optional[Rational]]) -> list[PrintedDiscrepancy]:
    result = []
    for key, printed in cert.printed.items():
        value = computed.get(key)
        if value is None or value != printed:
            result.append(PrintedDiscrepancy(
                key=key,
                printed=format_rational(printed),
                computed=format_rational(value) if value is not None else "n/a",
            ))
    if result:
        logger.warning(f"{cert.family}/{cert.name}: {len(result)} printed value(s) differ from the computation")
    return result


def verify(cert: Certificate, divisorial_report: Optional[InvariantReport] = None) -> InvariantReport:
    if isinstance(cert, DivisorialCertificate):
        return verify_divisorial(cert)
    if isinstance(cert, FlagCertificate):
        return verify_flag(cert, divisorial_report)
    return verify_upper_bound(cert)


def verdict(report: InvariantReport) -> str:
    if report.kind == "divisorial":
        if report.beta is None:
            return VERDICT_INCONCLUSIVE
        return VERDICT_BETA_POSITIVE if Rational(report.beta) > 0 else VERDICT_BETA_NONPOSITIVE
    if report.kind == "flag":
        return flag_verdict(Rational(report.delta_bound) if report.delta_bound is not None else None)
    if report.beta_bound is not None and Rational(report.beta_bound) > 0:
        return VERDICT_BETA_BOUND
    return VERDICT_INCONCLUSIVE
