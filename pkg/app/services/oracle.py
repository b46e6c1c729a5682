import logging
import random

from sympy import Rational

from app.models.schemas import OracleMismatch
from app.services.certify import FlagCertificate, FlagUChamber, VChamber, restricted_positive
from app.services.errors import CertifyError
from app.services.exact import format_rational
from app.services.zariski import ZariskiResult, zariski_at

logger = logging.getLogger(__name__)


def _fraction(rng: random.Random, max_denominator: int) -> Rational:
    """Rational strictly between 0 and 1 with denominator at most max_denominator."""
    denominator = rng.randint(2, max_denominator)
    return Rational(rng.randint(1, denominator - 1), denominator)


def _render(result: ZariskiResult, basis) -> str:
    negative = ", ".join(f"{name}:{format_rational(x)}" for name, x in result.negative.items())
    return f"P={result.positive.render(basis)} N={{{negative}}}"


class OracleService:
    """Cross-checks flag certificates against an independent Zariski decomposition"""

    def __init__(self, samples: int = 25, seed: int = 7, max_denominator: int = 97):
        self.samples = samples
        self.seed = seed
        self.max_denominator = max_denominator

    def sample_points(self, rng: random.Random, chamber: FlagUChamber, vch: VChamber) -> list[tuple[Rational, Rational]]:
        """
        Interior points of one (u, v)-chamber.

        Relative positions are drawn in (0, 1) and mapped affinely: first along
        [u_lo, u_hi], then along [v_lo(u), v_hi(u)].
        """
        points = []
        for _ in range(self.samples):
            u = chamber.u_lo + (chamber.u_hi - chamber.u_lo) * _fraction(rng, self.max_denominator)
            lo, hi = vch.v_lo.at(u), vch.v_hi.at(u)
            v = lo + (hi - lo) * _fraction(rng, self.max_denominator)
            points.append((u, v))
        return points

    def check_certificate(self, cert: FlagCertificate, rng: random.Random) -> tuple[int, list[OracleMismatch]]:
        """
        Compare the certificate's decomposition with zariski_at at sampled points.

        Returns:
            (number of points checked, mismatches)
        """
        s = cert.surface
        mismatches = []
        checked = 0
        for i, chamber in enumerate(cert.chambers):
            restricted = restricted_positive(cert, chamber)
            for j, vch in enumerate(chamber.v_chambers):
                # 退化 chamber (面积为零) 跳过
                if all(vch.v_hi.at(u) <= vch.v_lo.at(u) for u in (chamber.u_lo, chamber.u_hi)):
                    logger.debug(f"{cert.name}: skipping degenerate chamber u{i}/v{j}")
                    continue
                for u, v in self.sample_points(rng, chamber, vch):
                    checked += 1
                    expected = ZariskiResult(
                        vch.positive.at(u, v),
                        {name: c.at(u, v) for name, c in vch.negative if c.at(u, v) != 0},
                    )
                    target = restricted.at(u) - v * cert.curve
                    try:
                        computed = zariski_at(s, target)
                        match = computed.positive.same_as(expected.positive) and computed.negative == expected.negative
                        rendered = _render(computed, s.basis)
                    except CertifyError as e:
                        match = False
                        rendered = str(e)
                    if match:
                        continue
                    mismatches.append(OracleMismatch(
                        certificate=f"{cert.family}/{cert.name}",
                        chamber=f"u{i}/v{j}",
                        point=f"(u,v)=({format_rational(u)},{format_rational(v)})",
                        expected=_render(expected, s.basis),
                        computed=rendered,
                    ))
                    logger.warning(f"Oracle mismatch for {cert.name} at u={u}, v={v}: {rendered}")
                    # 每个 chamber 只报告第一个不一致的点
                    break
        return checked, mismatches

    def run(self, certificates: list[FlagCertificate]) -> dict[str, tuple[int, list[OracleMismatch]]]:
        """
        Run the oracle over flag certificates in the given order.

        A single generator seeded once drives every draw, so the sampled
        points depend only on the seed and the certificate order.
        """
        rng = random.Random(self.seed)
        results = {}
        for cert in certificates:
            results[f"{cert.family}/{cert.name}"] = self.check_certificate(cert, rng)
        total = sum(len(m) for _, m in results.values())
        logger.info(f"Oracle: {len(results)} certificates, {total} mismatches (seed {self.seed})")
        return results
