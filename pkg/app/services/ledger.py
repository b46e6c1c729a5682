"""
Per-family K-polystability ledger

Rows come from the scope files: every center is matched with the report of
the certificate covering it (or with the center it is covered by).
Certificates that no center names are still listed, under center "-".
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

from app.config import settings
from app.models.schemas import (
    EffResult,
    FamilyLedger,
    InvariantReport,
    LedgerRow,
    ScopeFile,
)
from app.services.certify import FlagCertificate, verdict, verify
from app.services.corpus import Corpus
from app.services.lattice import monoid_decompose

logger = logging.getLogger(__name__)

VERDICT_EXTERNAL = "external"
COVERED_PREFIX = "covered-by:"


class LedgerService:
    def verify_all(self, corpus: Corpus, workers: Optional[int] = None) -> list[InvariantReport]:
        """
        Verify every certificate of the corpus on a thread pool.

        Non-flag certificates go first; flag certificates then reuse the report
        of their divisorial certificate. Reports come back in corpus order.

        Args:
            corpus: the loaded corpus
            workers: pool size, settings.verify_workers when omitted; 1 runs inline
        """
        workers = workers or settings.verify_workers
        certificates = corpus.certificates
        flags = [n for n, cert in enumerate(certificates) if isinstance(cert, FlagCertificate)]

        # 第一轮: 非 flag 证书, 以及 flag 所依赖但不在语料中的 divisorial 证书
        pending = {id(cert): cert for cert in certificates if not isinstance(cert, FlagCertificate)}
        for n in flags:
            pending.setdefault(id(certificates[n].divisorial), certificates[n].divisorial)
        first = list(pending.values())
        first_reports = self._map(verify, [(cert,) for cert in first], workers)
        by_id = {id(cert): report for cert, report in zip(first, first_reports)}

        # 第二轮: flag 证书
        flag_reports = self._map(
            verify, [(certificates[n], by_id[id(certificates[n].divisorial)]) for n in flags], workers
        )
        by_index = dict(zip(flags, flag_reports))
        reports = [by_index[n] if n in by_index else by_id[id(cert)] for n, cert in enumerate(certificates)]

        failed = sum(1 for report in reports if not report.valid)
        logger.info(f"Verified {len(reports)} certificates with {workers} worker(s), {failed} failed")
        return reports

    @staticmethod
    def _map(func, arguments: list[tuple], workers: int) -> list:
        if workers <= 1 or len(arguments) <= 1:
            return [func(*args) for args in arguments]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda args: func(*args), arguments))

    def build(self, corpus: Corpus, reports: Optional[list[InvariantReport]] = None) -> list[FamilyLedger]:
        """
        Build one ledger per family scope plus one per externally settled family.

        Args:
            corpus: the loaded corpus
            reports: reports from verify_all; computed when omitted

        Returns:
            Ledgers sorted by family id
        """
        if reports is None:
            reports = self.verify_all(corpus)
        by_name = {(report.family, report.certificate): report for report in reports}

        ledgers = [self._family(corpus, scope, by_name) for scope in (corpus.scopes[f] for f in corpus.families)]
        for external in corpus.externals:
            ledgers.append(FamilyLedger(
                family=external.family,
                title=external.reference,
                rows=[LedgerRow(center="-", kind=VERDICT_EXTERNAL, certificate="-", verdict=VERDICT_EXTERNAL)],
            ))
        return sorted(ledgers, key=lambda ledger: ledger.family)

    def _family(self, corpus: Corpus, scope: ScopeFile, by_name: dict) -> FamilyLedger:
        family = scope.family
        ledger = FamilyLedger(family=family, title=scope.title)
        centers = {center.name: center for center in scope.centers}

        for center in scope.centers:
            if center.certificate is not None:
                report = by_name[(family, center.certificate)]
                ledger.rows.append(LedgerRow(
                    center=center.name,
                    kind=center.kind,
                    certificate=center.certificate,
                    values=report.values(),
                    verdict=verdict(report),
                ))
            else:
                ledger.rows.append(LedgerRow(
                    center=center.name,
                    kind=center.kind,
                    certificate="-",
                    verdict=f"{COVERED_PREFIX}{center.covered_by}",
                ))
            if not self._covered(center.name, centers, by_name, family):
                ledger.missing.append(center.name)

        named = {center.certificate for center in scope.centers if center.certificate is not None}
        for cert in corpus.certificates_of(family):
            if cert.name not in named:
                report = by_name[(family, cert.name)]
                ledger.rows.append(LedgerRow(
                    center="-", kind=cert.kind, certificate=cert.name, values=report.values(), verdict=verdict(report)
                ))

        for cert in corpus.certificates_of(family):
            for discrepancy in by_name[(family, cert.name)].discrepancies:
                ledger.discrepancies.append((cert.name, discrepancy))

        for eff in scope.eff:
            g = corpus.geometries[f"{family}/{eff.geometry}"]
            coefficients = monoid_decompose(g.class_of(eff.target), [g.class_of(text) for text in eff.generators])
            if eff.expected:
                passed = coefficients is not None and list(coefficients) == eff.expected
            else:
                passed = coefficients is None
            ledger.eff.append(EffResult(
                geometry=eff.geometry,
                target=eff.target,
                generators=eff.generators,
                coefficients=list(coefficients) if coefficients is not None else None,
                passed=passed,
            ))

        for row in ledger.rows:
            if row.verdict in ("inconclusive", "beta<=0"):
                logger.warning(f"{family}: {row.certificate} is {row.verdict}")
        if ledger.missing:
            logger.warning(f"{family}: uncovered centers {ledger.missing}")
        return ledger

    @staticmethod
    def _covered(name: str, centers: dict, by_name: dict, family: str) -> bool:
        seen = set()
        while name not in seen:
            seen.add(name)
            center = centers[name]
            if center.certificate is not None:
                return by_name[(family, center.certificate)].valid
            name = center.covered_by
        # 循环引用
        return False


# 创建全局 ledger 服务实例
ledger_service = LedgerService()
