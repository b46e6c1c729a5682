import logging

from app.commands import EXIT_ERROR, EXIT_FAILED, EXIT_OK, load_or_report
from app.models.schemas import InvariantReport, RunConfig
from app.services.ledger import ledger_service

logger = logging.getLogger(__name__)

# 每种证书在摘要行中显示的值
SUMMARY_KEYS = {
    "divisorial": (("S=", "S_S"), ("beta=", "beta")),
    "flag": (("S_WC=", "S_WC"), ("F_P=", "F_P"), ("S_WP=", "S_WP"), ("delta>=", "delta_bound")),
    "upper_bound": (("S<=", "S_bound"), ("beta>=", "beta_bound")),
}


def summary_line(report: InvariantReport) -> str:
    values = []
    for prefix, key in SUMMARY_KEYS[report.kind]:
        value = getattr(report, key)
        if value is not None:
            values.append(f"{prefix}{value}")
    status = "OK" if report.valid else "FAIL"
    return " ".join([f"{report.family}/{report.certificate}"] + values + [status])


def cmd_verify(cfg: RunConfig) -> int:
    """
    Verify every certificate and print one summary line per certificate,
    followed by one line per failed check.

    Returns:
        0 if all checks pass, 1 on a failed check, 2 if the corpus does not load
    """
    corpus = load_or_report(cfg)
    if corpus is None:
        return EXIT_ERROR

    reports = ledger_service.verify_all(corpus)
    failed = 0
    for report in reports:
        print(summary_line(report))
        if not report.valid:
            failed += 1
            for check in report.failed():
                print(f"  FAILED {check.name}: {check.detail}")

    if failed:
        print(f"{len(reports)} certificates, {failed} failed")
        first = next(r for r in reports if not r.valid)
        logger.error(f"Verification failed: {first.family}/{first.certificate} check {first.failed()[0].name}")
        return EXIT_FAILED
    print(f"{len(reports)} certificates")
    return EXIT_OK
