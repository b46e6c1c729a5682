import logging

from app.commands import EXIT_ERROR, EXIT_FAILED, EXIT_OK, load_or_report
from app.models.schemas import FamilyLedger, RunConfig
from app.services.ledger import ledger_service

logger = logging.getLogger(__name__)

VALUE_LABELS = {
    "tau": "tau",
    "S_S": "S",
    "S_WC": "S_WC",
    "F_P": "F_P",
    "S_WP": "S_WP",
    "beta": "beta",
    "delta_bound": "delta>=",
    "S_bound": "S<=",
    "beta_bound": "beta>=",
}


def _cell(values: dict[str, str]) -> str:
    parts = []
    for key, value in values.items():
        label = VALUE_LABELS[key]
        separator = "" if label.endswith("=") else "="
        parts.append(f"{label}{separator}{value}")
    return " ".join(parts)


def render_table(ledger: FamilyLedger) -> list[str]:
    lines = [f"Family {ledger.family}" + (f"  {ledger.title}" if ledger.title else "")]
    header = ("center", "kind", "certificate", "values", "verdict")
    rows = [(r.center, r.kind, r.certificate, _cell(r.values), r.verdict) for r in ledger.rows]
    widths = [max(len(row[k]) for row in [header] + rows) for k in range(len(header))]
    for row in [header] + rows:
        lines.append("  " + "  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
    for eff in ledger.eff:
        found = ",".join(map(str, eff.coefficients)) if eff.coefficients is not None else "none"
        status = "OK" if eff.passed else "FAIL"
        lines.append(f"  eff {eff.geometry}: {eff.target} = ({found}) . [{', '.join(eff.generators)}] {status}")
    for certificate, d in ledger.discrepancies:
        lines.append(f"  printed {certificate}.{d.key}={d.printed} computed={d.computed}")
    if ledger.rows and ledger.rows[0].kind != "external":
        lines.append("  complete" if ledger.complete else f"  incomplete: {', '.join(ledger.missing)}")
    return lines


def render_machine(ledger: FamilyLedger) -> list[str]:
    """One key=value line per cell."""
    family = ledger.family
    lines = []
    for row in ledger.rows:
        prefix = f"{family}.{row.certificate if row.certificate != '-' else row.center}"
        lines.append(f"{prefix}.center={row.center}")
        lines.append(f"{prefix}.kind={row.kind}")
        for key, value in row.values.items():
            lines.append(f"{prefix}.{key}={value}")
        lines.append(f"{prefix}.verdict={row.verdict}")
    for n, eff in enumerate(ledger.eff):
        found = ",".join(map(str, eff.coefficients)) if eff.coefficients is not None else "none"
        lines.append(f"{family}.eff{n}.coefficients={found}")
        lines.append(f"{family}.eff{n}.passed={str(eff.passed).lower()}")
    for certificate, d in ledger.discrepancies:
        lines.append(f"{family}.{certificate}.printed.{d.key}={d.printed}")
        lines.append(f"{family}.{certificate}.computed.{d.key}={d.computed}")
    lines.append(f"{family}.complete={str(ledger.complete).lower()}")
    return lines


def cmd_report(cfg: RunConfig) -> int:
    """
    Print the per-family ledgers.

    Returns:
        0 if every certificate verifies and every eff check holds, 1 otherwise,
        2 if the corpus does not load
    """
    corpus = load_or_report(cfg)
    if corpus is None:
        return EXIT_ERROR

    reports = ledger_service.verify_all(corpus)
    ledgers = ledger_service.build(corpus, reports)
    machine = cfg.output_format == "machine"
    for n, ledger in enumerate(ledgers):
        if n and not machine:
            print()
        for line in (render_machine(ledger) if machine else render_table(ledger)):
            print(line)

    invalid = [r for r in reports if not r.valid]
    bad_eff = [eff for ledger in ledgers for eff in ledger.eff if not eff.passed]
    if invalid or bad_eff:
        logger.error(f"Report: {len(invalid)} invalid certificates, {len(bad_eff)} failed eff checks")
        return EXIT_FAILED
    return EXIT_OK
