import logging

from app.commands import EXIT_ERROR, EXIT_FAILED, EXIT_OK, load_or_report
from app.models.schemas import RunConfig
from app.services.oracle import OracleService

logger = logging.getLogger(__name__)


def cmd_oracle(cfg: RunConfig) -> int:
    """
    Compare every flag certificate with the Zariski oracle at sampled points.

    Returns:
        0 if every sampled point matches, 1 on a mismatch, 2 if the corpus does not load
    """
    corpus = load_or_report(cfg)
    if corpus is None:
        return EXIT_ERROR

    oracle = OracleService(samples=cfg.samples, seed=cfg.seed, max_denominator=cfg.max_denominator)
    results = oracle.run(corpus.flags())
    mismatches = 0
    for name, (checked, found) in results.items():
        print(f"{name} points={checked} {'OK' if not found else 'MISMATCH'}")
        for m in found:
            mismatches += 1
            print(f"  {m.chamber} {m.point}")
            print(f"    certificate: {m.expected}")
            print(f"    oracle:      {m.computed}")
    print(f"{len(results)} flag certificates, {mismatches} mismatches")
    return EXIT_FAILED if mismatches else EXIT_OK
