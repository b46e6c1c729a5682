import argparse
import logging
import sys

from app.commands.oracle import cmd_oracle
from app.commands.pfaffian import cmd_pfaffian
from app.commands.report import cmd_report
from app.commands.verify import cmd_verify
from app.config import settings
from app.models.schemas import RunConfig

COMMANDS = {
    "verify": cmd_verify,
    "report": cmd_report,
    "oracle": cmd_oracle,
    "pfaffian": cmd_pfaffian,
}


def configure_logging(level: str) -> None:
    # 日志写到 stderr, stdout 只输出结果
    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S',
        stream=sys.stderr,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kstab-certify",
        description="Verify and evaluate exact K-polystability certificates",
    )
    parser.add_argument("--log-level", default=settings.log_level, help="logging level (default: %(default)s)")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="verify every certificate of a corpus")
    verify.add_argument("root", nargs="?", default=settings.corpus_root)

    report = sub.add_parser("report", help="print the per-family ledgers")
    report.add_argument("root", nargs="?", default=settings.corpus_root)
    report.add_argument("--machine", action="store_true", help="one key=value line per cell")

    oracle = sub.add_parser("oracle", help="cross-check flag certificates with the Zariski oracle")
    oracle.add_argument("root", nargs="?", default=settings.corpus_root)
    oracle.add_argument("--samples", type=int, default=settings.oracle_samples)
    oracle.add_argument("--seed", type=int, default=settings.oracle_seed)
    oracle.add_argument("--max-denominator", type=int, default=settings.oracle_max_denominator)

    sub.add_parser("pfaffian", help="check the Pfaffian smoothing family and its relations")
    return parser


def run_config(args: argparse.Namespace) -> RunConfig:
    """Settings overridden by command-line arguments"""
    output_format = "machine" if getattr(args, "machine", False) else settings.output_format
    return RunConfig(
        corpus_root=getattr(args, "root", settings.corpus_root),
        command=args.command,
        samples=getattr(args, "samples", settings.oracle_samples),
        seed=getattr(args, "seed", settings.oracle_seed),
        max_denominator=getattr(args, "max_denominator", settings.oracle_max_denominator),
        output_format=output_format,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    logger = logging.getLogger(__name__)
    logger.debug("Logger initialized with level: %s", args.log_level)

    try:
        cfg = run_config(args)
    except ValueError as e:
        # pydantic ValidationError 也是 ValueError
        print(f"error: {e.errors()[0]['msg'] if hasattr(e, 'errors') else e}")
        return 2

    logger.info(f"Running {cfg.command} on {cfg.corpus_root}")
    return COMMANDS[cfg.command](cfg)


if __name__ == "__main__":
    sys.exit(main())
