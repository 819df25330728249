"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 run/compare error.
`--processes` sets the tenant count; tenants are interleaved virtual-time
streams, not OS processes.
"""

from __future__ import annotations

import argparse
import os
import sys

from .catalog import VALID_METRIC_IDS, load_catalog
from .errors import VirtBenchError
from .calibration import MODES
from .reporting import load_report, render_comparison, write_reports
from .runner import DEFAULT_SEED, RunConfig, compare_reports, run_benchmark

CALIBRATION_ENV = "VIRTBENCH_CALIBRATION"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit code 1, not argparse's 2
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="virtbench",
        description="Benchmark a (simulated) GPU virtualization system across 56 metrics "
                    "and score it against an ideal hardware-partitioning baseline.",
    )
    parser.add_argument("--system", required=True, choices=MODES,
                        help="system under test")
    parser.add_argument("--iterations", type=int, default=100, help="samples per metric (default 100)")
    parser.add_argument("--warmup", type=int, default=10, help="discarded warmup samples (default 10)")
    parser.add_argument("--processes", type=int, default=1,
                        help="tenant count for multi-tenant scenarios (default 1; "
                             "cross-tenant metrics use 4 when left at 1)")
    parser.add_argument("--memory-limit", type=int, default=None, metavar="MB",
                        help="per-tenant memory limit override in MiB")
    parser.add_argument("--compute-limit", type=float, default=None, metavar="PCT",
                        help="compute (SM) limit override in percent")
    parser.add_argument("--metrics", type=str, default=None,
                        help="comma-separated metric ids to run (default: all 56)")
    parser.add_argument("--compare", type=str, default=None, metavar="BASELINE.json",
                        help="compare this run against a previous JSON report")
    parser.add_argument("--calibration", type=str, default=None,
                        help=f"calibration file overriding shipped defaults "
                             f"(or ${CALIBRATION_ENV})")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="run seed (default 42)")
    parser.add_argument("--output", type=str, default=None, metavar="PREFIX",
                        help="output path prefix (default results/<system>-<seed>)")
    return parser


def parse_args(argv: list[str]) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        args = parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1

    metric_filter = None
    if args.metrics:
        metric_filter = [m.strip() for m in args.metrics.split(",") if m.strip()]
        bad = [m for m in metric_filter if m not in VALID_METRIC_IDS]
        if bad:
            print(f"usage error: unknown metric id(s): {', '.join(bad)}", file=sys.stderr)
            return 1

    calibration_path = args.calibration or os.environ.get(CALIBRATION_ENV) or None

    try:
        config = RunConfig(
            system=args.system,
            iterations=args.iterations,
            warmup=args.warmup,
            tenants=args.processes,
            memory_limit_mb=args.memory_limit,
            compute_limit_percent=args.compute_limit,
            metric_filter=metric_filter,
            seed=args.seed,
            calibration_path=calibration_path,
        )
    except VirtBenchError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1

    try:
        catalog = load_catalog(calibration_path)
        report = run_benchmark(config, catalog)
        prefix = args.output or f"results/{args.system}-{args.seed}"
        paths = write_reports(report, prefix)
        overall = report.weighted_score * 100.0
        print(f"{args.system}: overall {overall:.1f}%  grade {report.grade}")
        for kind in ("json", "csv", "txt"):
            print(f"  wrote {paths[kind]}")
        if args.compare:
            baseline = load_report(args.compare)
            comparison = compare_reports(report, baseline)
            print(render_comparison(comparison), end="")
    except VirtBenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
