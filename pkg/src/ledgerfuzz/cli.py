"""Command-line entry point.

Exit codes: 0 = ran to budget with zero new crash signatures, 1 = new
crash signatures found (or a replayed input crashed), 2 = usage or
configuration error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .harness import ConfigError
from .loop import FuzzerConfig, _execute_one, bench_mutators, fuzz
from .mutation import DEFAULT_ENABLED, MutatorConfig, N_OPERATORS
from .targets import get_target, target_names

EXIT_CLEAN = 0
EXIT_CRASHES = 1
EXIT_USAGE = 2


def _parse_mutators(spec: str) -> frozenset[int]:
    if spec == "all":
        return frozenset(range(N_OPERATORS))
    try:
        ids = frozenset(int(part) for part in spec.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse mutator list {spec!r}")
    bad = [i for i in ids if not 0 <= i < N_OPERATORS]
    if bad:
        raise argparse.ArgumentTypeError(f"mutator ids out of range: {sorted(bad)}")
    if not ids:
        raise argparse.ArgumentTypeError("mutator list must not be empty")
    return ids


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--target", required=True, help="registered contract name")
    sub.add_argument(
        "--dir",
        default=None,
        help="run directory for corpus/crashers/suppressions "
        "(default: $LEDGERFUZZ_DIR or ./ledgerfuzz-<target>)",
    )
    sub.add_argument("--seed", type=int, default=None,
                     help="rng seed; a random one is drawn and printed when omitted")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ledgerfuzz",
        description="Coverage-guided mutation fuzzer for mock-ledger contracts.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    p_fuzz = commands.add_parser("fuzz", help="run the fuzzing loop against one target")
    _add_common_flags(p_fuzz)
    p_fuzz.add_argument(
        "--mutators",
        type=_parse_mutators,
        default=DEFAULT_ENABLED,
        help="comma-separated operator ids or 'all' (default: all except 1,19)",
    )
    p_fuzz.add_argument("--budget-execs", type=int, default=None,
                        help="stop after this many executions (default: unlimited)")
    p_fuzz.add_argument("--budget-secs", type=float, default=None,
                        help="stop after this much wall time (default: unlimited)")
    p_fuzz.add_argument("--workers", type=int, default=1,
                        help="parallel workers; determinism holds for 1 (default: 1)")

    p_run = commands.add_parser("run", help="replay one stored input and show the outcome")
    _add_common_flags(p_run)
    p_run.add_argument("file", help="file holding the raw input bytes")

    p_bench = commands.add_parser(
        "bench-mutators", help="fuzz once per operator and print the screening table"
    )
    _add_common_flags(p_bench)
    p_bench.add_argument("--per-op-secs", type=float, required=True,
                         help="wall-time budget per operator")

    p_report = commands.add_parser("report", help="summarize crashers and suppressions")
    p_report.add_argument("--dir", required=True, help="run directory to summarize")

    commands.add_parser("list-targets", help="print registered target names")
    return parser


def _resolve_dir(arg_dir: str | None, target: str) -> Path:
    if arg_dir:
        return Path(arg_dir)
    env = os.environ.get("LEDGERFUZZ_DIR")
    if env:
        return Path(env)
    return Path(f"ledgerfuzz-{target}")


def _resolve_seed(arg_seed: int | None) -> int:
    if arg_seed is not None:
        return arg_seed
    seed = int.from_bytes(os.urandom(8), "big")
    print(f"seed: {seed}", flush=True)
    return seed


def _make_config(args: argparse.Namespace) -> FuzzerConfig:
    return FuzzerConfig(
        target=args.target,
        seed=_resolve_seed(args.seed),
        mutators=MutatorConfig(enabled=getattr(args, "mutators", DEFAULT_ENABLED)),
        budget_execs=getattr(args, "budget_execs", None),
        budget_secs=getattr(args, "budget_secs", None),
        workers=getattr(args, "workers", 1),
        dir=_resolve_dir(args.dir, args.target),
    )


def cmd_fuzz(args: argparse.Namespace) -> int:
    config = _make_config(args)
    summary = fuzz(config)
    print(f"distinct crash signatures this run: {len(summary.signatures)} "
          f"({summary.new_signature_count} new)")
    return EXIT_CRASHES if summary.new_signature_count > 0 else EXIT_CLEAN


def cmd_run(args: argparse.Namespace) -> int:
    target = get_target(args.target)
    config = _make_config(args)
    data = Path(args.file).read_bytes()
    result, ledger = _execute_one(data, target, config)
    if result.crash is not None:
        crash = result.crash
        print(f"crash: {crash.kind.value}")
        print(f"message: {crash.message}")
        print(f"signature: {crash.signature}")
        if crash.detail:
            print(crash.detail)
    else:
        print(f"verdict: {result.verdict.code}")
    print("state:")
    dump = ledger.dump_state()
    if dump:
        print(dump)
    return EXIT_CRASHES if result.crash is not None else EXIT_CLEAN


def cmd_bench(args: argparse.Namespace) -> int:
    config = _make_config(args)
    report = bench_mutators(config, per_op_secs=args.per_op_secs)
    print(report.text_table())
    csv_path = Path(config.dir) / "bench_report.csv"
    csv_path.write_text(report.csv_text(), encoding="utf-8")
    print(f"csv written to {csv_path}")
    new_found = any(row.time1 is not None for row in report.rows)
    return EXIT_CRASHES if new_found else EXIT_CLEAN


def cmd_report(args: argparse.Namespace) -> int:
    root = Path(args.dir)
    if not root.is_dir():
        print(f"no such run directory: {root}", file=sys.stderr)
        return EXIT_USAGE
    crashers = root / "crashers"
    suppressions = root / "suppressions"
    crash_files = sorted(p for p in crashers.iterdir() if p.is_file()) if crashers.is_dir() else []
    supp_files = sorted(p for p in suppressions.iterdir() if p.is_file()) if suppressions.is_dir() else []
    inputs = [p for p in crash_files if not p.suffix]
    print(f"crasher inputs: {len(inputs)} ({len(crash_files)} files)")
    print(f"suppressions: {len(supp_files)}")
    for path in supp_files:
        line = path.read_text(encoding="utf-8").strip()
        print(f"  {path.name[:16]}: {line}")
    return EXIT_CLEAN


def cmd_list_targets(args: argparse.Namespace) -> int:
    for name in target_names():
        print(name)
    return EXIT_CLEAN


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {
        "fuzz": cmd_fuzz,
        "run": cmd_run,
        "bench-mutators": cmd_bench,
        "report": cmd_report,
        "list-targets": cmd_list_targets,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
