"""Command line: ``dnsga {run,sweep,concurrent,verify}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import harness, verify


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS,
                   help="log resolved parameters")
    p.add_argument("--config", help="key=value file; command-line flags take precedence")
    p.add_argument("--algo", help="classic | grow | spread | concurrent-grow | concurrent-spread")
    p.add_argument("--n", help="problem size (comma-separated list for sweep)")
    p.add_argument("--mu", help="maximum population size or rule '4(n+1)'")
    p.add_argument("--tau", help="phase length or rule '8en*ln(n)', '(256/5)*e*n', '520e(n+1)*ln(n)'")
    p.add_argument("--seed", help="master seed")
    p.add_argument("--replicates", help="number of replicates per problem size")
    p.add_argument("--budget", help="evaluation budget per run")
    p.add_argument("--trace", metavar="PATH", help="write per-iteration trace or scheduler log")
    p.add_argument("--out", metavar="PATH", help="results CSV (default: stdout)")
    p.add_argument("--mutation", help="standard | one-bit")
    p.add_argument("--selection", help="fair | uniform")
    p.add_argument("--crossover", help="crossover rate in [0, 1)")
    p.add_argument("--crowding", help="current | classic")
    p.add_argument("--workers", help="worker processes for replicates")
    p.add_argument("--timing", action="store_const", const="true",
                   help="fill the wall_ms column (makes output non-reproducible)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dnsga", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log resolved parameters")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("run", "run a single (algorithm, n) cell"),
                       ("sweep", "run a grid over problem sizes"),
                       ("concurrent", "run the concurrent phase scheduler")):
        _add_common(sub.add_parser(name, help=text))
    v = sub.add_parser("verify", help="run the invariant suites and report pass/fail")
    v.add_argument("--full", action="store_true", help="run the suites at full acceptance size")
    return parser


def _settings(args: argparse.Namespace) -> dict:
    values = harness.parse_config_file(args.config) if args.config else {}
    for key in harness.CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return values


def _experiment(args: argparse.Namespace) -> tuple[harness.ExperimentConfig, dict]:
    values = _settings(args)
    if args.command == "concurrent":
        algo = values.get("algo", "concurrent-grow")
        if not algo.startswith("concurrent"):
            algo = f"concurrent-{algo}"
        values["algo"] = algo
    elif str(values.get("algo", "")).startswith("concurrent"):
        raise ValueError("use the 'concurrent' command for concurrent algorithms")
    cfg = harness.config_from_mapping(values)
    if args.command != "sweep" and len(cfg.ns) != 1:
        raise ValueError(f"'{args.command}' takes a single problem size, got {cfg.ns}")
    return cfg, values


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    if args.command == "verify":
        results = verify.run_all(quick=not args.full)
        for r in results:
            print(r.line())
        return 0 if all(r.passed for r in results) else 1
    try:
        cfg, values = _experiment(args)
        for n in cfg.ns:
            cfg.resolve(n)
        outputs = harness.run_cells(cfg, workers=int(values.get("workers", 1)))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    rows = [o.row for o in outputs]
    text = harness.results_csv(rows)
    if "out" in values:
        Path(values["out"]).write_text(text)
    else:
        sys.stdout.write(text)
    if "trace" in values:
        harness.write_traces(outputs, Path(values["trace"]))
    if args.command == "sweep" and rows and "out" in values:
        for s in harness.summarize(rows):
            print(f"{s.algorithm:18s} n={s.n:<5d} runs={s.runs:<4d} success={s.success_rate:.2f} "
                  f"median={s.median} q1={s.q1} q3={s.q3}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
