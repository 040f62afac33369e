"""Command-line entry point: run scenarios, reproduce the bundled study,
and drive the property suites.

Exit codes: 0 success, 1 configuration error, 2 runtime/integration error,
3 property violation.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources

from .engine import SimulationError, load_config, run_scenario
from .properties import SUITES
from .topology import ConfigurationError
from .traceio import write_outputs

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_VIOLATION = 3

PAPER_RUNS = ("run1", "run2", "run3")


def cmd_run(args) -> int:
    try:
        config = load_config(args.config, seed_override=args.seed)
    except (ConfigurationError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        trace = run_scenario(config)
    except SimulationError as exc:
        print(f"run aborted: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    metrics, report, v = write_outputs(trace, args.out, "scenario")
    print(f"verdict: {v}  mse {metrics.mse[0]:.6g} -> {metrics.mse[-1]:.6g}  "
          f"ota {trace.ledger.ota_count}  n2n {trace.ledger.n2n_count}")
    return EXIT_OK


def bundled_config_path(name: str):
    return resources.files("otaform.configs").joinpath(f"{name}.toml")


def cmd_paper(args) -> int:
    rows = []
    for name in PAPER_RUNS:
        try:
            with resources.as_file(bundled_config_path(name)) as path:
                config = load_config(path, seed_override=args.seed)
        except (ConfigurationError, OSError) as exc:
            print(f"config error in {name}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        try:
            trace = run_scenario(config)
        except SimulationError as exc:
            print(f"{name} aborted: {exc}", file=sys.stderr)
            return EXIT_RUNTIME
        metrics, report, v = write_outputs(trace, args.out, name)
        rows.append((name, config.t_min, config.mu_rot, v,
                     trace.ledger.ota_count, trace.ledger.n2n_count))
    print(f"{'run':<6}{'T [s]':>8}{'mu_rot':>10}{'verdict':>12}"
          f"{'ota':>8}{'n2n':>8}")
    for name, T, mu_rot, v, ota, n2n in rows:
        print(f"{name:<6}{T:>8.3g}{mu_rot:>10.4g}{v:>12}{ota:>8}{n2n:>8}")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        print(f"unknown suite {args.suite!r}; choose from "
              f"{sorted(SUITES)}", file=sys.stderr)
        return EXIT_CONFIG
    fn = SUITES[args.suite]
    violations = fn(args.seed, args.trials) if args.trials else fn(args.seed)
    if violations:
        print(f"suite {args.suite}: {len(violations)} violation(s)")
        for v in violations[:10]:
            print(f"  {v}")
        return EXIT_VIOLATION
    print(f"suite {args.suite}: ok")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="otaform",
        description="Over-the-air consensus formation control simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario from a config file")
    p_run.add_argument("--config", required=True, help="scenario TOML file")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
    p_run.set_defaults(func=cmd_run)

    p_paper = sub.add_parser(
        "paper", help="reproduce the three bundled study scenarios")
    p_paper.add_argument("--out", required=True, help="output directory")
    p_paper.add_argument("--seed", type=int, default=None,
                         help="override every bundled seed")
    p_paper.set_defaults(func=cmd_paper)

    p_verify = sub.add_parser("verify", help="run a property suite")
    p_verify.add_argument("--suite", required=True,
                          help=f"one of {sorted(SUITES)}")
    p_verify.add_argument("--seed", type=int, default=20240817)
    p_verify.add_argument("--trials", type=int, default=None)
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
