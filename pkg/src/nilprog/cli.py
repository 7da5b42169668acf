"""Command-line entry point: ``nilprog run | explain | orbit``."""
from __future__ import annotations

import argparse
import sys

from .config import SUITES, SuiteConfig
from .errors import ConfigInvalid
from .nilsystem import (R_system, S_system, T_system, TZ_system, U_system, product_system,
                        write_orbit_csv)
from .suites import explain, run_suite
from .torus import TorusWord

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _systems():
    a = TorusWord.param("a")
    sb = S_system()
    t = T_system()
    return {
        "T": (t, ("alpha",)),
        "T_Z": (TZ_system(), ("alpha",)),
        "S_beta": (sb, ("alpha", "beta")),
        "U_beta": (U_system(), ("alpha", "beta")),
        "R_2a": (R_system(2 * a), ("alpha", "a")),
        "T_x_T2": (product_system(t, t ** 2), ("alpha",)),
        "S_beta_x_S_beta2": (product_system(sb, sb ** 2), ("alpha", "beta")),
    }


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nilprog", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a verification suite")
    run.add_argument("--suite", choices=SUITES)
    run.add_argument("--config", help="key = value config file")
    run.add_argument("--out", help="report path (overrides the config)")
    run.add_argument("--seed", type=int)

    exp = sub.add_parser("explain", help="describe a check and its oracle")
    exp.add_argument("check")

    orbit = sub.add_parser("orbit", help="dump an orbit of a torus system as CSV")
    orbit.add_argument("--system", required=True, choices=sorted(_systems()))
    orbit.add_argument("--n", type=int, required=True)
    orbit.add_argument("--csv", required=True)
    orbit.add_argument("--config", help="parameter values (alpha, a) from a config file")
    orbit.add_argument("--beta", default="0.7071067811865475244")
    return parser


def _load_config(args) -> SuiteConfig:
    cfg = SuiteConfig.load(args.config) if args.config else SuiteConfig()
    changes = {}
    if getattr(args, "suite", None):
        changes["suite"] = args.suite
    if getattr(args, "out", None):
        changes["out"] = args.out
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    return cfg.with_(**changes) if changes else cfg


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "explain":
            try:
                sys.stdout.write(explain(args.check))
            except KeyError as exc:
                print(exc.args[0], file=sys.stderr)
                return EXIT_FAIL
            return EXIT_OK
        cfg = _load_config(args)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "orbit":
        if args.n < 1:
            print("config error: --n must be positive", file=sys.stderr)
            return EXIT_CONFIG
        system, names = _systems()[args.system]
        values = {"alpha": cfg.alpha, "a": cfg.a, "beta": args.beta}
        x0 = (0,) * system.dim
        write_orbit_csv(args.csv, system, x0, {k: values[k] for k in names}, args.n)
        print(f"wrote {args.n} samples of {args.system} to {args.csv}")
        return EXIT_OK

    report = run_suite(cfg)
    for record in report.checks:
        print(f"{record.status.upper():5} {record.name}")
    summary = report.summary
    print(f"{summary['pass']}/{summary['total']} passed; report written to {cfg.out}")
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
