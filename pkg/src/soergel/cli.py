"""Command line driver."""

from __future__ import annotations

import argparse
import sys

from soergel.bimod import Setting
from soergel.errors import ConfigError, ParseError, SoergelError
from soergel.expr import compute
from soergel.fgl import make_fgl
from soergel.report import run_suite
from soergel.suites import SUITES, RunConfig


def build_parser():
    p = argparse.ArgumentParser(
        prog="soergel",
        description="Verify formal-group-law Soergel bimodule identities up to a truncation degree.",
    )
    p.add_argument("--fgl", default="additive",
                   help="additive | multiplicative | log:K | custom:<path> (default additive)")
    p.add_argument("--rank", type=int, default=3, help="number of variables n (default 3)")
    p.add_argument("--trunc", type=int, default=6, help="truncation degree N (default 6)")
    p.add_argument("--coeff", choices=("Z", "Q"), default="Z", help="coefficient base (default Z)")
    p.add_argument("--suite", default="all",
                   help=f"comma separated from {', '.join(SUITES)}, or all (default)")
    p.add_argument("--seed", type=int, default=0, help="seed for random test elements")
    p.add_argument("--out", help="write the line-delimited report here")
    p.add_argument("--expr", help="evaluate an expression instead of running suites")
    return p


def config_from(args):
    return RunConfig(fgl=args.fgl, rank=args.rank, trunc=args.trunc, coeff=args.coeff,
                     suite=args.suite, seed=args.seed, out=args.out)


def run_expr(cfg, text):
    if cfg.rank < 2:
        raise ConfigError("expressions need rank n >= 2")
    S = Setting(make_fgl(cfg.fgl, cfg.trunc, cfg.coeff), cfg.rank)
    return compute(S, text)


def main(argv=None):
    args = build_parser().parse_args(argv)
    cfg = config_from(args)
    try:
        if args.expr is not None:
            print(run_expr(cfg, args.expr))
            return 0
        report = run_suite(cfg)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        if exc.position is not None and args.expr is not None:
            print("  " + args.expr, file=sys.stderr)
            print("  " + " " * exc.position + "^", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SoergelError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(report.jsonl())
    print(report.human())
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
