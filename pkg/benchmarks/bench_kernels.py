"""Compare the compiled and pure-Python multiplication kernels.

    python benchmarks/bench_kernels.py [--trunc N] [--repeat K] [--suites]

With ``--suites`` it also times a full verification run in a subprocess
under each kernel.
"""

from __future__ import annotations

import argparse
import itertools
import os
import subprocess
import sys
import time
import random
import timeit

from soergel import _kernels_py
from soergel.series import CoefficientRing, TruncationContext

try:
    from soergel import _ckernels
except ImportError:
    _ckernels = None


def dense(ctx, rng):
    """A random series touching every x-monomial below the truncation."""
    terms = {}
    for x in itertools.product(range(ctx.trunc + 1), repeat=ctx.nvars):
        if sum(x) > ctx.trunc:
            continue
        p = tuple(rng.randint(0, 2) for _ in ctx.ring.names)
        c = rng.choice([-3, -2, -1, 1, 2, 3])
        terms[(x, p)] = c
    return ctx.from_terms(terms)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trunc", type=int, default=8)
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--suites", action="store_true", help="also time 'soergel --suite all'")
    args = p.parse_args(argv)
    rng = random.Random(0)
    cases = [
        ("3 vars, integers", TruncationContext(3, args.trunc)),
        ("3 vars, one parameter", TruncationContext(3, args.trunc, CoefficientRing("Z", [("b", -2)]))),
        ("4 vars, two parameters", TruncationContext(4, args.trunc, CoefficientRing("Q", [("m1", -2), ("m2", -4)]))),
    ]
    print(f"{'case':<26}{'terms':>8}{'python ms':>12}{'compiled ms':>14}{'speedup':>10}")
    for name, ctx in cases:
        f, g = dense(ctx, rng), dense(ctx, rng)
        limit = ctx.limit(ctx.trunc)
        args_ = (f.terms, g.terms, limit, ctx.guard)
        py = min(timeit.repeat(lambda: _kernels_py.mul_terms(*args_), number=1, repeat=args.repeat))
        if _ckernels is None:
            print(f"{name:<26}{len(f.terms):>8}{py * 1e3:>12.2f}{'n/a':>14}{'':>10}")
            continue
        assert _ckernels.mul_terms(*args_) == _kernels_py.mul_terms(*args_)
        c = min(timeit.repeat(lambda: _ckernels.mul_terms(*args_), number=1, repeat=args.repeat))
        print(f"{name:<26}{len(f.terms):>8}{py * 1e3:>12.2f}{c * 1e3:>14.2f}{py / c:>9.1f}x")
    if args.suites:
        suite_times()


def suite_times():
    cmd = [sys.executable, "-m", "soergel.cli", "--fgl", "log:2", "--rank", "3", "--trunc", "6"]
    print()
    for label, pure in (("python", "1"), ("compiled", "0")):
        env = dict(os.environ, SOERGEL_PURE_PYTHON=pure)
        t0 = time.perf_counter()
        subprocess.run(cmd, env=env, check=True, capture_output=True)
        print(f"suite all, log:2 n=3 N=6, {label:<9}{time.perf_counter() - t0:8.2f}s")


if __name__ == "__main__":
    main()
