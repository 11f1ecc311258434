"""Acceptance criteria, one PASS/FAIL line each.

Run under pytest, or directly with ``python tests/test_acceptance.py``.
Every check is exact (zero tolerance); the limits are wall-clock seconds.
"""

import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import setting  # noqa: E402
from soergel.bimod.maps import corner_unit  # noqa: E402
from soergel.bimod.sts import split_121  # noqa: E402
from soergel.report import run_suite  # noqa: E402
from soergel.suites import RunConfig  # noqa: E402

BACKENDS = ("additive", "multiplicative", "log:2")
LINES = []


def _run(**kw):
    rep = run_suite(RunConfig(**kw))
    return rep.passed and rep.records, rep


def _suite_ok(configs, extra=None, per=None):
    notes = []
    for kw in configs:
        t0 = time.perf_counter()
        ok, rep = _run(**kw)
        dt = time.perf_counter() - t0
        if per is not None and dt > per:
            return False, f"{kw['fgl']} took {dt:.1f}s > {per}s"
        if not ok:
            bad = ", ".join(r["id"] for r in rep.failures) or "no checks ran"
            return False, f"{kw['fgl']}: {bad}"
        if extra is not None:
            msg = extra(kw, rep)
            if msg:
                return False, f"{kw['fgl']}: {msg}"
        notes.append(f"{kw['fgl']} {len(rep.records)}/{len(rep.records)}")
    return True, "; ".join(notes)


def c1():
    cfgs = [dict(fgl="additive", rank=2, trunc=10, suite="fgl-axioms"),
            dict(fgl="multiplicative", rank=2, trunc=10, suite="fgl-axioms"),
            dict(fgl="log:4", rank=2, trunc=8, suite="fgl-axioms")]

    def axioms(kw, rep):
        d = rep.records[0]["detail"]
        want = {"unitality", "commutativity", "associativity", "inverse", "unit"}
        return None if set(d) == want else f"axioms checked: {sorted(d)}"

    return _suite_ok(cfgs, axioms)


def c2():
    def count(kw, rep):
        n = sum(1 for r in rep.records if "-props-" in r["check"])
        return None if n == 40 else f"{n} random items"

    return _suite_ok([dict(fgl=b, rank=3, trunc=8, suite="demazure") for b in BACKENDS], count)


def c3():
    def parts(kw, rep):
        ids = {r["check"] for r in rep.records}
        if sum(1 for c in ids if c.startswith("key-identity")) != 20:
            return "expected 20 random r2"
        for side in "LR":
            rec = next(r for r in rep.records if r["check"] == f"split-BB-1-{side}")
            if {"retraction", "section", "cross-A", "cross-B"} - set(rec["detail"]):
                return f"split-BB {side} relations missing"
        return None if "corner-unit-1" in ids else "corner unit missing"

    return _suite_ok([dict(fgl=b, rank=2, trunc=8, suite="splittings") for b in BACKENDS], parts)


def c4():
    def sts(kw, rep):
        for i, j in ((1, 2), (2, 1)):
            rec = next(r for r in rep.records if r["check"] == f"sts-square-{i}{j}")
            if set(rec["detail"]["squares"]) != {"st-square", "ts-square"}:
                return "squares missing"
            degs = [int(d) for d in rec["detail"]["exactness"]]
            if max(degs) != 12:
                return f"exactness only to {max(degs)}"
        return None

    return _suite_ok([dict(fgl=b, rank=3, trunc=6, suite="sts") for b in BACKENDS], sts)


def c5():
    def deg(kw, rep):
        d = max(int(k) for k in rep.records[0]["detail"])
        return None if d == 2 * kw["trunc"] else f"injectivity only to degree {d}"

    return _suite_ok([dict(fgl=b, rank=2, trunc=8, suite="gkm") for b in BACKENDS], deg)


def c6():
    def final(kw, rep):
        for r in rep.records:
            if r["detail"]["final"] != {"0": ["R"]}:
                return f"{r['check']} left {r['detail']['final']}"
        return None

    return _suite_ok([dict(fgl=b, rank=2, trunc=8, suite="rouquier") for b in BACKENDS], final, per=60)


def c7():
    return _suite_ok([dict(fgl=b, rank=3, trunc=6, suite="braid") for b in BACKENDS], per=300)


def c8():
    return _suite_ok([dict(fgl=b, rank=2, trunc=8, suite="condition-one") for b in BACKENDS])


def c9():
    L, A = setting("log:2", 3, 6), setting("additive", 3, 6)
    zero = {"m1": 0, "m2": 0}

    def sp(f, ctx):
        return f.specialize(zero, ctx)

    def same(f, g):
        return f.agrees(g) is None

    checks = {
        "formal sum": same(sp(L.law.F, A.law.ctx), A.law.F),
        "g": same(sp(L.law.g, A.law.ctx), A.law.g),
        "demazure": same(sp(L.R.demazure(1, L.ctx.parse("x1^3*x3 + x2")), A.ctx),
                         A.R.demazure(1, A.ctx.parse("x1^3*x3 + x2"))),
        "sts unit": all(same(sp(split_121(L, i, j).unit, A.ctx), split_121(A, i, j).unit)
                        for i, j in ((1, 2), (2, 1))),
    }
    cl, ca = corner_unit(L, 1), corner_unit(A, 1)
    ok = set(cl.images) == set(ca.images)
    for key, img in cl.images.items():
        want = ca.images.get(key, {})
        for k in set(img) | set(want):
            got = sp(img[k], A.ctx) if k in img else A.ctx.zero()
            ok = ok and same(got, want.get(k, A.ctx.zero()))
    checks["corner unit"] = ok
    bad = [k for k, v in checks.items() if not v]
    return not bad, "failed: " + ", ".join(bad) if bad else f"{len(checks)} identities"


CRITERIA = [
    (1, "FGL axioms (N=10, log:4 at N=8)", 10, c1),
    (2, "Demazure properties, 20 random inputs, n=3 N=8", 30, c2),
    (3, "splittings, key identity and corner unit", 60, c3),
    (4, "sts splitting, squares, exactness to degree 12", 180, c4),
    (5, "GKM injectivity to degree 2N", 30, c5),
    (6, "Rouquier invertibility, n=2 N=8", 3 * 60, c6),
    (7, "braid/slide relations, n=3 N=6", 3 * 300, c7),
    (8, "condition one biproduct", 10, c8),
    (9, "log law specialises to additive", 30, c9),
]


def evaluate(num, desc, limit, fn):
    t0 = time.perf_counter()
    try:
        ok, note = fn()
    except Exception as exc:  # report, do not mask
        ok, note = False, f"{type(exc).__name__}: {exc}"
    dt = time.perf_counter() - t0
    if dt > limit:
        ok, note = False, f"{note}; took {dt:.1f}s > {limit}s"
    line = f"{'PASS' if ok else 'FAIL'} criterion {num}: {desc} [{dt:.2f}s / {limit}s] {note}"
    return ok, line


@pytest.mark.parametrize("num, desc, limit, fn", CRITERIA, ids=[f"criterion-{c[0]}" for c in CRITERIA])
def test_criterion(num, desc, limit, fn):
    ok, line = evaluate(num, desc, limit, fn)
    LINES.append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
