"""Running suite items and assembling line-delimited reports."""

from __future__ import annotations

import json
import math
import os
import time
import traceback
from concurrent.futures import ProcessPoolExecutor

from soergel.errors import ConfigError, SoergelError
from soergel.suites import items_for, law_for, setting_for

WORKERS_ENV = "SOERGEL_WORKERS"


def _plain(v):
    """JSON-safe copy: infinite degrees become ``"exact"``."""
    if isinstance(v, float) and math.isinf(v):
        return "exact"
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (str, int, float, bool)) or v is None:
        return v
    return str(v)


def run_item(cfg, suite, index):
    """Execute one item and return its record (never raises on check failure)."""
    check_id, fn, args = items_for(cfg, suite)[index]
    rec = {
        "id": f"{suite}/{check_id}",
        "suite": suite,
        "check": check_id,
        "backend": cfg.fgl,
        "rank": cfg.rank,
        "trunc": cfg.trunc,
        "coeff": cfg.coeff,
    }
    inputs = {}
    t0 = time.perf_counter()
    try:
        S = setting_for(cfg) if cfg.rank >= 2 else None
        certified, trace, detail = fn(S, cfg, args, inputs)
        rec.update(status="pass", certified=certified, trace=trace, detail=detail)
    except (SoergelError, ArithmeticError, ValueError) as exc:
        rec.update(status="fail", certified=getattr(exc, "degree", None), trace=0, detail={})
        rec["error"] = {"type": type(exc).__name__, "message": str(exc)}
        rec["repro"] = {"config": cfg.as_dict(), "suite": suite, "check": check_id,
                        "args": list(args), "inputs": inputs,
                        "where": traceback.format_exception_only(type(exc), exc)[-1].strip()}
    rec["seconds"] = round(time.perf_counter() - t0, 4)
    return _plain(rec)


def workers():
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    return max(n, 1)


class Report:
    def __init__(self, config, records, skipped=()):
        self.config = config
        self.records = sorted(records, key=lambda r: r["id"])
        self.skipped = list(skipped)

    @property
    def failures(self):
        return [r for r in self.records if r["status"] != "pass"]

    @property
    def passed(self):
        return not self.failures

    def summary(self):
        by_suite = {}
        for r in self.records:
            s = by_suite.setdefault(r["suite"], {"pass": 0, "fail": 0})
            s[r["status"]] += 1
        return {
            "summary": True,
            "backend": self.config.fgl,
            "rank": self.config.rank,
            "trunc": self.config.trunc,
            "seed": self.config.seed,
            "total": len(self.records),
            "passed": len(self.records) - len(self.failures),
            "failed": len(self.failures),
            "suites": by_suite,
            "skipped": self.skipped,
        }

    def jsonl(self, timing=True):
        out = []
        for r in self.records + [self.summary()]:
            if not timing:
                r = {k: v for k, v in r.items() if k != "seconds"}
            out.append(json.dumps(r, sort_keys=True, ensure_ascii=False))
        return "\n".join(out) + "\n"

    def human(self):
        lines = []
        for r in self.records:
            tag = "PASS" if r["status"] == "pass" else "FAIL"
            extra = f"certified={r['certified']}"
            if r.get("trace"):
                extra += f" trace={r['trace']}"
            if "error" in r:
                extra += f" {r['error']['type']}: {r['error']['message']}"
            lines.append(f"{tag} {r['id']:<34} {extra} ({r['seconds']:.2f}s)")
        s = self.summary()
        lines.append(f"{s['passed']}/{s['total']} checks passed"
                     f" [{s['backend']}, n={s['rank']}, N={s['trunc']}, seed={s['seed']}]")
        if self.skipped:
            lines.append("skipped (rank or truncation too low): " + ", ".join(self.skipped))
        return "\n".join(lines)


def run_suite(cfg):
    """Run every selected suite; records are canonically sorted by id."""
    suites = cfg.validate()
    law_for(cfg)  # bad law specs surface as ConfigError before any check runs
    jobs = [(s, k) for s in suites for k in range(len(items_for(cfg, s)))]
    n = workers()
    if n == 1 or len(jobs) < 2:
        records = [run_item(cfg, s, k) for s, k in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            futs = [pool.submit(run_item, cfg, s, k) for s, k in jobs]
            records = [f.result() for f in futs]
    return Report(cfg, records, cfg.skipped())
