"""Command-line orchestration.

Commands: scan, moment1, moment2, dispersion, lemmas, singular, constant,
plus cache maintenance.  Parameters come from --key=value flags and/or a
plain-text config file of `key = value` lines (# comments); flags override
file values.  Every run writes results.csv and summary.json (full effective
config echo, a git-style content hash of the CSV, timings) into the output
directory, so a run is reproducible from its summary alone.

Exit codes: 0 success, 2 when a computed check reports pass=false,
1 for any error (unknown command/key, malformed value, I/O failure).
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import cache as sieve_cache
from .arith import shared_prime_table, sieve_window
from .dispersion import DispersionParams, dispersion_profile
from .lemmas import default_grid
from .scan import MomentReport, ScanConfig, exceptional_set, scan_all_k, theorem2_moment
from .singular import batch_singular_values, main_term_constant

COMMANDS = ("scan", "moment1", "moment2", "dispersion", "lemmas",
            "singular", "constant", "cache")

# name -> (type, required-for-commands, default)
_PARAM_TYPES = {
    "z": int, "K": int, "delta": int, "B": float, "C": float, "P": int,
    "t_samples": int, "seed": int, "grid": int, "threads": int,
    "x": int, "lo": int, "hi": int, "tol": float,
    "out": str, "cache_dir": str, "config": str, "action": str,
}

_REQUIRED = {
    "scan": ("z", "K"),
    "moment1": ("z", "K"),
    "moment2": ("z", "K", "delta"),
    "dispersion": ("z", "K", "delta"),
    "lemmas": (),
    "singular": ("K",),
    "constant": (),
    "cache": ("action",),
}

_DEFAULTS = {
    "scan": {"P": 10**5, "delta": None},
    "moment1": {"B": 1.0, "P": 10**5},
    "moment2": {"B": 1.0, "P": 10**5, "t_samples": 16, "seed": None},
    "dispersion": {"B": 1.0, "C": 2.0, "P": 10**5, "grid": 64, "seed": None},
    "lemmas": {"seed": 0},
    "singular": {"P": 10**5},
    "constant": {"P": 10**6},
    "cache": {"lo": None, "hi": None},
}


class CliError(Exception):
    """Configuration or runtime error; maps to exit code 1."""


@dataclass
class RunConfig:
    command: str
    parameters: dict = field(default_factory=dict)
    output_dir: Path = Path(".")
    cache_dir: Path = Path(".sieve_cache")
    threads: int = 1


def _coerce(key: str, raw: str):
    typ = _PARAM_TYPES[key]
    try:
        if typ is int:
            return int(raw)
        if typ is float:
            return float(raw)
        return raw
    except ValueError:
        raise CliError(f"malformed value for {key}: {raw!r} "
                       f"(expected {typ.__name__})") from None


def _read_config_file(path: str | Path) -> dict:
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _PARAM_TYPES:
            raise CliError(f"{path}:{lineno}: unknown key: {key}")
        values[key] = _coerce(key, raw)
    return values


def parse_config(args: list[str], file: str | Path | None = None) -> RunConfig:
    """Build a RunConfig from CLI tokens and an optional config file.

    Flags override file values; unknown commands/keys and malformed values
    raise CliError with a distinct message.
    """
    if not args:
        raise CliError(f"missing command (one of: {', '.join(COMMANDS)})")
    command = args[0]
    if command not in COMMANDS:
        raise CliError(f"unknown command: {command}")
    flag_values: dict = {}
    for token in args[1:]:
        if not token.startswith("--") or "=" not in token:
            raise CliError(f"malformed flag: {token!r} (expected --key=value)")
        key, raw = token[2:].split("=", 1)
        if key not in _PARAM_TYPES:
            raise CliError(f"unknown key: {key}")
        flag_values[key] = _coerce(key, raw)

    file_path = flag_values.pop("config", None) or file
    merged = dict(_DEFAULTS.get(command, {}))
    if file_path is not None:
        merged.update(_read_config_file(file_path))
    merged.update(flag_values)

    for key in _REQUIRED[command]:
        if merged.get(key) is None:
            raise CliError(f"missing required key: {key}")
    if command == "cache":
        if merged["action"] not in ("stat", "clear", "warm"):
            raise CliError(f"malformed value for action: {merged['action']!r} "
                           "(expected stat, clear or warm)")
        if merged["action"] == "warm" and (merged.get("lo") is None
                                           or merged.get("hi") is None):
            raise CliError("missing required key: lo/hi (needed by warm)")

    out = merged.pop("out", None) or f"runs/{command}"
    cache_dir = (merged.pop("cache_dir", None)
                 or os.environ.get("QUADPRIMES_CACHE_DIR", ".sieve_cache"))
    threads = merged.pop("threads", None) or 1
    return RunConfig(command=command, parameters=merged,
                     output_dir=Path(out), cache_dir=Path(cache_dir),
                     threads=int(threads))


def _content_hash(data: bytes) -> str:
    """Git blob-style SHA1 of the file contents."""
    h = hashlib.sha1()
    h.update(b"blob %d\0" % len(data))
    h.update(data)
    return h.hexdigest()


def _write_outputs(config: RunConfig, header: str, rows: list[str],
                   extra: dict, started: float) -> None:
    config.output_dir.mkdir(parents=True, exist_ok=True)
    csv_text = header + "\n" + "".join(r + "\n" for r in rows)
    csv_path = config.output_dir / "results.csv"
    csv_path.write_text(csv_text)
    summary = {
        "command": config.command,
        "parameters": {k: v for k, v in sorted(config.parameters.items())},
        "output_dir": str(config.output_dir),
        "cache_dir": str(config.cache_dir),
        "threads": config.threads,
        "rows": len(rows),
        "content_hash": _content_hash(csv_text.encode()),
        "timings": {"wall_seconds": time.perf_counter() - started},
    }
    summary.update(extra)
    (config.output_dir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n")


def _row_lines(rows) -> list[str]:
    return [f"{r.k},{r.lambda_sum!r},{r.count},{r.singular!r},{r.residual!r}"
            for r in rows]


def _report_dict(report: MomentReport) -> dict:
    cfg = report.config
    return {
        "z": cfg.z, "K": cfg.K, "delta": cfg.delta, "B": cfg.B,
        "lhs": report.lhs, "bound": report.bound, "ratio": report.ratio,
        "exceptional_count": report.exceptional_count,
        "runtime_stats": {k: v for k, v in report.runtime_stats.items()
                          if k != "inner_sums"},
    }


def _run_scan(config: RunConfig, started: float) -> int:
    p = config.parameters
    cfg = ScanConfig(z=p["z"], K=p["K"], delta=p.get("delta"))
    for warning in cfg.range_warnings():
        print(f"warning: {warning}", file=sys.stderr)
    rows = scan_all_k(cfg, P=p["P"], threads=config.threads)
    _write_outputs(config, "k,lambda_sum,count,singular,residual",
                   _row_lines(rows), {}, started)
    return 0


def _run_moment1(config: RunConfig, started: float) -> int:
    p = config.parameters
    cfg = ScanConfig(z=p["z"], K=p["K"], B=p["B"])
    for warning in cfg.range_warnings():
        print(f"warning: {warning}", file=sys.stderr)
    rows = scan_all_k(cfg, P=p["P"], threads=config.threads)
    lhs = sum(r.residual**2 for r in rows)
    bound = cfg.K * cfg.z / math.log(cfg.z) ** cfg.B
    report = MomentReport(config=cfg, lhs=lhs, bound=bound, ratio=lhs / bound,
                          exceptional_count=exceptional_set(rows, cfg.z, cfg.B))
    _write_outputs(config, "k,lambda_sum,count,singular,residual",
                   _row_lines(rows), {"moment": _report_dict(report)}, started)
    return 0


def _run_moment2(config: RunConfig, started: float) -> int:
    p = config.parameters
    cfg = ScanConfig(z=p["z"], K=p["K"], delta=p["delta"], B=p["B"])
    for warning in cfg.range_warnings():
        print(f"warning: {warning}", file=sys.stderr)
    report = theorem2_moment(cfg, P=p["P"], t_samples=p["t_samples"],
                             seed=p.get("seed"), threads=config.threads)
    inner = report.runtime_stats["inner_sums"]
    ts = report.runtime_stats["t_points"]
    rows = [f"{i},{t},{val!r}" for i, (t, val) in enumerate(zip(ts, inner))]
    _write_outputs(config, "sample,t,inner_sum", rows,
                   {"moment": _report_dict(report)}, started)
    return 0


def _run_dispersion(config: RunConfig, started: float) -> int:
    p = config.parameters
    params = DispersionParams(z=p["z"], K=p["K"], delta=p["delta"],
                              B=p["B"], C=p["C"])
    samples, summary = dispersion_profile(params, P=p["P"],
                                          grid_points=p["grid"],
                                          seed=p.get("seed"),
                                          threads=config.threads)
    rows = [f"{s.t},{s.U!r},{s.V!r},{s.W!r},{s.combined!r},"
            f"{s.direct_square!r},{s.main_term!r},{params.E!r}"
            for s in samples]
    _write_outputs(config, "t,U,V,W,combined,direct_square,main_term,E",
                   rows, {"profile": summary}, started)
    return 0


def _params_field(params: dict) -> str:
    return ";".join(f"{k}={v}" for k, v in params.items())


def _run_lemmas(config: RunConfig, started: float) -> int:
    reports = default_grid(seed=config.parameters["seed"])
    rows = [f"{r.lemma_id},{_params_field(r.params)},{r.observed!r},"
            f"{r.reference!r},{r.ratio!r},{str(r.passed).lower()},"
            f"{'' if r.seed is None else r.seed}"
            for r in reports]
    failures = [r.lemma_id for r in reports if not r.passed]
    _write_outputs(config, "lemma_id,params,observed,reference,ratio,pass,seed",
                   rows, {"failures": failures}, started)
    for r in reports:
        print(f"{r.lemma_id}: {'pass' if r.passed else 'FAIL'} "
              f"(observed={r.observed:.6g}, reference={r.reference:.6g})")
    return 2 if failures else 0


def _run_singular(config: RunConfig, started: float) -> int:
    p = config.parameters
    K, P = p["K"], p["P"]
    values = batch_singular_values(K, P)
    tails = np.abs(values - batch_singular_values(K, max(3, P // 2)))
    rows = [f"{k + 1},{P},{values[k]!r},{tails[k]!r}" for k in range(K)]
    _write_outputs(config, "k,P,value,tail_estimate", rows, {}, started)
    return 0


def _run_constant(config: RunConfig, started: float) -> int:
    P = config.parameters["P"]
    value = main_term_constant(P)
    _write_outputs(config, "P,value", [f"{P},{value!r}"],
                   {"constant": value}, started)
    print(f"main-term constant at P={P}: {value!r}")
    return 0


def cache_ops(cache_dir: str | Path, action: str,
              lo: int | None = None, hi: int | None = None,
              segment: int = 1 << 20) -> dict:
    """Manage the on-disk sieve cache: stat / clear / warm(lo, hi).

    Corrupt files are deleted with a warning and reported, never used.
    """
    cache_dir = Path(cache_dir)
    report: dict = {"action": action, "dir": str(cache_dir),
                    "files": [], "removed": 0, "corrupt": []}
    if action == "clear":
        if cache_dir.is_dir():
            for path in sorted(cache_dir.glob("*.svw")):
                path.unlink()
                report["removed"] += 1
        return report
    if action == "stat":
        if cache_dir.is_dir():
            for path in sorted(cache_dir.glob("*.svw")):
                try:
                    win = sieve_cache.load_window(path)
                except sieve_cache.CacheError as exc:
                    print(f"warning: deleting corrupt cache file: {exc}",
                          file=sys.stderr)
                    path.unlink()
                    report["corrupt"].append(path.name)
                    continue
                report["files"].append(
                    {"name": path.name, "lo": win.lo, "hi": win.hi,
                     "cells": win.hi - win.lo})
        return report
    if action == "warm":
        if lo is None or hi is None or not 2 <= lo < hi:
            raise CliError("warm requires 2 <= lo < hi")
        table = shared_prime_table(max(2, math.isqrt(hi) + 1))
        cur = lo
        while cur < hi:
            top = min(cur + segment, hi)
            win = sieve_window(cur, top, table)
            path = sieve_cache.window_path(cache_dir, cur, top)
            sieve_cache.save_window(win, path)
            report["files"].append({"name": path.name, "lo": cur, "hi": top,
                                    "cells": top - cur})
            cur = top
        return report
    raise CliError(f"unknown cache action: {action}")


def _run_cache(config: RunConfig, started: float) -> int:
    p = config.parameters
    report = cache_ops(config.cache_dir, p["action"], p.get("lo"), p.get("hi"))
    rows = [f"{f['name']},{f['lo']},{f['hi']},{f['cells']}"
            for f in report["files"]]
    _write_outputs(config, "file,lo,hi,cells", rows, {"cache": report}, started)
    print(f"cache {p['action']}: {len(report['files'])} file(s), "
          f"{report['removed']} removed, {len(report['corrupt'])} corrupt")
    return 0


_RUNNERS = {
    "scan": _run_scan,
    "moment1": _run_moment1,
    "moment2": _run_moment2,
    "dispersion": _run_dispersion,
    "lemmas": _run_lemmas,
    "singular": _run_singular,
    "constant": _run_constant,
    "cache": _run_cache,
}


def run(config: RunConfig) -> int:
    """Execute the configured command; returns the process exit code."""
    started = time.perf_counter()
    try:
        return _RUNNERS[config.command](config, started)
    except CliError:
        raise
    except OSError as exc:
        raise CliError(f"I/O failure: {exc}") from exc


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = parse_config(argv)
        return run(config)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
