"""High-throughput scans of quadratic progressions.

For a window (t, t+delta] and every shift k <= K this computes

    A_k = sum of Lambda(n^2 + k) over n >= 1 with t < n^2 + k <= t + delta
    c_k = count of such n (exact, via integer square roots)

The scan iterates over n: the admissible m = n^2 + k form a contiguous
integer interval of length <= K, so Lambda is evaluated on shared segmented
sieve windows and scatter-added into per-k accumulators.  That costs
O(cells * log log) sieve work instead of one primality test per candidate;
the per-candidate route survives as the cross-check oracle in the tests.

Segments are processed in a fixed order and partial accumulators are folded
in that same order regardless of thread count, so results are bit-identical
for any thread budget.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .arith import (INT63_CAP, PrimeTable, isqrt_array, shared_prime_table,
                    sieve_window, von_mangoldt)
from .singular import DEFAULT_TRUNCATION, cached_singular_values

SEGMENT_SIZE = 1 << 22


@dataclass(frozen=True)
class ScanConfig:
    """Parameters of one scan: window (z, z+delta] (delta defaults to z)."""
    z: int
    K: int
    delta: int | None = None
    B: float = 1.0

    def __post_init__(self):
        if self.z < 3:
            raise ValueError("z must be >= 3")
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if self.delta is not None and self.delta < 0:
            raise ValueError("delta must be non-negative")

    @property
    def window_delta(self) -> int:
        return self.z if self.delta is None else self.delta

    def range_warnings(self) -> list[str]:
        """Advisory range checks; desk-scale runs may sit outside on purpose."""
        out = []
        if not math.sqrt(self.z) <= self.K <= self.z / 2:
            out.append(f"K={self.K} outside the intended range "
                       f"[z^(1/2), z/2] = [{math.sqrt(self.z):.0f}, {self.z / 2:.0f}]")
        if self.delta is not None and not self.z ** (2 / 3) <= self.delta <= self.z:
            out.append(f"delta={self.delta} outside the intended range "
                       f"[z^(2/3), z] = [{self.z ** (2 / 3):.0f}, {self.z}]")
        return out


@dataclass(frozen=True)
class ProgressionRow:
    k: int
    lambda_sum: float
    count: int
    singular: float
    residual: float


@dataclass(frozen=True)
class MomentReport:
    config: ScanConfig
    lhs: float
    bound: float
    ratio: float
    exceptional_count: int
    runtime_stats: dict = field(default_factory=dict)


def window_count(k: int, t: int, delta: int) -> int:
    """#{n >= 1 : t < n^2 + k <= t + delta}, exact."""
    if k < 1 or t < 0 or delta < 0:
        raise ValueError("require k >= 1, t >= 0, delta >= 0")
    top = t + delta - k
    if top < 0:
        return 0
    return math.isqrt(top) - math.isqrt(max(t - k, 0))


def window_lambda_sum(k: int, t: int, delta: int) -> float:
    """Sum of Lambda(n^2 + k) over the same n-range, one term at a time."""
    if t + delta + k >= INT63_CAP:
        raise OverflowError("window top exceeds the 2^63-1 cap")
    if k < 1 or t < 0 or delta < 0:
        raise ValueError("require k >= 1, t >= 0, delta >= 0")
    n_lo = math.isqrt(max(t - k, 0)) + 1
    n_hi = math.isqrt(t + delta - k) if t + delta - k >= 0 else 0
    return sum(von_mangoldt(n * n + k) for n in range(n_lo, n_hi + 1))


def _segment_jobs(t: int, delta: int, K: int, seg_size: int):
    """Fixed-order list of (seg_lo, seg_hi, n_first, n_last) with work in them."""
    n_lo = math.isqrt(max(t - K, 0)) + 1
    n_hi = math.isqrt(t + delta - 1) if t + delta >= 2 else 0
    jobs = []
    if n_hi < n_lo or delta <= 0:
        return jobs
    seg_lo = max(t + 1, n_lo * n_lo + 1)
    top = t + delta
    while seg_lo <= top:
        seg_hi = min(seg_lo + seg_size, top + 1)
        na = max(n_lo, math.isqrt(max(seg_lo - K, 1)))
        nb = min(n_hi, math.isqrt(seg_hi - 2))
        has_work = False
        for n in range(na, nb + 1):
            if max(t + 1, n * n + 1, seg_lo) <= min(top, n * n + K, seg_hi - 1):
                has_work = True
                break
        if has_work:
            jobs.append((seg_lo, seg_hi, na, nb))
            seg_lo = seg_hi
        else:
            # inside a gap between consecutive n-windows: jump to the next one
            nxt = None
            for n in range(na, n_hi + 1):
                lo_n = max(t + 1, n * n + 1)
                if lo_n >= seg_lo and lo_n <= top:
                    nxt = lo_n
                    break
            if nxt is None:
                break
            seg_lo = nxt
    return jobs


def _scan_segment(job, t: int, delta: int, K: int, table: PrimeTable) -> np.ndarray:
    seg_lo, seg_hi, na, nb = job
    win = sieve_window(seg_lo, seg_hi, table)
    acc = np.zeros(K, dtype=np.float64)
    top = t + delta
    for n in range(na, nb + 1):
        nn = n * n
        a = max(t + 1, nn + 1, seg_lo)
        b = min(top, nn + K, seg_hi - 1)
        if a > b:
            continue
        acc[a - nn - 1: b - nn] += win.lam[a - seg_lo: b - seg_lo + 1]
    return acc


def progression_sums(t: int, delta: int, K: int, table: PrimeTable | None = None,
                     threads: int = 1, seg_size: int = SEGMENT_SIZE):
    """(A_k array, c_k array, stats) for the window (t, t+delta], k = 1..K."""
    if t < 0 or delta < 0 or K < 1:
        raise ValueError("require t >= 0, delta >= 0, K >= 1")
    if t + delta + K >= INT63_CAP:
        raise OverflowError("window top exceeds the 2^63-1 cap")
    started = time.perf_counter()
    if table is None and delta > 0:
        table = shared_prime_table(max(2, math.isqrt(t + delta) + 1))
    jobs = _segment_jobs(t, delta, K, seg_size)
    lambda_sums = np.zeros(K, dtype=np.float64)
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = pool.map(lambda j: _scan_segment(j, t, delta, K, table), jobs)
            for part in partials:  # fixed job order: thread-count independent
                lambda_sums += part
    else:
        for job in jobs:
            lambda_sums += _scan_segment(job, t, delta, K, table)
    ks = np.arange(1, K + 1, dtype=np.int64)
    top = np.maximum(t + delta - ks, 0)
    bot = np.maximum(t - ks, 0)
    counts = isqrt_array(top) - isqrt_array(bot)
    stats = {
        "seconds": time.perf_counter() - started,
        "segments": len(jobs),
        "cells": int(sum(hi - lo for lo, hi, _, _ in jobs)),
        "threads": threads,
    }
    return lambda_sums, counts, stats


def scan_all_k(config: ScanConfig, P: int = DEFAULT_TRUNCATION,
               threads: int = 1) -> list[ProgressionRow]:
    """ProgressionRow for every k <= K over the configured window."""
    delta = config.window_delta
    lam, counts, _ = progression_sums(config.z, delta, config.K, threads=threads)
    sing = cached_singular_values(config.K, P)
    rows = []
    for i in range(config.K):
        resid = float(lam[i] - sing[i] * counts[i])
        rows.append(ProgressionRow(k=i + 1, lambda_sum=float(lam[i]),
                                   count=int(counts[i]), singular=float(sing[i]),
                                   residual=resid))
    return rows


def _moment_pieces(config: ScanConfig, t: int, delta: int, P: int, threads: int):
    lam, counts, stats = progression_sums(t, delta, config.K, threads=threads)
    sing = cached_singular_values(config.K, P)
    resid = lam - sing * counts
    return resid, stats


def theorem1_moment(config: ScanConfig, P: int = DEFAULT_TRUNCATION,
                    threads: int = 1) -> MomentReport:
    """Full-window moment: lhs = sum_k (A_k - S(k) c_k)^2 over (z, 2z].

    Compared against the bound K z / (log z)^B.
    """
    if config.delta is not None and config.delta != config.z:
        raise ValueError("theorem1_moment uses the full window (z, 2z]; leave delta unset")
    resid, stats = _moment_pieces(config, config.z, config.z, P, threads)
    lhs = float((resid * resid).sum())
    bound = config.K * config.z / math.log(config.z) ** config.B
    exc = int((np.abs(resid) > math.sqrt(config.z) / math.log(config.z) ** config.B).sum())
    return MomentReport(config=config, lhs=lhs, bound=bound, ratio=lhs / bound,
                        exceptional_count=exc, runtime_stats=stats)


def sample_points(z: int, t_samples: int, seed: int | None = None) -> list[int]:
    """t-sample grid in [z, 2z): evenly spaced, or seeded-uniform if seed given."""
    if t_samples < 1:
        raise ValueError("t_samples must be >= 1")
    if seed is None:
        return [z + (j * z) // t_samples for j in range(t_samples)]
    rng = np.random.default_rng(seed)
    return [int(v) for v in rng.integers(z, 2 * z, size=t_samples)]


def theorem2_moment(config: ScanConfig, P: int = DEFAULT_TRUNCATION,
                    t_samples: int = 16, seed: int | None = None,
                    threads: int = 1) -> MomentReport:
    """Short-segment moment: estimates int_z^{2z} sum_k |...|^2 dt by sampling.

    The t-integral is approximated by z times the mean of the inner sum at
    t_samples points; the bound is Delta^2 K / (log z)^B.
    """
    if config.delta is None:
        raise ValueError("theorem2_moment requires delta")
    delta = config.delta
    ts = sample_points(config.z, t_samples, seed)
    inner = []
    agg = {"seconds": 0.0, "segments": 0, "cells": 0, "threads": threads}
    for t in ts:
        resid, stats = _moment_pieces(config, t, delta, P, threads)
        inner.append(float((resid * resid).sum()))
        agg["seconds"] += stats["seconds"]
        agg["segments"] += stats["segments"]
        agg["cells"] += stats["cells"]
    inner_arr = np.asarray(inner)
    lhs = config.z * float(inner_arr.mean())
    bound = delta**2 * config.K / math.log(config.z) ** config.B
    exc = 0  # exceptional counts are a full-window notion; see theorem1_moment
    agg["t_samples"] = t_samples
    agg["seed"] = seed
    agg["t_points"] = ts
    agg["inner_sums"] = inner
    agg["sampling_sd"] = (float(inner_arr.std(ddof=1)) * config.z / math.sqrt(t_samples)
                          if t_samples > 1 else 0.0)
    return MomentReport(config=config, lhs=lhs, bound=bound, ratio=lhs / bound,
                        exceptional_count=exc, runtime_stats=agg)


def theorem2_exact_integral(config: ScanConfig, P: int = DEFAULT_TRUNCATION,
                            z_cap: int = 10**6) -> float:
    """Exact int_z^{2z} sum_k |A_k - S(k) c_k|^2 dt (validation mode).

    The integrand is a step function constant on [j, j+1) for integer j, so
    the integral is the plain sum of the inner sums at j = z .. 2z-1.  Only
    offered at small z; the sampled estimator covers desk scale.
    """
    if config.delta is None:
        raise ValueError("exact integration requires delta")
    z, K, delta = config.z, config.K, config.delta
    if z > z_cap:
        raise ValueError(f"exact integration is capped at z <= {z_cap}")
    table = shared_prime_table(max(2, math.isqrt(2 * z + delta) + 1))
    lam_all = sieve_window(z + 1, 2 * z + delta + 1, table).lam
    sing = cached_singular_values(K, P)
    lam, counts, _ = progression_sums(z, delta, K, table=table)
    counts = counts.astype(np.float64)
    total = 0.0
    for t in range(z, 2 * z):
        resid = lam - sing * counts
        total += float((resid * resid).sum())
        # slide the window from (t, t+delta] to (t+1, t+1+delta]
        for m, sign in ((t + 1, -1.0), (t + 1 + delta, 1.0)):
            n_hi = math.isqrt(m - 1)
            n_lo = math.isqrt(max(m - K - 1, 0)) + 1
            for n in range(n_lo, n_hi + 1):
                k = m - n * n
                lam[k - 1] += sign * lam_all[m - z - 1]
                counts[k - 1] += sign
    return total


def exceptional_set(rows: list[ProgressionRow], z: int, B: float) -> int:
    """Count of k whose residual exceeds sqrt(z) / (log z)^B in magnitude."""
    threshold = math.sqrt(z) / math.log(z) ** B
    return sum(1 for row in rows if abs(row.residual) > threshold)
