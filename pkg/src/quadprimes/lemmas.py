"""One verification operation per supporting lemma.

Exact identities are checked exactly (integer arithmetic); inequalities are
checked exhaustively where periodicity allows it and statistically (seeded
Monte Carlo) where the statement is an integral.  Each check returns a
LemmaReport carrying observed value, reference bound, their ratio and the
pass/fail verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .arith import (euler_phi, kronecker, mobius, shared_prime_table,
                    sieve_window)
from .characters import build_character_group, primitive_characters
from .singular import CONSTANT_TRUNCATION, main_term_constant

# character tables are immutable; cache them across repeated checks
_group = lru_cache(maxsize=512)(build_character_group)

LEMMA_IDS = ("LS_AVG", "LS_SINGLE", "POLYA_VINOGRADOV", "MEAN_SQ",
             "MEAN_SQ_TWISTED", "SHORT_AP", "PHI_AVG", "LEGENDRE_SUM")


@dataclass(frozen=True)
class LemmaReport:
    lemma_id: str
    params: dict = field(default_factory=dict)
    observed: float = 0.0
    reference: float = 0.0
    ratio: float = 0.0
    passed: bool = False
    seed: int | None = None


def _report(lemma_id, params, observed, reference, passed, seed=None):
    ratio = observed / reference if reference else math.inf if observed else 0.0
    return LemmaReport(lemma_id=lemma_id, params=params, observed=float(observed),
                       reference=float(reference), ratio=float(ratio),
                       passed=bool(passed), seed=seed)


# ---------------------------------------------------------------------------
# Exact identities
# ---------------------------------------------------------------------------

def legendre_sum_check(l: int) -> LemmaReport:
    """sum_{(a,l)=1} sum_{m mod l} ((m^2 - a)/l) against mu(l) phi(l), exactly.

    Defined for odd square-free l: the quadratic symbol with even modulus is
    not periodic mod l, so the double sum would be ill-posed there.
    """
    if l < 1:
        raise ValueError("l must be positive")
    if l % 2 == 0:
        raise ValueError("l must be odd (the symbol sum is ill-posed for even moduli)")
    if mobius(l) == 0:
        raise ValueError("l must be square-free")
    symbols = np.array([kronecker(r, l) for r in range(l)], dtype=np.int64)
    sq = (np.arange(l, dtype=np.int64) ** 2) % l
    units = np.array([a for a in range(l) if math.gcd(a, l) == 1], dtype=np.int64)
    observed = int(symbols[(sq[None, :] - units[:, None]) % l].sum())
    reference = mobius(l) * euler_phi(l)
    return _report("LEGENDRE_SUM", {"l": l}, observed, reference,
                   observed == reference)


def phi_average_check(x: int, c: float = 5.0,
                      const_P: int = CONSTANT_TRUNCATION) -> LemmaReport:
    """sum_{q<=x} q/phi(4q) against (x/2) * main-term constant, within c log x."""
    if x < 1:
        raise ValueError("x must be positive")
    observed = phi_average_sum(x)
    reference = 0.5 * x * main_term_constant(const_P)
    deviation = abs(observed - reference)
    return _report("PHI_AVG", {"x": x, "c": c}, observed, reference,
                   deviation <= c * math.log(x))


def phi_average_sum(x: int) -> float:
    """Exact sum_{q<=x} q/phi(4q) via a totient sieve (phi(4q) = 2 phi(q) for
    odd q, 4 phi(q) for even q)."""
    phi = np.arange(x + 1, dtype=np.int64)
    for p in shared_prime_table(max(2, x)).primes:
        p = int(p)
        if p > x:
            break
        phi[p::p] -= phi[p::p] // p
    q = np.arange(1, x + 1, dtype=np.float64)
    phi4 = np.where(np.arange(1, x + 1) % 2 == 0, 4 * phi[1:], 2 * phi[1:])
    return float((q / phi4).sum())


# ---------------------------------------------------------------------------
# Large sieve and character-sum inequalities
# ---------------------------------------------------------------------------

def _char_window_sums(q: int, M: int, N: int, coeffs: np.ndarray) -> np.ndarray:
    """|sum_{n=M+1}^{M+N} a_n chi(n)|^2 for every primitive chi mod q."""
    prim = primitive_characters(_group(q))
    if not prim:
        return np.zeros(0)
    cols = np.arange(M + 1, M + N + 1, dtype=np.int64) % q
    V = np.stack([chi.values[cols] for chi in prim])
    sums = V @ coeffs
    return np.abs(sums) ** 2


def large_sieve_avg_check(Q: int, M: int, N: int,
                          coeffs: np.ndarray | None = None,
                          trials: int = 100, seed: int = 0,
                          c0: float = 4.0) -> LemmaReport:
    """Dyadic-average large sieve: LHS over q in [Q, 2Q] weighted 1/phi(q)
    against (Q + N/Q) sum |a_n|^2; the worst ratio over the coefficient
    draws must stay below c0 (the stated bound has an unspecified constant).
    """
    if Q < 1 or N < 1:
        raise ValueError("require Q >= 1 and N >= 1")
    tables = {q: [chi.values for chi in primitive_characters(_group(q))]
              for q in range(Q, 2 * Q + 1)}
    cols = {q: np.arange(M + 1, M + N + 1, dtype=np.int64) % q for q in tables}
    stacked = {q: np.stack([v[cols[q]] for v in vals]) if vals else None
               for q, vals in tables.items()}
    phis = {q: euler_phi(q) for q in tables}

    def lhs(a):
        total = 0.0
        for q, mat in stacked.items():
            if mat is None:
                continue
            total += float((np.abs(mat @ a) ** 2).sum()) / phis[q]
        return total

    rng = np.random.default_rng(seed)
    draws = []
    if coeffs is not None:
        draws.append(np.asarray(coeffs, dtype=np.complex128))
    else:
        draws.append(np.ones(N, dtype=np.complex128))
        for _ in range(max(0, trials - 1)):
            draws.append(np.exp(2j * np.pi * rng.random(N)))
    worst = (0.0, 0.0, 0.0)  # (ratio, observed, reference)
    for a in draws:
        obs = lhs(a)
        ref = (Q + N / Q) * float((np.abs(a) ** 2).sum())
        ratio = obs / ref if ref else 0.0
        if ratio >= worst[0]:
            worst = (ratio, obs, ref)
    params = {"Q": Q, "M": M, "N": N, "trials": len(draws), "c0": c0}
    return _report("LS_AVG", params, worst[1], worst[2], worst[0] <= c0, seed)


def large_sieve_single_check(q: int, M: int, N: int,
                             coeffs: np.ndarray) -> LemmaReport:
    """Single-modulus large sieve with constant 1: a hard inequality."""
    if q < 2:
        raise ValueError("q must be >= 2")
    a = np.asarray(coeffs, dtype=np.complex128)
    if a.shape != (N,):
        raise ValueError("coeffs must have length N")
    observed = float(_char_window_sums(q, M, N, a).sum())
    reference = (q + N) * float((np.abs(a) ** 2).sum())
    passed = observed <= reference * (1 + 1e-9)
    return _report("LS_SINGLE", {"q": q, "M": M, "N": N}, observed, reference, passed)


def polya_vinogradov_check(q: int) -> LemmaReport:
    """Exhaustive character-sum maximum against 6 sqrt(q) log q.

    Periodicity mod q makes the windows 0 <= M < q, 1 <= N <= q exhaustive
    over all (M, N).
    """
    if q < 3:
        raise ValueError("q must be >= 3")
    table = _group(q)
    observed = 0.0
    for chi in table.characters:
        if chi.is_principal:
            continue
        vals = np.concatenate((chi.values, chi.values))
        prefix = np.concatenate(([0.0], np.cumsum(vals[1: 2 * q + 1])))
        windows = np.lib.stride_tricks.sliding_window_view(prefix, q)[1: q + 1]
        observed = max(observed, float(np.abs(windows - prefix[:q, None]).max()))
    reference = 6.0 * math.sqrt(q) * math.log(q)
    return _report("POLYA_VINOGRADOV", {"q": q}, observed, reference,
                   observed <= reference)


# ---------------------------------------------------------------------------
# Short-interval statistics
# ---------------------------------------------------------------------------

def short_ap_check(t: int, delta: int, l: int, a: int,
                   tol: float = 0.05) -> LemmaReport:
    """Lambda-sum over n = a mod l in (t, t+delta] against delta/phi(l)."""
    if math.gcd(a, l) != 1:
        raise ValueError(f"require gcd(a, l) = 1, got gcd({a}, {l}) = {math.gcd(a, l)}")
    if t < 3 or delta < 1:
        raise ValueError("require t >= 3 and delta >= 1")
    table = shared_prime_table(max(2, math.isqrt(t + delta) + 1))
    observed = 0.0
    seg = 1 << 22
    lo = t + 1
    while lo <= t + delta:
        hi = min(lo + seg, t + delta + 1)
        win = sieve_window(lo, hi, table)
        first = lo + (a - lo) % l
        if first < hi:
            observed += float(win.lam[first - lo:: l].sum())
        lo = hi
    reference = delta / euler_phi(l)
    params = {"t": t, "delta": delta, "l": l, "a": a, "tol": tol}
    return _report("SHORT_AP", params, observed, reference,
                   abs(observed / reference - 1.0) <= tol)


def _psi_increment(t: int, M: int, table) -> np.ndarray:
    return sieve_window(t + 1, t + M + 1, table).lam


def mean_square_check(z: int, delta_exp: float = 0.4, M_frac: float = 1.0,
                      samples: int = 200, seed: int = 0,
                      C0: float = 2.0) -> LemmaReport:
    """Monte-Carlo mean of |psi(t+M) - psi(t) - M|^2 over t in (z, 2z]
    against delta^2 / (log z)^C0, with delta = z^delta_exp and M = M_frac delta.
    """
    delta = int(round(z**delta_exp))
    M = int(round(M_frac * delta))
    if not 0 <= M <= delta:
        raise ValueError("require 0 <= M <= delta")
    params = {"z": z, "delta_exp": delta_exp, "M_frac": M_frac,
              "samples": samples, "C0": C0, "delta": delta, "M": M}
    reference = delta**2 / math.log(z) ** C0
    if M == 0:
        return _report("MEAN_SQ", params, 0.0, reference, True, seed)
    table = shared_prime_table(math.isqrt(2 * z + M) + 1)
    rng = np.random.default_rng(seed)
    ts = rng.integers(z + 1, 2 * z + 1, size=samples)
    vals = [(float(_psi_increment(int(t), M, table).sum()) - M) ** 2 for t in ts]
    estimate = float(np.mean(vals))
    return _report("MEAN_SQ", params, estimate, reference,
                   estimate <= reference, seed)


def mean_square_twisted_check(z: int, delta_exp: float = 0.4, M_frac: float = 1.0,
                              q: int = 3, chi_index: int = 1,
                              samples: int = 200, seed: int = 0,
                              C0: float = 2.0) -> LemmaReport:
    """As mean_square_check but for |sum Lambda(n) chi(n)|^2 with no main
    term, for a non-principal chi mod q."""
    chi = _group(q).characters[chi_index]
    if chi.is_principal:
        raise ValueError("chi must be non-principal")
    delta = int(round(z**delta_exp))
    M = int(round(M_frac * delta))
    if not 0 <= M <= delta:
        raise ValueError("require 0 <= M <= delta")
    params = {"z": z, "delta_exp": delta_exp, "M_frac": M_frac, "q": q,
              "chi_index": chi_index, "samples": samples, "C0": C0,
              "delta": delta, "M": M}
    reference = delta**2 / math.log(z) ** C0
    if M == 0:
        return _report("MEAN_SQ_TWISTED", params, 0.0, reference, True, seed)
    table = shared_prime_table(math.isqrt(2 * z + M) + 1)
    rng = np.random.default_rng(seed)
    ts = rng.integers(z + 1, 2 * z + 1, size=samples)
    vals = []
    for t in ts:
        t = int(t)
        lam = _psi_increment(t, M, table)
        chivals = chi.values[np.arange(t + 1, t + M + 1, dtype=np.int64) % q]
        vals.append(abs(complex((lam * chivals).sum())) ** 2)
    estimate = float(np.mean(vals))
    return _report("MEAN_SQ_TWISTED", params, estimate, reference,
                   estimate <= reference, seed)


def mean_square_exact(z: int, delta_exp: float, M_frac: float,
                      z_cap: int = 10**7) -> float:
    """Exact (1/z) int_z^{2z} |psi(t+M)-psi(t)-M|^2 dt (validation mode).

    The integrand is constant on [j, j+1) for integer j, so the integral is
    a plain sum; only offered at small z.
    """
    if z > z_cap:
        raise ValueError(f"exact mode is capped at z <= {z_cap}")
    delta = int(round(z**delta_exp))
    M = int(round(M_frac * delta))
    if M == 0:
        return 0.0
    table = shared_prime_table(math.isqrt(2 * z + M) + 1)
    lam = sieve_window(z + 1, 2 * z + M + 1, table).lam
    cum = np.concatenate(([0.0], np.cumsum(lam)))
    inc = cum[M: M + z] - cum[:z]  # psi(j+M) - psi(j) for j = z .. 2z-1
    return float(((inc - M) ** 2).mean())


def default_grid(seed: int = 0) -> list[LemmaReport]:
    """One representative check per lemma at desk-fast parameters."""
    rng = np.random.default_rng(seed)
    coeffs = np.exp(2j * np.pi * rng.random(50))
    return [
        large_sieve_avg_check(Q=10, M=0, N=100, trials=100, seed=seed),
        large_sieve_single_check(q=7, M=0, N=50, coeffs=coeffs),
        polya_vinogradov_check(q=199),
        mean_square_check(z=10**8, delta_exp=0.4, M_frac=0.2,
                          samples=200, seed=seed),
        mean_square_twisted_check(z=10**8, delta_exp=0.4, M_frac=0.2,
                                  q=3, chi_index=1, samples=200, seed=seed),
        short_ap_check(t=10**8, delta=10**6, l=3, a=1),
        phi_average_check(x=10**4),
        legendre_sum_check(l=105),
    ]
