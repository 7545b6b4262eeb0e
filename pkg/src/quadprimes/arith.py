"""Exact integer arithmetic kernel.

Provides:
- Kronecker symbol (Legendre/Jacobi extended to arbitrary non-negative modulus)
- Mobius function, Euler totient
- exact integer square / n-th roots
- deterministic 64-bit primality (fixed Miller-Rabin witness set)
- von Mangoldt function Lambda(n) via perfect-power extraction
- prime tables and segmented sieve windows carrying Lambda + primality data

Everything downstream (singular series, progression scans, dispersion terms,
lemma checks) is built on these primitives.  All functions are pure;
PrimeTable and SieveWindow are immutable after construction and safe to
share across threads.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

# All scanned quantities (n^2 + k, window tops) must stay below 2^63 so that
# int64 array arithmetic is exact.
INT63_CAP = 2**63 - 1

# Deterministic Miller-Rabin witnesses; this set is correct for every
# n < 3.317e24, which covers the full 64-bit range used here.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for n >= 0.

    Equals the Legendre symbol when n is an odd prime, is completely
    multiplicative in n, and is 0 iff gcd(a, n) > 1 (for n >= 1).
    The factor (a/2) follows the standard convention: 0 for even a,
    +1 for a = +-1 mod 8, -1 for a = +-3 mod 8.
    """
    if n < 0:
        raise ValueError("modulus must be non-negative")
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    twos = 0
    while n % 2 == 0:
        n //= 2
        twos += 1
    if twos:
        if a % 2 == 0:
            return 0
        if twos % 2 == 1 and a % 8 in (3, 5):
            result = -result
    # Jacobi symbol for the remaining odd n, by binary reciprocity.
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def factorize(n: int) -> list[tuple[int, int]]:
    """Trial-division factorization of n >= 1 into (prime, exponent) pairs."""
    if n < 1:
        raise ValueError("n must be positive")
    out = []
    for p in (2, 3):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    d = 5
    step = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += step
        step = 6 - step  # alternate 5,7,11,13,... (6k +- 1)
    if n > 1:
        out.append((n, 1))
    return out


def mobius(n: int) -> int:
    if n < 1:
        raise ValueError("n must be positive")
    mu = 1
    for _, e in factorize(n):
        if e > 1:
            return 0
        mu = -mu
    return mu


def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError("n must be positive")
    phi = n
    for p, _ in factorize(n):
        phi -= phi // p
    return phi


def integer_sqrt(n: int) -> int:
    """Exact floor(sqrt(n)); no floating-point shortcut at the boundary."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return math.isqrt(n)


def integer_nth_root(n: int, e: int) -> int:
    """Exact floor(n^(1/e)) for n >= 0, e >= 1."""
    if n < 0 or e < 1:
        raise ValueError("require n >= 0 and e >= 1")
    if e == 1 or n < 2:
        return n
    if e == 2:
        return math.isqrt(n)
    r = int(round(n ** (1.0 / e)))
    while r > 0 and r**e > n:
        r -= 1
    while (r + 1) ** e <= n:
        r += 1
    return r


def is_prime(n: int) -> bool:
    """Deterministic primality for 0 <= n < 2^64."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def perfect_power_base(n: int) -> tuple[int, int]:
    """Write n >= 2 as base^exp with base not a perfect power; exp may be 1."""
    base, exp = n, 1
    e = 2
    while (1 << e) <= base:
        r = integer_nth_root(base, e)
        if r**e == base:
            base, exp = r, exp * e
        else:
            e += 1
    return base, exp


def von_mangoldt(n: int) -> float:
    """Lambda(n): log p if n = p^e for a prime p, else 0."""
    if n < 2:
        return 0.0
    base, _ = perfect_power_base(n)
    return math.log(base) if is_prime(base) else 0.0


def isqrt_array(x: np.ndarray) -> np.ndarray:
    """Exact elementwise floor(sqrt) for a non-negative int64 array.

    float64 sqrt gets within 1 of the truth for the full int64 range, so a
    single +-1 correction pass makes the result exact.
    """
    x = np.asarray(x, dtype=np.int64)
    if x.size and int(x.min()) < 0:
        raise ValueError("negative input")
    s = np.sqrt(x.astype(np.float64)).astype(np.int64)
    s -= s * s > x
    s += (s + 1) * (s + 1) <= x
    return s


# ---------------------------------------------------------------------------
# Prime tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PrimeTable:
    """All primes <= limit, ascending, as an int64 array."""
    limit: int
    primes: np.ndarray


def primes_up_to(limit: int) -> PrimeTable:
    """Complete ascending prime table via a bit sieve."""
    if limit < 2:
        raise ValueError("limit must be >= 2")
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p:: p] = False
    return PrimeTable(limit=limit, primes=np.flatnonzero(flags).astype(np.int64))


_cache_lock = threading.Lock()
_cached_table: PrimeTable | None = None


def shared_prime_table(limit: int) -> PrimeTable:
    """Process-wide prime table, grown by doubling and reused across calls."""
    global _cached_table
    with _cache_lock:
        if _cached_table is None or _cached_table.limit < limit:
            grow = max(limit, 1 << 16)
            if _cached_table is not None:
                grow = max(grow, 2 * _cached_table.limit)
            _cached_table = primes_up_to(grow)
        return _cached_table


# ---------------------------------------------------------------------------
# Sieve windows
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SieveWindow:
    """Von Mangoldt / primality data for the integer interval [lo, hi).

    lam[i] = Lambda(lo + i) (natural log), prime_flags[i] <=> lo + i prime.
    """
    lo: int
    hi: int
    lam: np.ndarray
    prime_flags: np.ndarray

    def __len__(self) -> int:
        return self.hi - self.lo


def sieve_window(lo: int, hi: int, table: PrimeTable) -> SieveWindow:
    """Sieve Lambda and primality over [lo, hi).

    Requires 2 <= lo < hi and table.limit >= isqrt(hi): smaller tables would
    miss composite witnesses and mislabel composites as prime.
    """
    if not 2 <= lo < hi:
        raise ValueError("require 2 <= lo < hi")
    if hi - 1 > INT63_CAP:
        raise OverflowError("window exceeds the 2^63-1 cap")
    root = math.isqrt(hi - 1)
    if table.limit < math.isqrt(hi):
        raise ValueError(
            f"prime table limit {table.limit} < isqrt({hi}); "
            "composite witnesses would be missed"
        )
    size = hi - lo
    flags = np.ones(size, dtype=bool)
    primes = table.primes
    cut = int(np.searchsorted(primes, root, side="right"))
    for p in primes[:cut]:
        p = int(p)
        start = max(p * p, ((lo + p - 1) // p) * p)
        if start < hi:
            flags[start - lo:: p] = False
    lam = np.zeros(size, dtype=np.float64)
    idx = np.flatnonzero(flags)
    if idx.size:
        lam[idx] = np.log((idx + lo).astype(np.float64))
    # Proper prime powers p^e (e >= 2) all have p <= sqrt(hi).
    for p in primes[:cut]:
        p = int(p)
        lp = math.log(p)
        pe = p * p
        while pe < hi:
            if pe >= lo:
                lam[pe - lo] = lp
            pe *= p
    return SieveWindow(lo=lo, hi=hi, lam=lam, prime_flags=flags)
