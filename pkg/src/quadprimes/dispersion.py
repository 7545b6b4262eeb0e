"""Dispersion decomposition for the quadratic-progression second moment.

For a window (t, t+Delta] and shifts k <= K, with A_k the Lambda-sum and
c_k the integer count,

    U(t) = sum_k A_k^2            (the double Lambda sum factors per k)
    V(t) = sum_k S(k) c_k A_k
    W(t) = sum_k S(k)^2 c_k^2

and U - 2V + W equals sum_k (A_k - S(k) c_k)^2 identically; identity_check
verifies both sides.  All three terms share the main term
(Delta^2 K / 4t) * prod_{p>2}(1 + 1/(p(p-1))), which m_tilde recomputes as
a direct triple sum over q and window positions with exact integer interval
endpoints.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .arith import euler_phi, isqrt_array
from .scan import progression_sums
from .singular import (CONSTANT_TRUNCATION, DEFAULT_TRUNCATION,
                       cached_singular_values, main_term_constant)

_trapezoid = getattr(np, "trapezoid", None) or np.trapz  # numpy 2.x / 1.x


@dataclass(frozen=True)
class DispersionParams:
    """Scale parameters; C is the log-power in the moduli cutoff L."""
    z: int
    K: int
    delta: int
    B: float = 1.0
    C: float = 2.0

    def __post_init__(self):
        if self.z < 3 or self.K < 1 or self.delta < 0:
            raise ValueError("require z >= 3, K >= 1, delta >= 0")

    @property
    def L(self) -> float:
        return math.log(self.z) ** self.C

    @property
    def E(self) -> float:
        """Reference error size Delta^2 K / (z (log z)^B)."""
        return self.delta**2 * self.K / (self.z * math.log(self.z) ** self.B)

    @property
    def D1(self) -> float:
        return self.delta / (8 * self.L * math.sqrt(self.z))

    @property
    def D2(self) -> float:
        return self.delta / (2 * math.sqrt(self.z))


@dataclass(frozen=True)
class DispersionSample:
    t: int
    U: float
    V: float
    W: float
    combined: float       # U - 2V + W
    direct_square: float  # sum_k (A_k - S(k) c_k)^2
    main_term: float      # (Delta^2 K / 4t) * main-term constant


def _window_arrays(params: DispersionParams, t: int, P: int, threads: int = 1):
    lam, counts, _ = progression_sums(t, params.delta, params.K, threads=threads)
    sing = cached_singular_values(params.K, P)
    return lam, counts.astype(np.float64), sing


def u_term(params: DispersionParams, t: int, threads: int = 1) -> float:
    """sum_k (sum_n Lambda(n^2+k))^2; the n1, n2 double sum factors."""
    lam, _, _ = progression_sums(t, params.delta, params.K, threads=threads)
    return float((lam * lam).sum())


def v_term(params: DispersionParams, t: int, P: int = DEFAULT_TRUNCATION,
           singular_values: np.ndarray | None = None) -> float:
    lam, counts, sing = _window_arrays(params, t, P)
    if singular_values is not None:
        sing = singular_values
    return float((sing * counts * lam).sum())


def w_term(params: DispersionParams, t: int, P: int = DEFAULT_TRUNCATION,
           singular_values: np.ndarray | None = None) -> float:
    _, counts, sing = _window_arrays(params, t, P)
    if singular_values is not None:
        sing = singular_values
    return float((sing * sing * counts * counts).sum())


def identity_check(params: DispersionParams, t: int,
                   P: int = DEFAULT_TRUNCATION, threads: int = 1) -> DispersionSample:
    """Evaluate U, V, W and both sides of the expansion identity at one t."""
    lam, counts, sing = _window_arrays(params, t, P, threads)
    U = float((lam * lam).sum())
    V = float((sing * counts * lam).sum())
    W = float((sing * sing * counts * counts).sum())
    resid = lam - sing * counts
    direct = float((resid * resid).sum())
    main = params.delta**2 * params.K / (4.0 * t) * main_term_constant(CONSTANT_TRUNCATION)
    return DispersionSample(t=t, U=U, V=V, W=W, combined=U - 2 * V + W,
                            direct_square=direct, main_term=main)


def _ceil_sqrt(x: np.ndarray) -> np.ndarray:
    """Exact elementwise ceil(sqrt(max(x, 0))) for int64 input."""
    x = np.maximum(x, 0)
    r = isqrt_array(x)
    return r + (r * r < x)


def m_tilde(params: DispersionParams, t: int) -> float:
    """Direct triple sum 2 sum_q phi(4q)^-1 sum_m1 #I(t, m1, q).

    I(t, m, q) = (m - 4q(sqrt(m)-q), m - 4q(sqrt(m-K)-q)] intersected with
    (t, t+Delta].  Integer counts come from exact floor/ceil of 4q sqrt(x) =
    sqrt(16 q^2 x), so no floating-point slack is needed.
    """
    if t + 1 - params.K < 0:
        raise ValueError("window contains m with m - K < 0")
    q_lo = max(1, math.ceil(params.D1))
    q_hi = math.floor(params.D2)
    if q_hi < q_lo or params.delta == 0:
        return 0.0
    top = t + params.delta
    if 16 * q_hi * q_hi * top >= 2**63:
        raise OverflowError("16 q^2 m exceeds the int64 range")
    m = np.arange(t + 1, top + 1, dtype=np.int64)
    total = 0.0
    for q in range(q_lo, q_hi + 1):
        c16 = 16 * q * q
        base = m + 4 * q * q
        floor_lo = base - _ceil_sqrt(c16 * m)            # floor of the open end
        floor_hi = base - _ceil_sqrt(c16 * (m - params.K))
        lo = np.maximum(floor_lo, t)
        hi = np.minimum(floor_hi, top)
        count = int(np.maximum(hi - lo, 0).sum())
        total += 2.0 * count / euler_phi(4 * q)
    return total


def dispersion_profile(params: DispersionParams, t_grid: list[int] | None = None,
                       P: int = DEFAULT_TRUNCATION, grid_points: int = 64,
                       seed: int | None = None, threads: int = 1):
    """Sample U, V, W, the identity and the main term over a t-grid.

    Returns (samples, summary): trapezoid estimates of the three integrals
    and of the combined term over [z, 2z], plus each term's deviation from
    the shared main term measured in units of E.
    """
    if t_grid is None:
        if seed is None:
            t_grid = [params.z + (j * params.z) // grid_points
                      for j in range(grid_points)]
        else:
            rng = np.random.default_rng(seed)
            t_grid = sorted(int(v) for v in
                            rng.integers(params.z, 2 * params.z, size=grid_points))
    else:
        t_grid = sorted(int(v) for v in t_grid)
    if not all(params.z <= t <= 2 * params.z for t in t_grid):
        raise ValueError("t grid must lie within [z, 2z]")

    if threads > 1 and len(t_grid) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            samples = list(pool.map(
                lambda t: identity_check(params, t, P, threads=1), t_grid))
    else:
        samples = [identity_check(params, t, P) for t in t_grid]

    ts = np.asarray([s.t for s in samples], dtype=np.float64)
    summary: dict = {
        "z": params.z, "K": params.K, "delta": params.delta,
        "B": params.B, "C": params.C, "E": params.E,
        "points": len(samples), "seed": seed,
    }
    for name in ("U", "V", "W", "combined"):
        vals = np.asarray([getattr(s, name) for s in samples])
        if len(samples) > 1:
            summary[f"integral_{name}"] = float(_trapezoid(vals, ts))
        else:
            summary[f"integral_{name}"] = float(vals[0] * params.z)
    mains = np.asarray([s.main_term for s in samples])
    for name in ("U", "V", "W"):
        vals = np.asarray([getattr(s, name) for s in samples])
        summary[f"mean_{name}_minus_main_over_E"] = float(
            ((vals - mains) / params.E).mean()) if params.E > 0 else math.nan
    bound = params.delta**2 * params.K / math.log(params.z) ** params.B
    summary["combined_integral_over_bound"] = (
        summary["integral_combined"] / bound if bound > 0 else 0.0)
    summary["max_identity_residual"] = max(
        abs(s.combined - s.direct_square) / max(1.0, s.direct_square) for s in samples)
    return samples, summary
