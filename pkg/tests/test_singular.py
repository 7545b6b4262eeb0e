"""Tests for the singular series and the main-term constant."""

import math

import numpy as np
import pytest

from quadprimes.singular import (batch_singular_series, batch_singular_values,
                                 lower_bound_diagnostic, main_term_constant,
                                 singular_series, truncated_singular_series)


def zeta3_series(N: int = 20000) -> float:
    """Apery's constant by direct summation with an Euler-Maclaurin tail."""
    s = sum(1.0 / n**3 for n in range(N, 0, -1))
    return s + 1.0 / (2 * N**2) - 1.0 / (2 * N**3) + 1.0 / (4 * N**4)


def test_truncated_hand_products():
    assert truncated_singular_series(1, 5).value == pytest.approx(1.125, abs=1e-12)
    assert truncated_singular_series(3, 3).value == pytest.approx(1.0, abs=1e-15)
    # (k=1, P=3): factor 1 - (-1/3)/2 = 3/2
    assert truncated_singular_series(1, 3).value == pytest.approx(1.5, abs=1e-12)


def test_truncated_validates_input():
    with pytest.raises(ValueError):
        truncated_singular_series(0, 100)
    with pytest.raises(ValueError):
        truncated_singular_series(1, 2)


def test_classical_constant_for_k_equals_one():
    # stabilized value of S(1): the classical n^2+1 constant, recomputed
    value = truncated_singular_series(1, 10**7).value
    assert value == pytest.approx(1.3728134628, abs=1e-3)


def test_adaptive_stabilization():
    ref = truncated_singular_series(1, 10**7).value
    sv = singular_series(1, 1e-3)
    assert sv.stabilized
    assert sv.tail_estimate < 1e-3
    assert sv.value == pytest.approx(ref, abs=1e-3)
    sv2 = singular_series(2, 1e-3)
    assert sv2.stabilized and sv2.value > 0


def test_adaptive_reports_non_stabilization():
    sv = singular_series(1, 1e-15, p_start=10**3, p_cap=10**4)
    assert not sv.stabilized
    assert sv.truncation_p == 10**4


def test_s4_equals_s1():
    # (-4/p) = (-1/p) for odd p, so the factor sequences are identical
    a = truncated_singular_series(1, 10**4)
    b = truncated_singular_series(4, 10**4)
    assert a.value == b.value


def test_batch_hand_cases():
    vals = batch_singular_values(1, 3)
    assert vals[0] == pytest.approx(1.5, abs=1e-12)
    vals = batch_singular_values(3, 5)
    for k in range(1, 4):
        assert vals[k - 1] == pytest.approx(
            truncated_singular_series(k, 5).value, rel=1e-12)


def test_batch_matches_single_evaluations():
    vals = batch_singular_values(1000, 10**4)
    for k in (1, 2, 3, 17, 100, 512, 999, 1000):
        single = truncated_singular_series(k, 10**4).value
        assert vals[k - 1] == pytest.approx(single, rel=1e-12)


def test_batch_wrapper_records_metadata():
    out = batch_singular_series(5, 100)
    assert [sv.k for sv in out] == [1, 2, 3, 4, 5]
    assert all(sv.truncation_p == 100 for sv in out)


def test_scale_invariance_s_of_4k():
    vals = batch_singular_values(4000, 10**4)
    for k in range(1, 1001):
        assert vals[4 * k - 1] == vals[k - 1], k


def test_positivity():
    vals = batch_singular_values(10**4, 10**5)
    assert float(vals.min()) > 0.0
    # each factor lies in [(p-2)/(p-1), p/(p-1)], so values are bounded too
    assert float(vals.max()) < 10.0


def test_factor_range():
    from quadprimes.arith import kronecker
    for k in (1, 2, 7, 16, 30, 1001):
        for p in (3, 5, 7, 11, 13, 97, 499):
            factor = 1.0 - kronecker(-k, p) / (p - 1)
            assert (p - 2) / (p - 1) <= factor <= p / (p - 1)


def test_main_term_constant_hand_values():
    assert main_term_constant(3) == pytest.approx(7.0 / 6.0, rel=1e-12)
    assert main_term_constant(5) == pytest.approx(1.225, rel=1e-12)


def test_main_term_constant_against_zeta_oracle():
    zeta2 = math.pi**2 / 6
    zeta6 = math.pi**6 / 945
    reference = zeta2 * zeta3_series() / zeta6 / 1.5
    assert main_term_constant(10**6) == pytest.approx(reference, abs=1e-6)


def test_main_term_constant_monotone_in_P():
    values = [main_term_constant(P) for P in (10, 100, 1000, 10**4)]
    assert all(a < b for a, b in zip(values, values[1:]))


def test_lower_bound_diagnostic():
    s1 = truncated_singular_series(1, 10**4).value
    assert lower_bound_diagnostic(1, 10**4) == pytest.approx(
        s1 * math.log(3.0), rel=1e-12)
    m10 = lower_bound_diagnostic(10, 10**4)
    m50 = lower_bound_diagnostic(50, 10**4)
    m100 = lower_bound_diagnostic(100, 10**4)
    assert m10 >= m50 >= m100 > 0
