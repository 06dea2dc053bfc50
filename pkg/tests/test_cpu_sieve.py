import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from neurosieve import cpu_sieve
from neurosieve.qs import EarlyFactor, QsPolynomial, SieveInterval, build_factor_base, interval_abs_range, smooth_mask

odd_n = st.integers(101, 10**6).filter(lambda n: n % 2 and int(n**0.5) ** 2 != n)


def full_fb(n, B, M):
    iv = SieveInterval.centered(M)
    try:
        return build_factor_base(n, B, iv, interval_abs_range(QsPolynomial(n), iv)[1])
    except EarlyFactor:
        return None


def test_n91_integer_logs(fb91):
    arr = cpu_sieve.cpu_sieve_run(fb91)
    # round(ln 2) = 1, round(ln 3) = 1, round(ln 5) = 2
    assert arr.values.tolist() == [2, 2, 2, 3, 3, 2, 4, 0, 2, 3]
    assert arr.update_count == cpu_sieve.expected_update_count(fb91) == 19


def test_n91_exact_candidates(fb91):
    arr = cpu_sieve.cpu_sieve_run(fb91, log_scale=None)
    got = cpu_sieve.cpu_threshold_candidates(arr, fb91.poly, fb91.interval, threshold_offset=0.0)
    assert got == [-2, -1, 0, 1]


@given(odd_n, st.integers(3, 40), st.integers(8, 300))
def test_exact_mode_is_lossless(n, B, M):
    fb = full_fb(n, B, M)
    assume(fb is not None)
    arr = cpu_sieve.cpu_sieve_run(fb, log_scale=None)
    got = cpu_sieve.cpu_threshold_candidates(arr, fb.poly, fb.interval, threshold_offset=0.0)
    truth = smooth_mask(fb.poly.values(fb.interval), fb)
    assert got == [int(t) + fb.interval.x_min for t in np.flatnonzero(truth)]
    # and the sum itself is ln of the smooth part
    vals = np.abs(fb.poly.values(fb.interval)).astype(float)
    np.testing.assert_allclose(arr.values[truth], np.log(vals[truth]))


@given(odd_n, st.integers(3, 40), st.integers(8, 300), st.integers(1, 64))
def test_block_order_does_not_matter(n, B, M, bs):
    fb = full_fb(n, B, M)
    assume(fb is not None)
    a = cpu_sieve.cpu_sieve_run(fb)
    b = cpu_sieve.cpu_sieve_run(fb, block_size=bs)
    assert np.array_equal(a.values, b.values)
    assert a.update_count == b.update_count == cpu_sieve.expected_update_count(fb)


def test_primes_only_near_closed_form():
    n = 1_000_000_007 * 998_244_353
    iv = SieveInterval.centered(2**14)
    fb = build_factor_base(n, 300, iv)
    arr = cpu_sieve.cpu_sieve_run(fb, sieve_powers=False)
    roots = sum(len(en.roots_t) for en in fb.entries if en.e == 1)
    assert abs(arr.update_count - cpu_sieve.closed_form_updates(fb)) <= roots
    assert cpu_sieve.cpu_sieve_run(fb).update_count > arr.update_count


def test_scores_are_margins(fb91):
    arr = cpu_sieve.cpu_sieve_run(fb91, log_scale=None)
    s = cpu_sieve.cpu_scores(arr, fb91.poly, fb91.interval)
    assert np.allclose(s[3:7], 0.0)
    assert np.all(s[[0, 1, 2, 7, 8, 9]] < -0.5)


@pytest.mark.parametrize("offset,expect", [(0.0, 0), (100.0, 10)])
def test_threshold_offset_extremes(fb91, offset, expect):
    arr = cpu_sieve.cpu_sieve_run(fb91)
    got = cpu_sieve.cpu_threshold_candidates(arr, fb91.poly, fb91.interval, offset)
    assert len(got) >= expect
