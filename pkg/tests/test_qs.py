import json
import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from neurosieve.arith import primes_up_to
from neurosieve.qs import (
    EarlyFactor,
    FactorBase,
    QsPolynomial,
    SieveInterval,
    build_factor_base,
    interval_abs_range,
    smooth_mask,
    trial_divide,
)


def odd_nonsquare(n):
    return n % 2 == 1 and math.isqrt(n) ** 2 != n


def safe_fb(n, B, interval, ceiling=None):
    try:
        return build_factor_base(n, B, interval, ceiling)
    except EarlyFactor as ef:
        assert n % ef.divisor == 0
        return None


def test_polynomial_91():
    poly = QsPolynomial(91)
    assert poly.m == 10
    iv = SieveInterval.centered(10)
    assert (iv.x_min, iv.x_max) == (-5, 4)
    assert poly.values(iv).tolist() == [-66, -55, -42, -27, -10, 9, 30, 53, 78, 105]


def test_interval_maps():
    iv = SieveInterval.centered(10)
    assert iv.x_of(0) == -5 and iv.t_of(4) == 9


def test_factor_base_91(fb91):
    assert fb91.primes == (2, 3, 5)
    assert sorted(en.modulus for en in fb91.entries) == [2, 3, 5, 9, 25, 27]
    assert {en.label(): en.roots_t for en in fb91.entries} == {
        "2": (0,), "3": (0, 2), "5": (1, 4), "3^2": (3, 5), "5^2": (16, 24), "3^3": (3, 14),
    }  # fmt: skip


def test_factor_base_91_full_ceiling():
    iv = SieveInterval.centered(10)
    fb = build_factor_base(91, 5, iv, interval_abs_range(QsPolynomial(91), iv)[1])
    assert 81 in [en.modulus for en in fb.entries]


@pytest.mark.parametrize("n,p", [(15, 3), (35, 5), (77, 7)])
def test_early_factor(n, p):
    with pytest.raises(EarlyFactor) as ei:
        build_factor_base(n, 7, SieveInterval.centered(10))
    assert ei.value.divisor == p


def test_even_and_square_rejected():
    with pytest.raises(EarlyFactor):
        build_factor_base(92, 5, SieveInterval.centered(10))
    with pytest.raises(ValueError):
        build_factor_base(121, 5, SieveInterval.centered(10))


@given(
    st.integers(17, 10**4).filter(odd_nonsquare),
    st.integers(2, 64),
    st.integers(3, 20),
)
def test_roots_exact_against_brute_force(n, M, B):
    """t is a listed root of p^e exactly when p^e divides f at t."""
    iv = SieveInterval.centered(M)
    fb = safe_fb(n, B, iv)
    assume(fb is not None)
    poly = QsPolynomial(n)
    for en in fb.entries:
        P = en.modulus
        brute = tuple(t for t in range(P) if poly(t + iv.x_min) % P == 0)
        assert en.roots_t == brute
    # primes present exactly when 2 or a quadratic residue
    want = [p for p in primes_up_to(B) if p == 2 or pow(n, (p - 1) // 2, p) == 1]
    assert list(fb.primes) == want


@given(st.integers(17, 10**4).filter(odd_nonsquare), st.integers(2, 64), st.integers(3, 20))
def test_full_ceiling_covers_every_dividing_power(n, M, B):
    iv = SieveInterval.centered(M)
    poly = QsPolynomial(n)
    fb = safe_fb(n, B, iv, interval_abs_range(poly, iv)[1])
    assume(fb is not None)
    mods = {en.modulus for en in fb.entries}
    for x in range(iv.x_min, iv.x_max + 1):
        v = abs(poly(x))
        if v == 0:
            continue
        for p in fb.primes:
            pe = p
            while v % pe == 0:
                assert pe in mods
                pe *= p


def test_factor_base_json_roundtrip(fb91):
    fb2 = FactorBase.from_json(fb91.to_json())
    assert fb2 == fb91
    assert json.loads(fb91.to_json())["B"] == 5


@given(st.integers(-(10**9), 10**9).filter(lambda v: v != 0))
def test_trial_divide_reconstructs(v):
    primes = (2, 3, 5, 7, 11, 13)
    rel = trial_divide(v, primes, x=0)
    rest = abs(v)
    for p in primes:
        while rest % p == 0:
            rest //= p
    if rest != 1:
        assert rel is None
    else:
        assert rel.check(primes)
        assert rel.sign_negative == (v < 0)


def test_trial_divide_zero():
    with pytest.raises(ValueError):
        trial_divide(0, (2, 3))


def test_smooth_mask_matches_scalar(fb91):
    vals = np.array([-66, -55, -42, -27, -10, 9, 30, 53, 78, 105, 0])
    got = smooth_mask(vals, fb91)
    want = [v != 0 and trial_divide(int(v), fb91) is not None for v in vals]
    assert got.tolist() == want
    assert np.flatnonzero(got).tolist() == [3, 4, 5, 6]


def test_smooth_mask_object_dtype():
    vals = np.array([2**70, 3 * 2**65 + 0, 7 * 2**64], dtype=object)
    assert smooth_mask(vals, (2, 3)).tolist() == [True, True, False]
