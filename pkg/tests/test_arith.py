import math

import pytest
from hypothesis import given, strategies as st

from neurosieve.arith import (
    SingularRootError,
    gen_semiprime,
    hensel_lift,
    is_prime,
    legendre_symbol,
    primes_up_to,
    smoothness_bound,
    sqrt_mod_power_of_two,
    sqrt_mod_prime,
    sqrt_mod_prime_power,
)

SMALL_PRIMES = [p for p in range(3, 200) if all(p % d for d in range(2, p))]


def brute_roots(a, mod):
    return tuple(r for r in range(mod) if (r * r - a) % mod == 0)


def test_primes_up_to_matches_trial_division():
    assert primes_up_to(200) == [2] + SMALL_PRIMES
    assert primes_up_to(1) == []


@given(st.integers(-10, 20000))
def test_is_prime_small(n):
    expect = n >= 2 and all(n % d for d in range(2, math.isqrt(n) + 1))
    assert is_prime(n) == expect


@pytest.mark.parametrize("n", [2**61 - 1, 2**89 - 1, 2**127 - 1])
def test_is_prime_mersenne(n):
    assert is_prime(n)


@pytest.mark.parametrize("n", [561, 3215031751, 3825123056546413051, (2**61 - 1) * (2**31 - 1)])
def test_is_prime_rejects_pseudoprimes(n):
    assert not is_prime(n)


@given(st.sampled_from(SMALL_PRIMES), st.integers(0, 10**6))
def test_legendre_is_euler_criterion(p, a):
    e = pow(a, (p - 1) // 2, p)
    assert legendre_symbol(a, p) == (e if e <= 1 else -1)


def test_legendre_rejects_non_odd_prime():
    with pytest.raises(ValueError):
        legendre_symbol(3, 9)
    with pytest.raises(ValueError):
        legendre_symbol(3, 2)


@given(st.sampled_from(SMALL_PRIMES), st.integers(1, 10**6))
def test_sqrt_mod_prime_against_brute_force(p, a):
    if a % p == 0:
        with pytest.raises(ValueError):
            sqrt_mod_prime(a, p)
        return
    got = sqrt_mod_prime(a, p)
    want = brute_roots(a, p)
    if not want:
        assert got is None
    else:
        assert tuple(sorted(got)) == want
        assert got[0] <= got[1]


def test_sqrt_mod_prime_known():
    assert sqrt_mod_prime(91, 3) == (1, 2)
    assert sqrt_mod_prime(91, 5) == (1, 4)
    with pytest.raises(ValueError):
        sqrt_mod_prime(91, 7)


@pytest.mark.parametrize("p,e", [(3, 2), (3, 3), (3, 4), (5, 2), (5, 3), (7, 3), (11, 2), (13, 2)])
def test_sqrt_mod_prime_power_exhaustive(p, e):
    mod = p**e
    for a in range(1, 200):
        if a % p == 0:
            continue
        assert sqrt_mod_prime_power(a, p, e) == brute_roots(a, mod)


def test_hensel_examples():
    # 91 = 1 (mod 9), 10 (mod 27), 16 (mod 25)
    assert sqrt_mod_prime_power(91, 3, 2) == (1, 8)
    assert sqrt_mod_prime_power(91, 3, 3) == (8, 19)
    assert sqrt_mod_prime_power(91, 5, 2) == (4, 21)


def test_hensel_singular():
    with pytest.raises(SingularRootError):
        hensel_lift((3,), 9, 3, 2)


@pytest.mark.parametrize("e", range(1, 9))
def test_sqrt_mod_power_of_two_exhaustive(e):
    for a in range(1, 200, 2):
        assert sqrt_mod_power_of_two(a, e) == brute_roots(a, 2**e)


def test_sqrt_mod_power_of_two_counts():
    # 1, 2, 4 roots for e = 1, 2, >= 3 when a = 1 (mod 8)
    assert [len(sqrt_mod_power_of_two(17, e)) for e in (1, 2, 3, 6)] == [1, 2, 4, 4]
    assert sqrt_mod_power_of_two(3, 2) == ()


@pytest.mark.parametrize("n,B", [(91, 5), (2**32, 63), (2**64, 655)])
def test_smoothness_bound(n, B):
    assert smoothness_bound(n) == B


def test_smoothness_bound_small_n():
    with pytest.raises(ValueError):
        smoothness_bound(15)


@given(st.integers(16, 128), st.integers(0, 2**32))
def test_gen_semiprime_shape(bits, seed):
    inst = gen_semiprime(bits, seed)
    assert inst.n.bit_length() == bits
    assert inst.p * inst.q == inst.n
    assert inst.p < inst.q
    assert is_prime(inst.p) and is_prime(inst.q)
    assert abs(inst.p.bit_length() - inst.q.bit_length()) <= 2


def test_gen_semiprime_deterministic():
    assert gen_semiprime(48, 7) == gen_semiprime(48, 7)
    assert gen_semiprime(48, 7).n != gen_semiprime(48, 8).n


@pytest.mark.parametrize("bits", [15, 129])
def test_gen_semiprime_range(bits):
    with pytest.raises(ValueError):
        gen_semiprime(bits, 0)
