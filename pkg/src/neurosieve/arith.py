"""Number-theoretic primitives used to set up the sieve."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

# Fixed-base Miller-Rabin. The first 13 primes are a proven witness set for
# n < 3.3e24 (~81 bits); up to 128 bits no strong pseudoprime to all of the
# first 20 prime bases is known.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71)

MAX_BITS = 128


def is_prime(n: int) -> bool:
    """Deterministic primality test for n < 2**128."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
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


def primes_up_to(limit: int) -> list[int]:
    """Sieve of Eratosthenes."""
    if limit < 2:
        return []
    mark = bytearray([1]) * (limit + 1)
    mark[0] = mark[1] = 0
    for i in range(2, math.isqrt(limit) + 1):
        if mark[i]:
            mark[i * i :: i] = bytearray(len(range(i * i, limit + 1, i)))
    return [i for i, v in enumerate(mark) if v]


def _check_odd_prime(p: int) -> None:
    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")


def legendre_symbol(a: int, p: int) -> int:
    """Legendre symbol (a/p) via Euler's criterion; returns -1, 0 or 1."""
    _check_odd_prime(p)
    ls = pow(a % p, (p - 1) // 2, p)
    return -1 if ls == p - 1 else ls


def sqrt_mod_prime(a: int, p: int) -> tuple[int, int] | None:
    """Both square roots of ``a`` modulo an odd prime, by Tonelli-Shanks.

    Returns ``(r, p - r)`` with ``r`` the smaller root, or ``None`` if ``a`` is
    a non-residue. Raises ``ValueError`` if ``p`` divides ``a``.
    """
    _check_odd_prime(p)
    a %= p
    if a == 0:
        raise ValueError(f"{p} divides a; no unit square root")
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
    else:
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while pow(z, (p - 1) // 2, p) != p - 1:
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
    r = min(r, p - r)
    return r, p - r


class SingularRootError(ValueError):
    """Raised when a root cannot be Hensel-lifted because p divides 2r."""


def hensel_lift(roots: tuple[int, ...] | list[int] | set[int], a: int, p: int, e: int) -> tuple[int, ...]:
    """Lift square roots of ``a`` mod p**(e-1) to roots mod p**e.

    Each input root r lifts to the unique r' = r + k p**(e-1) with
    r'^2 = a (mod p**e).
    """
    _check_odd_prime(p)
    if e < 2:
        raise ValueError("e must be at least 2")
    lo, hi = p ** (e - 1), p**e
    lifted = []
    for r in roots:
        if r % p == 0:
            raise SingularRootError(f"root {r} is divisible by {p}")
        if (r * r - a) % lo:
            raise ValueError(f"{r} is not a root of {a} mod {lo}")
        # Newton step: r' = r - (r^2 - a) / (2r)
        r2 = (r - (r * r - a) * pow(2 * r, -1, hi)) % hi
        lifted.append(r2)
    return tuple(sorted(set(lifted)))


def sqrt_mod_prime_power(a: int, p: int, e: int) -> tuple[int, ...]:
    """All square roots of a unit ``a`` modulo p**e (p odd), sorted."""
    base = sqrt_mod_prime(a, p)
    if base is None:
        return ()
    roots: tuple[int, ...] = base
    for k in range(2, e + 1):
        roots = hensel_lift(roots, a, p, k)
    return roots


def sqrt_mod_power_of_two(a: int, e: int) -> tuple[int, ...]:
    """All square roots of an odd ``a`` modulo 2**e, sorted.

    Odd residues have 1, 2 or 4 roots (e = 1, 2, >= 3) when solvable; the
    set is grown one bit at a time by testing both candidate lifts.
    """
    if a % 2 == 0:
        raise ValueError("a must be odd")
    roots = [1]
    for k in range(2, e + 1):
        mod = 1 << k
        roots = sorted({c for r in roots for c in (r, r + (mod >> 1)) if (c * c - a) % mod == 0})
        if not roots:
            return ()
    return tuple(roots)


def smoothness_bound(n: int) -> int:
    """exp(sqrt(ln n ln ln n) / 2), rounded, never below 5."""
    if n < 16:
        raise ValueError(f"smoothness bound needs n >= 16, got {n}")
    ln = math.log(n)
    return max(5, round(math.exp(0.5 * math.sqrt(ln * math.log(ln)))))


@dataclass(frozen=True)
class SemiprimeInstance:
    n: int
    p: int
    q: int
    bits: int
    seed: int


def _random_prime(rng: random.Random, bits: int) -> int:
    while True:
        c = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if is_prime(c):
            return c


def gen_semiprime(bits: int, seed: int) -> SemiprimeInstance:
    """Deterministic semiprime with exactly ``bits`` bits and balanced factors."""
    if not 16 <= bits <= MAX_BITS:
        raise ValueError(f"bits must be in [16, {MAX_BITS}], got {bits}")
    rng = random.Random(seed)
    hp = (bits + 1) // 2
    hq = bits - hp
    while True:
        p = _random_prime(rng, hp)
        q = _random_prime(rng, hq)
        n = p * q
        if p != q and n.bit_length() == bits:
            p, q = min(p, q), max(p, q)
            return SemiprimeInstance(n=n, p=p, q=q, bits=bits, seed=seed)
