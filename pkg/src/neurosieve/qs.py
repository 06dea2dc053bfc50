"""Quadratic sieve problem setup: polynomial, interval, factor base, relations."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .arith import legendre_symbol, primes_up_to, sqrt_mod_power_of_two, sqrt_mod_prime_power


class EarlyFactor(Exception):
    """A factor-base prime divides n, so n is already factored."""

    def __init__(self, divisor: int, n: int):
        super().__init__(f"{divisor} divides {n}")
        self.divisor = divisor
        self.n = n


@dataclass(frozen=True)
class QsPolynomial:
    """f(x) = (x + ceil(sqrt(n)))^2 - n."""

    n: int

    @property
    def m(self) -> int:
        r = math.isqrt(self.n)
        return r if r * r == self.n else r + 1

    def __call__(self, x: int) -> int:
        return eval_poly(self, x)

    def values(self, interval: SieveInterval) -> np.ndarray:
        """f over the whole interval, int64 when it fits, else object dtype."""
        lo, hi = self(interval.x_min), self(interval.x_max)
        bound = max(abs(lo), abs(hi), self.n)
        y = np.arange(interval.x_min, interval.x_min + interval.length, dtype=np.int64)
        if bound < 2**62 and abs(interval.x_min) + self.m < 2**31:
            y += self.m
            return y * y - self.n
        yo = y.astype(object) + self.m
        return yo * yo - self.n


def eval_poly(poly: QsPolynomial, x: int) -> int:
    y = x + poly.m
    return y * y - poly.n


@dataclass(frozen=True)
class SieveInterval:
    """x in [x_min, x_min + length); tick t = x - x_min."""

    x_min: int
    length: int

    @classmethod
    def centered(cls, length: int) -> SieveInterval:
        return cls(-(length // 2), length)

    @property
    def x_max(self) -> int:
        return self.x_min + self.length - 1

    def x_of(self, t):
        return t + self.x_min

    def t_of(self, x):
        return x - self.x_min


@dataclass(frozen=True)
class FactorBaseEntry:
    p: int
    e: int
    roots_t: tuple[int, ...]

    @property
    def modulus(self) -> int:
        return self.p**self.e

    @property
    def log_weight(self) -> float:
        return self.e * math.log(self.p)

    def label(self) -> str:
        return str(self.p) if self.e == 1 else f"{self.p}^{self.e}"


@dataclass(frozen=True)
class FactorBase:
    n: int
    B: int
    interval: SieveInterval
    entries: tuple[FactorBaseEntry, ...]
    primes: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "primes", tuple(sorted({en.p for en in self.entries if en.e == 1})))

    @property
    def b(self) -> int:
        """Number of distinct primes; b + 1 relations are the target."""
        return len(self.primes)

    @property
    def poly(self) -> QsPolynomial:
        return QsPolynomial(self.n)

    @property
    def log_weights(self) -> np.ndarray:
        return np.array([en.log_weight for en in self.entries])

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": str(self.n),
                "B": self.B,
                "x_min": self.interval.x_min,
                "M": self.interval.length,
                "entries": [
                    {"p": en.p, "e": en.e, "modulus": en.modulus, "roots_t": list(en.roots_t), "log_weight": en.log_weight}
                    for en in self.entries
                ],
            },
            indent=1,
        )

    @classmethod
    def from_json(cls, text: str) -> FactorBase:
        d = json.loads(text)
        entries = tuple(FactorBaseEntry(p=en["p"], e=en["e"], roots_t=tuple(en["roots_t"])) for en in d["entries"])
        return cls(n=int(d["n"]), B=d["B"], interval=SieveInterval(d["x_min"], d["M"]), entries=entries)


def _t_roots(roots_y, modulus: int, m: int, x_min: int) -> tuple[int, ...]:
    # y = x + m is a root of y^2 = n, and t = x - x_min
    return tuple(sorted({(r - m - x_min) % modulus for r in roots_y}))


def interval_abs_range(poly: QsPolynomial, interval: SieveInterval) -> tuple[int, int]:
    """(smaller, larger) of |f| at the two interval endpoints."""
    a, b = abs(poly(interval.x_min)), abs(poly(interval.x_max))
    return min(a, b), max(a, b)


def build_factor_base(n: int, B: int, interval: SieveInterval, power_ceiling: int | None = None) -> FactorBase:
    """Primes p <= B with (n/p) = 1, plus 2, and their prime powers.

    Powers p**e are added while p**e <= ``power_ceiling``, which defaults to
    the smaller endpoint magnitude of |f|. Pass the larger endpoint magnitude
    when every power dividing an interval value must be represented. Powers of
    2 exist only when y^2 = n has roots modulo 2**e.
    """
    if n % 2 == 0:
        raise EarlyFactor(2, n)
    r = math.isqrt(n)
    if r * r == n:
        raise ValueError(f"{n} is a perfect square")
    poly = QsPolynomial(n)
    m, x_min = poly.m, interval.x_min
    if power_ceiling is None:
        power_ceiling = interval_abs_range(poly, interval)[0]

    entries: list[FactorBaseEntry] = []
    for p in primes_up_to(B):
        if p > 2:
            ls = legendre_symbol(n, p)
            if ls == 0:
                raise EarlyFactor(p, n)
            if ls < 0:
                continue
        e, pe = 1, p
        while e == 1 or pe <= power_ceiling:
            roots = sqrt_mod_power_of_two(n, e) if p == 2 else sqrt_mod_prime_power(n, p, e)
            if not roots:
                break
            entries.append(FactorBaseEntry(p=p, e=e, roots_t=_t_roots(roots, pe, m, x_min)))
            e, pe = e + 1, pe * p
    entries.sort(key=lambda en: en.modulus)
    return FactorBase(n=n, B=B, interval=interval, entries=tuple(entries))


@dataclass(frozen=True)
class Relation:
    x: int
    value: int
    sign_negative: bool
    exponents: tuple[int, ...]

    def check(self, primes) -> bool:
        prod = 1
        for p, k in zip(primes, self.exponents):
            prod *= p**k
        return (-prod if self.sign_negative else prod) == self.value


def _primes_of(fb) -> tuple[int, ...]:
    return fb.primes if isinstance(fb, FactorBase) else tuple(fb)


def trial_divide(value: int, fb, x: int | None = None) -> Relation | None:
    """Factor ``value`` completely over the factor-base primes, or return None."""
    if value == 0:
        raise ValueError("cannot trial-divide zero")
    primes = _primes_of(fb)
    rest = abs(value)
    exps = []
    for p in primes:
        k = 0
        while rest % p == 0:
            rest //= p
            k += 1
        exps.append(k)
    if rest != 1:
        return None
    return Relation(x=x, value=value, sign_negative=value < 0, exponents=tuple(exps))


def smooth_mask(values: np.ndarray, fb) -> np.ndarray:
    """Vectorised trial division: True where |value| factors over the primes.

    Zero values are reported as not smooth.
    """
    primes = _primes_of(fb)
    rest = np.abs(values)
    if rest.dtype == object:
        return np.array([v != 0 and trial_divide(int(v), primes) is not None for v in values], dtype=bool)
    rest = rest.copy()
    rest[rest == 0] = -1
    for p in primes:
        idx = np.flatnonzero(rest % p == 0)
        while idx.size:
            rest[idx] //= p
            idx = idx[rest[idx] % p == 0]
    return rest == 1
