"""Baseline array log sieve (the von Neumann reference)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qs import FactorBase, QsPolynomial, SieveInterval

DEFAULT_LOG_SCALE = 1.0
DEFAULT_THRESHOLD_OFFSET = 2.0


@dataclass
class SieveArray:
    values: np.ndarray
    scale: float | None  # None: exact real-valued logs
    update_count: int


def cpu_sieve_run(
    fb: FactorBase,
    poly: QsPolynomial | None = None,
    interval: SieveInterval | None = None,
    log_scale: float | None = DEFAULT_LOG_SCALE,
    block_size: int | None = None,
    sieve_powers: bool = True,
) -> SieveArray:
    """Accumulate round(log_scale * ln p) at every position a factor-base entry divides.

    A prime power p**e contributes ln p on top of p**(e-1), so a position
    ends up with the scaled log of its largest dividing power product.
    ``log_scale=None`` accumulates exact float logs. ``block_size`` only
    changes iteration order. ``sieve_powers=False`` sieves the primes only.
    """
    interval = fb.interval if interval is None else interval
    M = interval.length
    exact = log_scale is None
    arr = np.zeros(M, dtype=np.float64 if exact else np.int64)
    updates = 0
    bs = M if block_size is None else block_size
    entries = [en for en in fb.entries if sieve_powers or en.e == 1]
    incs = [math.log(en.p) if exact else round(log_scale * math.log(en.p)) for en in entries]
    for start in range(0, M, bs):
        stop = min(start + bs, M)
        for en, inc in zip(entries, incs):
            P = en.modulus
            for r in en.roots_t:
                first = start + (r - start) % P
                if first < stop:
                    arr[first:stop:P] += inc
                    updates += (stop - 1 - first) // P + 1
    return SieveArray(values=arr, scale=log_scale, update_count=updates)


def expected_update_count(fb: FactorBase, M: int | None = None) -> int:
    """Exact number of additions: per root, the count of t in [0, M) hit."""
    M = fb.interval.length if M is None else M
    total = 0
    for en in fb.entries:
        for r in en.roots_t:
            first = r % en.modulus
            if first < M:
                total += (M - 1 - first) // en.modulus + 1
    return total


def closed_form_updates(fb: FactorBase, M: int | None = None) -> float:
    """M (1/2 + sum over odd primes of 2/p): the prime-only update estimate."""
    M = fb.interval.length if M is None else M
    return M * (0.5 + sum(2 / p for p in fb.primes if p != 2))


def log_abs_f(poly: QsPolynomial, interval: SieveInterval) -> np.ndarray:
    vals = poly.values(interval)
    out = np.full(len(vals), -np.inf)
    nz = vals != 0
    out[nz] = np.log(np.abs(vals[nz]).astype(float))
    return out


def cpu_scores(arr: SieveArray, poly: QsPolynomial, interval: SieveInterval) -> np.ndarray:
    """Margin arr[t] - scale * ln|f(x)| in nats (higher = more likely smooth)."""
    scale = 1.0 if arr.scale is None else arr.scale
    return arr.values / scale - log_abs_f(poly, interval)


def cpu_threshold_candidates(
    arr: SieveArray,
    poly: QsPolynomial,
    interval: SieveInterval,
    threshold_offset: float = DEFAULT_THRESHOLD_OFFSET,
) -> list[int]:
    """x with arr[t] >= scale * (ln|f(x)| - offset); f(x) = 0 never reported."""
    scale = 1.0 if arr.scale is None else arr.scale
    logs = log_abs_f(poly, interval)
    # float sums of ln p can land a few ulps below ln|f|
    tol = 1e-9 * np.maximum(np.abs(logs), 1.0)
    ok = np.isfinite(logs) & (arr.values >= scale * (logs - threshold_offset) - tol)
    return [int(t) + interval.x_min for t in np.flatnonzero(ok)]
