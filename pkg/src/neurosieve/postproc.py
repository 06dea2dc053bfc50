"""From smooth relations to factors: GF(2) elimination and congruence of squares."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import cpu_sieve, snn
from .arith import is_prime, primes_up_to, smoothness_bound
from .qs import EarlyFactor, FactorBase, QsPolynomial, Relation, SieveInterval, build_factor_base, interval_abs_range, smooth_mask, trial_divide
from .quantize import quantize

log = logging.getLogger(__name__)

DEFAULT_M = 2**17
MAX_ATTEMPTS = 64


@dataclass
class Gf2Matrix:
    """Exponent parities as int bitsets: bit 0 is the sign, bit j+1 prime j."""

    rows: list[int]
    n_cols: int

    @classmethod
    def from_relations(cls, relations: list[Relation], b: int) -> Gf2Matrix:
        rows = []
        for rel in relations:
            v = int(rel.sign_negative)
            for j, k in enumerate(rel.exponents):
                if k & 1:
                    v |= 1 << (j + 1)
            rows.append(v)
        return cls(rows, b + 1)


def find_dependencies(matrix: Gf2Matrix) -> list[list[int]]:
    """Null-space basis of the row space: row subsets that XOR to zero."""
    pivots: dict[int, tuple[int, int]] = {}
    deps = []
    for i, row in enumerate(matrix.rows):
        v, h = row, 1 << i
        while v:
            low = v & -v
            if low in pivots:
                pv, ph = pivots[low]
                v ^= pv
                h ^= ph
            else:
                pivots[low] = (v, h)
                break
        if v == 0:
            deps.append([j for j in range(i + 1) if h >> j & 1])
    return deps


@dataclass(frozen=True)
class Congruence:
    x_val: int
    y_val: int


def build_congruence(subset: list[Relation], poly: QsPolynomial, primes) -> Congruence:
    n, m = poly.n, poly.m
    if not subset:
        return Congruence(1, 1)
    totals = np.zeros(len(primes), dtype=object)
    signs = 0
    x_val = 1
    for rel in subset:
        totals += np.array(rel.exponents, dtype=object)
        signs += rel.sign_negative
        x_val = x_val * (rel.x + m) % n
    if signs % 2 or any(t % 2 for t in totals):
        raise ValueError("relation subset does not form a square")
    y_val = 1
    for p, t in zip(primes, totals):
        if t:
            y_val = y_val * pow(p, int(t) // 2, n) % n
    if (x_val * x_val - y_val * y_val) % n:
        raise AssertionError("congruence of squares check failed")
    return Congruence(x_val, y_val)


def extract_factor(c: Congruence, n: int) -> int | None:
    g = math.gcd(c.x_val - c.y_val, n)
    return g if 1 < g < n else None


@dataclass
class FactorConfig:
    backend: str = "snn"
    strategy: str | None = "uniform"  # None: exact software weights
    B: int | None = None
    M: int | None = None
    tau: float | None = None
    tau_slack: float | None = None  # nats below ln(typical |f|); default ln B
    threshold_offset: float = cpu_sieve.DEFAULT_THRESHOLD_OFFSET
    log_scale: float | None = cpu_sieve.DEFAULT_LOG_SCALE
    scale: float = 16.0
    constrained: bool = True
    delay: int = 2
    max_doublings: int = 6
    b_growth: float = 1.5  # B multiplier applied alongside each doubling
    max_attempts: int = MAX_ATTEMPTS


@dataclass
class FactorResult:
    p: int
    q: int
    report: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({"p": str(self.p), "q": str(self.q), **self.report}, indent=1, default=str)


class FactorizationFailed(RuntimeError):
    pass


def default_interval_length(n: int) -> int:
    """2**17, shrunk for tiny n so the interval stays near sqrt(n)."""
    target = max(64, 8 * math.isqrt(n))
    return min(DEFAULT_M, 1 << (target - 1).bit_length())


def default_log_threshold(fb: FactorBase, slack: float | None = None) -> float:
    """ln of a typical |f| on the interval (half the smaller endpoint), minus slack.

    The default slack 2 ln B keeps most smooth values above a fixed tau.
    """
    lo, _ = interval_abs_range(fb.poly, fb.interval)
    slack = 2 * math.log(fb.B) if slack is None else slack
    return max(math.log(max(lo / 2, 2.0)) - slack, 0.0)


def sieve_candidates(fb: FactorBase, cfg: FactorConfig) -> tuple[list[int], dict]:
    """Run the configured backend over fb's interval; returns candidate x values."""
    poly, interval = fb.poly, fb.interval
    if cfg.backend == "cpu":
        arr = cpu_sieve.cpu_sieve_run(fb, poly, interval, cfg.log_scale)
        xs = cpu_sieve.cpu_threshold_candidates(arr, poly, interval, cfg.threshold_offset)
        return xs, {"memory_updates": arr.update_count}
    if cfg.backend != "snn":
        raise ValueError(f"unknown backend {cfg.backend!r}")
    if cfg.strategy is None:
        net = snn.build_network(fb, None, None, constrained=False, delay=cfg.delay)
        tau = None
    else:
        qw = quantize(fb.log_weights, cfg.strategy, cfg.scale)
        tau = cfg.tau
        if tau is None:
            tau = snn.log_threshold_to_tau(default_log_threshold(fb, cfg.tau_slack), qw, fb)
        net = snn.build_network(fb, qw, tau, constrained=cfg.constrained, delay=cfg.delay)
    xs, trace = snn.run_sieve(net)
    return xs, {"tau": tau, "ticks": trace.ticks, "synaptic_events": trace.synaptic_events, "tonic_neurons": len(net.tonic)}


def collect_relations(fb: FactorBase, xs: list[int]) -> list[Relation]:
    """Trial-divide the candidates; keep one relation per +-y mod n (y = x + m).

    y and -y give the same f value, so keeping both only adds trivial
    dependencies once the interval is wider than 2m.
    """
    if not xs:
        return []
    poly = fb.poly
    n, m = poly.n, poly.m
    t = np.asarray(xs, dtype=np.int64) - fb.interval.x_min
    vals = poly.values(fb.interval)[t]
    keep = smooth_mask(vals, fb)
    rels, seen = [], set()
    for x, v in zip(np.asarray(xs)[keep], vals[keep]):
        y = (int(x) + m) % n
        key = min(y, n - y)
        if key in seen:
            continue
        rel = trial_divide(int(v), fb, x=int(x))
        if rel is not None:
            seen.add(key)
            rels.append(rel)
    return rels


def _trial_factor(n: int, limit: int) -> int | None:
    for p in primes_up_to(limit):
        if n % p == 0 and p < n:
            return p
    return None


def factor(n: int, config: FactorConfig | None = None) -> FactorResult:
    """Factor an odd semiprime with the sieve on the configured backend."""
    cfg = config or FactorConfig()
    if n < 4 or n % 2 == 0:
        raise ValueError(f"{n} is not an odd semiprime candidate")
    if is_prime(n):
        raise ValueError(f"{n} is prime")
    r = math.isqrt(n)
    if r * r == n:
        return FactorResult(r, r, {"provenance": "square"})
    if n < 16:
        d = _trial_factor(n, r)
        return FactorResult(d, n // d, {"provenance": "trial"})

    B = cfg.B or smoothness_bound(n)
    M = cfg.M or default_interval_length(n)
    poly = QsPolynomial(n)
    report: dict = {"n": str(n), "backend": cfg.backend, "strategy": cfg.strategy, "B": B, "doublings": 0, "attempts": 0}
    capped = cfg.backend == "snn" and cfg.constrained

    for doubling in range(cfg.max_doublings + 1):
        interval = SieveInterval.centered(M)
        try:
            ceiling = min(snn.MAX_PERIOD, interval_abs_range(poly, interval)[0]) if capped else None
            fb = build_factor_base(n, B, interval, ceiling)
        except EarlyFactor as ef:
            report.update(provenance="trial", doublings=doubling, M=M, B=B)
            return FactorResult(min(ef.divisor, n // ef.divisor), max(ef.divisor, n // ef.divisor), report)

        xs, info = sieve_candidates(fb, cfg)
        rels = collect_relations(fb, xs)
        report.update(doublings=doubling, M=M, B=B, b=fb.b, candidates=len(xs), relations=len(rels), **info)
        log.info("n=%d M=%d candidates=%d relations=%d (need %d)", n, M, len(xs), len(rels), fb.b + 1)
        if len(rels) >= fb.b + 1:
            deps = find_dependencies(Gf2Matrix.from_relations(rels, fb.b))
            attempts = 0
            for mask in range(1, min(2 ** len(deps), cfg.max_attempts + 1)):
                members = 0
                for j, dep in enumerate(deps):
                    if mask >> j & 1:
                        for i in dep:
                            members ^= 1 << i
                subset = [rels[i] for i in range(len(rels)) if members >> i & 1]
                attempts += 1
                cong = build_congruence(subset, poly, fb.primes)
                d = extract_factor(cong, n)
                if d is not None:
                    report.update(
                        provenance="sieve",
                        attempts=report["attempts"] + attempts,
                        dependency=[rel.x for rel in subset],
                        congruence={"x": str(cong.x_val), "y": str(cong.y_val)},
                    )
                    return FactorResult(min(d, n // d), max(d, n // d), report)
            report["attempts"] += attempts
        M *= 2
        B = max(B + 1, round(B * cfg.b_growth))
    raise FactorizationFailed(f"no factor of {n} after {cfg.max_doublings} doublings: {report}")
