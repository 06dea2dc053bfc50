"""Smoothness-neuron weight quantization.

The hardware allows at most four distinct synaptic weights into one neuron,
so the log factor weights ln(p**e) have to be squeezed onto a few levels:

* ``regress``  -- 4-leaf regression tree (step function) on the log values
* ``inverse``  -- same, with each point weighted by 1 / value in the MSE
* ``uniform``  -- every factor counts 1
* ``integer``  -- round(value); exact but usually more than 4 levels
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

MAX_DISTINCT_WEIGHTS = 4
DEFAULT_SCALE = 16.0


class Strategy(str, Enum):
    REGRESS = "regress"
    INVERSE = "inverse"
    UNIFORM = "uniform"
    INTEGER = "integer"


class ConstraintViolation(ValueError):
    def __init__(self, distinct_count: int, max_distinct: int = MAX_DISTINCT_WEIGHTS):
        super().__init__(f"{distinct_count} distinct weights exceed the limit of {max_distinct}")
        self.distinct_count = distinct_count
        self.max_distinct = max_distinct


@dataclass(frozen=True)
class QuantizedWeights:
    strategy: Strategy
    weights: np.ndarray
    scale: float
    levels: np.ndarray | None = None  # real-valued group values before scaling

    @property
    def distinct_count(self) -> int:
        return len(np.unique(self.weights))

    def to_log_units(self) -> np.ndarray:
        return self.weights / self.scale


def _segment_cost_table(values: np.ndarray, point_weights: np.ndarray):
    """cost[i, j]: weighted SSE of values[i:j] around their weighted mean."""
    k = len(values)
    cw = np.concatenate([[0.0], np.cumsum(point_weights)])
    cwx = np.concatenate([[0.0], np.cumsum(point_weights * values)])
    cwx2 = np.concatenate([[0.0], np.cumsum(point_weights * values * values)])
    cost = np.full((k + 1, k + 1), np.inf)
    for i in range(k):
        for j in range(i + 1, k + 1):
            w = cw[j] - cw[i]
            s = cwx[j] - cwx[i]
            cost[i, j] = max(cwx2[j] - cwx2[i] - s * s / w, 0.0)
    return cost, cw, cwx


def optimal_partition(values, point_weights=None, groups: int = MAX_DISTINCT_WEIGHTS):
    """Best split of sorted ``values`` into at most ``groups`` contiguous runs.

    Minimises sum_i w_i (v_i - mean_w(group))^2. Returns ``(cuts, cost)`` where
    ``cuts`` are the run boundaries [0, c1, ..., k]. Ties go to fewer groups,
    then to lexicographically earliest boundaries.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("empty input")
    if np.any(np.diff(v) < 0):
        raise ValueError("values must be sorted")
    w = np.ones_like(v) if point_weights is None else np.asarray(point_weights, dtype=float)
    k = len(v)
    cost, _, _ = _segment_cost_table(v, w)
    tol = 1e-12 * max(1.0, float(np.sum(w * v * v)))

    best_cost, best_cuts = np.inf, None
    # dp[g][j]: best cost of splitting v[:j] into exactly g runs, with the
    # lexicographically earliest boundaries among ties
    dp = [[(np.inf, ())] * (k + 1) for _ in range(groups + 1)]
    dp[0][0] = (0.0, (0,))
    for g in range(1, groups + 1):
        for j in range(g, k + 1):
            cand = (np.inf, ())
            for i in range(g - 1, j):
                c0, path = dp[g - 1][i]
                if not path:
                    continue
                c = c0 + cost[i, j]
                new = path + (j,)
                if c < cand[0] - tol or (abs(c - cand[0]) <= tol and new < cand[1]):
                    cand = (c, new)
            dp[g][j] = cand
        c, path = dp[g][k]
        if path and c < best_cost - tol:
            best_cost, best_cuts = c, path
    return list(best_cuts), float(best_cost)


def _fit_levels(values: np.ndarray, point_weights: np.ndarray, groups: int) -> np.ndarray:
    # equal values must share a level, so partition the unique values
    uv, inv = np.unique(values, return_inverse=True)
    uw = np.bincount(inv, weights=point_weights)
    cuts, _ = optimal_partition(uv, uw, groups)
    fitted = np.empty_like(uv)
    for a, b in zip(cuts[:-1], cuts[1:]):
        fitted[a:b] = np.sum(uw[a:b] * uv[a:b]) / np.sum(uw[a:b])
    return fitted[inv]


def quantize(log_weights, strategy: Strategy | str, scale: float = DEFAULT_SCALE) -> QuantizedWeights:
    """Map real log weights onto integer synaptic weights."""
    strategy = Strategy(strategy)
    v = np.asarray(log_weights, dtype=float)
    if v.size == 0:
        raise ValueError("empty input")
    if np.any(v <= 0):
        raise ValueError("log weights must be positive")
    if strategy is Strategy.UNIFORM:
        return QuantizedWeights(strategy, np.ones(v.size, dtype=np.int64), 1.0, np.ones(v.size))
    if strategy is Strategy.INTEGER:
        return QuantizedWeights(strategy, np.rint(v).astype(np.int64), 1.0, v.copy())
    pw = np.ones_like(v) if strategy is Strategy.REGRESS else 1.0 / v
    levels = _fit_levels(v, pw, MAX_DISTINCT_WEIGHTS)
    return QuantizedWeights(strategy, np.rint(scale * levels).astype(np.int64), float(scale), levels)


def check_constraint(weights: QuantizedWeights, max_distinct: int = MAX_DISTINCT_WEIGHTS) -> None:
    """Raise ``ConstraintViolation`` if the weights need too many axon types."""
    if weights.distinct_count > max_distinct:
        raise ConstraintViolation(weights.distinct_count, max_distinct)


def relative_sse(log_weights, qw: QuantizedWeights) -> float:
    """Quantization error in log units, relative to sum v^2.

    Uniform weights carry no scale, so they are compared at the best single
    scale factor (the mean).
    """
    v = np.asarray(log_weights, dtype=float)
    approx = np.full_like(v, v.mean()) if qw.strategy is Strategy.UNIFORM else qw.to_log_units()
    return float(np.sum((v - approx) ** 2) / np.sum(v * v))
