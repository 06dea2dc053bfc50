import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from neurosieve.arith import primes_up_to
from neurosieve.quantize import (
    ConstraintViolation,
    Strategy,
    check_constraint,
    optimal_partition,
    quantize,
    relative_sse,
)


def sse(values, weights, groups):
    total = 0.0
    for g in groups:
        v, w = values[g], weights[g]
        mu = np.sum(w * v) / np.sum(w)
        total += float(np.sum(w * (v - mu) ** 2))
    return total


def exhaustive_contiguous(values, weights, k=4):
    n = len(values)
    best = math.inf
    for g in range(1, min(k, n) + 1):
        for cuts in itertools.combinations(range(1, n), g - 1):
            b = (0, *cuts, n)
            best = min(best, sse(values, weights, [np.arange(b[i], b[i + 1]) for i in range(g)]))
    return best


def set_partitions(items, k):
    """All partitions of items into at most k blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest, k):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        if len(part) < k:
            yield [[first]] + part


sorted_values = st.lists(st.floats(0.1, 12.0, allow_nan=False), min_size=1, max_size=12).map(sorted)


@given(sorted_values, st.sampled_from(["regress", "inverse"]))
def test_dp_matches_contiguous_search(values, mode):
    v = np.array(values)
    w = np.ones_like(v) if mode == "regress" else 1 / v
    cuts, cost = optimal_partition(v, w)
    assert cost == pytest.approx(exhaustive_contiguous(v, w), rel=1e-9, abs=1e-9)
    assert cuts[0] == 0 and cuts[-1] == len(v) and len(cuts) <= 5
    assert cost == pytest.approx(sse(v, w, [np.arange(a, b) for a, b in zip(cuts[:-1], cuts[1:])]), abs=1e-9)


@given(st.lists(st.floats(0.1, 12.0), min_size=1, max_size=7).map(sorted), st.booleans())
def test_contiguous_is_optimal_over_all_set_partitions(values, inverse):
    v = np.array(values)
    w = 1 / v if inverse else np.ones_like(v)
    best = min(sse(v, w, [np.array(b) for b in part]) for part in set_partitions(list(range(len(v))), 4))
    _, cost = optimal_partition(v, w)
    assert cost == pytest.approx(best, rel=1e-9, abs=1e-9)


def test_partition_tie_breaks():
    # zero cost is reachable with 3 groups, so 4 is never used
    cuts, cost = optimal_partition([1.0, 1.0, 2.0, 3.0])
    assert cost == 0.0
    assert cuts == [0, 2, 3, 4]
    assert optimal_partition([5.0, 5.0, 5.0]) == ([0, 3], 0.0)


def test_partition_input_checks():
    with pytest.raises(ValueError):
        optimal_partition([])
    with pytest.raises(ValueError):
        optimal_partition([2.0, 1.0])


def log_weights(B=200):
    return np.log(np.array(primes_up_to(B), dtype=float))


@pytest.mark.parametrize("strategy", ["regress", "inverse", "uniform"])
def test_quantized_weights_fit_constraint(strategy):
    qw = quantize(log_weights(), strategy)
    assert qw.distinct_count <= 4
    check_constraint(qw)


@pytest.mark.parametrize("strategy", ["regress", "inverse", "integer"])
def test_quantize_is_monotone(strategy):
    v = log_weights()
    w = quantize(v, strategy).weights
    order = np.argsort(v, kind="stable")
    assert np.all(np.diff(w[order]) >= 0)


def test_uniform_and_integer():
    v = np.log([2.0, 3.0, 5.0, 9.0, 25.0, 27.0])
    assert quantize(v, "uniform").weights.tolist() == [1] * 6
    assert quantize(v, "integer").weights.tolist() == [1, 1, 2, 2, 3, 3]


def test_integer_violates_on_large_base():
    qw = quantize(log_weights(700), Strategy.INTEGER)
    with pytest.raises(ConstraintViolation) as ei:
        check_constraint(qw)
    assert ei.value.distinct_count > 4


def test_inverse_favours_small_values():
    """1/v weighting fits the small logs more tightly than plain regression."""
    v = log_weights(700)
    r, i = quantize(v, "regress"), quantize(v, "inverse")
    small = v < 3
    err = lambda q: np.abs(q.to_log_units()[small] - v[small]).mean()
    assert err(i) <= err(r)


def test_relative_sse_ordering():
    v = log_weights(700)
    errs = {s: relative_sse(v, quantize(v, s)) for s in ("regress", "integer", "uniform")}
    assert errs["integer"] < errs["uniform"]
    assert errs["regress"] < errs["uniform"]


@pytest.mark.parametrize("bad", [[], [1.0, 0.0], [-1.0]])
def test_quantize_input_checks(bad):
    with pytest.raises(ValueError):
        quantize(bad, "regress")


def test_unknown_strategy():
    with pytest.raises(ValueError):
        quantize([1.0], "median")
