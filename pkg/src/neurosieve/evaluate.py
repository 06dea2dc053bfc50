"""Accuracy and work comparison between the CPU log sieve and the SNN sieve."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import cpu_sieve, snn
from .arith import gen_semiprime, smoothness_bound
from .qs import FactorBase, QsPolynomial, SieveInterval, build_factor_base, interval_abs_range, smooth_mask
from .quantize import ConstraintViolation, Strategy, quantize

CSV_FIELDS = [
    "bits", "seed", "strategy", "backend", "eer", "fpr_at_cpu_tpr",
    "cpu_updates_per_value", "snn_ticks_per_value", "relations", "interval_len",
]  # fmt: skip
ALL_STRATEGIES = tuple(s.value for s in Strategy)


class UndefinedMetric(ValueError):
    pass


@dataclass(frozen=True)
class DetectionScore:
    x: int
    score: float
    truth: bool


@dataclass
class RocCurve:
    thresholds: np.ndarray  # ascending, last one +inf
    tpr: np.ndarray
    fpr: np.ndarray
    positives: int
    negatives: int

    @property
    def fnr(self) -> np.ndarray:
        return 1.0 - self.tpr

    @property
    def points(self) -> list[tuple[float, float, float, float]]:
        return list(zip(self.thresholds, self.tpr, self.fpr, self.fnr))


@dataclass
class WorkCounters:
    cpu_updates_per_value: float
    snn_ticks_per_value: float
    snn_synaptic_events_per_tick: float


def roc(scores, truth=None) -> RocCurve:
    """Sweep 'score >= threshold' over every distinct score (plus +inf).

    Accepts either a list of DetectionScore or parallel score / truth arrays.
    """
    if truth is None:
        truth = np.array([d.truth for d in scores], dtype=bool)
        scores = np.array([d.score for d in scores], dtype=float)
    s = np.asarray(scores, dtype=float)
    y = np.asarray(truth, dtype=bool)
    if s.size == 0:
        raise UndefinedMetric("no scores")
    P, N = int(y.sum()), int((~y).sum())
    thr = np.unique(s)
    order = np.argsort(s)
    ss, yy = s[order], y[order]
    # count of items with score >= thr[i]
    first = np.searchsorted(ss, thr, side="left")
    pos_ge = np.concatenate([np.cumsum(yy[::-1])[::-1], [0]])[first]
    neg_ge = np.concatenate([np.cumsum(~yy[::-1])[::-1], [0]])[first]
    thresholds = np.append(thr, np.inf)
    tpr = np.append(pos_ge / P if P else np.zeros(len(thr)), 0.0)
    fpr = np.append(neg_ge / N if N else np.zeros(len(thr)), 0.0)
    return RocCurve(thresholds, tpr, fpr, P, N)


def eer(curve: RocCurve) -> float:
    """Equal error rate, linearly interpolated where FPR - FNR changes sign."""
    if curve.positives == 0 or curve.negatives == 0:
        raise UndefinedMetric("EER needs both positives and negatives")
    d = curve.fpr - curve.fnr  # nonincreasing along ascending thresholds
    i = int(np.flatnonzero(d >= 0)[-1])
    if d[i] == 0 or i == len(d) - 1:
        return float(curve.fpr[i])
    s = d[i] / (d[i] - d[i + 1])
    return float(curve.fpr[i] + s * (curve.fpr[i + 1] - curve.fpr[i]))


def fpr_at_tpr(curve: RocCurve, target_tpr: float) -> float:
    """FPR at the strictest threshold that still reaches TPR >= target."""
    if curve.positives == 0:
        raise UndefinedMetric("TPR undefined without positives")
    ok = np.flatnonzero(curve.tpr >= target_tpr - 1e-12)
    return float(curve.fpr[ok[-1]])


def confidence_interval(values) -> tuple[float, float]:
    """Mean and normal-approximation 95% half-width (NaNs dropped)."""
    v = np.asarray([x for x in values if not math.isnan(x)], dtype=float)
    if v.size == 0:
        return math.nan, math.nan
    half = 1.96 * v.std(ddof=1) / math.sqrt(v.size) if v.size > 1 else math.nan
    return float(v.mean()), float(half)


@dataclass
class Instance:
    n: int
    bits: int
    seed: int
    B: int
    interval: SieveInterval

    @property
    def poly(self) -> QsPolynomial:
        return QsPolynomial(self.n)

    @classmethod
    def generate(cls, bits: int, seed: int, M: int = 2**17) -> Instance:
        n = gen_semiprime(bits, seed).n
        return cls(n, bits, seed, smoothness_bound(n), SieveInterval.centered(M))

    def factor_base(self, kind: str = "default") -> FactorBase:
        """'default': powers to the smaller |f| endpoint; 'snn': also capped at
        the largest neuron period; 'full': powers to the larger endpoint."""
        lo, hi = interval_abs_range(self.poly, self.interval)
        ceiling = {"default": lo, "snn": min(lo, snn.MAX_PERIOD), "full": hi}[kind]
        return build_factor_base(self.n, self.B, self.interval, ceiling)

    def truth(self, fb: FactorBase) -> np.ndarray:
        return smooth_mask(self.poly.values(self.interval), fb)


def score_arrays(
    backend: str,
    inst: Instance,
    strategy: str | None = None,
    *,
    scale: float = 16.0,
    log_scale: float | None = cpu_sieve.DEFAULT_LOG_SCALE,
    fb: FactorBase | None = None,
) -> tuple[np.ndarray, np.ndarray, dict]:
    """Per-position score plus run info for one backend.

    cpu: accumulated log minus ln|f| (nats); ``log_scale=None`` is exact.
    snn: the smoothness neuron's pre-threshold input; ``strategy=None`` is
    the exact software mode, scored as input minus ln|f|.
    """
    poly, iv = inst.poly, inst.interval
    info: dict = {}
    if backend == "cpu":
        fb = fb or inst.factor_base("full" if log_scale is None else "default")
        arr = cpu_sieve.cpu_sieve_run(fb, poly, iv, log_scale)
        info["updates"] = arr.update_count
        return cpu_sieve.cpu_scores(arr, poly, iv), fb.poly.values(iv), info
    if backend != "snn":
        raise ValueError(f"unknown backend {backend!r}")
    if strategy is None:
        fb = fb or inst.factor_base("full")
        net = snn.build_network(fb)
        _, trace = snn.run_sieve(net)
        score = snn.detection_scores(net, trace) - cpu_sieve.log_abs_f(poly, iv)
    else:
        fb = fb or inst.factor_base("snn")
        qw = quantize(fb.log_weights, strategy, scale)
        try:
            net = snn.build_network(fb, qw, 0, constrained=True)
        except ConstraintViolation as cv:
            info["violation"] = cv.distinct_count
            net = snn.build_network(fb, qw, 0, constrained=False)
        _, trace = snn.run_sieve(net)
        score = snn.detection_scores(net, trace).astype(float)
    info.update(ticks=trace.ticks, synaptic_events=trace.synaptic_events, tick_work=snn.tick_work(net))
    return score, fb.poly.values(iv), info


def score_interval(backend: str, inst: Instance, strategy: str | None = None, **kw) -> list[DetectionScore]:
    score, values, _ = score_arrays(backend, inst, strategy, **kw)
    fb = inst.factor_base()
    truth = smooth_mask(values, fb)
    nz = values != 0
    xs = np.arange(inst.interval.length) + inst.interval.x_min
    return [DetectionScore(int(x), float(s), bool(t)) for x, s, t, k in zip(xs, score, truth, nz) if k]


def _safe(fn, *a):
    try:
        return fn(*a)
    except UndefinedMetric:
        return math.nan


def evaluate_instance(
    bits: int,
    seed: int,
    strategies=ALL_STRATEGIES,
    M: int = 2**17,
    scale: float = 16.0,
    log_scale: float = cpu_sieve.DEFAULT_LOG_SCALE,
    threshold_offset: float = cpu_sieve.DEFAULT_THRESHOLD_OFFSET,
) -> list[dict]:
    """One CSV row for the CPU sieve and one per SNN strategy."""
    inst = Instance.generate(bits, seed, M)
    fb_cpu = inst.factor_base("default")
    truth = inst.truth(fb_cpu)
    delay = 2
    cpu_score, _, cinfo = score_arrays("cpu", inst, log_scale=log_scale, fb=fb_cpu)
    cpu_curve = roc(cpu_score, truth)
    op = cpu_score >= -threshold_offset
    P, N = int(truth.sum()), int((~truth).sum())
    cpu_tpr = (op & truth).sum() / P if P else math.nan
    cpu_fpr = (op & ~truth).sum() / N
    work = dict(
        cpu_updates_per_value=cinfo["updates"] / M,
        snn_ticks_per_value=(M + delay) / M,
        relations=P,
        interval_len=M,
    )
    rows = [
        dict(bits=bits, seed=seed, strategy="log", backend="cpu", eer=_safe(eer, cpu_curve), fpr_at_cpu_tpr=cpu_fpr, **work)
    ]
    rows[0]["_cpu_tpr"] = cpu_tpr
    fb_snn = inst.factor_base("snn")
    for strat in strategies:
        score, _, info = score_arrays("snn", inst, strat, scale=scale, fb=fb_snn)
        curve = roc(score, truth)
        row = dict(
            bits=bits,
            seed=seed,
            strategy=strat,
            backend="snn",
            eer=_safe(eer, curve),
            fpr_at_cpu_tpr=math.nan if math.isnan(cpu_tpr) else fpr_at_tpr(curve, cpu_tpr),
            **work,
        )
        row["snn_ticks_per_value"] = info["ticks"] / M
        row["_violation"] = info.get("violation")
        row["_events_per_tick"] = info["synaptic_events"] / info["ticks"]
        rows.append(row)
    return rows


@dataclass
class ExperimentReport:
    rows: list[dict]
    violations: list[tuple[int, int, str, int]] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, CSV_FIELDS, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow({k: _fmt(r[k]) for k in CSV_FIELDS})
        return buf.getvalue()

    @staticmethod
    def from_csv(text: str) -> list[dict]:
        out = []
        for r in csv.DictReader(io.StringIO(text)):
            out.append(
                dict(
                    bits=int(r["bits"]),
                    seed=int(r["seed"]),
                    strategy=r["strategy"],
                    backend=r["backend"],
                    eer=float(r["eer"]),
                    fpr_at_cpu_tpr=float(r["fpr_at_cpu_tpr"]),
                    cpu_updates_per_value=float(r["cpu_updates_per_value"]),
                    snn_ticks_per_value=float(r["snn_ticks_per_value"]),
                    relations=int(r["relations"]),
                    interval_len=int(r["interval_len"]),
                )
            )
        return out

    def summary(self) -> list[dict]:
        """Per (bits, backend, strategy): means with 95% half-widths."""
        groups: dict[tuple, list[dict]] = {}
        for r in self.rows:
            groups.setdefault((r["bits"], r["backend"], r["strategy"]), []).append(r)
        out = []
        for (bits, backend, strat), rs in groups.items():
            e, eh = confidence_interval([r["eer"] for r in rs])
            f, fh = confidence_interval([r["fpr_at_cpu_tpr"] for r in rs])
            out.append(
                dict(
                    bits=bits,
                    backend=backend,
                    strategy=strat,
                    instances=len(rs),
                    eer_mean=e,
                    eer_ci95=eh,
                    fpr_mean=f,
                    fpr_ci95=fh,
                    cpu_updates_per_value=float(np.mean([r["cpu_updates_per_value"] for r in rs])),
                    snn_ticks_per_value=float(np.mean([r["snn_ticks_per_value"] for r in rs])),
                )
            )
        return out

    def summary_csv(self) -> str:
        rows = self.summary()
        buf = io.StringIO()
        w = csv.DictWriter(buf, list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(v) for k, v in r.items()})
        return buf.getvalue()


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return "nan" if math.isnan(v) else repr(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


def _run_one(args):
    return evaluate_instance(*args)


def run_experiment(
    bit_range,
    instances_per_size: int,
    strategies=ALL_STRATEGIES,
    seed: int = 0,
    M: int = 2**17,
    scale: float = 16.0,
    threshold_offset: float = cpu_sieve.DEFAULT_THRESHOLD_OFFSET,
    workers: int = 1,
) -> ExperimentReport:
    """Evaluate ``instances_per_size`` semiprimes per bit size.

    Instance i at each size uses generator seed ``seed + i``. Rows come back
    in (bits, i) order whatever the worker count.
    """
    tasks = [
        (bits, seed + i, tuple(strategies), M, scale, cpu_sieve.DEFAULT_LOG_SCALE, threshold_offset)
        for bits in bit_range
        for i in range(instances_per_size)
    ]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_run_one, tasks))
    else:
        results = [_run_one(t) for t in tasks]
    rows = [r for rs in results for r in rs]
    viol = [(r["bits"], r["seed"], r["strategy"], r["_violation"]) for r in rows if r.get("_violation")]
    return ExperimentReport(rows, viol)


def work_counters(rows: list[dict]) -> WorkCounters:
    cpu = [r["cpu_updates_per_value"] for r in rows]
    snn_rows = [r for r in rows if r["backend"] == "snn"]
    return WorkCounters(
        cpu_updates_per_value=float(np.mean(cpu)),
        snn_ticks_per_value=float(np.mean([r["snn_ticks_per_value"] for r in snn_rows])) if snn_rows else math.nan,
        snn_synaptic_events_per_tick=float(np.mean([r["_events_per_tick"] for r in snn_rows]))
        if snn_rows and "_events_per_tick" in snn_rows[0]
        else math.nan,
    )
