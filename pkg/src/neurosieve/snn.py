"""Digital LIF simulation and the three-layer spiking sieve network.

Neuron update per tick (integrate, then compare)::

    V <- V + sum_i A_i(t-1) w_i + leak
    spike iff V >= alpha; on spike V <- reset; else if floored, V <- max(V, 0)

Layers: tonic neurons (one per factor-base entry and root) fire with period
p**e; factor neurons (one per entry) pass a tonic spike on unless a higher
power of the same prime also fired; the smoothness neuron fires when the
weighted factor spikes reach tau. Each layer hop costs one tick of latency.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .qs import FactorBase
from .quantize import ConstraintViolation, QuantizedWeights, check_constraint

TONIC, FACTOR, SMOOTHNESS = 0, 1, 2
LAYER_NAMES = ("tonic", "factor", "smoothness")
MAX_PERIOD = 2**18
MAX_WEIGHT = 255  # 9-bit signed
MIN_WEIGHT = -256


class NetworkRangeError(ValueError):
    pass


@dataclass(frozen=True)
class LifNeuronConfig:
    alpha: float
    v0: float = 0.0
    leak: float = 0.0
    reset: float = 0.0
    floor_at_zero: bool = False
    stateless: bool = False


@dataclass(frozen=True)
class Synapse:
    src: int
    dst: int
    weight: float
    delay_ticks: int = 1


@dataclass
class SieveNetwork:
    fb: FactorBase
    neurons: list[LifNeuronConfig]
    layers: np.ndarray
    synapses: list[Synapse]
    tonic: list[tuple[int, int, int]]  # (entry index, root, neuron id)
    factor_layer: list[tuple[int, int, float]]  # (entry index, neuron id, smoothness weight)
    smoothness: int
    tau: float | None
    pipeline_delay: int
    constrained: bool
    # per-position smoothness threshold (software reference mode); tau is then None
    threshold_schedule: np.ndarray | None = None
    _arrays: dict = field(default_factory=dict, repr=False)

    @property
    def n_neurons(self) -> int:
        return len(self.neurons)

    def smoothness_weights(self) -> np.ndarray:
        return np.array([w for _, _, w in self.factor_layer])

    def arrays(self) -> dict:
        """Flat arrays (CSR by source) for the simulators."""
        if self._arrays:
            return self._arrays
        nn = self.n_neurons
        syn = sorted(self.synapses, key=lambda s: s.src)
        src = np.array([s.src for s in syn], dtype=np.int64)
        self._arrays = dict(
            alpha=np.array([c.alpha for c in self.neurons], dtype=np.float64),
            v0=np.array([c.v0 for c in self.neurons], dtype=np.float64),
            leak=np.array([c.leak for c in self.neurons], dtype=np.float64),
            reset=np.array([c.reset for c in self.neurons], dtype=np.float64),
            floor=np.array([c.floor_at_zero for c in self.neurons], dtype=np.bool_),
            ptr=np.searchsorted(src, np.arange(nn + 1)).astype(np.int64),
            dst=np.array([s.dst for s in syn], dtype=np.int64),
            w=np.array([s.weight for s in syn], dtype=np.float64),
            delay=np.array([s.delay_ticks for s in syn], dtype=np.int64),
        )
        return self._arrays

    def max_delay(self) -> int:
        return max((s.delay_ticks for s in self.synapses), default=1)

    def leak_schedule(self, n_ticks: int) -> np.ndarray:
        """Per-tick leak of the smoothness neuron in software mode (empty otherwise)."""
        if self.threshold_schedule is None:
            return np.empty(0)
        sched = np.full(n_ticks, -np.inf)
        d, M = self.pipeline_delay, len(self.threshold_schedule)
        k = min(M, max(n_ticks - d, 0))
        sched[d : d + k] = -self.threshold_schedule[:k]
        return sched

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": str(self.fb.n),
                "tau": self.tau,
                "pipeline_delay": self.pipeline_delay,
                "constrained": self.constrained,
                "neurons": [
                    dict(id=i, layer=LAYER_NAMES[int(self.layers[i])], **c.__dict__) for i, c in enumerate(self.neurons)
                ],
                "synapses": [s.__dict__ for s in self.synapses],
                "tonic": [
                    {"entry": self.fb.entries[e].label(), "root": r, "neuron": nid} for e, r, nid in self.tonic
                ],
                "factor_layer": [
                    {"entry": self.fb.entries[e].label(), "neuron": nid, "weight": w} for e, nid, w in self.factor_layer
                ],
                "smoothness": self.smoothness,
            },
            default=float,
        )


def tonic_v0(period: int, phase: int) -> int:
    # first spike when v0 + (t + 1) >= period, i.e. at t = period - 1 - v0
    return period - 1 - phase % period


def build_network(
    fb: FactorBase,
    weights: QuantizedWeights | None = None,
    tau: float | None = None,
    *,
    constrained: bool = False,
    delay: int = 2,
    exact_epsilon: float = 1e-9,
) -> SieveNetwork:
    """Wire the tonic / factor / smoothness network for ``fb``.

    With ``weights=None`` the network runs in software reference mode: real
    weights ln(p**e) and a per-position threshold ln|f(x)| - eps, which makes
    it a lossless sieve when every dividing power is represented.
    """
    if delay < 2:
        raise ValueError("pipeline delay must be at least 2 (one tick per hop)")
    k = len(fb.entries)
    if weights is None:
        if tau is not None:
            raise ValueError("exact mode uses a per-position threshold, not tau")
        sw = fb.log_weights
    else:
        sw = np.asarray(weights.weights)
        if len(sw) != k:
            raise ValueError(f"{len(sw)} weights for {k} factor-base entries")
        if tau is None:
            raise ValueError("quantized mode needs a threshold tau")
    if constrained:
        if weights is None:
            raise ConstraintViolation(len(np.unique(sw)))
        check_constraint(weights)
        if sw.max() > MAX_WEIGHT or sw.min() < MIN_WEIGHT:
            raise NetworkRangeError("smoothness weights exceed the 9-bit signed range")
        big = [en.modulus for en in fb.entries if en.modulus > MAX_PERIOD]
        if big:
            raise NetworkRangeError(f"period {big[0]} exceeds {MAX_PERIOD}")

    neurons: list[LifNeuronConfig] = []
    layers: list[int] = []
    synapses: list[Synapse] = []
    tonic: list[tuple[int, int, int]] = []
    by_entry: dict[int, list[int]] = {}

    for i, en in enumerate(fb.entries):
        for r in en.roots_t:
            nid = len(neurons)
            neurons.append(LifNeuronConfig(alpha=en.modulus, v0=tonic_v0(en.modulus, r), leak=1))
            layers.append(TONIC)
            tonic.append((i, r, nid))
            by_entry.setdefault(i, []).append(nid)

    factor_layer = []
    theta = 1
    for i, en in enumerate(fb.entries):
        fid = len(neurons)
        neurons.append(LifNeuronConfig(alpha=theta, floor_at_zero=True, stateless=True))
        layers.append(FACTOR)
        factor_layer.append((i, fid, float(sw[i]) if weights is None else int(sw[i])))
        own = by_entry[i]
        for nid in own:
            synapses.append(Synapse(nid, fid, theta, 1))
        veto = -theta * len(own)
        for j, other in enumerate(fb.entries):
            if other.p == en.p and other.e > en.e:
                for nid in by_entry[j]:
                    synapses.append(Synapse(nid, fid, veto, 1))

    sid = len(neurons)
    leak = 0.0 if tau is None else -tau
    neurons.append(LifNeuronConfig(alpha=0, leak=leak, reset=0, floor_at_zero=True, stateless=True))
    layers.append(SMOOTHNESS)
    for _, fid, w in factor_layer:
        synapses.append(Synapse(fid, sid, w, delay - 1))

    schedule = None
    if weights is None:
        logs = np.log(np.abs(fb.poly.values(fb.interval)).astype(float))
        schedule = logs - exact_epsilon * np.maximum(logs, 1.0)

    return SieveNetwork(
        fb=fb,
        neurons=neurons,
        layers=np.array(layers, dtype=np.int8),
        synapses=synapses,
        tonic=tonic,
        factor_layer=factor_layer,
        smoothness=sid,
        tau=tau,
        pipeline_delay=delay,
        constrained=constrained,
        threshold_schedule=schedule,
    )


def smoothness_fire(weights, active, tau: float) -> bool:
    """Stateless smoothness test: sum of active weights reaches tau."""
    w = np.asarray(weights, dtype=float)
    a = np.asarray(active, dtype=bool)
    return bool(np.sum(w[a]) >= tau)


@dataclass
class SpikeTrace:
    ticks: int
    layers: np.ndarray
    smoothness_spikes: np.ndarray  # tick indices
    smoothness_input: np.ndarray  # pre-threshold weighted sum per tick
    spike_counts: np.ndarray
    synaptic_events: int
    raster: np.ndarray | None = None  # (ticks, neurons) bool when recorded

    def spikes_at(self, tick: int) -> dict[str, list[int]]:
        if self.raster is None:
            raise ValueError("trace was run without recording")
        ids = np.flatnonzero(self.raster[tick])
        return {name: [int(i) for i in ids if self.layers[i] == li] for li, name in enumerate(LAYER_NAMES)}

    def to_csv(self) -> str:
        if self.raster is None:
            raise ValueError("trace was run without recording")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["tick", "neuron_id", "layer"])
        for t, nid in zip(*np.nonzero(self.raster)):
            w.writerow([int(t), int(nid), LAYER_NAMES[int(self.layers[nid])]])
        return buf.getvalue()


class Simulator:
    """Tick-by-tick reference simulator (numpy, one call per tick)."""

    def __init__(self, network: SieveNetwork):
        self.net = network
        a = network.arrays()
        self.a = a
        self.v = a["v0"].copy()
        self.slots = network.max_delay() + 1
        self.buf = np.zeros((self.slots, network.n_neurons))
        self.tick = 0
        self.synaptic_events = 0
        self.last_input = np.zeros(network.n_neurons)
        self._sched = None

    def step(self, tick: int) -> np.ndarray:
        """Advance one tick; returns ids of neurons that spiked."""
        if tick != self.tick:
            raise ValueError(f"expected tick {self.tick}, got {tick}")
        a, net = self.a, self.net
        slot = tick % self.slots
        inp = self.buf[slot].copy()
        self.buf[slot] = 0
        self.last_input = inp
        leak = a["leak"].copy()
        if net.threshold_schedule is not None:
            d = tick - net.pipeline_delay
            thr = net.threshold_schedule[d] if 0 <= d < len(net.threshold_schedule) else np.inf
            leak[net.smoothness] = -thr
        self.v += inp + leak
        fired = self.v >= a["alpha"]
        self.v[fired] = a["reset"][fired]
        low = a["floor"] & ~fired & (self.v < 0)
        self.v[low] = 0.0
        ids = np.flatnonzero(fired)
        for s in ids:
            lo, hi = a["ptr"][s], a["ptr"][s + 1]
            slots = (tick + a["delay"][lo:hi]) % self.slots
            np.add.at(self.buf, (slots, a["dst"][lo:hi]), a["w"][lo:hi])
            self.synaptic_events += hi - lo
        self.tick += 1
        return ids


def step(sim: Simulator, tick: int) -> np.ndarray:
    return sim.step(tick)


@numba.njit(cache=True)
def _run_kernel(alpha, v0, leak, reset, floor, ptr, dst, w, delay, n_ticks, slots, probe, sched, record):
    nn = alpha.shape[0]
    v = v0.copy()
    buf = np.zeros((slots, nn))
    counts = np.zeros(nn, np.int64)
    probe_in = np.zeros(n_ticks)
    probe_spk = np.zeros(n_ticks, np.bool_)
    raster = np.zeros((n_ticks if record else 0, nn), np.bool_)
    events = 0
    has_sched = sched.shape[0] > 0
    for t in range(n_ticks):
        s = t % slots
        probe_in[t] = buf[s, probe]
        for i in range(nn):
            lk = leak[i]
            if has_sched and i == probe:
                lk = sched[t]
            vi = v[i] + buf[s, i] + lk
            buf[s, i] = 0.0
            if vi >= alpha[i]:
                vi = reset[i]
                counts[i] += 1
                if i == probe:
                    probe_spk[t] = True
                if record:
                    raster[t, i] = True
                for k in range(ptr[i], ptr[i + 1]):
                    buf[(t + delay[k]) % slots, dst[k]] += w[k]
                events += ptr[i + 1] - ptr[i]
            elif floor[i] and vi < 0.0:
                vi = 0.0
            v[i] = vi
    return counts, probe_in, probe_spk, raster, events


def simulate(network: SieveNetwork, n_ticks: int, record: bool = False) -> SpikeTrace:
    """Run ``n_ticks`` ticks with the compiled kernel."""
    a = network.arrays()
    counts, probe_in, probe_spk, raster, events = _run_kernel(
        a["alpha"], a["v0"], a["leak"], a["reset"], a["floor"],
        a["ptr"], a["dst"], a["w"], a["delay"],
        n_ticks, network.max_delay() + 1, network.smoothness,
        network.leak_schedule(n_ticks), record,
    )  # fmt: skip
    return SpikeTrace(
        ticks=n_ticks,
        layers=network.layers,
        smoothness_spikes=np.flatnonzero(probe_spk),
        smoothness_input=probe_in,
        spike_counts=counts,
        synaptic_events=int(events),
        raster=raster if record else None,
    )


def run_sieve(network: SieveNetwork, M: int | None = None, record: bool = False) -> tuple[list[int], SpikeTrace]:
    """Run M + pipeline_delay ticks; a smoothness spike at tick t flags x = t - delay + x_min."""
    interval = network.fb.interval
    M = interval.length if M is None else M
    d = network.pipeline_delay
    trace = simulate(network, M + d, record)
    ts = trace.smoothness_spikes - d
    ts = ts[(ts >= 0) & (ts < M)]
    return [int(t) + interval.x_min for t in ts], trace


def detection_scores(network: SieveNetwork, trace: SpikeTrace) -> np.ndarray:
    """Smoothness neuron's pre-threshold input for each position t in [0, M)."""
    d = network.pipeline_delay
    M = network.fb.interval.length
    return trace.smoothness_input[d : d + M]


def tick_work(network: SieveNetwork) -> int:
    """Upper bound on per-tick work: every neuron updated, every synapse used."""
    return network.n_neurons + len(network.synapses)


def log_threshold_to_tau(log_threshold: float, weights: QuantizedWeights, fb: FactorBase) -> int:
    """Translate a threshold in nats into the smoothness neuron's integer tau.

    Scaled strategies map directly. Uniform weights count factors; a value of
    that log size built only from factors <= B needs at least
    log_threshold / ln B of them.
    """
    if weights.strategy.value == "uniform":
        return max(1, math.floor(log_threshold / math.log(fb.B)))
    return int(round(weights.scale * log_threshold))
