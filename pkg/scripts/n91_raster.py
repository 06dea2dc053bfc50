"""Spike raster of the n = 91 example network, one line per sieve position.

Layer k fires k ticks after the position it reacts to, so each row shows the
tonic spikes at tick t, the factor spikes at t + 1 and the smoothness spike at
t + 2 side by side.

    python3 scripts/n91_raster.py
"""

from neurosieve import snn
from neurosieve.qs import SieveInterval, build_factor_base


def main():
    fb = build_factor_base(91, 5, SieveInterval.centered(10))
    net = snn.build_network(fb)
    xs, trace = snn.run_sieve(net, record=True)
    tonic_label = {nid: f"{fb.entries[i].label()}@{r}" for i, r, nid in net.tonic}
    factor_label = {fid: fb.entries[i].label() for i, fid, _ in net.factor_layer}
    print("factor base:", ", ".join(en.label() for en in fb.entries))
    for t in range(fb.interval.length):
        tonic = trace.spikes_at(t)["tonic"]
        factor = trace.spikes_at(t + 1)["factor"]
        smooth = trace.spikes_at(t + net.pipeline_delay)["smoothness"]
        print(
            f"t={t:2d} f={fb.poly(t + fb.interval.x_min):>4}  tonic: {' '.join(tonic_label[i] for i in tonic):<22}"
            f" factor: {' '.join(factor_label[i] for i in factor):<8} smooth: {'*' if smooth else ''}"
        )
    print("smooth x:", xs)


if __name__ == "__main__":
    main()
