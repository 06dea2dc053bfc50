"""Work per sieve value versus bit size: CPU memory updates vs SNN ticks.

Only the factor base is needed for the CPU count, so many instances are cheap.

    python3 scripts/work_scaling.py --bits 32:64:2 --per-size 100
"""

import argparse

import numpy as np

from neurosieve import cpu_sieve, evaluate, snn
from neurosieve.cli import _bit_range
from neurosieve.quantize import quantize


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--bits", type=_bit_range, default=_bit_range("32:64:2"))
    ap.add_argument("--per-size", type=int, default=100)
    ap.add_argument("--M", type=int, default=2**17)
    args = ap.parse_args()

    print("bits,median_B,cpu_updates_per_value,ci95,primes_only_closed_form,snn_ticks_per_value,snn_tick_work")
    for bits in args.bits:
        upd, closed, work, bs = [], [], [], []
        for seed in range(args.per_size):
            inst = evaluate.Instance.generate(bits, seed, args.M)
            fb = inst.factor_base("default")
            bs.append(inst.B)
            upd.append(cpu_sieve.expected_update_count(fb) / args.M)
            closed.append(cpu_sieve.closed_form_updates(fb) / args.M)
            fbs = inst.factor_base("snn")
            work.append(snn.tick_work(snn.build_network(fbs, quantize(fbs.log_weights, "uniform"), 1)))
        mean, half = evaluate.confidence_interval(upd)
        ticks = (args.M + 2) / args.M
        print(f"{bits},{int(np.median(bs))},{mean:.4f},{half:.4f},{np.mean(closed):.4f},{ticks:.6f},{np.mean(work):.1f}")


if __name__ == "__main__":
    main()
