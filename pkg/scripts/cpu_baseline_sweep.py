"""Uniform-weight SNN versus the CPU log sieve across CPU operating points.

For each CPU threshold offset, reports the CPU's TPR and FPR and the uniform
SNN's FPR at that same TPR. Two CPU variants are shown: sieving prime powers
(the default) and primes only.

    python3 scripts/cpu_baseline_sweep.py --bits 32 64 --per-size 10
"""

import argparse

import numpy as np

from neurosieve import cpu_sieve, evaluate
from neurosieve.evaluate import fpr_at_tpr, roc

OFFSETS = (0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 12.0)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--bits", type=int, nargs="+", default=[32, 64])
    ap.add_argument("--per-size", type=int, default=10)
    ap.add_argument("--M", type=int, default=2**17)
    args = ap.parse_args()

    print("bits,cpu_variant,offset,cpu_tpr,cpu_fpr,uniform_snn_fpr_at_cpu_tpr")
    for bits in args.bits:
        acc = {}
        for seed in range(args.per_size):
            inst = evaluate.Instance.generate(bits, seed, args.M)
            fb = inst.factor_base("default")
            truth = inst.truth(fb)
            snn_score, _, _ = evaluate.score_arrays("snn", inst, "uniform")
            curve = roc(snn_score, truth)
            for powers in (True, False):
                arr = cpu_sieve.cpu_sieve_run(fb, sieve_powers=powers)
                margin = cpu_sieve.cpu_scores(arr, fb.poly, fb.interval)
                for off in OFFSETS:
                    op = margin >= -off
                    tpr = (op & truth).sum() / truth.sum()
                    fpr = (op & ~truth).sum() / (~truth).sum()
                    acc.setdefault((powers, off), []).append((tpr, fpr, fpr_at_tpr(curve, tpr)))
        for (powers, off), vals in acc.items():
            t, f, s = np.mean(vals, axis=0)
            print(f"{bits},{'powers' if powers else 'primes'},{off},{t:.4f},{f:.6f},{s:.6f}")


if __name__ == "__main__":
    main()
