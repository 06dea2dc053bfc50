"""Detection accuracy per strategy across bit sizes (EER and FPR at the CPU's TPR).

    python3 scripts/roc_sweep.py --bits 32:64:8 --per-size 20 --out results/
"""

import argparse
from pathlib import Path

from neurosieve import evaluate
from neurosieve.cli import _bit_range


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--bits", type=_bit_range, default=_bit_range("32:64:8"))
    ap.add_argument("--per-size", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--M", type=int, default=2**17)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()

    rep = evaluate.run_experiment(args.bits, args.per_size, seed=args.seed, M=args.M, workers=args.workers)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "roc_rows.csv").write_text(rep.to_csv())
    (args.out / "roc_summary.csv").write_text(rep.summary_csv())
    print(f"{'bits':>4} {'backend':>7} {'strategy':>8} {'EER':>18} {'FPR@cpuTPR':>20}")
    for s in rep.summary():
        print(
            f"{s['bits']:>4} {s['backend']:>7} {s['strategy']:>8}"
            f" {s['eer_mean']:>9.4%} ±{s['eer_ci95']:.4%} {s['fpr_mean']:>10.5f} ±{s['fpr_ci95']:.5f}"
        )
    for v in rep.violations:
        print("constraint violation (bits, seed, strategy, distinct):", v)


if __name__ == "__main__":
    main()
