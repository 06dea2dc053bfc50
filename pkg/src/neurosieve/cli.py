"""Command line entry point: factor, sieve, roc, bench."""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import evaluate, snn
from .arith import gen_semiprime, smoothness_bound
from .postproc import FactorConfig, FactorizationFailed, default_interval_length, factor
from .qs import EarlyFactor, SieveInterval
from .quantize import ConstraintViolation, Strategy, quantize

OUT_ENV = "NEUROSIEVE_OUT"
STRATEGY_CHOICES = [s.value for s in Strategy] + ["exact"]


def _bit_range(text: str) -> range:
    """'32:64:2' -> 32, 34, ..., 64 (inclusive); '48' -> just 48."""
    try:
        parts = [int(p) for p in text.split(":")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad bit range {text!r}") from None
    if len(parts) == 1:
        parts = [parts[0], parts[0]]
    if len(parts) == 2:
        parts.append(1)
    if len(parts) != 3 or parts[2] <= 0 or parts[0] > parts[1]:
        raise argparse.ArgumentTypeError(f"bad bit range {text!r}")
    return range(parts[0], parts[1] + 1, parts[2])


def _emit(text: str, path: str | None, default_name: str) -> None:
    """Write to --out, else into $NEUROSIEVE_OUT, else stdout."""
    if path is None and os.environ.get(OUT_ENV):
        path = str(Path(os.environ[OUT_ENV]) / default_name)
    if path is None:
        sys.stdout.write(text)
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text)
    print(f"wrote {path}", file=sys.stderr)


def _add_target(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("n", nargs="?", type=int, help="number to work on")
    g.add_argument("--bits", type=int, help="generate a semiprime of this size instead")
    p.add_argument("--seed", type=int, default=0, help="generator seed (with --bits)")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--backend", choices=["snn", "cpu"], default="snn")
    p.add_argument("--strategy", choices=STRATEGY_CHOICES, default="uniform", help="'exact' = real log weights")
    p.add_argument("--B", type=int, dest="B", help="smoothness bound override")
    p.add_argument("--M", type=int, dest="M", help="interval length override")
    p.add_argument("--tau", type=float, help="smoothness threshold (SNN)")
    p.add_argument("--threshold-offset", type=float, default=evaluate.cpu_sieve.DEFAULT_THRESHOLD_OFFSET)
    p.add_argument("--scale", type=float, default=16.0, help="weight scale for regress/inverse")
    p.add_argument("--unconstrained", action="store_true", help="skip hardware limit checks")
    p.add_argument("--out", help="output path")


def _target(args, parser) -> tuple[int, dict]:
    if args.bits is not None:
        try:
            inst = gen_semiprime(args.bits, args.seed)
        except ValueError as e:
            parser.error(str(e))
        return inst.n, {"bits": args.bits, "seed": args.seed}
    return args.n, {}


def cmd_factor(args, parser) -> int:
    n, meta = _target(args, parser)
    if n < 4 or n % 2 == 0:
        parser.error(f"{n} is not an odd semiprime candidate")
    cfg = FactorConfig(
        backend=args.backend,
        strategy=None if args.strategy == "exact" else args.strategy,
        B=args.B,
        M=args.M,
        tau=args.tau,
        threshold_offset=args.threshold_offset,
        scale=args.scale,
        constrained=not args.unconstrained,
    )
    try:
        res = factor(n, cfg)
    except ValueError as e:
        parser.error(str(e))
    except FactorizationFailed as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    res.report.update(meta)
    print(f"{n} = {res.p} × {res.q}", file=sys.stderr)
    _emit(res.to_json() + "\n", args.out, f"factor_{n}.json")
    return 0


def _trace_csv(inst: evaluate.Instance, strategy: str | None, scale: float) -> str:
    if strategy is None:
        net = snn.build_network(inst.factor_base("full"))
    else:
        fb = inst.factor_base("snn")
        net = snn.build_network(fb, quantize(fb.log_weights, strategy, scale), 0, constrained=False)
    _, trace = snn.run_sieve(net, record=True)
    return trace.to_csv()


def cmd_sieve(args, parser) -> int:
    n, meta = _target(args, parser)
    if n < 16 or n % 2 == 0:
        parser.error(f"{n} is too small or even to sieve")
    M = args.M or default_interval_length(n)
    B = args.B or smoothness_bound(n)
    inst = evaluate.Instance(n, n.bit_length(), meta.get("seed", 0), B, SieveInterval.centered(M))
    strategy = None if args.strategy == "exact" else args.strategy
    try:
        if args.dump_fb:
            kind = "snn" if args.backend == "snn" and strategy is not None else "default"
            Path(args.dump_fb).write_text(inst.factor_base(kind).to_json())
        if args.trace:
            Path(args.trace).write_text(_trace_csv(inst, strategy, args.scale))
        kw = {"scale": args.scale} if args.backend == "snn" else {"log_scale": None if strategy is None else 1.0}
        scores = evaluate.score_interval(args.backend, inst, strategy if args.backend == "snn" else None, **kw)
    except EarlyFactor as ef:
        print(f"error: {n} has a small factor {ef.divisor}", file=sys.stderr)
        return 1
    except ConstraintViolation as cv:
        print(f"error: {cv}", file=sys.stderr)
        return 1
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "seed", "x", "score", "truth"])
    for d in scores:
        w.writerow([n, inst.seed, d.x, repr(d.score), int(d.truth)])
    _emit(buf.getvalue(), args.out, f"sieve_{n}_{args.backend}.csv")
    return 0


def cmd_roc(args, parser) -> int:
    rep = evaluate.run_experiment(
        args.bits, args.per_size, args.strategies, seed=args.seed, M=args.M,
        scale=args.scale, threshold_offset=args.threshold_offset, workers=args.workers,
    )  # fmt: skip
    for bits, seed, strat, k in rep.violations:
        print(f"constraint violation: bits={bits} seed={seed} {strat}: {k} distinct weights", file=sys.stderr)
    _emit(rep.to_csv(), args.out, "roc.csv")
    if args.summary:
        Path(args.summary).write_text(rep.summary_csv())
    return 0


def cmd_bench(args, parser) -> int:
    rep = evaluate.run_experiment(args.bits, args.per_size, ["uniform"], seed=args.seed, M=args.M, workers=args.workers)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["bits", "seed", "instances", "cpu_updates_per_value", "snn_ticks_per_value", "snn_events_per_tick"])
    for bits in args.bits:
        wc = evaluate.work_counters([r for r in rep.rows if r["bits"] == bits])
        w.writerow([bits, args.seed, args.per_size, wc.cpu_updates_per_value, wc.snn_ticks_per_value, wc.snn_synaptic_events_per_tick])
    _emit(buf.getvalue(), args.out, "bench.csv")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="neurosieve", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("factor", help="factor one number")
    _add_target(p)
    _add_common(p)
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("sieve", help="per-position detection scores as CSV")
    _add_target(p)
    _add_common(p)
    p.add_argument("--dump-fb", help="write the factor base as JSON")
    p.add_argument("--trace", help="write the SNN spike raster as CSV")
    p.set_defaults(func=cmd_sieve)

    for name, func in (("roc", cmd_roc), ("bench", cmd_bench)):
        p = sub.add_parser(name, help="accuracy sweep" if name == "roc" else "work counters")
        p.add_argument("--bits", type=_bit_range, default=_bit_range("32:64:2"), help="lo:hi:step, inclusive")
        p.add_argument("--per-size", type=int, default=5)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--M", type=int, dest="M", default=2**17)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--out")
        if name == "roc":
            p.add_argument("--strategies", nargs="+", choices=evaluate.ALL_STRATEGIES, default=list(evaluate.ALL_STRATEGIES))
            p.add_argument("--scale", type=float, default=16.0)
            p.add_argument("--threshold-offset", type=float, default=evaluate.cpu_sieve.DEFAULT_THRESHOLD_OFFSET)
            p.add_argument("--summary", help="also write per-size means and 95%% CIs")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    np.seterr(divide="ignore")
    return args.func(args, parser)


if __name__ == "__main__":
    sys.exit(main())
