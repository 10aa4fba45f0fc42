"""``bench`` command line: run experiments, dump scenarios, redraw box plots."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import (
    METRICS,
    DatasetSource,
    ResultsTable,
    _list,
    dump_scenario,
    emit_boxplot_data,
    load_config,
    run_experiment,
)
from .errors import ExNRuleError


def _split_tokens(values):
    if values is None:
        return None
    return [t for v in values for t in _list(v)]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bench", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="repeated train/test splits over datasets and methods")
    run.add_argument("--config", help="key = value settings file; flags override it")
    run.add_argument("--datasets", nargs="+", help="S1..S6, path.csv or name=path.csv")
    run.add_argument("--methods", nargs="+", help="subset of exnrule knn wknn rknn")
    run.add_argument("--reps", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--k", help="comma-separated neighbourhood sizes, e.g. 3,5,7")
    run.add_argument("--B", type=int, dest="B", help="ensemble size for exnrule and rknn")
    run.add_argument("--train-fraction", type=float)
    run.add_argument("--q", type=float, help="Minkowski exponent (default 2)")
    run.add_argument("--tune", action="store_true", default=None, help="cross-validate k for knn, wknn, rknn")
    run.add_argument("--scale", action="store_true", default=None, help="z-score features using training statistics")
    run.add_argument("--workers", type=int)
    run.add_argument("--out", help="output directory")

    sc = sub.add_parser("scenario", help="write one synthetic scenario as CSV")
    sc.add_argument("--id", required=True)
    sc.add_argument("--seed", type=int, default=0)
    sc.add_argument("--out", required=True)

    pl = sub.add_parser("plot", help="box plot data and SVG from a results.csv")
    pl.add_argument("--metric", required=True, choices=METRICS)
    pl.add_argument("--in", dest="input", required=True)
    pl.add_argument("--out", required=True, help="output directory")
    return ap


def _run(args) -> int:
    datasets = _split_tokens(args.datasets)
    methods = _split_tokens(args.methods)
    cfg = load_config(
        args.config,
        datasets=[DatasetSource.parse(t) for t in datasets] if datasets else None,
        methods=[m.lower() for m in methods] if methods else None,
        repetitions=args.reps,
        master_seed=args.seed,
        k_values=[int(t) for t in _list(args.k)] if args.k else None,
        B=args.B,
        train_fraction=args.train_fraction,
        q=args.q,
        tune=args.tune,
        scaling=args.scale,
        workers=args.workers,
        output_dir=args.out,
    )
    if not cfg.output_dir:
        cfg.output_dir = "bench_out"
    table = run_experiment(cfg)
    for row in table.aggregate():
        print(f"{row['dataset']:>10} {row['method']:>8} k={row['k']:<2} "
              f"acc={row['accuracy_mean']:.3f} kappa={row['kappa_mean']:.3f} brier={row['brier_mean']:.3f}")
    print(f"wrote {Path(cfg.output_dir) / 'results.csv'}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _run(args)
        if args.command == "scenario":
            dump_scenario(args.id, args.seed, args.out)
            return 0
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        path = emit_boxplot_data(ResultsTable.from_csv(args.input), args.metric, out / f"boxplot_{args.metric}.tsv")
        print(f"wrote {path} and {path.with_suffix('.svg')}")
        return 0
    except ExNRuleError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
