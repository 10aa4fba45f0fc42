"""Mean accuracy as a function of k for each method on chosen scenarios."""
import argparse

from exnrule.bench import DatasetSource, ExperimentConfig, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--datasets", nargs="+", default=["S1"])
    ap.add_argument("--k", default="3,5,7")
    ap.add_argument("--reps", type=int, default=50)
    ap.add_argument("--B", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    ks = [int(t) for t in args.k.split(",")]
    cfg = ExperimentConfig(datasets=[DatasetSource.parse(d) for d in args.datasets], repetitions=args.reps,
                           B=args.B, k_values=ks, master_seed=args.seed, workers=args.workers)
    table = run_experiment(cfg, write=False)
    for src in cfg.datasets:
        print(src.name)
        for m in cfg.methods:
            means = [table.mean(m, src.name, "accuracy", k) for k in ks]
            row = " ".join(f"k={k}:{v:.3f}" for k, v in zip(ks, means))
            print(f"  {m:<8} {row}  spread={max(means) - min(means):.3f}")


if __name__ == "__main__":
    main()
