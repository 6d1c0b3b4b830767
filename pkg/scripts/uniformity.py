"""Chi-square p-values for the empty-slot set over a range of rounds."""

import argparse

from cuckoowalk.experiments import ExperimentConfig, InsufficientTrials, uniformity_test_empty_set


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=64)
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--trials", type=int, default=4000)
    ap.add_argument("--seed", type=int, default=5)
    args = ap.parse_args()

    cfg = ExperimentConfig(m=args.m, d=args.d, n=args.m - 1, trials=args.trials, base_seed=args.seed)
    print(f"{'k':>4} {'statistic':>10} {'df':>4} {'p':>8}")
    for k in range(1, args.m, max(1, args.m // 8)):
        try:
            r = uniformity_test_empty_set(cfg, k)
        except InsufficientTrials as e:
            print(f"{k:>4}  skipped: {e}")
            continue
        print(f"{k:>4} {r.statistic:>10.2f} {r.df:>4} {r.p_value:>8.4f}")


if __name__ == "__main__":
    main()
