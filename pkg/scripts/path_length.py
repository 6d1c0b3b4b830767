"""Mean insertion path length against the upper and lower bounds, per round k."""

import argparse

from cuckoowalk.bounds import BoundParams, feasible, lower_bound_expected_path, upper_bound_expected_path
from cuckoowalk.experiments import ExperimentConfig, run_experiment, write_outputs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=2048)
    ap.add_argument("--epsilon", type=float, default=0.5)
    ap.add_argument("--d", type=int, default=30)
    ap.add_argument("--theta", type=float, default=0.9)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    cfg = ExperimentConfig(m=args.m, d=args.d, epsilon=args.epsilon, theta=args.theta,
                           trials=args.trials, base_seed=args.seed)
    summary, records = run_experiment(cfg)
    if args.out:
        write_outputs(args.out, summary, records)

    ub = upper_bound_expected_path(args.theta)
    print(f"feasible={feasible(BoundParams(args.epsilon, args.d, args.theta))} upper_bound={ub:.6f}")
    print(f"pooled mean path_edges={summary.mean_path_edges:.6f} failures={summary.failures}")
    per_k = summary.per_k
    step = max(1, cfg.n // 16)
    print(f"{'k':>6} {'mean_edges':>12} {'sem':>10} {'lower(k/m)':>14}")
    for i in range(step - 1, cfg.n, step):
        k = per_k["k"][i]
        lb = lower_bound_expected_path(1 - k / cfg.m, cfg.d)
        print(f"{k:>6} {per_k['mean'][i]:>12.6f} {per_k['sem'][i]:>10.3g} {lb:>14.10f}")


if __name__ == "__main__":
    main()
