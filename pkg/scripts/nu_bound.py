"""Empirical mean of the interesting-path counts against their expectation bound."""

import argparse

from cuckoowalk.bounds import BoundParams, largest_feasible_theta, nu_expectation_bound
from cuckoowalk.experiments import ExperimentConfig, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=256)
    ap.add_argument("--epsilon", type=float, default=0.5)
    ap.add_argument("--d", type=int, default=12)
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--checkpoints", default="64,128")
    ap.add_argument("--ell-max", type=int, default=3)
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()

    theta = largest_feasible_theta(args.epsilon, args.d)
    print(f"largest feasible theta: {theta}")
    params = BoundParams(args.epsilon, args.d, theta if theta is not None else 1e-9)
    ks = tuple(int(k) for k in args.checkpoints.split(","))
    cfg = ExperimentConfig(m=args.m, d=args.d, epsilon=args.epsilon, trials=args.trials, base_seed=args.seed,
                           oracle_level="full", checkpoints=ks, ell_max=args.ell_max, cycle_stats=False)
    summary, _ = run_experiment(cfg)
    print(f"{'k':>5} {'ell':>4} {'mean':>12} {'sem':>10} {'bound':>12} {'mean |B_k|':>11}")
    for key, e in summary.nu.items():
        bound = nu_expectation_bound(params, e["k"], e["ell"])
        bk = summary.blocked_sizes[str(e["k"])]["mean"]
        print(f"{e['k']:>5} {e['ell']:>4} {e['mean']:>12.5g} {e['sem']:>10.3g} {bound:>12.5g} {bk:>11.4f}")


if __name__ == "__main__":
    main()
