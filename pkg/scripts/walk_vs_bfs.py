"""Random-walk path lengths against shortest augmenting paths across loads."""

import argparse

from cuckoowalk.experiments import ExperimentConfig, compare_walk_vs_bfs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=512)
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--epsilons", default="0.5,0.3,0.2,0.1,0.05")
    args = ap.parse_args()

    print(f"{'epsilon':>8} {'walk/item':>10} {'bfs/item':>10} {'ratio':>7}")
    for eps in (float(e) for e in args.epsilons.split(",")):
        rep = compare_walk_vs_bfs(ExperimentConfig(m=args.m, d=args.d, epsilon=eps, trials=args.trials))
        print(f"{eps:>8} {rep.walk_per_item:>10.4f} {rep.bfs_per_item:>10.4f} {rep.walk_per_item / rep.bfs_per_item:>7.3f}")


if __name__ == "__main__":
    main()
