"""Distribution of the maximum slot degree next to the exponential tail bound."""

import argparse
import math
from collections import Counter

import numpy as np

from cuckoowalk.hash_family import FamilyConfig, choice_matrix, derive_seed


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=256)
    ap.add_argument("--n", type=int, default=128)
    ap.add_argument("--d", type=int, default=8)
    ap.add_argument("--instances", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=4)
    args = ap.parse_args()

    hist = Counter()
    for i in range(args.instances):
        mat = choice_matrix(FamilyConfig(args.m, args.d, derive_seed(args.seed, i, 0)), args.n)
        hist[int(np.bincount(mat.ravel(), minlength=args.m).max())] += 1
    mean_load = args.n * args.d / args.m
    print(f"mean slot degree {mean_load:.2f}; t = ceil(ln n) + 2 = {math.ceil(math.log(args.n)) + 2}")
    print(f"{'t':>4} {'P(max >= t)':>12} {'10 e^-t':>10}")
    tail = args.instances
    for t in range(min(hist), max(hist) + 1):
        print(f"{t:>4} {tail / args.instances:>12.5f} {10 * math.exp(-t):>10.5f}")
        tail -= hist[t]


if __name__ == "__main__":
    main()
