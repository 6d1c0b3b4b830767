"""Brute-force reference counts, deliberately unlike the DFS in cuckoowalk.graph.

Item sequences are enumerated as permutations; for each one every assignment
of connecting slots is tried (slot i drawn from the common neighbours of
items i and i+1) and kept only if the slots are pairwise distinct. Weights
are edge multiplicities read straight from the choice lists.
"""

from itertools import permutations, product


def mult(choices, x, s):
    return list(choices[x]).count(s)


def interesting_paths(choices, members, occupied, ell):
    members = sorted(members)
    occupied = sorted(occupied)
    total = 0
    for xs in permutations(members, ell):
        links = [[s for s in occupied if mult(choices, a, s) and mult(choices, b, s)] for a, b in zip(xs, xs[1:])]
        for ss in product(*links):
            if len(set(ss)) != len(ss):
                continue
            w = 1
            for i, s in enumerate(ss):
                w *= mult(choices, xs[i], s) * mult(choices, xs[i + 1], s)
            total += w
    return total


def simple_cycles(choices, m, cap):
    """Cycles of length 2s, 2 <= s <= cap/2, as {length: count}."""
    n = len(choices)
    out = {}
    for s in range(2, cap // 2 + 1):
        total = 0
        for xs in permutations(range(n), s):
            ring = list(zip(xs, xs[1:] + xs[:1]))
            links = [[t for t in range(m) if mult(choices, a, t) and mult(choices, b, t)] for a, b in ring]
            for ss in product(*links):
                if len(set(ss)) != s:
                    continue
                w = 1
                for (a, b), t in zip(ring, ss):
                    w *= mult(choices, a, t) * mult(choices, b, t)
                total += w
        # each cycle appears once per starting item and direction
        assert total % (2 * s) == 0
        if total:
            out[2 * s] = total // (2 * s)
    return out


def parallel_pairs(choices):
    total = 0
    for row in choices:
        for s in set(row):
            c = list(row).count(s)
            total += c * (c - 1) // 2
    return total
