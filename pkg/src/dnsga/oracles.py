"""Brute-force reference implementations, used only to cross-check the fast paths."""

from __future__ import annotations

import itertools
from fractions import Fraction


def _strict(u, v) -> bool:
    return u[0] >= v[0] and u[1] >= v[1] and (u[0] != v[0] or u[1] != v[1])


def fronts_brute_force(objectives) -> list[list[int]]:
    """Recursive definition: peel off the non-dominated members of what remains."""
    pts = [tuple(p) for p in objectives]
    remaining = list(range(len(pts)))
    fronts = []
    while remaining:
        front = [i for i in remaining
                 if not any(_strict(pts[j], pts[i]) for j in remaining)]
        fronts.append(front)
        taken = set(front)
        remaining = [i for i in remaining if i not in taken]
    return fronts


def intervals_brute_force(f1_values, n: int) -> list[tuple[int, int]]:
    """Empty intervals by scanning every value for every half-point ``i - 0.5``."""
    vals = [int(v) for v in f1_values]
    out = []
    for i in range(1, n + 1):
        half = i - 0.5
        a = max(v for v in vals if v <= half)
        b = min(v for v in vals if v >= half)
        out.append((a, b))
    return out


def mei_brute_force(f1_values, n: int) -> int:
    return max(b - a for a, b in intervals_brute_force(f1_values, n))


def current_cd_survivor_sets(objectives, k: int) -> set[frozenset[int]]:
    """Every survivor set reachable by some tie-breaking of current crowding distance.

    Exponential; only for tiny fronts. Distances come from the direct formula on
    the remaining members, sorted with index as the tie-breaker, in exact
    rational arithmetic so that ties are never an artefact of rounding.
    """
    pts = [tuple(p) for p in objectives]

    def distances(members):
        dist = {i: Fraction(0) for i in members}
        for j in (0, 1):
            order = sorted(members, key=lambda i: (pts[i][j], i))
            lo, hi = pts[order[0]][j], pts[order[-1]][j]
            dist[order[0]] = dist[order[-1]] = float("inf")
            for a, x, b in zip(order, order[1:], order[2:]):
                if hi > lo and dist[x] != float("inf"):
                    dist[x] += Fraction(pts[b][j] - pts[a][j], hi - lo)
        return dist

    results = set()

    def rec(members):
        if len(members) == k:
            results.add(frozenset(members))
            return
        dist = distances(members)
        low = min(dist.values())
        for i in members:
            if dist[i] == low:
                rec([x for x in members if x != i])

    rec(list(range(len(pts))))
    return results


def pick_brute_force(projected, horizon: int = 40) -> int:
    """Argmin over ``j in [2, horizon]`` of ``projected(j)``, smallest index on ties."""
    return min(range(2, horizon + 1), key=lambda j: (projected(j), j))


def all_bitstrings(n: int):
    return itertools.product((0, 1), repeat=n)
