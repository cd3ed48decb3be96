"""Test-side utilities: planarity of PD codes and random planar diagrams."""
from __future__ import annotations

import random

from flowknot.khovanov import LinkDiagram


def is_planar(D: LinkDiagram) -> bool:
    """Euler characteristic check: faces = crossings + 2 * components."""
    ends = D.arc_ends()
    darts = set()
    for e0, e1 in ends.values():
        darts.add((e0, e1))
        darts.add((e1, e0))
    seen = set()
    faces = 0
    for d in darts:
        if d in seen:
            continue
        faces += 1
        cur = d
        while cur not in seen:
            seen.add(cur)
            k, s = cur[1]
            nxt = (k, (s + 1) % 4)
            a, b = ends[D.crossings[k][(s + 1) % 4]]
            cur = (nxt, b if a == nxt else a)
    parent = list(range(D.n))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for (k0, _), (k1, _) in ends.values():
        parent[find(k0)] = find(k1)
    components = len({find(i) for i in range(D.n)})
    return faces == D.n + 2 * components


def random_planar_pd(n: int, seed: int) -> LinkDiagram:
    """Rejection-sample a planar PD code (possibly split) with ``n`` crossings."""
    rng = random.Random(seed)
    while True:
        slots = [(k, s) for k in range(n) for s in range(4)]
        rng.shuffle(slots)
        X = [[0] * 4 for _ in range(n)]
        for lab in range(2 * n):
            (a, b), (c, d) = slots[2 * lab], slots[2 * lab + 1]
            X[a][b] = lab + 1
            X[c][d] = lab + 1
        D = LinkDiagram(tuple(map(tuple, X)))
        if is_planar(D):
            return D
