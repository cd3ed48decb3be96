"""Positive domains, rectangle decompositions and the obstruction complex.

Everything here works at desk scale (``n <= 5``, Maslov index at most 4):
domains are enumerated exactly and decompositions by depth-first search.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .complexes import GradedChainComplex, HomologyTable, homology, verify_d_squared
from .grid import (
    GridDiagram,
    GridDomain,
    GridError,
    GridRectangle,
    SignAssignmentGrid,
    State,
    _make_rectangle,
    base_domain,
    maslov_index,
    rectangle_domain,
    solve_sign_assignment,
    state_id,
)


# -- positive domains ---------------------------------------------------------


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Non-negative integer vectors of length ``parts`` summing to at most ``total``."""
    if parts == 0:
        yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_positive_domains(G: GridDiagram, x: Sequence[int], y: Sequence[int], mu_max: int) -> List[GridDomain]:
    """All positive domains from ``x`` to ``y`` with Maslov index at most ``mu_max``.

    A domain is ``D0 + sum r_j Row_j + sum c_i Col_i``; each row or column
    adds 2 to the Maslov index. The column coefficients are normalized to
    have minimum zero, which makes the representation unique.
    """
    n = G.n
    x, y = tuple(x), tuple(y)
    D0 = base_domain(n, x, y)
    mu0 = maslov_index(D0)
    budget = (mu_max - mu0) // 2
    base = D0.mult
    max_col = int(base.sum(axis=1).max())
    c_bound = budget + max_col
    out = []
    if c_bound < 0:
        return out
    for c in _compositions(c_bound, n):
        if min(c) != 0:
            continue
        cvec = np.array(c, dtype=np.int64)
        low = -(base + cvec[:, None]).min(axis=0)  # minimal r_j for positivity
        slack = budget - int(cvec.sum()) - int(low.sum())
        if slack < 0:
            continue
        for extra in _compositions(slack, n):
            r = low + np.array(extra, dtype=np.int64)
            mult = base + cvec[:, None] + r[None, :]
            D = GridDomain(n, x, y, mult)
            if maslov_index(D) <= mu_max:
                out.append(D)
    out.sort(key=lambda D: (maslov_index(D), D.mult.tobytes()))
    return out


# -- decompositions -----------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    """Sequence of empty rectangles whose juxtaposition is a domain."""

    rectangles: Tuple[GridRectangle, ...]

    @property
    def states(self) -> Tuple[State, ...]:
        if not self.rectangles:
            return ()
        return (self.rectangles[0].source,) + tuple(R.target for R in self.rectangles)

    def label(self) -> str:
        return "->".join(state_id(s) for s in self.states)

    def total(self, n: int) -> np.ndarray:
        m = np.zeros((n, n), dtype=np.int64)
        for R in self.rectangles:
            m = m + R.matrix()
        return m


def _empty_rects_within(G: GridDiagram, s: State, remainder: np.ndarray) -> List[GridRectangle]:
    out = []
    for i in range(G.n):
        for j in range(G.n):
            if i == j:
                continue
            R = _make_rectangle(G, s, i, j)
            if R.is_empty and (remainder - R.matrix() >= 0).all():
                out.append(R)
    return out


def decompositions(G: GridDiagram, D: GridDomain) -> List[Decomposition]:
    """All ways to write ``D`` as a juxtaposition of empty rectangles.

    Emptiness of each rectangle is judged against the state it starts from.
    """
    if not D.is_positive:
        raise GridError("decompositions are defined for positive domains")
    found: List[Decomposition] = []

    def dfs(s: State, remainder: np.ndarray, path: Tuple[GridRectangle, ...]):
        if not remainder.any():
            if s == D.target and path:
                found.append(Decomposition(path))
            return
        for R in _empty_rects_within(G, s, remainder):
            dfs(R.target, remainder - R.matrix(), path + (R,))

    dfs(D.source, D.mult.copy(), ())
    return found


# -- bubbles and strips -------------------------------------------------------


@dataclass(frozen=True)
class BubbleEnd:
    """A thin annulus split off a domain.

    ``orientation`` is ``"H"`` for a row and ``"V"`` for a column; ``index``
    is that row or column and ``o_column`` the column of the O-marking the
    strip passes through.
    """

    orientation: str
    index: int
    o_column: int

    def label(self) -> str:
        return f"{self.orientation}{self.index}"


def _annuli(n: int):
    for r in range(n):
        m = np.zeros((n, n), dtype=np.int64)
        m[:, r] = 1
        yield "H", r, m
    for c in range(n):
        m = np.zeros((n, n), dtype=np.int64)
        m[c, :] = 1
        yield "V", c, m


def detect_bubble_ends(G: GridDiagram, D: GridDomain) -> List[BubbleEnd]:
    """Thin annuli ``A <= D`` with ``D - A`` zero or decomposable."""
    out = []
    o_of_row = {r: c for c, r in enumerate(G.O)}
    for kind, idx, A in _annuli(G.n):
        rest = D.mult - A
        if (rest < 0).any():
            continue
        if not rest.any():
            ok = D.source == D.target
        else:
            ok = bool(decompositions(G, GridDomain(G.n, D.source, D.target, rest)))
        if ok:
            o_col = o_of_row[idx] if kind == "H" else idx
            out.append(BubbleEnd(kind, idx, o_col))
    return out


@dataclass(frozen=True)
class StripPair:
    """The horizontal and vertical thin annuli through one O-marking."""

    o_column: int
    row: int
    column: int

    @property
    def horizontal(self) -> BubbleEnd:
        return BubbleEnd("H", self.row, self.o_column)

    @property
    def vertical(self) -> BubbleEnd:
        return BubbleEnd("V", self.column, self.o_column)


def pair_strips(G: GridDiagram) -> List[StripPair]:
    """One (H, V) pair per O-marking, in column order."""
    return [StripPair(c, G.O[c], c) for c in range(G.n)]


# -- moduli shapes ------------------------------------------------------------


@dataclass
class ModuliShape:
    kind: str  # "point", "interval", "polygon" or "outside catalog"
    vertices: List[str] = field(default_factory=list)
    edges: int = 0
    decompositions: int = 0
    bubble_ends: int = 0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "vertices": list(self.vertices),
            "edges": self.edges,
            "decompositions": self.decompositions,
            "bubble_ends": self.bubble_ends,
        }


def _sub_domain(n: int, rects: Sequence[GridRectangle]) -> GridDomain:
    m = np.zeros((n, n), dtype=np.int64)
    for R in rects:
        m = m + R.matrix()
    return GridDomain(n, rects[0].source, rects[-1].target, m)


def moduli_shape(G: GridDiagram, D: GridDomain) -> ModuliShape:
    """Shape of the moduli space of a positive domain of index 1, 2 or 3.

    Index 3 is a polygon only when the decompositions, joined through the
    intervals of their index-2 pieces, form a single cycle of length 4, 6
    or 8 and no piece ends in a bubble; anything else is reported as
    outside the catalog.
    """
    mu = maslov_index(D)
    decs = decompositions(G, D)
    bubbles = detect_bubble_ends(G, D)
    labels = [d.label() for d in decs]
    if mu == 1:
        if len(decs) != 1:
            return ModuliShape("outside catalog", labels, 0, len(decs), len(bubbles))
        return ModuliShape("point", labels, 0, 1, 0)
    if mu == 2:
        ends = labels + [b.label() for b in bubbles]
        kind = "interval" if len(ends) == 2 else "outside catalog"
        return ModuliShape(kind, ends, 1 if kind == "interval" else 0, len(decs), len(bubbles))
    if mu != 3:
        raise GridError(f"moduli shapes are catalogued for Maslov index 1 to 3, not {mu}")
    n = G.n
    adj: Dict[int, set] = {k: set() for k in range(len(decs))}
    bubbled = bool(bubbles)
    by_head: Dict[Tuple, List[int]] = {}
    by_tail: Dict[Tuple, List[int]] = {}
    for k, d in enumerate(decs):
        R1, R2, R3 = d.rectangles
        by_head.setdefault((R1.key,), []).append(k)
        by_tail.setdefault((R3.key,), []).append(k)
    for groups, piece in ((by_head, lambda d: d.rectangles[1:]), (by_tail, lambda d: d.rectangles[:2])):
        for ks in groups.values():
            sub_by_domain: Dict[Tuple, List[int]] = {}
            for k in ks:
                sub = _sub_domain(n, piece(decs[k]))
                sub_by_domain.setdefault(sub.key(), []).append(k)
            for key, members in sub_by_domain.items():
                sub = _sub_domain(n, piece(decs[members[0]]))
                if detect_bubble_ends(G, sub):
                    bubbled = True
                if len(members) == 2:
                    a, b = members
                    adj[a].add(b)
                    adj[b].add(a)
    edges = sum(len(v) for v in adj.values()) // 2
    cycle = _single_cycle(adj)
    if bubbled or cycle is None or len(cycle) not in (4, 6, 8):
        return ModuliShape("outside catalog", labels, edges, len(decs), len(bubbles))
    return ModuliShape("polygon", [labels[k] for k in cycle], edges, len(decs), 0)


def _single_cycle(adj: Dict[int, set]) -> Optional[List[int]]:
    if not adj or any(len(v) != 2 for v in adj.values()):
        return None
    start = min(adj)
    cyc, prev = [start], None
    while True:
        nxt = min(v for v in adj[cyc[-1]] if v != prev) if prev is not None else min(adj[start])
        if nxt == start:
            break
        prev = cyc[-1]
        cyc.append(nxt)
        if len(cyc) > len(adj):
            return None
    return cyc if len(cyc) == len(adj) else None


# -- obstruction complex ------------------------------------------------------


def _domain_id(D: GridDomain) -> str:
    body = "".join(str(int(v)) for v in D.mult.flatten())
    return f"{state_id(D.source)}|{state_id(D.target)}|{body}"


@dataclass
class ObstructionComplex:
    G: GridDiagram
    mu_max: int
    complex: GradedChainComplex
    domains: Dict[str, GridDomain]

    def generator_counts(self) -> Dict[int, int]:
        return self.complex.generator_counts()


def obstruction_complex(
    G: GridDiagram, mu_max: int, signs: Optional[SignAssignmentGrid] = None
) -> ObstructionComplex:
    """Complex of positive domains of index at most ``mu_max``.

    ``d(D) = sum s(R) E  +  (-1)^k sum s(R') E'`` where ``R`` is an empty
    rectangle stripped from the start of ``D`` and ``R'`` one stripped from
    its end, ``k = mu(D)``.
    """
    if not 1 <= mu_max <= 4:
        raise ValueError("mu_max must lie in 1..4")
    signs = signs or solve_sign_assignment(G)
    n = G.n
    states = list(G.states())
    domains: Dict[str, GridDomain] = {}
    for x in states:
        for y in states:
            for D in enumerate_positive_domains(G, x, y, mu_max):
                domains[_domain_id(D)] = D
    gradings = {k: maslov_index(D) for k, D in domains.items()}
    boundary: Dict[str, Dict[str, int]] = {}
    for gid, D in domains.items():
        k = gradings[gid]
        chain: Dict[str, int] = {}
        if k == 0:
            continue
        for R in _empty_rects_within(G, D.source, D.mult):
            E = GridDomain(n, R.target, D.target, D.mult - R.matrix())
            eid = _domain_id(E)
            chain[eid] = chain.get(eid, 0) + signs.sign(R)
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                w = list(D.target)
                w[i], w[j] = w[j], w[i]
                R = _make_rectangle(G, tuple(w), i, j)
                if not R.is_empty or ((D.mult - R.matrix()) < 0).any():
                    continue
                E = GridDomain(n, D.source, R.source, D.mult - R.matrix())
                eid = _domain_id(E)
                chain[eid] = chain.get(eid, 0) + (-1) ** k * signs.sign(R)
        boundary[gid] = chain
    C = GradedChainComplex(gradings, {g: list(c.items()) for g, c in boundary.items()})
    return ObstructionComplex(G, mu_max, C, domains)


def cd_homology(G: GridDiagram, mu_max: int, signs: Optional[SignAssignmentGrid] = None) -> HomologyTable:
    """Homology of the truncated obstruction complex in gradings ``0..mu_max-1``.

    Raises
    ------
    GridError
        If the differential does not square to zero.
    """
    if mu_max < 2:
        raise ValueError("mu_max must be at least 2")
    oc = obstruction_complex(G, mu_max, signs)
    if not verify_d_squared(oc.complex):
        raise GridError("obstruction complex differential does not square to zero")
    H = homology(oc.complex, check=False)
    keep = range(0, mu_max)
    return type(H)({k: H.betti.get(k, 0) for k in keep}, {k: H.torsion.get(k, []) for k in keep})
