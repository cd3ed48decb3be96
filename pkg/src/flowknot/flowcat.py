"""Framed flow categories in dimensions 0 to 2 and their CW realization.

A flow category is stored combinatorially: objects with integer gradings,
signed points for index-1 pairs, intervals for index-2 pairs and filled
polygons for index-3 pairs. Each moduli space records its boundary, which
is checked against products of the lower-dimensional spaces.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from . import khovanov as kh
from .complexes import GradedChainComplex

Pair = Tuple[str, str]


class ModuliError(ValueError):
    """A moduli space cannot be built from its boundary."""


@dataclass(frozen=True, order=True)
class Point:
    """A framed point of a 0-dimensional moduli space ``Mod(source, target)``."""

    source: str
    target: str
    sign: int
    index: int = 0

    @property
    def name(self) -> str:
        return f"{self.source}>{self.target}" + (f"#{self.index}" if self.index else "")


# a broken flowline of length two: (point y->w, point w->z)
Broken = Tuple[Point, Point]


@dataclass(frozen=True)
class Interval:
    source: str
    target: str
    ends: Tuple[Broken, Broken]
    index: int = 0

    @property
    def sign(self) -> int:
        return self.ends[0][0].sign * self.ends[0][1].sign


# edges of a 2-dimensional boundary: interval x point or point x interval
Edge = Tuple[str, object, object]
Triple = Tuple[Point, Point, Point]


@dataclass(frozen=True)
class Polygon:
    """A filled polygon; ``vertices`` and ``edges`` are in cyclic order,
    with ``edges[t]`` joining ``vertices[t]`` and ``vertices[t+1]``."""

    source: str
    target: str
    vertices: Tuple[Triple, ...]
    edges: Tuple[Edge, ...]

    def __len__(self) -> int:
        return len(self.vertices)


# matcher(y, z, broken flowlines, policy) -> list of pairs, or None if not its case
Matcher = Callable[[str, str, List[Broken], str], Optional[List[Tuple[Broken, Broken]]]]


@dataclass
class FlowCategory:
    gradings: Dict[str, int]
    points: Dict[Pair, List[Point]] = field(default_factory=dict)
    intervals: Dict[Pair, List[Interval]] = field(default_factory=dict)
    polygons: Dict[Pair, List[Polygon]] = field(default_factory=dict)
    matcher: Optional[Matcher] = None
    dimension: int = 0
    labels: Dict[str, str] = field(default_factory=dict)

    @property
    def objects(self) -> List[str]:
        return list(self.gradings)

    def index(self, y: str, z: str) -> int:
        return self.gradings[y] - self.gradings[z]

    def pairs_of_index(self, k: int) -> List[Pair]:
        by_grade: Dict[int, List[str]] = {}
        for g, d in self.gradings.items():
            by_grade.setdefault(d, []).append(g)
        out = []
        for y, gy in self.gradings.items():
            out.extend((y, z) for z in by_grade.get(gy - k, []))
        return out

    def points_from(self, y: str) -> List[Point]:
        out = []
        for z in self._targets().get(y, ()):
            out.extend(self.points[(y, z)])
        return out

    def _targets(self) -> Dict[str, List[str]]:
        key = len(self.points)
        cache = self.__dict__.get("_target_cache")
        if cache is None or cache[0] != key:
            targets: Dict[str, List[str]] = {}
            for (a, b) in self.points:
                targets.setdefault(a, []).append(b)
            cache = (key, targets)
            self.__dict__["_target_cache"] = cache
        return cache[1]

    def broken_flowlines(self, y: str, z: str) -> List[Broken]:
        """Length-two broken flowlines from ``y`` to ``z``."""
        out = []
        for p in self.points_from(y):
            out.extend((p, q) for q in self.points.get((p.target, z), []))
        return out

    def fully_broken(self, y: str, z: str) -> List[Triple]:
        out = []
        for p in self.points_from(y):
            for q in self.points_from(p.target):
                out.extend((p, q, r) for r in self.points.get((q.target, z), []))
        return out

    def signed_count(self, y: str, z: str) -> int:
        return sum(p.sign for p in self.points.get((y, z), []))

    def boundary_matrix_complex(self) -> GradedChainComplex:
        boundary = {y: [] for y in self.gradings}
        for (y, z), ps in self.points.items():
            c = sum(p.sign for p in ps)
            if c:
                boundary[y].append((z, c))
        return GradedChainComplex(dict(self.gradings), boundary)

    # -- serialization

    def to_dict(self) -> dict:
        """Objects with gradings plus the moduli spaces by dimension."""

        def pt(p: Point) -> str:
            return p.name

        return {
            "schema": 1,
            "dimension": self.dimension,
            "objects": [{"id": g, "grading": d} for g, d in self.gradings.items()],
            "dim0": [
                {"from": p.source, "to": p.target, "sign": p.sign}
                for ps in self.points.values()
                for p in ps
            ],
            "dim1": [
                {"from": iv.source, "to": iv.target, "endpoints": [[pt(a), pt(b)] for a, b in iv.ends]}
                for ivs in self.intervals.values()
                for iv in ivs
            ],
            "dim2": [
                {"from": pg.source, "to": pg.target, "cycle": [[pt(p) for p in v] for v in pg.vertices]}
                for pgs in self.polygons.values()
                for pg in pgs
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# -- construction ------------------------------------------------------------


def build_moduli_dim0(C: GradedChainComplex, matcher: Optional[Matcher] = None) -> FlowCategory:
    """One framed point per unit of each matrix coefficient."""
    cat = FlowCategory(dict(C.gradings), matcher=matcher, labels=dict(getattr(C, "labels", {}) or {}))
    for y in C.generators:
        for z, c in C.boundary_of(y).items():
            if c == 0:
                continue
            sign = 1 if c > 0 else -1
            cat.points[(y, z)] = [Point(y, z, sign, k) for k in range(abs(c))]
    return cat


def build_moduli_dim1(cat: FlowCategory, policy: str = "right") -> FlowCategory:
    """Pair the broken flowlines of every index-2 pair into intervals.

    Two broken flowlines form a single interval. Four broken flowlines need
    the category's matcher (ladybug matching); ``policy`` is recorded for
    its use. An odd count, or a count the matcher cannot resolve, raises.
    """
    if policy not in ("right", "left"):
        raise ValueError(f"unknown policy {policy!r}")
    cat.intervals = {}
    for y, z in cat.pairs_of_index(2):
        broken = cat.broken_flowlines(y, z)
        if not broken:
            continue
        if len(broken) % 2:
            raise ModuliError(f"odd number ({len(broken)}) of broken flowlines from {y} to {z}")
        pairs = _pair_broken(cat, y, z, broken, policy)
        cat.intervals[(y, z)] = [Interval(y, z, (a, b), k) for k, (a, b) in enumerate(pairs)]
    cat.dimension = max(cat.dimension, 1)
    return cat


def _pair_broken(cat, y, z, broken, policy):
    if len(broken) == 2:
        a, b = broken
        if a[0].sign * a[1].sign == b[0].sign * b[1].sign:
            raise ModuliError(f"broken flowlines from {y} to {z} have equal signs; not a framed interval")
        return [(a, b)]
    if cat.matcher is not None:
        pairs = cat.matcher(y, z, broken, policy)
        if pairs is not None:
            return pairs
    # without geometric input, opposite-sign flowlines are paired only when
    # the choice is forced
    pos = [b for b in broken if b[0].sign * b[1].sign > 0]
    neg = [b for b in broken if b[0].sign * b[1].sign < 0]
    if len(pos) != len(neg):
        raise ModuliError(f"unbalanced signs on broken flowlines from {y} to {z}")
    if len(pos) == 1:
        return [(pos[0], neg[0])]
    raise ModuliError(f"{len(broken)} broken flowlines from {y} to {z} need a matching rule")


def _boundary_edges(cat: FlowCategory, y: str, z: str) -> List[Tuple[Edge, Triple, Triple]]:
    """Edges of the boundary graph of ``Mod(y, z)`` with their two corner triples."""
    edges = []
    for (a, b), ivs in cat.intervals.items():
        if a != y:
            continue
        for r in cat.points.get((b, z), []):
            for iv in ivs:
                (p1, q1), (p2, q2) = iv.ends
                edges.append((("L", iv, r), (p1, q1, r), (p2, q2, r)))
    for p in cat.points_from(y):
        for iv in cat.intervals.get((p.target, z), []):
            (q1, r1), (q2, r2) = iv.ends
            edges.append((("R", p, iv), (p, q1, r1), (p, q2, r2)))
    return edges


def boundary_graph(cat: FlowCategory, y: str, z: str):
    """Adjacency of the corner triples of ``Mod(y, z)``."""
    adj: Dict[Triple, List[Tuple[Edge, Triple]]] = {t: [] for t in cat.fully_broken(y, z)}
    for e, t1, t2 in _boundary_edges(cat, y, z):
        adj.setdefault(t1, []).append((e, t2))
        adj.setdefault(t2, []).append((e, t1))
    return adj


def _cycles(adj) -> List[Tuple[List[Triple], List[Edge]]]:
    seen = set()
    cycles = []
    for start in adj:
        if start in seen:
            continue
        verts, edges = [start], []
        seen.add(start)
        prev_edge = None
        cur = start
        while True:
            options = [(e, t) for e, t in adj[cur] if e is not prev_edge]
            e, nxt = options[0]
            edges.append(e)
            prev_edge = e
            if nxt == start:
                break
            verts.append(nxt)
            seen.add(nxt)
            cur = nxt
        cycles.append((verts, edges))
    return cycles


def build_moduli_dim2(cat: FlowCategory) -> FlowCategory:
    """Fill each boundary cycle of every index-3 pair with a polygon.

    The boundary graph must be 2-regular with cycles of even length.
    """
    if cat.dimension < 1:
        raise ModuliError("build the 1-dimensional moduli spaces first")
    cat.polygons = {}
    for y, z in cat.pairs_of_index(3):
        adj = boundary_graph(cat, y, z)
        if not adj:
            continue
        bad = [t for t, nb in adj.items() if len(nb) != 2]
        if bad:
            raise ModuliError(f"boundary of Mod({y}, {z}) is not a closed 1-manifold")
        polys = []
        for verts, edges in _cycles(adj):
            if len(verts) % 2:
                raise ModuliError(f"odd boundary cycle of length {len(verts)} in Mod({y}, {z})")
            polys.append(Polygon(y, z, tuple(verts), tuple(edges)))
        cat.polygons[(y, z)] = polys
    cat.dimension = 2
    return cat


def polygon_sizes(cat: FlowCategory, y: str, z: str) -> List[int]:
    return sorted(len(p) for p in cat.polygons.get((y, z), []))


def check_boundary_coherence(cat: FlowCategory, d: int) -> bool:
    """Check that every ``d``-dimensional moduli space has the boundary
    predicted by the lower ones: each broken flowline (resp. each corner and
    each product edge) is used exactly once."""
    if d == 0:
        return all(p.sign in (1, -1) for ps in cat.points.values() for p in ps)
    if d == 1:
        for y, z in cat.pairs_of_index(2):
            expected = sorted(cat.broken_flowlines(y, z))
            got = sorted(e for iv in cat.intervals.get((y, z), []) for e in iv.ends)
            if expected != got:
                return False
            for iv in cat.intervals.get((y, z), []):
                (a, b) = iv.ends
                if (a[0].sign * a[1].sign) == (b[0].sign * b[1].sign):
                    return False
        extra = [k for k in cat.intervals if cat.index(*k) != 2]
        return not extra
    if d == 2:
        for y, z in cat.pairs_of_index(3):
            expected_edges = _boundary_edges(cat, y, z)
            corners = sorted(cat.fully_broken(y, z))
            polys = cat.polygons.get((y, z), [])
            got_corners = sorted(v for pg in polys for v in pg.vertices)
            if corners != got_corners:
                return False
            want = {_edge_key(e) for e, _, _ in expected_edges}
            got = [_edge_key(e) for pg in polys for e in pg.edges]
            if len(got) != len(set(got)) or set(got) != want or len(got) != len(expected_edges):
                return False
            by_key = {_edge_key(e): {t1, t2} for e, t1, t2 in expected_edges}
            for pg in polys:
                m = len(pg.vertices)
                for t in range(m):
                    if by_key[_edge_key(pg.edges[t])] != {pg.vertices[t], pg.vertices[(t + 1) % m]}:
                        return False
        return True
    raise ValueError("coherence is only implemented for d <= 2")


def _edge_key(e: Edge):
    kind, a, b = e
    return (kind, a, b)


# -- permutohedra ------------------------------------------------------------


def ordered_partitions(items: Sequence[int]) -> List[Tuple[Tuple[int, ...], ...]]:
    items = list(items)
    if not items:
        return [()]
    out = []
    n = len(items)
    for mask in range(1, 1 << n):
        block = tuple(items[k] for k in range(n) if mask >> k & 1)
        rest = [items[k] for k in range(n) if not mask >> k & 1]
        out.extend((block,) + tail for tail in ordered_partitions(rest))
    return out


@dataclass
class Permutohedron:
    """Face poset of the permutohedron on ``n`` letters.

    Faces are ordered set partitions of ``{1..n}``; a face with ``b`` blocks
    has dimension ``n - b``, and vertices are the orderings into singletons.
    """

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        self._faces = ordered_partitions(range(1, self.n + 1))

    @property
    def dim(self) -> int:
        return self.n - 1

    def faces(self, k: Optional[int] = None):
        if k is None:
            return list(self._faces)
        return [f for f in self._faces if self.n - len(f) == k]

    def f_vector(self) -> List[int]:
        return [len(self.faces(k)) for k in range(self.n)]

    def vertices(self) -> List[Tuple[int, ...]]:
        return [tuple(b[0] for b in f) for f in self.faces(0)]

    def vertex_coordinates(self, perm: Sequence[int]) -> Tuple[int, ...]:
        coords = [0] * self.n
        for pos, letter in enumerate(perm, start=1):
            coords[letter - 1] = pos
        return tuple(coords)

    @staticmethod
    def contains(big, small) -> bool:
        """Whether face ``small`` lies in face ``big`` (coarsening by merging consecutive blocks)."""
        t = 0
        for block in big:
            acc = set()
            while acc != set(block):
                if t >= len(small) or not set(small[t]) <= set(block):
                    return False
                acc |= set(small[t])
                t += 1
        return t == len(small)

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * c for k, c in enumerate(self.f_vector()))

    def boundary_cycle(self) -> List[Tuple[int, ...]]:
        """Cyclic vertex order of the 2-dimensional permutohedron (n = 3)."""
        if self.n != 3:
            raise ValueError("boundary cycle is defined for n = 3")
        edges = self.faces(1)
        adj: Dict[Tuple[int, ...], List[Tuple[int, ...]]] = {v: [] for v in self.vertices()}
        for e in edges:
            ends = [v for v in self.vertices() if self.contains(e, tuple((x,) for x in v))]
            a, b = ends
            adj[a].append(b)
            adj[b].append(a)
        start = min(adj)
        cyc, prev = [start], None
        while True:
            nxt = min(w for w in adj[cyc[-1]] if w != prev)
            if nxt == start:
                return cyc
            prev = cyc[-1]
            cyc.append(nxt)


# -- cube flow category ------------------------------------------------------


def cube_complex(n: int) -> GradedChainComplex:
    """One generator per vertex of ``{0,1}^n`` with the standard signs."""
    gradings = {}
    boundary = {}
    for u in product((0, 1), repeat=n):
        name = "".join(map(str, u))
        gradings[name] = sum(u)
        chain = []
        for k in range(n):
            if u[k]:
                v = list(u)
                v[k] = 0
                chain.append(("".join(map(str, v)), -1 if sum(u[:k]) % 2 else 1))
        boundary[name] = chain
    return GradedChainComplex(gradings, boundary)


def hypercube_category(n: int) -> FlowCategory:
    """Cube flow category up to 2-dimensional moduli spaces."""
    if not 1 <= n <= 4:
        raise ValueError("hypercube category is supported for 1 <= n <= 4")
    cat = build_moduli_dim0(cube_complex(n))
    build_moduli_dim1(cat)
    build_moduli_dim2(cat)
    return cat


def flip_sequence(path: Sequence[Point]) -> Tuple[int, ...]:
    """Coordinates (1-based) flipped along a broken flowline of the cube category."""
    out = []
    for p in path:
        diff = [k for k, (a, b) in enumerate(zip(p.source, p.target)) if a != b]
        out.append(diff[0] + 1)
    return tuple(out)


# -- Khovanov flow category ---------------------------------------------------


def ladybug_matcher(D: "kh.LinkDiagram") -> Matcher:
    """Matcher resolving four-flowline squares of ``D`` by ladybug matching."""

    ladybugs = set(kh.detect_ladybugs(D))

    def match(y, z, broken, policy):
        u, _ = kh.parse_generator_id(y)
        w, _ = kh.parse_generator_id(z)
        i, j = [k for k in range(len(u)) if u[k] != w[k]]
        face = kh.Face(u, i, j)
        if face not in ladybugs:
            return None
        by_mid = {b[0].target: b for b in broken}
        return [(by_mid[a], by_mid[b]) for a, b in kh.ladybug_flowline_matching(D, face, y, z, policy)]

    return match


def khovanov_flow_category(D: "kh.LinkDiagram", policy: str = "right", dim: int = 2) -> FlowCategory:
    """Flow category of the Khovanov complex of ``D`` up to dimension ``dim``."""
    cat = build_moduli_dim0(kh.khovanov_complex(D), matcher=ladybug_matcher(D))
    if dim >= 1:
        build_moduli_dim1(cat, policy)
    if dim >= 2:
        build_moduli_dim2(cat)
    return cat


# -- CW realization ----------------------------------------------------------


@dataclass
class CWData:
    """Cells of the realization and the degrees of their attaching maps."""

    shift: int
    cells: Dict[str, int]
    degrees: Dict[Pair, int]

    def cellular_complex(self) -> GradedChainComplex:
        boundary = {c: [] for c in self.cells}
        for (y, z), deg in self.degrees.items():
            if deg:
                boundary[y].append((z, deg))
        return GradedChainComplex(dict(self.cells), boundary)

    def to_dict(self) -> dict:
        return {
            "shift": self.shift,
            "cells": [{"id": c, "dim": d} for c, d in self.cells.items()],
            "degrees": [{"source": y, "target": z, "degree": d} for (y, z), d in self.degrees.items()],
        }


def cjs_realize(cat: FlowCategory, d: int) -> CWData:
    """Cells and attaching degrees of the CW complex of a framed flow category.

    Object ``y`` gives a cell of dimension ``grading(y) + d`` attached to the
    basepoint; the degree of the attaching map between consecutive cells is
    the signed count of ``Mod(y, z)``.
    """
    if cat.dimension < 1 or not check_boundary_coherence(cat, 1):
        raise ModuliError("realization needs coherent 1-dimensional moduli spaces")
    if cat.gradings and min(cat.gradings.values()) + d < 2:
        raise ValueError(f"shift d={d} leaves cells of dimension below 2")
    cells = {y: g + d for y, g in cat.gradings.items()}
    degrees = {}
    for (y, z), ps in cat.points.items():
        degrees[(y, z)] = sum(p.sign for p in ps)
    return CWData(d, cells, degrees)


def iter_corner_paths(polygon: Polygon) -> Iterable[Tuple[str, ...]]:
    for v in polygon.vertices:
        yield (v[0].source, v[0].target, v[1].target, v[2].target)
