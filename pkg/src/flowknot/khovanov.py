"""Cube of resolutions and the Khovanov chain complex of a planar diagram.

Diagrams are unoriented PD codes: each crossing ``(a, b, c, d)`` lists the
four incident arcs counterclockwise, starting from an under-arc, so ``a`` and
``c`` are the under-strand. The 0-smoothing joins ``a-b`` and ``c-d``; the
1-smoothing joins ``a-d`` and ``b-c``. Edges of the cube go from the
higher-weight vertex to the lower one (homological convention), and the
grading of a generator is simply the weight ``|v|`` of its vertex.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .complexes import GradedChainComplex, HomologyTable, homology

Bits = Tuple[int, ...]
End = Tuple[int, int]  # (crossing index, slot)

# slot partner at a crossing, indexed by smoothing bit
_PARTNER = {0: (1, 0, 3, 2), 1: (3, 2, 1, 0)}


class DiagramError(ValueError):
    """Malformed PD code or an impossible cube configuration."""


@dataclass(frozen=True)
class LinkDiagram:
    """Planar diagram: PD crossings plus a count of crossingless circles."""

    crossings: Tuple[Tuple[int, int, int, int], ...]
    unknots: int = 0

    def __post_init__(self):
        counts: Dict[int, int] = {}
        for x in self.crossings:
            if len(x) != 4:
                raise DiagramError(f"crossing {x!r} does not have four arcs")
            for a in x:
                counts[a] = counts.get(a, 0) + 1
        bad = sorted(a for a, c in counts.items() if c != 2)
        if bad:
            raise DiagramError(f"arc labels {bad} do not occur exactly twice")
        if self.unknots < 0:
            raise DiagramError("unknots must be non-negative")

    @property
    def n(self) -> int:
        return len(self.crossings)

    @property
    def arcs(self) -> List[int]:
        return sorted({a for x in self.crossings for a in x})

    def arc_ends(self) -> Dict[int, List[End]]:
        ends: Dict[int, List[End]] = {}
        for k, x in enumerate(self.crossings):
            for s, a in enumerate(x):
                ends.setdefault(a, []).append((k, s))
        return ends

    def relabel_crossings(self, order: Sequence[int]) -> "LinkDiagram":
        return LinkDiagram(tuple(self.crossings[k] for k in order), self.unknots)

    def relabel_arcs(self, mapping: Dict[int, int]) -> "LinkDiagram":
        return LinkDiagram(tuple(tuple(mapping[a] for a in x) for x in self.crossings), self.unknots)

    def to_dict(self) -> dict:
        return {"pd": [list(x) for x in self.crossings], "unknots": self.unknots}


_X_RE = re.compile(r"X\s*[\[(]\s*([-\d\s,]+?)\s*[\])]")


def parse_pd(text: str, unknots: Optional[int] = None) -> LinkDiagram:
    """Read a PD code.

    Accepts ``PD[X(1,2,3,4), ...]`` (square or round brackets), a bare JSON
    list of 4-tuples, or a JSON object ``{"pd": [...], "unknots": k}``. A
    line ``unknots = k`` may accompany the ``PD[...]`` form.

    Raises
    ------
    DiagramError
        With a line number when the text cannot be read.
    """
    stripped = text.strip()
    extra = 0
    if stripped.startswith("[") or stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise DiagramError(f"line {exc.lineno}: invalid JSON ({exc.msg})") from None
        if isinstance(data, dict):
            extra = int(data.get("unknots", 0))
            data = data.get("pd", [])
        try:
            crossings = tuple(tuple(int(a) for a in x) for x in data)
        except (TypeError, ValueError):
            raise DiagramError("line 1: PD entries must be lists of integers") from None
    else:
        crossings_list = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            m = re.fullmatch(r"unknots\s*[=:]\s*(\d+)", body)
            if m:
                extra = int(m.group(1))
                continue
            if not body.startswith("PD") and not body.startswith("X"):
                raise DiagramError(f"line {lineno}: cannot parse {body!r}")
            for match in _X_RE.finditer(body):
                try:
                    crossings_list.append(tuple(int(a) for a in match.group(1).split(",")))
                except ValueError:
                    raise DiagramError(f"line {lineno}: bad crossing {match.group(0)!r}") from None
            leftover = _X_RE.sub("", body)
            if re.search(r"\d", leftover):
                raise DiagramError(f"line {lineno}: malformed crossing in {body!r}")
        crossings = tuple(crossings_list)
    if unknots is not None:
        extra = unknots
    return LinkDiagram(crossings, extra)


# -- resolutions ------------------------------------------------------------


@dataclass(frozen=True)
class Passage:
    """One pass of a circle through a smoothed crossing."""

    crossing: int
    slot_in: int
    slot_out: int


@dataclass(frozen=True)
class Circle:
    """A circle of a complete resolution, with its traversal order.

    ``steps`` alternates arcs and passages: ``arcs[t]`` is followed by
    ``passages[t]``.
    """

    arcs: Tuple[int, ...]
    passages: Tuple[Passage, ...]

    @property
    def arc_set(self) -> FrozenSet[int]:
        return frozenset(self.arcs)


@dataclass(frozen=True)
class Resolution:
    vertex: Bits
    circles: Tuple[Circle, ...]
    unknots: int = 0

    @property
    def circle_count(self) -> int:
        return len(self.circles) + self.unknots

    def circle_of_arc(self, arc: int) -> int:
        for idx, c in enumerate(self.circles):
            if arc in c.arc_set:
                return idx
        raise KeyError(arc)

    def circles_at(self, crossing: int, D: LinkDiagram) -> List[int]:
        """Indices of the circles passing through ``crossing``."""
        return sorted({self.circle_of_arc(a) for a in D.crossings[crossing]})


def resolve(D: LinkDiagram, v: Sequence[int]) -> Resolution:
    """Complete resolution of ``D`` at vertex ``v``.

    Circles are ordered by their smallest arc label; crossingless unknots
    come after all of them.
    """
    v = tuple(int(b) for b in v)
    if len(v) != D.n:
        raise DiagramError(f"vertex {v} has {len(v)} bits, diagram has {D.n} crossings")
    return _resolve(D, v)


@lru_cache(maxsize=4096)
def _resolve(D: LinkDiagram, v: Bits) -> Resolution:
    ends = D.arc_ends()
    seen: set = set()
    circles = []
    for start in D.arcs:
        if start in seen:
            continue
        arcs: List[int] = []
        passages: List[Passage] = []
        arc, here = start, ends[start][0]
        while True:
            seen.add(arc)
            arcs.append(arc)
            e0, e1 = ends[arc]
            there = e1 if here == e0 else e0
            k, s = there
            s_out = _PARTNER[v[k]][s]
            passages.append(Passage(k, s, s_out))
            nxt = D.crossings[k][s_out]
            here = (k, s_out)
            if nxt == start and here == ends[start][0]:
                break
            arc = nxt
        circles.append(Circle(tuple(arcs), tuple(passages)))
    circles.sort(key=lambda c: min(c.arcs))
    return Resolution(v, tuple(circles), D.unknots)


# -- generators and edge maps ----------------------------------------------


def vertex_str(v: Bits) -> str:
    return "".join(str(b) for b in v)


def generator_id(v: Bits, labels: str) -> str:
    """Generator name such as ``1x_(10)``."""
    return f"{labels}_({vertex_str(v)})"


def parse_generator_id(gen: str) -> Tuple[Bits, str]:
    labels, _, rest = gen.partition("_(")
    return tuple(int(b) for b in rest.rstrip(")")), labels


@dataclass(frozen=True)
class KhGenerator:
    vertex: Bits
    labeling: str

    @property
    def id(self) -> str:
        return generator_id(self.vertex, self.labeling)


def _merge(a: str, b: str) -> List[Tuple[str, int]]:
    if a == "1":
        return [(b, 1)]
    if b == "1":
        return [(a, 1)]
    return []


def _split(a: str) -> List[Tuple[Tuple[str, str], int]]:
    if a == "1":
        return [(("1", "x"), 1), (("x", "1"), 1)]
    return [(("x", "x"), 1)]


def edge_map(D: LinkDiagram, u: Sequence[int], v: Sequence[int]) -> Dict[str, Dict[str, int]]:
    """Matrix of the unsigned map ``d_{u,v}`` on standard generators.

    Returns ``{source id: {target id: coefficient}}`` for every generator at
    ``u``. Circles away from the changed crossing are matched by their arc
    sets; the merged or split circles are the ones that differ.
    """
    u, v = tuple(u), tuple(v)
    diff = [k for k in range(D.n) if u[k] != v[k]]
    if len(diff) != 1 or u[diff[0]] != 1:
        raise DiagramError(f"{u} -> {v} is not an edge of the cube")
    Ru, Rv = resolve(D, u), resolve(D, v)
    su = [c.arc_set for c in Ru.circles]
    sv = [c.arc_set for c in Rv.circles]
    moved_u = [i for i, s in enumerate(su) if s not in sv]
    moved_v = [j for j, s in enumerate(sv) if s not in su]
    if not ((len(moved_u), len(moved_v)) in ((2, 1), (1, 2))):
        raise DiagramError(f"edge {u}->{v} neither merges nor splits circles (non-planar PD code?)")
    keep = {i: sv.index(s) for i, s in enumerate(su) if s in sv}
    cu, cv = len(su), len(sv)
    out: Dict[str, Dict[str, int]] = {}
    for labels in product("1x", repeat=Ru.circle_count):
        src = generator_id(u, "".join(labels))
        base = ["?"] * Rv.circle_count
        for i, j in keep.items():
            base[j] = labels[i]
        for t in range(D.unknots):
            base[cv + t] = labels[cu + t]
        image: Dict[str, int] = {}
        if len(moved_u) == 2:
            (j,) = moved_v
            for lab, c in _merge(labels[moved_u[0]], labels[moved_u[1]]):
                tgt = list(base)
                tgt[j] = lab
                image[generator_id(v, "".join(tgt))] = c
        else:
            (i,) = moved_u
            j1, j2 = moved_v
            for (l1, l2), c in _split(labels[i]):
                tgt = list(base)
                tgt[j1], tgt[j2] = l1, l2
                image[generator_id(v, "".join(tgt))] = c
        out[src] = image
    return out


# -- signs ------------------------------------------------------------------


def edge_sign_exponent(u: Sequence[int], k: int) -> int:
    """``s(u, v)`` for the edge flipping coordinate ``k``: ones of ``u`` before ``k``, mod 2."""
    return sum(u[:k]) % 2


def cube_edges(n: int) -> List[Tuple[Bits, Bits, int]]:
    """All edges ``(u, v, k)`` with ``u[k] = 1``, ``v = u`` with bit ``k`` cleared."""
    edges = []
    for u in product((0, 1), repeat=n):
        for k in range(n):
            if u[k]:
                v = list(u)
                v[k] = 0
                edges.append((u, tuple(v), k))
    return edges


@dataclass
class SignAssignment:
    """Map from cube edges to {0, 1}; 0 means positively framed."""

    n: int
    s: Dict[Tuple[Bits, Bits], int] = field(default_factory=dict)

    def __call__(self, u: Sequence[int], v: Sequence[int]) -> int:
        return self.s[(tuple(u), tuple(v))]

    def faces(self) -> List[Tuple[Bits, int, int]]:
        """2-faces as ``(top vertex, i, j)`` with ``i < j``."""
        out = []
        for i in range(self.n):
            for j in range(i + 1, self.n):
                for u in product((0, 1), repeat=self.n):
                    if u[i] and u[j]:
                        out.append((u, i, j))
        return out

    def face_edges(self, u: Bits, i: int, j: int) -> List[Tuple[Bits, Bits]]:
        ui = _flip(u, i)
        uj = _flip(u, j)
        b = _flip(ui, j)
        return [(u, ui), (ui, b), (u, uj), (uj, b)]

    def positive_count(self, u: Bits, i: int, j: int) -> int:
        return sum(1 for e in self.face_edges(u, i, j) if self.s[e] == 0)

    def satisfies_face_rule(self) -> bool:
        return all(self.positive_count(*f) % 2 == 1 for f in self.faces())


def _flip(u: Bits, k: int) -> Bits:
    w = list(u)
    w[k] = 1 - w[k]
    return tuple(w)


def standard_sign_assignment(n: int) -> SignAssignment:
    sa = SignAssignment(n)
    for u, v, k in cube_edges(n):
        sa.s[(u, v)] = edge_sign_exponent(u, k)
    return sa


# -- the complex -------------------------------------------------------------


def vertices(n: int) -> List[Bits]:
    return list(product((0, 1), repeat=n))


def generators(D: LinkDiagram) -> List[KhGenerator]:
    out = []
    for v in vertices(D.n):
        m = resolve(D, v).circle_count
        out.extend(KhGenerator(v, "".join(lab)) for lab in product("1x", repeat=m))
    return out


def quantum_grading(g: KhGenerator) -> int:
    return sum(g.vertex) + g.labeling.count("1") - g.labeling.count("x")


def khovanov_complex(D: LinkDiagram, signs: Optional[SignAssignment] = None) -> GradedChainComplex:
    """Signed cube complex ``sum (-1)^s(u,v) d_{u,v}`` graded by ``|v|``."""
    signs = signs or standard_sign_assignment(D.n)
    gens = generators(D)
    gradings = {g.id: sum(g.vertex) for g in gens}
    boundary: Dict[str, Dict[str, int]] = {g.id: {} for g in gens}
    for u, v, k in cube_edges(D.n):
        sign = -1 if signs(u, v) else 1
        for src, image in edge_map(D, u, v).items():
            chain = boundary[src]
            for tgt, c in image.items():
                chain[tgt] = chain.get(tgt, 0) + sign * c
    labels = {g.id: f"q={quantum_grading(g)}" for g in gens}
    return GradedChainComplex(gradings, {g: list(c.items()) for g, c in boundary.items()}, labels)


def khovanov_homology(D: LinkDiagram) -> HomologyTable:
    return homology(khovanov_complex(D))


def quantum_gradings(D: LinkDiagram) -> Dict[str, int]:
    return {g.id: quantum_grading(g) for g in generators(D)}


# -- ladybugs ----------------------------------------------------------------


@dataclass(frozen=True)
class Face:
    """2-face of the cube: top vertex and the two free coordinates ``i < j``."""

    top: Bits
    i: int
    j: int

    @property
    def mid_i(self) -> Bits:
        return _flip(self.top, self.i)

    @property
    def mid_j(self) -> Bits:
        return _flip(self.top, self.j)

    @property
    def bottom(self) -> Bits:
        return _flip(_flip(self.top, self.i), self.j)

    def label(self) -> str:
        free = ["*" if k in (self.i, self.j) else str(b) for k, b in enumerate(self.top)]
        return "".join(free)


def faces(n: int) -> List[Face]:
    return [Face(u, i, j) for (u, i, j) in SignAssignment(n).faces()]


def _is_ladybug(D: LinkDiagram, f: Face) -> bool:
    top = resolve(D, f.top)
    ci = top.circles_at(f.i, D)
    cj = top.circles_at(f.j, D)
    if len(ci) != 1 or ci != cj:
        return False
    c = top.circle_count
    return (
        resolve(D, f.mid_i).circle_count == c + 1
        and resolve(D, f.mid_j).circle_count == c + 1
        and resolve(D, f.bottom).circle_count == c
    )


def detect_ladybugs(D: LinkDiagram) -> List[Face]:
    """Faces whose top resolution has both surgery arcs on one circle with
    alternating endpoints (a split in each direction, then a merge)."""
    return [f for f in faces(D.n) if _is_ladybug(D, f)]


def _arc_side(p: Passage) -> str:
    """Side of the surgery arc seen while traversing a 1-smoothed passage."""
    return {(0, 3): "R", (3, 0): "L", (1, 2): "L", (2, 1): "R"}[(p.slot_in, p.slot_out)]


def ladybug_circle_matching(D: LinkDiagram, f: Face, policy: str = "right") -> Dict[FrozenSet[int], FrozenSet[int]]:
    """Bijection between the two new circles at ``mid_i`` and at ``mid_j``.

    The ladybug circle ``Z`` is cut by the four surgery-arc endpoints into
    four segments. Walking along either surgery arc toward ``Z`` and
    turning right lands on one of the two *right* segments; these are the
    segments that start at the endpoints of whichever arc lies on the right
    of ``Z``'s traversal direction. Each right segment identifies one
    circle at ``mid_i`` with one circle at ``mid_j``. ``policy="left"``
    uses the other two segments.
    """
    if policy not in ("right", "left"):
        raise ValueError(f"unknown ladybug policy {policy!r}")
    if not _is_ladybug(D, f):
        raise DiagramError(f"face {f.label()} is not a ladybug configuration")
    top = resolve(D, f.top)
    (zi,) = top.circles_at(f.i, D)
    Z = top.circles[zi]
    marks = [t for t, p in enumerate(Z.passages) if p.crossing in (f.i, f.j)]
    if len(marks) != 4:
        raise DiagramError("ladybug circle must pass each surgery crossing twice")
    owners = [Z.passages[t].crossing for t in marks]
    if owners[0] == owners[1] or owners[1] == owners[2] or owners[2] == owners[3]:
        raise DiagramError("surgery arc endpoints do not alternate along the ladybug circle")
    sides = {}
    for t in marks:
        p = Z.passages[t]
        side = _arc_side(p)
        if sides.setdefault(p.crossing, side) != side:
            raise DiagramError("surgery arc seen on both sides of its circle")
    if sides[f.i] == sides[f.j]:
        raise DiagramError("ladybug arcs lie on the same side of the circle")
    right_arc = f.i if sides[f.i] == "R" else f.j
    # segment after passage t: arcs Z.arcs[t+1], ... up to the next mark
    L = len(Z.arcs)
    segments = {}
    for idx, t in enumerate(marks):
        stop = marks[(idx + 1) % 4]
        arcs = []
        s = (t + 1) % L
        while True:
            arcs.append(Z.arcs[s])
            if s == stop:
                break
            s = (s + 1) % L
        segments[t] = frozenset(arcs)
    chosen = [t for t in marks if (Z.passages[t].crossing == right_arc) == (policy == "right")]
    Ri, Rj = resolve(D, f.mid_i), resolve(D, f.mid_j)
    top_sets = {c.arc_set for c in top.circles}
    new_i = [c.arc_set for c in Ri.circles if c.arc_set not in top_sets]
    new_j = [c.arc_set for c in Rj.circles if c.arc_set not in top_sets]
    matching = {}
    for t in chosen:
        seg = segments[t]
        ci = next(c for c in new_i if seg <= c)
        cj = next(c for c in new_j if seg <= c)
        matching[ci] = cj
    if len(matching) != 2 or len(set(matching.values())) != 2:
        raise DiagramError("ladybug segments failed to separate the new circles")
    return matching


def ladybug_flowline_matching(
    D: LinkDiagram, f: Face, y: str, z: str, policy: str = "right"
) -> List[Tuple[str, str]]:
    """Pair the two intermediate generators at ``mid_i`` with the two at
    ``mid_j`` for the generator pair ``y -> z`` across face ``f``.

    The generator whose ``x`` sits on circle ``C`` at ``mid_i`` is paired
    with the one whose ``x`` sits on the matched circle at ``mid_j``.
    """
    match = ladybug_circle_matching(D, f, policy)
    Ri, Rj = resolve(D, f.mid_i), resolve(D, f.mid_j)
    _, ylab = parse_generator_id(y)
    _, zlab = parse_generator_id(z)
    top = resolve(D, f.top)

    def intermediates(R: Resolution) -> Dict[FrozenSet[int], str]:
        top_sets = {c.arc_set for c in top.circles}
        new = [idx for idx, c in enumerate(R.circles) if c.arc_set not in top_sets]
        base = ["?"] * R.circle_count
        for idx, c in enumerate(R.circles):
            if c.arc_set in top_sets:
                base[idx] = ylab[[cc.arc_set for cc in top.circles].index(c.arc_set)]
        for t in range(D.unknots):
            base[len(R.circles) + t] = ylab[len(top.circles) + t]
        out = {}
        for idx in new:
            lab = list(base)
            for other in new:
                lab[other] = "x" if other == idx else "1"
            out[R.circles[idx].arc_set] = generator_id(R.vertex, "".join(lab))
        return out

    wi, wj = intermediates(Ri), intermediates(Rj)
    return [(wi[ci], wj[cj]) for ci, cj in sorted(match.items(), key=lambda kv: min(kv[0]))]
