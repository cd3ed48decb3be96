"""Grid diagrams, grid states, rectangles, domains and the tilde grid complex.

Conventions: columns and rows are indexed ``0..n-1`` and wrap around the
torus. ``O[c]`` and ``X[c]`` are the rows of the markings in column ``c``,
so a marking sits in the small square ``S[c, O[c]]``. A grid state ``x``
places its point on vertical circle ``i`` at height ``x[i]``; lattice point
``(i, r)`` is the lower-left corner of square ``S[i, r]``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from . import _core
from .complexes import GradedChainComplex, HomologyTable, homology, homology_gf2

State = Tuple[int, ...]


class GridError(ValueError):
    """Invalid grid, state or domain."""


@dataclass(frozen=True)
class GridDiagram:
    n: int
    X: Tuple[int, ...]
    O: Tuple[int, ...]

    def __post_init__(self):
        if self.n < 2:
            raise GridError("grid size must be at least 2")
        for name, perm in (("X", self.X), ("O", self.O)):
            if len(perm) != self.n or sorted(perm) != list(range(self.n)):
                raise GridError(f"{name} is not a permutation of 0..{self.n - 1}")
        clash = [c for c in range(self.n) if self.X[c] == self.O[c]]
        if clash:
            raise GridError(f"O and X share a square in columns {clash}")

    def states(self) -> Iterator[State]:
        """All grid states in lexicographic order."""
        return permutations(range(self.n))

    def marking_matrix(self, which: str) -> np.ndarray:
        perm = self.O if which == "O" else self.X
        m = np.zeros((self.n, self.n), dtype=np.int64)
        m[np.arange(self.n), list(perm)] = 1
        return m

    def transpose(self) -> "GridDiagram":
        """Reflect across the diagonal (swap the roles of rows and columns)."""
        X = [0] * self.n
        O = [0] * self.n
        for c in range(self.n):
            X[self.X[c]] = c
            O[self.O[c]] = c
        return GridDiagram(self.n, tuple(X), tuple(O))

    def cycle_columns(self, k: int = 1) -> "GridDiagram":
        n = self.n
        return GridDiagram(n, tuple(self.X[(c - k) % n] for c in range(n)), tuple(self.O[(c - k) % n] for c in range(n)))

    def cycle_rows(self, k: int = 1) -> "GridDiagram":
        n = self.n
        return GridDiagram(n, tuple((r + k) % n for r in self.X), tuple((r + k) % n for r in self.O))

    def to_dict(self) -> dict:
        return {"n": self.n, "X": list(self.X), "O": list(self.O)}


def parse_grid(text: str) -> GridDiagram:
    """Read ``n`` / ``X: ...`` / ``O: ...`` lines, or the equivalent JSON object."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
            return GridDiagram(int(data["n"]), tuple(map(int, data["X"])), tuple(map(int, data["O"])))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise GridError(f"line 1: invalid grid JSON ({exc})") from None
    n = None
    perms: Dict[str, Tuple[int, ...]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        try:
            if n is None and ":" not in body:
                n = int(body)
                continue
            key, _, rest = body.partition(":")
            key = key.strip().upper()
            if key not in ("X", "O"):
                raise ValueError(f"unknown key {key!r}")
            perms[key] = tuple(int(t) for t in rest.replace(",", " ").split())
        except ValueError as exc:
            raise GridError(f"line {lineno}: {exc}") from None
    if n is None or set(perms) != {"X", "O"}:
        raise GridError("grid file needs a size line and both X: and O: lines")
    return GridDiagram(n, perms["X"], perms["O"])


def enumerate_states(G: GridDiagram) -> Iterator[State]:
    return G.states()


def state_id(x: State) -> str:
    return ",".join(map(str, x)) if len(x) > 10 else "".join(map(str, x))


# -- rectangles ---------------------------------------------------------------


@dataclass(frozen=True)
class GridRectangle:
    """A rectangle on the torus from ``source`` to ``target``.

    It covers columns ``col, ..., col+width-1`` and rows
    ``row, ..., row+height-1`` (mod ``n``); its lower-left and upper-right
    corners are points of ``source``.
    """

    n: int
    source: State
    target: State
    col: int
    width: int
    row: int
    height: int
    n_O: int = 0
    n_X: int = 0
    n_points: int = 0

    @property
    def is_empty(self) -> bool:
        return self.n_points == 0

    def matrix(self) -> np.ndarray:
        m = np.zeros((self.n, self.n), dtype=np.int64)
        cols = [(self.col + a) % self.n for a in range(self.width)]
        rows = [(self.row + b) % self.n for b in range(self.height)]
        m[np.ix_(cols, rows)] = 1
        return m

    @property
    def key(self) -> Tuple[State, State, int]:
        return (self.source, self.target, self.col)


def _make_rectangle(G: GridDiagram, x: State, i: int, j: int) -> GridRectangle:
    n = G.n
    w = (j - i) % n
    h = (x[j] - x[i]) % n
    y = list(x)
    y[i], y[j] = x[j], x[i]
    inside = lambda c, r: (c - i) % n < w and (r - x[i]) % n < h  # noqa: E731
    n_O = sum(1 for c in range(n) if inside(c, G.O[c]))
    n_X = sum(1 for c in range(n) if inside(c, G.X[c]))
    pts = sum(1 for k in range(n) if 0 < (k - i) % n < w and 0 < (x[k] - x[i]) % n < h)
    return GridRectangle(n, tuple(x), tuple(y), i, w, x[i], h, n_O, n_X, pts)


def rectangles(G: GridDiagram, x: Sequence[int], y: Sequence[int]) -> List[GridRectangle]:
    """The two rectangles from ``x`` to ``y``, or ``[]`` unless the states
    differ in exactly two columns."""
    x, y = tuple(x), tuple(y)
    diff = [c for c in range(G.n) if x[c] != y[c]]
    if len(diff) != 2:
        return []
    i, j = diff
    return [_make_rectangle(G, x, i, j), _make_rectangle(G, x, j, i)]


def rectangles_from(G: GridDiagram, x: Sequence[int]) -> List[GridRectangle]:
    x = tuple(x)
    out = []
    for i in range(G.n):
        for j in range(G.n):
            if i != j:
                out.append(_make_rectangle(G, x, i, j))
    return out


def empty_rectangles_from(G: GridDiagram, x: Sequence[int], avoid_markings: bool = False) -> List[GridRectangle]:
    return [
        R
        for R in rectangles_from(G, x)
        if R.is_empty and (not avoid_markings or (R.n_O == 0 and R.n_X == 0))
    ]


# -- domains -----------------------------------------------------------------


@dataclass
class GridDomain:
    """Integer combination of small squares connecting two states.

    ``mult[c, r]`` is the multiplicity of square ``S[c, r]``.
    """

    n: int
    source: State
    target: State
    mult: np.ndarray

    def __post_init__(self):
        self.mult = np.asarray(self.mult, dtype=np.int64).reshape(self.n, self.n)
        self.source = tuple(self.source)
        self.target = tuple(self.target)

    @property
    def is_positive(self) -> bool:
        return bool((self.mult >= 0).all())

    def is_valid(self) -> bool:
        return bool((corner_defect(self.mult) == point_indicator(self.source) - point_indicator(self.target)).all())

    def __add__(self, other: "GridDomain") -> "GridDomain":
        if self.target != other.source:
            raise GridError("domains are not composable")
        return GridDomain(self.n, self.source, other.target, self.mult + other.mult)

    def key(self) -> Tuple[State, State, bytes]:
        return (self.source, self.target, self.mult.tobytes())

    def __eq__(self, other) -> bool:
        return isinstance(other, GridDomain) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def count(self, markings: np.ndarray) -> int:
        return int((self.mult * markings).sum())


def point_indicator(x: State) -> np.ndarray:
    n = len(x)
    m = np.zeros((n, n), dtype=np.int64)
    m[np.arange(n), list(x)] = 1
    return m


def corner_defect(mult: np.ndarray) -> np.ndarray:
    """``n(i,j) - n(i-1,j) - n(i,j-1) + n(i-1,j-1)`` at each lattice point."""
    a = np.roll(mult, 1, axis=0)
    b = np.roll(mult, 1, axis=1)
    c = np.roll(a, 1, axis=1)
    return mult - a - b + c


def base_domain(n: int, x: State, y: State) -> GridDomain:
    """A domain from ``x`` to ``y`` by two-dimensional prefix sums."""
    f = point_indicator(x) - point_indicator(y)
    return GridDomain(n, x, y, f.cumsum(axis=0).cumsum(axis=1))


def rectangle_domain(R: GridRectangle) -> GridDomain:
    return GridDomain(R.n, R.source, R.target, R.matrix())


def row_domain(n: int, r: int, x: State) -> GridDomain:
    m = np.zeros((n, n), dtype=np.int64)
    m[:, r] = 1
    return GridDomain(n, x, x, m)


def column_domain(n: int, c: int, x: State) -> GridDomain:
    m = np.zeros((n, n), dtype=np.int64)
    m[c, :] = 1
    return GridDomain(n, x, x, m)


def point_measure(mult: np.ndarray, x: State) -> Fraction:
    """Sum over the points of ``x`` of the average multiplicity of the four
    squares meeting at that point."""
    n = len(x)
    total = 0
    for i, r in enumerate(x):
        total += mult[i, r] + mult[(i - 1) % n, r] + mult[i, (r - 1) % n] + mult[(i - 1) % n, (r - 1) % n]
    return Fraction(int(total), 4)


def maslov_index(D: GridDomain) -> int:
    """``mu(D) = p_x(D) + p_y(D)``.

    Raises
    ------
    GridError
        If the result is not an integer, which means ``D`` is not a domain.
    """
    mu = point_measure(D.mult, D.source) + point_measure(D.mult, D.target)
    if mu.denominator != 1:
        raise GridError(f"non-integral Maslov index {mu}: not a valid domain")
    return int(mu)


def relative_gradings(G: GridDiagram) -> Dict[State, Tuple[int, int]]:
    """``(M, A)`` of every state relative to the identity state."""
    n = G.n
    base = tuple(range(n))
    Om, Xm = G.marking_matrix("O"), G.marking_matrix("X")
    out = {}
    for x in G.states():
        D = base_domain(n, base, x)
        nO, nX = D.count(Om), D.count(Xm)
        out[x] = (-(maslov_index(D) - 2 * nO), -(nX - nO))
    return out


def grading_difference(G: GridDiagram, D: GridDomain) -> Tuple[int, int]:
    """``(M(x) - M(y), A(x) - A(y))`` read off a domain from ``x`` to ``y``."""
    nO, nX = D.count(G.marking_matrix("O")), D.count(G.marking_matrix("X"))
    return maslov_index(D) - 2 * nO, nX - nO


# -- sign assignments ---------------------------------------------------------


@dataclass
class SignAssignmentGrid:
    """Signs of empty rectangles: 0 for ``+1``, 1 for ``-1``.

    ``horizontal`` and ``vertical`` are the products (as exponents) imposed
    on the two rectangles of a thin horizontal or vertical annulus.
    """

    G: GridDiagram
    s: Dict[Tuple[State, State, int], int] = field(default_factory=dict)
    horizontal: int = 0
    vertical: int = 1

    def sign(self, R: GridRectangle) -> int:
        return -1 if self.s.get(R.key, 0) else 1

    def flipped(self, key) -> "SignAssignmentGrid":
        s = dict(self.s)
        s[key] ^= 1
        return SignAssignmentGrid(self.G, s, self.horizontal, self.vertical)


class _RectIndex:
    """All empty rectangles of a grid, from the compiled kernel."""

    def __init__(self, G: GridDiagram, avoid_markings: bool = False):
        self.G = G
        self.states = list(G.states())
        self.sid = {x: k for k, x in enumerate(self.states)}
        perms = np.array(self.states, dtype=np.int64).reshape(len(self.states), G.n)
        self.data = _core.empty_rectangles(
            perms, np.array(G.O, dtype=np.int64), np.array(G.X, dtype=np.int64), bool(avoid_markings)
        )
        self.by_source: Dict[int, List[int]] = {}
        for k, row in enumerate(self.data):
            self.by_source.setdefault(int(row[0]), []).append(k)

    def key(self, k: int) -> Tuple[State, State, int]:
        src, dst, col = self.data[k][:3]
        return (self.states[src], self.states[dst], int(col))

    def matrix(self, k: int) -> np.ndarray:
        n = self.G.n
        _, _, col, w, row, h = (int(v) for v in self.data[k])
        m = np.zeros((n, n), dtype=np.int64)
        m[np.ix_([(col + a) % n for a in range(w)], [(row + b) % n for b in range(h)])] = 1
        return m


def mu2_decomposition_classes(G: GridDiagram, index: Optional[_RectIndex] = None):
    """Group the two-step juxtapositions of empty rectangles by domain.

    Returns a dict ``(x, z, mult bytes) -> list of (k1, k2)`` with indices
    into ``index.data``.
    """
    index = index or _RectIndex(G)
    mats = [index.matrix(k).tobytes() for k in range(len(index.data))]
    arrays = [np.frombuffer(b, dtype=np.int64) for b in mats]
    groups: Dict[Tuple[int, int, bytes], List[Tuple[int, int]]] = {}
    for k1, row in enumerate(index.data):
        src, mid = int(row[0]), int(row[1])
        for k2 in index.by_source.get(mid, []):
            dst = int(index.data[k2][1])
            key = (src, dst, (arrays[k1] + arrays[k2]).tobytes())
            groups.setdefault(key, []).append((k1, k2))
    return groups, index


def _solve_gf2(rows: List[Tuple[int, int]], nvars: int) -> List[int]:
    pivots: Dict[int, Tuple[int, int]] = {}
    for mask, rhs in rows:
        while mask:
            low = mask & -mask
            p = low.bit_length() - 1
            if p not in pivots:
                pivots[p] = (mask, rhs)
                break
            pm, pr = pivots[p]
            mask ^= pm
            rhs ^= pr
        else:
            if rhs:
                raise GridError("sign assignment constraints are inconsistent")
    value = [0] * nvars
    assigned = 0
    for p in sorted(pivots, reverse=True):
        mask, rhs = pivots[p]
        rest = mask & ~(1 << p)
        v = rhs ^ (bin(rest & assigned).count("1") & 1)
        value[p] = v
        if v:
            assigned |= 1 << p
    return value


def solve_sign_assignment(G: GridDiagram, horizontal: int = 0, vertical: int = 1) -> SignAssignmentGrid:
    """Signs on empty rectangles solving the square and annulus rules over GF(2).

    Each Maslov index 2 domain with two decompositions ``R1*R2 = R1'*R2'``
    gives ``s(R1)+s(R2)+s(R1')+s(R2') = 1``; each thin annulus gives
    ``s(R1)+s(R2) = horizontal`` or ``vertical`` by its direction.
    """
    groups, index = mu2_decomposition_classes(G)
    n = G.n
    rows = []
    for (src, dst, mb), decs in groups.items():
        if src == dst:
            if len(decs) != 1:
                raise GridError("thin annulus with more than one decomposition")
            (k1, k2), = decs
            mult = np.frombuffer(mb, dtype=np.int64).reshape(n, n)
            is_row = bool((mult.sum(axis=0) == n).any())
            rows.append(((1 << k1) ^ (1 << k2), horizontal if is_row else vertical))
        else:
            if len(decs) != 2:
                raise GridError(f"Maslov index 2 domain with {len(decs)} decompositions")
            (a, b), (c, d) = decs
            rows.append(((1 << a) ^ (1 << b) ^ (1 << c) ^ (1 << d), 1))
    value = _solve_gf2(rows, len(index.data))
    s = {index.key(k): value[k] for k in range(len(index.data))}
    return SignAssignmentGrid(G, s, horizontal, vertical)


def check_sign_assignment(sa: SignAssignmentGrid) -> bool:
    groups, index = mu2_decomposition_classes(sa.G)
    n = sa.G.n
    val = lambda k: sa.s[index.key(k)]  # noqa: E731
    for (src, dst, mb), decs in groups.items():
        if src == dst:
            (k1, k2), = decs
            mult = np.frombuffer(mb, dtype=np.int64).reshape(n, n)
            want = sa.horizontal if (mult.sum(axis=0) == n).any() else sa.vertical
            if val(k1) ^ val(k2) != want:
                return False
        else:
            (a, b), (c, d) = decs
            if val(a) ^ val(b) ^ val(c) ^ val(d) != 1:
                return False
    return True


# -- the tilde complex --------------------------------------------------------


def tilde_differential(
    G: GridDiagram, coefficients: str = "gf2", signs: Optional[SignAssignmentGrid] = None
) -> GradedChainComplex:
    """Tilde grid complex: empty rectangles avoiding every O and X.

    Generators are named by their state; the grading is the relative Maslov
    grading. Over ``"int"`` a sign assignment is required (one is solved
    for if not given).
    """
    if coefficients not in ("gf2", "int"):
        raise ValueError("coefficients must be 'gf2' or 'int'")
    if coefficients == "int" and signs is None:
        signs = solve_sign_assignment(G)
    grades = relative_gradings(G)
    index = _RectIndex(G, avoid_markings=True)
    boundary: Dict[str, Dict[str, int]] = {state_id(x): {} for x in index.states}
    for k in range(len(index.data)):
        x, y, col = index.key(k)
        c = 1
        if coefficients == "int":
            c = -1 if signs.s[(x, y, col)] else 1
        chain = boundary[state_id(x)]
        chain[state_id(y)] = chain.get(state_id(y), 0) + c
    if coefficients == "gf2":
        boundary = {g: {h: c % 2 for h, c in ch.items() if c % 2} for g, ch in boundary.items()}
    gradings = {state_id(x): grades[x][0] for x in index.states}
    labels = {state_id(x): f"A={grades[x][1]}" for x in index.states}
    return GradedChainComplex(gradings, {g: list(ch.items()) for g, ch in boundary.items()}, labels)


def grid_homology(G: GridDiagram, coefficients: str = "gf2", signs: Optional[SignAssignmentGrid] = None) -> HomologyTable:
    C = tilde_differential(G, coefficients, signs)
    return homology_gf2(C) if coefficients == "gf2" else homology(C)


def grid_homology_bigraded(G: GridDiagram) -> Dict[Tuple[int, int], int]:
    """GF(2) ranks of the tilde homology by relative ``(M, A)``.

    The differential preserves ``A``, so the complex splits by Alexander grading.
    """
    C = tilde_differential(G, "gf2")
    alex = {g: int(C.labels[g][2:]) for g in C.generators}
    out = {}
    for a in sorted(set(alex.values())):
        keep = [g for g in C.generators if alex[g] == a]
        sub = GradedChainComplex(
            {g: C.grading(g) for g in keep},
            {g: [(h, c) for h, c in C.boundary_of(g).items() if h in alex and alex[h] == a] for g in keep},
        )
        for m, r in homology_gf2(sub).betti.items():
            if r:
                out[(m, a)] = r
    return out
