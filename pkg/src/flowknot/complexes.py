"""Graded chain complexes over the integers with an explicit basis.

Everything downstream (Khovanov complexes, grid complexes, the obstruction
complex, cellular chains of realized flow categories) is expressed as a
:class:`GradedChainComplex`. Homology is computed exactly with Smith normal
form over Python integers; a separate GF(2) path exists for complexes whose
integral signs are not known yet.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import _core


class ComplexError(ValueError):
    """Raised for malformed complexes or complexes with d^2 != 0."""


Chain = Dict[str, int]


class GradedChainComplex:
    """Free graded abelian group with a chosen basis and a boundary map.

    Parameters
    ----------
    gradings : mapping of str to int
        Generator id to grading. Iteration order is the basis order.
    boundary : mapping of str to iterable of (id, coeff)
        Boundary of each generator as an integer combination. Generators
        missing from the mapping have zero boundary.
    labels : mapping of str to str, optional
        Human readable labels, carried along but never interpreted.
    """

    def __init__(
        self,
        gradings: Mapping[str, int],
        boundary: Optional[Mapping[str, Iterable[Tuple[str, int]]]] = None,
        labels: Optional[Mapping[str, str]] = None,
    ):
        self._gradings: Dict[str, int] = {str(g): int(k) for g, k in gradings.items()}
        self._boundary: Dict[str, Chain] = {}
        self.labels: Dict[str, str] = dict(labels or {})
        for gen, terms in (boundary or {}).items():
            if gen not in self._gradings:
                raise ComplexError(f"boundary given for undeclared generator {gen!r}")
            chain: Chain = {}
            for target, coeff in terms:
                if target not in self._gradings:
                    raise ComplexError(f"{gen!r} has undeclared generator {target!r} in its boundary")
                if self._gradings[target] != self._gradings[gen] - 1:
                    raise ComplexError(
                        f"boundary of {gen!r} (grading {self._gradings[gen]}) hits "
                        f"{target!r} (grading {self._gradings[target]})"
                    )
                chain[target] = chain.get(target, 0) + int(coeff)
            chain = {t: c for t, c in chain.items() if c != 0}
            if chain:
                self._boundary[gen] = chain

    # -- basic accessors -------------------------------------------------

    @property
    def generators(self) -> List[str]:
        return list(self._gradings)

    @property
    def gradings(self) -> Dict[str, int]:
        return dict(self._gradings)

    def grading(self, gen: str) -> int:
        return self._gradings[gen]

    def boundary_of(self, gen: str) -> Chain:
        return dict(self._boundary.get(gen, {}))

    def __len__(self) -> int:
        return len(self._gradings)

    def __repr__(self) -> str:
        counts = self.generator_counts()
        return f"GradedChainComplex({len(self)} generators, counts={counts})"

    def generator_counts(self) -> Dict[int, int]:
        counts: Dict[int, int] = {}
        for k in self._gradings.values():
            counts[k] = counts.get(k, 0) + 1
        return dict(sorted(counts.items()))

    def generators_in(self, k: int) -> List[str]:
        return [g for g, d in self._gradings.items() if d == k]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * c for k, c in self.generator_counts().items())

    def apply(self, chain: Mapping[str, int]) -> Chain:
        """Boundary of an arbitrary chain."""
        out: Chain = {}
        for gen, coeff in chain.items():
            for target, c in self._boundary.get(gen, {}).items():
                out[target] = out.get(target, 0) + coeff * c
        return {t: c for t, c in out.items() if c != 0}

    def matrix(self, k: int) -> List[List[int]]:
        """Matrix of the boundary from grading ``k`` to ``k - 1``.

        Rows are indexed by ``generators_in(k - 1)`` and columns by
        ``generators_in(k)``.
        """
        rows = self.generators_in(k - 1)
        cols = self.generators_in(k)
        index = {g: i for i, g in enumerate(rows)}
        mat = [[0] * len(cols) for _ in rows]
        for j, gen in enumerate(cols):
            for target, coeff in self._boundary.get(gen, {}).items():
                mat[index[target]][j] = coeff
        return mat

    def shifted(self, d: int) -> "GradedChainComplex":
        return GradedChainComplex(
            {g: k + d for g, k in self._gradings.items()},
            {g: list(c.items()) for g, c in self._boundary.items()},
            self.labels,
        )

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "generators": [{"id": g, "grading": k} for g, k in self._gradings.items()],
            "boundary": {g: [[t, c] for t, c in chain.items()] for g, chain in self._boundary.items()},
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: Mapping) -> "GradedChainComplex":
        gradings = {str(item["id"]): int(item["grading"]) for item in data["generators"]}
        boundary = {str(g): [(str(t), int(c)) for t, c in terms] for g, terms in data.get("boundary", {}).items()}
        return cls(gradings, boundary)

    @classmethod
    def from_json(cls, text: str) -> "GradedChainComplex":
        return cls.from_dict(json.loads(text))


@dataclass
class HomologyTable:
    """Betti numbers and torsion coefficients per grading."""

    betti: Dict[int, int] = field(default_factory=dict)
    torsion: Dict[int, List[int]] = field(default_factory=dict)

    def gradings(self) -> List[int]:
        return sorted(set(self.betti) | set(self.torsion))

    def total_rank(self) -> int:
        return sum(self.betti.values())

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * b for k, b in self.betti.items())

    def has_torsion(self) -> bool:
        return any(self.torsion.get(k) for k in self.gradings())

    def nonzero(self) -> "HomologyTable":
        """Copy without gradings whose homology vanishes."""
        keep = [k for k in self.gradings() if self.betti.get(k, 0) or self.torsion.get(k)]
        return HomologyTable(
            {k: self.betti.get(k, 0) for k in keep},
            {k: list(self.torsion.get(k, [])) for k in keep},
        )

    def shifted(self, d: int) -> "HomologyTable":
        return HomologyTable(
            {k + d: b for k, b in self.betti.items()},
            {k + d: list(t) for k, t in self.torsion.items()},
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HomologyTable):
            return NotImplemented
        a, b = self.nonzero(), other.nonzero()
        return a.betti == b.betti and a.torsion == b.torsion

    def to_dict(self) -> dict:
        return {
            str(k): {"betti": self.betti.get(k, 0), "torsion": list(self.torsion.get(k, []))}
            for k in self.gradings()
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "HomologyTable":
        betti = {int(k): int(v["betti"]) for k, v in data.items()}
        torsion = {int(k): [int(t) for t in v.get("torsion", [])] for k, v in data.items()}
        return cls(betti, torsion)

    def format(self) -> str:
        lines = []
        for k in self.gradings():
            parts = []
            if self.betti.get(k):
                parts.append("Z" if self.betti[k] == 1 else f"Z^{self.betti[k]}")
            parts.extend(f"Z/{t}" for t in self.torsion.get(k, []))
            lines.append(f"H_{k} = {' + '.join(parts) if parts else '0'}")
        return "\n".join(lines)


# -- Smith normal form ---------------------------------------------------


def _diagonalize(mat: List[List[int]]) -> List[int]:
    """Reduce to diagonal form with unimodular row/column operations.

    Pivots on the entry of least absolute value in the remaining block, so
    intermediate growth stays small. Returns the nonzero diagonal entries
    (absolute values), in pivot order, which need not form a divisor chain.
    """
    a = [row[:] for row in mat]
    m = len(a)
    n = len(a[0]) if m else 0
    diag: List[int] = []
    top = 0
    while top < m and top < n:
        best = None
        for i in range(top, m):
            row = a[i]
            for j in range(top, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        a[top], a[pi] = a[pi], a[top]
        if pj != top:
            for row in a:
                row[top], row[pj] = row[pj], row[top]
        while True:
            p = a[top][top]
            dirty = False
            for i in range(top + 1, m):
                v = a[i][top]
                if v:
                    q = v // p
                    if q:
                        ri, rt = a[i], a[top]
                        for j in range(top, n):
                            if rt[j]:
                                ri[j] -= q * rt[j]
                    if a[i][top]:
                        dirty = True
            rt = a[top]
            for j in range(top + 1, n):
                v = rt[j]
                if v:
                    q = v // p
                    if q:
                        for i in range(top, m):
                            if a[i][top]:
                                a[i][j] -= q * a[i][top]
                    if rt[j]:
                        dirty = True
            if not dirty:
                break
            # a remainder smaller than the pivot survived; move it to the pivot slot
            best = None
            for i in range(top + 1, m):
                v = a[i][top]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, top)
            for j in range(top + 1, n):
                v = a[top][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), top, j)
            _, pi, pj = best
            if pi != top:
                a[top], a[pi] = a[pi], a[top]
            if pj != top:
                for row in a:
                    row[top], row[pj] = row[pj], row[top]
        diag.append(abs(a[top][top]))
        top += 1
    return diag


def _divisor_chain(diag: Sequence[int]) -> List[int]:
    """Turn any nonzero diagonal into the invariant-factor chain d1 | d2 | ..."""
    d = sorted(diag)
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            g = gcd(d[i], d[j])
            l = d[i] // g * d[j]
            d[i], d[j] = g, l
    return d


def smith_normal_form(mat: Sequence[Sequence[int]]) -> List[int]:
    """Invariant factors of an integer matrix.

    Parameters
    ----------
    mat : sequence of sequences of int
        Any ``m x n`` integer matrix (``m`` or ``n`` may be 0).

    Returns
    -------
    list of int
        Positive ``d1 | d2 | ... | dr`` with ``r`` the rank of ``mat``.

    Examples
    --------
    >>> smith_normal_form([[2, 4], [6, 8]])
    [2, 4]
    """
    rows = [[int(v) for v in row] for row in mat]
    if not rows or not rows[0]:
        return []
    return _divisor_chain(_diagonalize(rows))


# -- homology ------------------------------------------------------------


def verify_d_squared(C: GradedChainComplex) -> bool:
    """True iff the boundary map of ``C`` squares to zero."""
    for gen in C.generators:
        if C.apply(C.boundary_of(gen)):
            return False
    return True


def homology(C: GradedChainComplex, check: bool = True) -> HomologyTable:
    """Integral homology, reported as Betti numbers plus torsion per grading.

    Raises
    ------
    ComplexError
        If ``check`` is set and the boundary does not square to zero.
    """
    if check and not verify_d_squared(C):
        raise ComplexError("boundary map does not square to zero")
    counts = C.generator_counts()
    if not counts:
        return HomologyTable()
    snf = {k: smith_normal_form(C.matrix(k)) for k in counts if (k - 1) in counts}
    table = HomologyTable()
    for k, dim in counts.items():
        out_rank = len(snf.get(k, []))
        incoming = snf.get(k + 1, [])
        table.betti[k] = dim - out_rank - len(incoming)
        table.torsion[k] = [d for d in incoming if d > 1]
    return table


def gf2_rank(mat: Sequence[Sequence[int]]) -> int:
    """Rank over the field with two elements."""
    arr = np.asarray(mat, dtype=np.int64)
    if arr.size == 0:
        return 0
    return _core.gf2_rank(np.ascontiguousarray(arr % 2, dtype=np.uint8))


def homology_gf2(C: GradedChainComplex) -> HomologyTable:
    """Homology with coefficients in GF(2); torsion lists are always empty."""
    counts = C.generator_counts()
    ranks = {k: gf2_rank(C.matrix(k)) for k in counts if (k - 1) in counts}
    table = HomologyTable()
    for k, dim in counts.items():
        table.betti[k] = dim - ranks.get(k, 0) - ranks.get(k + 1, 0)
        table.torsion[k] = []
    return table


def verify_d_squared_gf2(C: GradedChainComplex) -> bool:
    for gen in C.generators:
        if any(c % 2 for c in C.apply(C.boundary_of(gen)).values()):
            return False
    return True
