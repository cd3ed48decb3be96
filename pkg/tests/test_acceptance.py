"""One test per acceptance criterion; the terminal summary prints PASS/FAIL per line."""
import time
from itertools import permutations

import pytest

from flowknot.complexes import homology, verify_d_squared, verify_d_squared_gf2
from flowknot.flowcat import (
    boundary_graph,
    check_boundary_coherence,
    cjs_realize,
    flip_sequence,
    hypercube_category,
    khovanov_flow_category,
    polygon_sizes,
)
from flowknot.grid import (
    GridDiagram,
    check_sign_assignment,
    column_domain,
    enumerate_states,
    grid_homology,
    maslov_index,
    parse_grid,
    rectangle_domain,
    rectangles,
    row_domain,
    solve_sign_assignment,
    tilde_differential,
)
from flowknot.gridflow import (
    cd_homology,
    decompositions,
    detect_bubble_ends,
    enumerate_positive_domains,
    obstruction_complex,
    pair_strips,
)
from flowknot.khovanov import khovanov_complex, khovanov_homology, parse_pd, standard_sign_assignment

from test_gridflow import CATALOG, domain, generic

KH_CORPUS = ["unlink0", "unlink2", "unlink3", "unknot_kink", "hopf", "trefoil", "figure8"]
GRID_CORPUS = ["unknot2", "unknot3", "trefoil"]


def load_pd(data_dir, name):
    return parse_pd((data_dir / f"{name}.pd").read_text())


def load_grid(data_dir, name):
    return parse_grid((data_dir / f"{name}.grid").read_text())


@pytest.mark.criterion(1, "two-crossing unlink: 12 generators, d^2=0, rank 4 without torsion, under 1 s")
def test_two_crossing_unlink(data_dir):
    start = time.perf_counter()
    D = load_pd(data_dir, "unlink2")
    C = khovanov_complex(D)
    assert len(C.generators) == 12
    assert verify_d_squared(C)
    H = homology(C)
    flat = homology(khovanov_complex(load_pd(data_dir, "unlink0")))
    assert H.total_rank() == flat.total_rank() == 4
    assert not H.has_torsion() and not flat.has_torsion()
    assert time.perf_counter() - start < 1.0


# letters for the four broken flowlines from 1_(11) to x_(00), keyed by the middle generator
LETTERS = {"1x_(10)": "ea", "x1_(10)": "fb", "1x_(01)": "gc", "x1_(01)": "hd"}


@pytest.mark.criterion(2, "ladybug pairing: right {ea-gc, fb-hd}, left {ea-hd, fb-gc}")
def test_ladybug_pinning(data_dir):
    D = load_pd(data_dir, "unlink2")
    expected = {
        "right": {frozenset({"ea", "gc"}), frozenset({"fb", "hd"})},
        "left": {frozenset({"ea", "hd"}), frozenset({"fb", "gc"})},
    }
    for policy, pairs in expected.items():
        cat = khovanov_flow_category(D, policy, dim=1)
        broken = cat.broken_flowlines("1_(11)", "x_(00)")
        assert {LETTERS[b[0].target] for b in broken} == set(LETTERS.values())
        ivs = cat.intervals[("1_(11)", "x_(00)")]
        got = {frozenset(LETTERS[end[0].target] for end in other.ends) for other in ivs}
        assert got == pairs


@pytest.mark.criterion(3, "three-crossing unlink: index-3 pair with 12 corners splitting into two 6-cycles for uniform right and uniform left")
def test_two_hexagons(data_dir):
    D = load_pd(data_dir, "unlink3")
    for policy in ("right", "left"):
        cat = khovanov_flow_category(D, policy)
        hits = []
        for y, z in cat.pairs_of_index(3):
            adj = boundary_graph(cat, y, z)
            if len(adj) == 12 and all(len(v) == 2 for v in adj.values()) and sorted(polygon_sizes(cat, y, z)) == [6, 6]:
                hits.append((y, z))
        assert hits, policy
        assert len(cat.fully_broken("1_(111)", "xx_(000)")) == 12


@pytest.mark.criterion(4, "hypercube category: square interval, cube hexagon, odd square faces")
def test_hypercube_category():
    cat = hypercube_category(2)
    (iv,) = cat.intervals[("11", "00")]
    ends = {tuple(p.target for p in end) for end in iv.ends}
    assert ends == {("10", "00"), ("01", "00")}
    cat3 = hypercube_category(3)
    (pg,) = cat3.polygons[("111", "000")]
    assert len(pg) == 6
    assert len({flip_sequence(v) for v in pg.vertices}) == 6
    for n in (2, 3, 4):
        assert standard_sign_assignment(n).satisfies_face_rule()


@pytest.mark.criterion(5, "CJS realization: square gives cells 2,3,3,4 and is acyclic; corpus homology shifts by d")
def test_cjs_realization(data_dir):
    cw = cjs_realize(hypercube_category(2), 2)
    assert sorted(cw.cells.values()) == [2, 3, 3, 4]
    assert homology(cw.cellular_complex()).total_rank() == 0
    d = 2
    for name in KH_CORPUS:
        D = load_pd(data_dir, name)
        cat = khovanov_flow_category(D, "right")
        assert all(check_boundary_coherence(cat, k) for k in (0, 1, 2)), name
        H = homology(cjs_realize(cat, d).cellular_complex())
        assert H == khovanov_homology(D).shifted(d), name


@pytest.mark.criterion(6, "grid basics: 120 trefoil states, 2 rectangles per two-column pair, Maslov indices 1, 2, 3, 2")
def test_grid_basics(data_dir):
    G = load_grid(data_dir, "trefoil")
    states = list(enumerate_states(G))
    assert len(states) == 120
    for x in states:
        for a in range(5):
            for b in range(a + 1, 5):
                y = list(x)
                y[a], y[b] = y[b], y[a]
                assert len(rectangles(G, x, tuple(y))) == 2
    n, x, y, squares, *_ = CATALOG["L-shape"]
    assert maslov_index(domain(n, x, y, squares)) == 2
    empty = marked = 0
    for R in rectangles(G, (0, 1, 2, 3, 4), (2, 1, 0, 3, 4)) + rectangles(G, (2, 1, 0, 3, 4), (0, 1, 2, 3, 4)):
        mu = maslov_index(rectangle_domain(R))
        if R.n_points == 0:
            empty += 1
            assert mu == 1
        elif R.n_points == 1:
            marked += 1
            assert mu == 3
    assert empty and marked
    x = (0, 1, 2, 3, 4)
    assert maslov_index(row_domain(5, 2, x)) == maslov_index(column_domain(5, 3, x)) == 2


@pytest.mark.criterion(7, "grid homology: d^2=0 over GF(2) and Z, tilde ranks 2, 4, 48, trefoil under 10 s")
def test_grid_homology(data_dir, frozen):
    for name in GRID_CORPUS:
        G = load_grid(data_dir, name)
        start = time.perf_counter()
        assert verify_d_squared_gf2(tilde_differential(G, "gf2"))
        signs = solve_sign_assignment(G)
        assert check_sign_assignment(signs)
        assert verify_d_squared(tilde_differential(G, "int", signs))
        assert grid_homology(G).total_rank() == frozen["grid_tilde_rank"][name]
        assert time.perf_counter() - start < 10.0, name
    assert [frozen["grid_tilde_rank"][k] for k in GRID_CORPUS] == [2, 4, 48]
    for n in (2, 3, 4):
        for O in permutations(range(n)):
            if all(O[i] != i for i in range(n)):
                G = GridDiagram(n, tuple(range(n)), O)
                assert verify_d_squared_gf2(tilde_differential(G, "gf2"))


@pytest.mark.criterion(8, "decomposition counts 2, 2, 6, 8, 4 and two ends for every index-2 domain")
def test_decomposition_counts():
    expected = {
        "two disjoint rectangles": 2,
        "L-shape": 2,
        "three independent rectangles": 6,
        "staircase": 8,
        "rectangle around a state point": 4,
    }
    for name, count in expected.items():
        n, x, y, squares, *_ = CATALOG[name]
        assert len(decompositions(generic(n), domain(n, x, y, squares))) == count, name
    for n in (2, 3):
        G = generic(n)
        for x in permutations(range(n)):
            for y in permutations(range(n)):
                for D in enumerate_positive_domains(G, x, y, 2):
                    if maslov_index(D) == 2:
                        assert len(decompositions(G, D)) + len(detect_bubble_ends(G, D)) == 2


@pytest.mark.criterion(9, "obstruction complex at mu_max 3: d^2=0, H_0 = Z, H_1 = 0 on 2x2 and 3x3 grids, under 30 s")
def test_obstruction_complex(data_dir):
    for name in ("unknot2", "unknot3"):
        G = load_grid(data_dir, name)
        start = time.perf_counter()
        assert verify_d_squared(obstruction_complex(G, 3).complex)
        H = cd_homology(G, 3)
        assert H.betti.get(0) == 1 and not H.torsion.get(0)
        assert H.betti.get(1, 0) == 0 and not H.torsion.get(1)
        assert time.perf_counter() - start < 30.0


@pytest.mark.criterion(10, "strip pairing: n (H, V) pairs keyed by O-markings")
def test_strip_pairing(data_dir):
    grids = [load_grid(data_dir, name) for name in GRID_CORPUS]
    for n in range(2, 6):
        grids += [GridDiagram(n, X, tuple((r + 1) % n for r in X)) for X in list(permutations(range(n)))[:6]]
    for G in grids:
        pairs = pair_strips(G)
        assert len(pairs) == G.n
        assert [p.o_column for p in pairs] == list(range(G.n))
        for p in pairs:
            assert p.horizontal.orientation == "H" and p.horizontal.index == G.O[p.o_column]
            assert p.vertical.orientation == "V" and p.vertical.index == p.o_column
