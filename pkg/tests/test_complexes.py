import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from flowknot.complexes import (
    ComplexError,
    GradedChainComplex,
    HomologyTable,
    gf2_rank,
    homology,
    homology_gf2,
    smith_normal_form,
    verify_d_squared,
)

from oracles import gf2_rank as oracle_gf2_rank
from oracles import invariant_factors

small_matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=m, max_size=m)
    )
)


@given(small_matrices)
def test_snf_matches_determinantal_divisors(mat):
    assert smith_normal_form(mat) == invariant_factors(mat)


@given(small_matrices, st.integers(0, 2**32 - 1))
def test_snf_invariant_under_unimodular_operations(mat, seed):
    rng = random.Random(seed)
    a = np.array(mat, dtype=object)
    m, n = a.shape
    for _ in range(6):
        if rng.random() < 0.5 and m > 1:
            i, j = rng.sample(range(m), 2)
            a[i] = a[i] + rng.randint(-3, 3) * a[j]
        elif n > 1:
            i, j = rng.sample(range(n), 2)
            a[:, i] = a[:, i] + rng.randint(-3, 3) * a[:, j]
    assert smith_normal_form(a.tolist()) == smith_normal_form(mat)


def test_snf_examples():
    assert smith_normal_form([[2, 4], [6, 8]]) == [2, 4]
    assert smith_normal_form([[0, 0], [0, 0]]) == []
    assert smith_normal_form([[2, 0], [0, 3]]) == [1, 6]
    assert smith_normal_form([]) == []


@given(st.lists(st.lists(st.integers(0, 1), min_size=7, max_size=7), min_size=1, max_size=9))
def test_gf2_rank_matches_oracle(mat):
    assert gf2_rank(mat) == oracle_gf2_rank(mat)


def _circle_complex():
    # cellular complex of a circle: one 0-cell, one 1-cell, zero boundary
    return GradedChainComplex({"v": 0, "e": 1}, {"e": [("v", 0)]})


def test_homology_of_small_complexes():
    assert homology(_circle_complex()) == HomologyTable({0: 1, 1: 1}, {})
    rp2 = GradedChainComplex({"a": 0, "b": 1, "c": 2}, {"c": [("b", 2)]})
    H = homology(rp2)
    assert H.betti == {0: 1, 1: 0, 2: 0}
    assert H.torsion[1] == [2]
    assert homology_gf2(rp2).betti == {0: 1, 1: 1, 2: 1}


def test_grading_and_d_squared_errors():
    with pytest.raises(ComplexError):
        GradedChainComplex({"a": 0, "b": 0}, {"a": [("b", 1)]})
    with pytest.raises(ComplexError):
        GradedChainComplex({"a": 1}, {"a": [("z", 1)]})
    bad = GradedChainComplex({"a": 2, "b": 1, "c": 0}, {"a": [("b", 1)], "b": [("c", 1)]})
    assert not verify_d_squared(bad)
    with pytest.raises(ComplexError):
        homology(bad)


def test_json_round_trip():
    C = GradedChainComplex({"a": 1, "b": 0, "c": 0}, {"a": [("b", 1), ("c", -1)]})
    D = GradedChainComplex.from_json(C.to_json())
    assert D.to_dict() == C.to_dict()
    H = homology(C)
    assert HomologyTable.from_dict(H.to_dict()) == H


def test_shift_and_euler_characteristic():
    C = _circle_complex()
    assert C.euler_characteristic() == 0
    assert homology(C.shifted(3)) == homology(C).shifted(3)
