from itertools import permutations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from flowknot import _core, _fallback

kernels = pytest.importorskip("flowknot._kernels")


def test_backend_reported():
    assert _core.BACKEND in ("cython", "python")


@given(st.integers(1, 70), st.integers(1, 70), st.integers(0, 2**32 - 1))
def test_gf2_rank_parity(m, n, seed):
    mat = np.random.default_rng(seed).integers(0, 2, size=(m, n), dtype=np.uint8)
    assert kernels.gf2_rank(mat) == _fallback.gf2_rank(mat)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("avoid", [True, False])
def test_empty_rectangles_parity(n, avoid):
    perms = np.array(list(permutations(range(n))), dtype=np.int64)
    O = np.array([(i + 1) % n for i in range(n)], dtype=np.int64)
    X = np.arange(n, dtype=np.int64)
    a = kernels.empty_rectangles(perms, O, X, avoid)
    b = _fallback.empty_rectangles(perms, O, X, avoid)
    assert a.shape == b.shape and (a == b).all()


def test_perm_rank_is_lexicographic_position():
    for k, p in enumerate(permutations(range(5))):
        assert kernels.perm_rank(list(p)) == k == _fallback.perm_rank(list(p))
