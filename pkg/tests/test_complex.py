import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from lmpersist.complex import (
    FaceIndexer,
    InvalidFace,
    InvalidParameters,
    InvalidWindow,
    LMFiltration,
    coboundary_matrix,
    complex_at,
    face_time,
    promoting_count,
    read_filtration,
    sample_filtration,
    write_filtration,
)
from lmpersist.linalg import rank_exact_small, rank_mod_p


def test_single_top_face():
    F = sample_filtration(2, 1, seed=3)
    assert F.n_top == 1
    assert 0 < F.top_times[0] <= 2


def test_counts_and_determinism():
    assert sample_filtration(5, 1, 0).n_top == 10
    a, b = sample_filtration(6, 2, 7), sample_filtration(6, 2, 7)
    assert np.array_equal(a.top_times, b.top_times)
    assert not np.array_equal(a.top_times, sample_filtration(6, 2, 8).top_times)


def test_invalid_parameters():
    with pytest.raises(InvalidParameters):
        sample_filtration(2, 2, 0)
    with pytest.raises(InvalidParameters):
        sample_filtration(3, 0, 0)


def test_times_distinct_and_in_range():
    F = sample_filtration(30, 1, 11)
    t = F.top_times
    assert np.unique(t).size == t.size
    assert (t > 0).all() and (t <= 30).all()


@given(st.integers(2, 9), st.integers(0, 60))
def test_indexer_roundtrip(n, j):
    idx = FaceIndexer(n)
    j = 1 + j % n
    subs = idx.all_subsets(j)
    assert subs.shape == (comb(n, j), j)
    for rk, s in enumerate(subs):
        assert idx.rank(s) == rk
        assert idx.unrank(rk, j) == tuple(s)


def test_face_time_small_cases():
    F = sample_filtration(2, 1, 5)
    assert face_time(F, [1]) == face_time(F, [1, 2]) == F.top_times[0]
    G = sample_filtration(3, 1, 5)
    assert face_time(G, [1]) == min(face_time(G, [1, 2]), face_time(G, [1, 3]))
    with pytest.raises(InvalidFace):
        face_time(G, [0, 1])
    with pytest.raises(InvalidFace):
        face_time(G, [1, 4])


@given(st.integers(0, 10_000), st.sampled_from([(7, 1), (7, 2), (6, 3)]))
def test_monotone_filtration(seed, nk):
    n, k = nk
    F = sample_filtration(n, k, seed)
    for sigma in itertools.combinations(range(1, n + 1), k + 1):
        ts = face_time(F, sigma)
        for d in range(1, k + 1):
            for tau in itertools.combinations(sigma, d):
                assert face_time(F, tau) <= ts


@given(st.integers(0, 10_000), st.floats(0, 6), st.floats(0, 6))
def test_complex_at_nested_and_closed(seed, t1, t2):
    F = sample_filtration(6, 2, seed)
    t1, t2 = sorted((t1, t2))
    a, b = complex_at(F, t1), complex_at(F, t2)
    for d in a:
        assert set(a[d]) <= set(b[d])
        for face in a[d]:
            for sub in itertools.combinations(face, len(face) - 1):
                if sub:
                    assert sub in set(a[len(sub) - 1])


def test_complex_at_extremes():
    F = sample_filtration(6, 2, 1)
    empty = complex_at(F, 0.0)
    assert all(len(v) == 0 for v in empty.values())
    full = complex_at(F, 6.0)
    assert [len(full[d]) for d in range(3)] == [6, 15, 20]


def test_coboundary_small():
    F = sample_filtration(3, 1, 0)
    M = coboundary_matrix(F, 3.0)
    assert M.shape == (3, 3)
    assert rank_exact_small(M) == 2
    F2 = sample_filtration(2, 1, 0)
    assert sorted(M2 for M2 in coboundary_matrix(F2, 2.0).to_dense().ravel().tolist()) == [-1, 1]
    with pytest.raises(InvalidWindow):
        coboundary_matrix(F, 1.0, 1.0)


@pytest.mark.parametrize("n,k", [(8, 1), (7, 2), (8, 3), (5, 2), (6, 2)])
def test_full_coboundary_rank(n, k):
    # the image of the full coboundary is B^{k} of the complete complex,
    # of dimension C(n-1, k); see the decisions ledger for the formula used
    F = sample_filtration(n, k, 1)
    M = coboundary_matrix(F, float(n))
    assert rank_exact_small(M) == comb(n - 1, k)
    assert rank_mod_p(M) == comb(n - 1, k)


@given(st.integers(0, 10_000), st.floats(0.1, 3.0), st.floats(0.1, 3.0))
def test_window_column_count(seed, r, ds):
    F = sample_filtration(9, 2, seed)
    s = min(r + ds, 9.0)
    M = coboundary_matrix(F, s, r)
    present = int((F.times(2) <= r).sum())
    assert M.shape[1] == comb(9, 2) - present
    assert M.shape[0] == int(((F.top_times > r) & (F.top_times <= s)).sum())


def test_rows_have_k_plus_one_entries():
    F = sample_filtration(8, 2, 4)
    M = coboundary_matrix(F, 8.0)
    assert (M.row_degrees() == 3).all()


def test_promoting_small():
    assert promoting_count(sample_filtration(2, 1, 9)) == 1
    assert promoting_count(sample_filtration(4, 3, 9)) == 1
    # K_3: every ordering of the three edges promotes exactly the first two
    for perm in itertools.permutations([1.0, 2.0, 3.0]):
        F = LMFiltration(3, 1, np.array(perm))
        assert promoting_count(F) == 2


def test_dump_roundtrip(tmp_path):
    F = sample_filtration(7, 2, 13)
    path = tmp_path / "f.txt"
    write_filtration(F, path)
    G = read_filtration(path)
    assert (G.n, G.k, G.seed) == (7, 2, 13)
    assert np.array_equal(F.top_times, G.top_times)
    assert path.read_text().splitlines()[0] == "7 2 13"
