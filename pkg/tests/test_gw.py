from math import exp

import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from lmpersist.gw import (
    RootedTree,
    ball_key,
    canonical_key,
    census,
    census_adjacency,
    gw_star_census,
    parse_key,
    population_dynamics,
    sample_gw,
    sample_gw_star,
    tv_distance,
)
from lmpersist.limits import DegreeDistribution as DD, fixed_points, lambda_qc_curve, row_law
from lmpersist.linalg import SparseSignMatrix, tanner


def test_depth_zero_is_single_root():
    T = sample_gw_star(DD.poisson(3), row_law(1, 1.0), 0, 1)
    assert T.size == 1


def test_dirac_laws():
    T = sample_gw_star(DD.dirac(2), DD.dirac(3), 2, 0)
    assert T.root_degree() == 2
    assert all(len(T.children[c]) == 2 for c in T.children[0])
    T = sample_gw(DD.dirac(1), DD.dirac(2), 3, 0)
    assert [T.depth.count(d) for d in range(4)] == [1, 1, 2, 2]


def test_root_degree_law():
    mu = DD.poisson(1.7)
    rng_counts = np.bincount(
        [sample_gw_star(mu, row_law(1, 0.5), 1, s).root_degree() for s in range(20_000)], minlength=15
    )
    emp = rng_counts / rng_counts.sum()
    assert 0.5 * np.abs(emp - mu.pmf(emp.size)).sum() < 0.02


def _random_tree(draw_sizes):
    children = [[]]
    for parent in draw_sizes:
        p = parent % len(children)
        children[p].append(len(children))
        children.append([])
    return RootedTree(children, 10)


def _relabel(tree: RootedTree, rng) -> RootedTree:
    n = tree.size
    perm = np.concatenate([[0], 1 + rng.permutation(n - 1)])
    new = [[] for _ in range(n)]
    for v in range(n):
        kids = [int(perm[c]) for c in tree.children[v]]
        rng.shuffle(kids)
        new[int(perm[v])] = kids
    return RootedTree(new, tree.depth_cap)


@given(st.lists(st.integers(0, 100), max_size=25), st.integers(0, 1000))
def test_canonical_key_invariance(parents, seed):
    T = _random_tree(parents)
    key = canonical_key(T)
    assert canonical_key(_relabel(T, np.random.default_rng(seed))) == key
    assert canonical_key(parse_key(key)) == key


def test_canonical_key_distinguishes():
    path = RootedTree([[1], [2], []], 2)
    cherry = RootedTree([[1, 2], [], []], 2)
    assert canonical_key(path) != canonical_key(cherry)
    # same unrooted tree, different root
    mid = RootedTree([[1, 2], [], []], 2)
    end = RootedTree([[1], [2], []], 2)
    assert canonical_key(mid) != canonical_key(end)


def test_census_matching_and_star():
    G = tanner(SparseSignMatrix.from_dense(np.eye(5)))
    assert census(G, radius=2) == {"(())": 1.0}
    star = tanner(SparseSignMatrix.from_dense([[1, 1, 1]]))
    freq = census(star, radius=2)
    assert list(freq.values()) == [1.0]
    assert list(freq) == ["((()()))"]


def test_census_flags_cycles():
    # a 4-cycle r0-c0-r1-c1-r0
    G = tanner(SparseSignMatrix.from_dense([[1, 1], [1, -1]]))
    freq = census(G, radius=2)
    assert all(k.startswith("cyclic:") for k in freq)


@given(st.integers(0, 1000))
def test_census_relabel_invariant(seed):
    rng = np.random.default_rng(seed)
    A = (rng.random((12, 14)) < 0.15).astype(int)
    G = tanner(SparseSignMatrix.from_dense(A))
    pr, pc = rng.permutation(12), rng.permutation(14)
    H = tanner(SparseSignMatrix.from_dense(A[pr][:, pc]))
    f, g = census(G, radius=2), census(H, radius=2)
    assert f == pytest.approx(g)
    assert sum(f.values()) == pytest.approx(1.0)


def test_ball_key_plain_graph():
    adj = [[1], [0, 2], [1]]
    assert ball_key(adj, 0, 2) == "((()))"
    assert census_adjacency(adj, [0, 2], 1) == {"(())": 1.0}


def test_tv_distance():
    assert tv_distance({"a": 1.0}, {"a": 1.0}) == 0.0
    assert tv_distance({"a": 1.0}, {"b": 1.0}) == 1.0
    assert tv_distance({"a": 0.5, "b": 0.5}, {"a": 1.0}) == 0.5


def test_gw_census_sums_to_one():
    freq = gw_star_census(DD.poisson(1.3), row_law(1, exp(-0.7)), 2, 5000, 3)
    assert sum(freq.values()) == pytest.approx(1.0)


def test_population_no_children():
    res = population_dynamics(DD.poisson(0.0), row_law(1, 1.0), 10_000, 100)
    assert res.eta_est == 1.0 and res.t_est == 1.0


def test_population_values_in_unit_interval_and_monotone():
    mu, nu = DD.poisson(3.0), row_law(2, 0.8)
    res = population_dynamics(mu, nu, 100_000, 60, "zeros", 1)
    assert (res.pool >= 0).all() and (res.pool <= 1).all()
    assert (np.diff(res.t_history) >= -0.005).all()


@pytest.mark.slow
def test_population_matches_fixed_points():
    mu, nu = DD.poisson(4.0), row_law(1, 1.0)
    fp = fixed_points(1, 1.0, 4.0)
    lo = population_dynamics(mu, nu, 100_000, 200, "zeros", 42)
    hi = population_dynamics(mu, nu, 100_000, 200, "ones", 42)
    assert abs(lo.t_est - fp.alpha) < 0.01
    assert abs(hi.t_est - fp.alpha_prime) < 0.01
    assert abs(lo.eta_est - lambda_qc_curve(1, 1.0, 4.0, fp.alpha)) < 0.01
