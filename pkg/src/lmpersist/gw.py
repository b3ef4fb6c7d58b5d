"""Galton-Watson trees, neighborhood censuses and population dynamics."""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .complex import derive_seed
from .limits import DegreeDistribution
from .linalg import TannerGraph

MAX_CENSUS_RADIUS = 6


@dataclass
class RootedTree:
    """Vertex 0 is the root; ``children[v]`` lists the children of v."""

    children: list[list[int]]
    depth_cap: int
    depth: list[int] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.children)

    def root_degree(self) -> int:
        return len(self.children[0])


def canonical_key(tree: RootedTree) -> str:
    """Sorted-children parenthesis code; equal iff rooted-isomorphic."""
    return _code(tree.children, 0)


def _code(children: list[list[int]], root: int) -> str:
    order = [root]
    for v in order:
        order.extend(children[v])
    code: dict[int, str] = {}
    for v in reversed(order):
        code[v] = "(" + "".join(sorted(code[c] for c in children[v])) + ")"
    return code[root]


def parse_key(key: str) -> RootedTree:
    """Inverse of ``canonical_key`` (up to relabeling)."""
    children: list[list[int]] = []
    depth: list[int] = []
    stack: list[int] = []
    for ch in key:
        if ch == "(":
            v = len(children)
            children.append([])
            depth.append(len(stack))
            if stack:
                children[stack[-1]].append(v)
            stack.append(v)
        elif ch == ")":
            stack.pop()
        else:
            raise ValueError(f"bad tree key {key!r}")
    return RootedTree(children, max(depth), depth)


# ---------------------------------------------------------------------------
# samplers


def _grow(rng: np.random.Generator, root_law, even_law, odd_law, depth: int) -> RootedTree:
    """Generation g >= 1 draws offspring from odd_law (g odd) or even_law (g even)."""
    children: list[list[int]] = [[]]
    depths = [0]
    frontier = [0]
    for g in range(depth):
        law = root_law if g == 0 else (odd_law if g % 2 == 1 else even_law)
        counts = law.sample(rng, len(frontier)).tolist()
        nxt = []
        for v, m in zip(frontier, counts):
            start = len(children)
            children[v] = list(range(start, start + m))
            children.extend([] for _ in range(m))
            depths.extend([g + 1] * m)
            nxt.extend(children[v])
        frontier = nxt
        if not frontier:
            break
    return RootedTree(children, depth, depths)


def sample_gw_star(mu: DegreeDistribution, nu: DegreeDistribution, depth: int, seed: int) -> RootedTree:
    """GW_*(mu, nu): root offspring mu, then nu' at odd and mu' at even depths."""
    rng = np.random.default_rng(derive_seed(seed, 0))
    return _grow(rng, mu, mu.size_bias(), nu.size_bias(), depth)


def sample_gw(mu_b: DegreeDistribution, nu_b: DegreeDistribution, depth: int, seed: int) -> RootedTree:
    """Plain two-type GW tree with offspring mu_b at even and nu_b at odd depths."""
    rng = np.random.default_rng(derive_seed(seed, 0))
    return _grow(rng, mu_b, mu_b, nu_b, depth)


def gw_star_census(
    mu: DegreeDistribution, nu: DegreeDistribution, radius: int, samples: int, seed: int
) -> dict[str, float]:
    """Empirical law of canonical keys of depth-``radius`` GW_* trees."""
    rng = np.random.default_rng(derive_seed(seed, 1))
    mub, nub = mu.size_bias(), nu.size_bias()
    counts = Counter(canonical_key(_grow(rng, mu, mub, nub, radius)) for _ in range(samples))
    return {key: c / samples for key, c in counts.items()}


# ---------------------------------------------------------------------------
# census of finite graphs


def _adjacency(G: TannerGraph) -> tuple[list[list[int]], int]:
    """Integer adjacency with columns first (0..C-1), then rows."""
    n_c = len(G.col_ids)
    adj = [list(G.col_adj[j]) for j in range(n_c)]
    adj = [[n_c + i for i in nb] for nb in adj]
    adj.extend(list(nb) for nb in G.row_adj)
    return adj, n_c


def ball_key(adj: list[list[int]], root: int, radius: int) -> str:
    """Key of the radius ball around ``root``: a tree code, or a refinement hash if it has cycles."""
    dist = {root: 0}
    order = [root]
    for v in order:
        if dist[v] == radius:
            continue
        for w in adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                order.append(w)
    n_edges = sum(1 for v in order for w in adj[v] if w in dist) // 2
    if n_edges == len(order) - 1:
        local = {v: i for i, v in enumerate(order)}
        children: list[list[int]] = [[] for _ in order]
        for v in order:
            for w in adj[v]:
                if w in dist and dist[w] == dist[v] + 1:
                    children[local[v]].append(local[w])
        return _code(children, 0)
    return "cyclic:" + _refinement_hash(adj, order, dist, root)


def _refinement_hash(adj, verts, dist, root, rounds: int = 4) -> str:
    inside = set(verts)
    color = {v: ("R" if v == root else "") + str(dist[v]) for v in verts}
    for _ in range(rounds):
        color = {
            v: hashlib.sha1(
                (color[v] + "|" + ",".join(sorted(color[w] for w in adj[v] if w in inside))).encode()
            ).hexdigest()[:16]
            for v in verts
        }
    sig = ",".join(sorted(color.values()))
    return hashlib.sha1(sig.encode()).hexdigest()[:16]


def census(G: TannerGraph, U=None, radius: int = 2) -> dict[str, float]:
    """Frequencies of ball isomorphism types over the roots ``U`` (default: all columns).

    ``U`` holds column labels of G.
    """
    if radius > MAX_CENSUS_RADIUS or radius < 0:
        raise ValueError(f"radius must be in [0, {MAX_CENSUS_RADIUS}]")
    adj, n_c = _adjacency(G)
    if U is None:
        roots = list(range(n_c))
    else:
        pos = {x: j for j, x in enumerate(G.col_ids)}
        roots = [pos[x] for x in U]
    if not roots:
        return {}
    counts = Counter(ball_key(adj, o, radius) for o in roots)
    return {key: c / len(roots) for key, c in counts.items()}


def census_adjacency(adj: list[list[int]], roots, radius: int = 2) -> dict[str, float]:
    """Census on a plain adjacency list (any graph)."""
    roots = list(roots)
    counts = Counter(ball_key(adj, o, radius) for o in roots)
    return {key: c / len(roots) for key, c in counts.items()}


def tv_distance(p: dict[str, float], q: dict[str, float]) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(x, 0.0) - q.get(x, 0.0)) for x in keys)


# ---------------------------------------------------------------------------
# population dynamics


@dataclass
class PopulationResult:
    t_est: float
    eta_est: float
    t_history: np.ndarray
    pool: np.ndarray


def _update(pool: np.ndarray, rng, col_law, row_law, size: int) -> np.ndarray:
    """One sweep of x = 1 / (1 + sum_i 1 / (sum_j x_j)) for ``size`` fresh vertices.

    An empty or all-zero inner sum makes its reciprocal infinite, so x = 0.
    """
    n_rows = col_law.sample(rng, size)
    owner = np.repeat(np.arange(size), n_rows)
    n_leaves = row_law.sample(rng, owner.size)
    row_of_leaf = np.repeat(np.arange(owner.size), n_leaves)
    picks = pool[rng.integers(0, pool.size, row_of_leaf.size)]
    inner = np.bincount(row_of_leaf, weights=picks, minlength=owner.size)
    dead = inner <= 0
    inv = np.zeros(owner.size)
    inv[~dead] = 1.0 / inner[~dead]
    inv_sum = np.bincount(owner, weights=inv, minlength=size)
    killed = np.bincount(owner, weights=dead.astype(np.float64), minlength=size) > 0
    out = 1.0 / (1.0 + inv_sum)
    out[killed] = 0.0
    # positive values are bounded away from zero so that 0 keeps meaning "infinite sum"
    pos = out > 0
    out[pos] = np.maximum(out[pos], np.finfo(np.float64).tiny)
    return out


def population_dynamics(
    mu: DegreeDistribution,
    nu: DegreeDistribution,
    pool_size: int = 100_000,
    iters: int = 200,
    init: str = "zeros",
    seed: int = 42,
) -> PopulationResult:
    """Pool iteration of the recursive distributional equation on GW_*(mu, nu).

    Non-root columns have mu' rows below them and rows have nu' columns below
    them.  After ``iters`` whole-pool sweeps, a fresh batch of roots with mu
    rows estimates E X_root, the limiting spectral atom at zero.
    """
    if init not in ("zeros", "ones"):
        raise ValueError("init must be 'zeros' or 'ones'")
    rng = np.random.default_rng(derive_seed(seed, 2))
    pool = np.zeros(pool_size) if init == "zeros" else np.ones(pool_size)
    if mu.mean == 0:
        return PopulationResult(1.0, 1.0, np.ones(iters), np.ones(pool_size))
    mub, nub = mu.size_bias(), nu.size_bias()
    history = np.empty(iters)
    for it in range(iters):
        pool = _update(pool, rng, mub, nub, pool_size)
        history[it] = np.mean(pool > 0)
    roots = _update(pool, rng, mu, nub, pool_size)
    return PopulationResult(float(history[-1]), float(roots.mean()), history, pool)
