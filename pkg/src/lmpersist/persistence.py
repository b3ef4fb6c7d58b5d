"""Verbose persistence diagrams of the (k-1)-homology of an LM filtration.

Two engines compute the same object:

* ``reduce_diagram``: column reduction of the boundary matrix in filtration
  order, pairing (k-1)-faces that create cycles with the top faces that fill
  them in;
* ``betti_grid``: dim(Z(r) & B(s)) = rank K(s) - rank M(r, s), evaluated
  pointwise from sparse ranks.

``good_basis`` builds an explicit greedy cycle basis at tiny sizes as a third
check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np

from .complex import LMFiltration, boundary_signs, lower_boundary_matrix
from .linalg import P_PRIMARY, EchelonBasis, rank_mod_p


class InvalidTime(ValueError):
    pass


class OracleScaleExceeded(ValueError):
    pass


@dataclass
class VerboseDiagram:
    """Weighted (birth, death) atoms with mass normalized by ``normalizer``."""

    births: np.ndarray
    deaths: np.ndarray
    mult: np.ndarray
    normalizer: int
    n: int | None = None
    k: int | None = None
    seed: int | None = None

    @classmethod
    def from_pairs(cls, births, deaths, normalizer: int, **meta) -> "VerboseDiagram":
        births = np.asarray(births, dtype=np.float64)
        deaths = np.asarray(deaths, dtype=np.float64)
        if births.size:
            pairs, counts = np.unique(np.stack([births, deaths], axis=1), axis=0, return_counts=True)
            b, d = pairs[:, 0], pairs[:, 1]
        else:
            b = d = np.zeros(0)
            counts = np.zeros(0, dtype=np.int64)
        return cls(b, d, counts.astype(np.int64), normalizer, **meta)

    @property
    def total(self) -> int:
        return int(self.mult.sum())

    @property
    def mass(self) -> float:
        return self.total / self.normalizer

    def diagonal_mass(self) -> float:
        return float(self.mult[self.births == self.deaths].sum()) / self.normalizer

    def atoms(self) -> list[tuple[float, float, int]]:
        return list(zip(self.births.tolist(), self.deaths.tolist(), self.mult.tolist()))


@dataclass
class BettiGrid:
    r_values: np.ndarray
    s_values: np.ndarray
    values: np.ndarray  # values[i, j] = dim Z(r_i) & B(s_j)
    rank_K: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))


@dataclass
class GoodBasis:
    vectors: list[dict[int, int]]
    births: list[float]
    deaths: list[float]


# ---------------------------------------------------------------------------
# engine (a): boundary reduction


def _lower_positive(F: LMFiltration, order_lo: np.ndarray, p: int) -> np.ndarray:
    """Which (k-1)-faces create a (k-1)-cycle when they arrive."""
    k = F.k
    m = order_lo.size
    positive = np.zeros(m, dtype=bool)
    if k == 1:
        # every vertex maps onto the empty face; only the first one is negative
        positive[order_lo[1:]] = True
        return positive
    t2 = F.times(k - 1)
    order2 = np.lexsort((np.arange(t2.size), t2))
    pos2 = np.empty(t2.size, dtype=np.int64)
    pos2[order2] = np.arange(t2.size)
    fr = pos2[F.facets(k)]
    signs = boundary_signs(k).tolist()
    pivots: dict[int, dict[int, int]] = {}
    for f in order_lo.tolist():
        col = {int(row): s for row, s in zip(fr[f].tolist(), signs)}
        low = _reduce_column(col, pivots, p)
        if low is None:
            positive[f] = True
        else:
            pivots[low] = col
    return positive


def _reduce_column(col: dict[int, int], pivots: dict[int, dict[int, int]], p: int) -> int | None:
    """Reduce ``col`` in place by max-index pivots; store-ready when returning a low."""
    while col:
        low = max(col)
        other = pivots.get(low)
        if other is None:
            inv = pow(col[low], -1, p)
            for key in col:
                col[key] = col[key] * inv % p
            return low
        coef = col[low]
        for row, x in other.items():
            v = (col.get(row, 0) - coef * x) % p
            if v:
                col[row] = v
            else:
                col.pop(row, None)
    return None


def reduce_diagram(F: LMFiltration, p: int = P_PRIMARY) -> VerboseDiagram:
    """Verbose (k-1)-diagram by left-to-right boundary reduction over GF(p).

    Faces are ordered by (time, dimension, colex rank), so a promoting top face
    comes right after the new facets it brings and closes a zero-length bar.
    Reduction stops once all C(n-1, k) cycles have been paired.
    """
    k = F.k
    normalizer = comb(F.n - 1, k)
    t_lo = F.times(k)
    order_lo = np.lexsort((np.arange(t_lo.size), t_lo))
    pos_lo = np.empty(t_lo.size, dtype=np.int64)
    pos_lo[order_lo] = np.arange(t_lo.size)
    positive = _lower_positive(F, order_lo, p)

    t_top = F.top_times
    order_top = np.lexsort((np.arange(t_top.size), t_top))
    fr = pos_lo[F.facets(k + 1)]
    signs = boundary_signs(k + 1).tolist()
    pivots: dict[int, dict[int, int]] = {}
    births, deaths = [], []
    for sigma in order_top.tolist():
        if len(births) == normalizer:
            break
        col = {int(row): s for row, s in zip(fr[sigma].tolist(), signs)}
        low = _reduce_column(col, pivots, p)
        if low is None:
            continue
        pivots[low] = col
        creator = int(order_lo[low])
        if not positive[creator]:
            raise RuntimeError("pivot on a negative face; reduction is inconsistent")
        births.append(t_lo[creator])
        deaths.append(t_top[sigma])
    return VerboseDiagram.from_pairs(births, deaths, normalizer, n=F.n, k=k, seed=F.seed)


# ---------------------------------------------------------------------------
# engine (b): rank differences


def betti_grid(
    F: LMFiltration,
    r_list: Sequence[float],
    s_list: Sequence[float],
    p: int = P_PRIMARY,
) -> BettiGrid:
    """dim(Z_{k-1}(r) & B_{k-1}(s)) on the product grid ``r_list x s_list``.

    For r < s this is rank K(s) - rank M(r, s); for r >= s it is rank K(s),
    since then B(s) lies inside Z(r).  Ranks are accumulated incrementally by
    feeding top faces in arrival order.
    """
    k = F.k
    r_arr = np.asarray(r_list, dtype=np.float64)
    s_arr = np.asarray(s_list, dtype=np.float64)
    s_order = np.argsort(s_arr, kind="stable")
    t_top = F.top_times
    t_lo = F.times(k)
    order_top = np.lexsort((np.arange(t_top.size), t_top))
    sorted_times = t_top[order_top]
    fr = F.facets(k + 1)
    signs = boundary_signs(k + 1).tolist()
    s_max = s_arr.max() if s_arr.size else -np.inf
    n_needed = int(np.searchsorted(sorted_times, s_max, side="right"))
    row_facets = fr[order_top[:n_needed]].tolist()

    def ranks_along(start_time: float | None) -> np.ndarray:
        basis = EchelonBasis(p)
        out = np.zeros(s_arr.size, dtype=np.int64)
        ptr = 0 if start_time is None else int(np.searchsorted(sorted_times, start_time, side="right"))
        for j in s_order:
            s = s_arr[j]
            if start_time is not None and s <= start_time:
                continue
            stop = int(np.searchsorted(sorted_times, s, side="right"))
            while ptr < stop:
                facets = row_facets[ptr]
                if start_time is None:
                    vec = dict(zip(facets, signs))
                else:
                    vec = {c: sg for c, sg in zip(facets, signs) if t_lo[c] > start_time}
                if vec:
                    basis.insert(vec)
                ptr += 1
            out[j] = basis.rank
        return out

    rank_K = ranks_along(None)
    values = np.zeros((r_arr.size, s_arr.size), dtype=np.int64)
    for i, r in enumerate(r_arr):
        rank_M = ranks_along(float(r))
        values[i] = np.where(s_arr <= r, rank_K, rank_K - rank_M)
    return BettiGrid(r_arr, s_arr, values, rank_K)


def cycle_dim(F: LMFiltration, r: float, p: int = P_PRIMARY) -> int:
    """dim Z_{k-1}(Y(r)) via rank-nullity on the boundary of the present (k-1)-faces."""
    k = F.k
    present = int((F.times(k) <= r).sum())
    if k == 1:
        return max(present - 1, 0)
    return present - rank_mod_p(lower_boundary_matrix(F, r), p)


def _check_time(F: LMFiltration, *ts: float) -> None:
    for t in ts:
        if not 0 <= t <= F.n:
            raise InvalidTime(f"time {t} outside [0, {F.n}]")


def persistent_betti(F: LMFiltration, r: float, s: float, p: int = P_PRIMARY) -> int:
    """beta^{r,s}_{k-1} = dim Z(r) - dim(Z(r) & B(s))."""
    _check_time(F, r, s)
    grid = betti_grid(F, [r], [s], p)
    return cycle_dim(F, r, p) - int(grid.values[0, 0])


# ---------------------------------------------------------------------------
# diagram queries


def diagram_cdf(D: VerboseDiagram, r: float, s: float) -> float:
    """Mass of [0, r] x [0, s]."""
    sel = (D.births <= r) & (D.deaths <= s)
    return float(D.mult[sel].sum()) / D.normalizer


def diagram_cdf_many(D: VerboseDiagram, r, s) -> np.ndarray:
    r = np.atleast_1d(np.asarray(r, dtype=np.float64))
    s = np.atleast_1d(np.asarray(s, dtype=np.float64))
    sel = (D.births[None, :] <= r[:, None]) & (D.deaths[None, :] <= s[:, None])
    return (sel * D.mult[None, :]).sum(axis=1) / D.normalizer


def off_diagonal_restriction(D: VerboseDiagram) -> VerboseDiagram:
    keep = D.births < D.deaths
    return VerboseDiagram(
        D.births[keep], D.deaths[keep], D.mult[keep], D.normalizer, n=D.n, k=D.k, seed=D.seed
    )


def event_times(F: LMFiltration) -> tuple[np.ndarray, np.ndarray]:
    """Grid on which both engines are compared exhaustively.

    dim(Z(r) & B(s)) only changes when r crosses a (k-1)-face arrival or s a
    top-face arrival, so these sets (plus 0) cover every distinct value.
    """
    r = np.concatenate([[0.0], np.unique(F.times(F.k))])
    s = np.concatenate([[0.0], np.sort(F.top_times)])
    return r, s


# ---------------------------------------------------------------------------
# engine (c): greedy good basis (oracle scale)


def _intersection_basis(rows: list[dict[int, int]], inside: set[int], p: int) -> list[dict[int, int]]:
    """Basis of rowspace(rows) restricted to vectors supported in ``inside``.

    Pivots are placed on outside columns whenever possible; rows that still
    end up with an inside pivot are supported inside and span the
    intersection.
    """
    weight = _InsideWeight(inside)
    basis = EchelonBasis(p, col_weight=weight)
    for row in rows:
        basis.insert(row)
    return [row for piv, (_, row) in basis.pivots.items() if piv in inside]


class _InsideWeight:
    def __init__(self, inside: set[int]):
        self.inside = inside

    def __getitem__(self, c: int) -> int:
        return 1 if c in self.inside else 0


def good_basis(F: LMFiltration, p: int = P_PRIMARY, max_normalizer: int = 200) -> GoodBasis:
    """Greedy basis of Z_{k-1}: repeatedly take a smallest cycle outside the span.

    Cycles are preordered by birth, then death.  A smallest cycle outside the
    current span has birth b* = min{b : Z(b) not in span} and death
    d* = min{d : Z(b*) & B(d) not in span}; any element of Z(b*) & B(d*)
    outside the span attains that pair.
    """
    k = F.k
    normalizer = comb(F.n - 1, k)
    if normalizer > max_normalizer:
        raise OracleScaleExceeded(f"normalizer {normalizer} above oracle limit {max_normalizer}")
    t_lo = F.times(k)
    t_top = F.top_times
    r_vals = np.unique(t_lo)
    s_vals = np.unique(t_top)
    fr = F.facets(k + 1).tolist()
    signs = boundary_signs(k + 1).tolist()
    top_rows = [dict(zip(f, signs)) for f in fr]

    cache: dict[tuple[int, int], list[dict[int, int]]] = {}

    def V(i: int, j: int) -> list[dict[int, int]]:
        if (i, j) not in cache:
            inside = set(np.flatnonzero(t_lo <= r_vals[i]).tolist())
            rows = [top_rows[x] for x in np.flatnonzero(t_top <= s_vals[j]).tolist()]
            cache[(i, j)] = _intersection_basis(rows, inside, p)
        return cache[(i, j)]

    span = EchelonBasis(p)
    vectors, births, deaths = [], [], []
    last_s = len(s_vals) - 1
    while span.rank < normalizer:
        pick = None
        for i in range(len(r_vals)):
            if any(not span.contains(v) for v in V(i, last_s)):
                for j in range(len(s_vals)):
                    cand = [v for v in V(i, j) if not span.contains(v)]
                    if cand:
                        pick = (i, j, cand[0])
                        break
                break
        if pick is None:
            raise RuntimeError("cycle space exhausted before reaching the normalizer")
        i, j, vec = pick
        span.insert(vec)
        vectors.append(dict(vec))
        births.append(float(r_vals[i]))
        deaths.append(float(s_vals[j]))
    return GoodBasis(vectors, births, deaths)


def cycle_birth(F: LMFiltration, vec: dict[int, int]) -> float:
    """b(c): the first time every face in the support of ``vec`` is present."""
    t_lo = F.times(F.k)
    return float(max(t_lo[c] for c in vec))


def cycle_death(F: LMFiltration, vec: dict[int, int], p: int = P_PRIMARY) -> float:
    """d(c): the first top-face arrival after which ``vec`` is a boundary."""
    fr = F.facets(F.k + 1)
    signs = boundary_signs(F.k + 1).tolist()
    basis = EchelonBasis(p)
    for sigma in np.argsort(F.top_times, kind="stable").tolist():
        basis.insert(dict(zip(fr[sigma].tolist(), signs)))
        if basis.contains(vec):
            return float(F.top_times[sigma])
    return float("inf")


# ---------------------------------------------------------------------------
# diagram file: header "n k seed normalizer", then "birth death multiplicity"


def write_diagram(D: VerboseDiagram, path) -> None:
    seed = D.seed if D.seed is not None else -1
    with open(path, "w") as fh:
        fh.write(f"{D.n} {D.k} {seed} {D.normalizer}\n")
        for b, d, m in D.atoms():
            fh.write(f"{b!r} {d!r} {m}\n")


def read_diagram(path) -> VerboseDiagram:
    with open(path) as fh:
        n, k, seed, normalizer = (int(x) for x in fh.readline().split())
        b, d, m = [], [], []
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            b.append(float(parts[0]))
            d.append(float(parts[1]))
            m.append(int(parts[2]))
    return VerboseDiagram(
        np.array(b), np.array(d), np.array(m, dtype=np.int64), normalizer,
        n=n, k=k, seed=None if seed < 0 else seed,
    )
