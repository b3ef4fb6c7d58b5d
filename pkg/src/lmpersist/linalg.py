"""Exact rank of sparse sign matrices, Tanner graphs and leaf removal.

Ranks are computed over GF(p) for large primes as a proxy for the rational
rank; a Fraction-based eliminator serves as the oracle at small sizes.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Sequence

import numpy as np

P_PRIMARY = 2**61 - 1
P_CONFIRM = 2**31 - 1
ORACLE_LIMIT = 60


class InvariantViolation(RuntimeError):
    """An internal consistency check failed (e.g. two primes disagree)."""


class OracleTooLarge(ValueError):
    pass


class SparseSignMatrix:
    """A matrix with entries in {-1, 0, +1} stored as coordinate triplets.

    ``rows``/``cols`` hold positions into ``row_ids``/``col_ids``; the labels
    themselves are opaque.  Instances are not modified after construction.
    """

    def __init__(
        self,
        row_ids: Sequence[Hashable],
        col_ids: Sequence[Hashable],
        rows,
        cols,
        vals,
    ):
        self.row_ids = list(row_ids)
        self.col_ids = list(col_ids)
        self.rows = np.asarray(rows, dtype=np.int64).ravel()
        self.cols = np.asarray(cols, dtype=np.int64).ravel()
        self.vals = np.asarray(vals, dtype=np.int8).ravel()
        if not (self.rows.size == self.cols.size == self.vals.size):
            raise ValueError("triplet arrays differ in length")
        if self.vals.size and not np.all(np.abs(self.vals) == 1):
            raise ValueError("entries must be +1 or -1")
        if self.rows.size:
            if self.rows.min() < 0 or self.rows.max() >= len(self.row_ids):
                raise ValueError("row index out of range")
            if self.cols.min() < 0 or self.cols.max() >= len(self.col_ids):
                raise ValueError("column index out of range")
            key = self.rows * max(len(self.col_ids), 1) + self.cols
            if np.unique(key).size != key.size:
                raise ValueError("duplicate (row, col) entry")
        for a in (self.rows, self.cols, self.vals):
            a.flags.writeable = False

    @classmethod
    def from_dense(cls, A) -> "SparseSignMatrix":
        A = np.asarray(A, dtype=np.int64)
        if A.ndim != 2:
            raise ValueError("expected a 2-d array")
        r, c = np.nonzero(A)
        return cls(
            [("r", i) for i in range(A.shape[0])],
            [("c", j) for j in range(A.shape[1])],
            r,
            c,
            A[r, c],
        )

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_ids), len(self.col_ids)

    @property
    def nnz(self) -> int:
        return int(self.vals.size)

    @property
    def entries(self) -> list[tuple[Hashable, Hashable, int]]:
        return [
            (self.row_ids[i], self.col_ids[j], int(v))
            for i, j, v in zip(self.rows, self.cols, self.vals)
        ]

    def to_dense(self) -> np.ndarray:
        A = np.zeros(self.shape, dtype=np.int64)
        A[self.rows, self.cols] = self.vals
        return A

    def transpose(self) -> "SparseSignMatrix":
        return SparseSignMatrix(self.col_ids, self.row_ids, self.cols, self.rows, self.vals)

    def submatrix(self, keep_rows, keep_cols) -> "SparseSignMatrix":
        """Restrict to the given row and column positions (boolean masks or index lists)."""
        rmask = _as_mask(keep_rows, self.shape[0])
        cmask = _as_mask(keep_cols, self.shape[1])
        rnew = np.cumsum(rmask) - 1
        cnew = np.cumsum(cmask) - 1
        sel = rmask[self.rows] & cmask[self.cols]
        return SparseSignMatrix(
            [x for x, m in zip(self.row_ids, rmask) if m],
            [x for x, m in zip(self.col_ids, cmask) if m],
            rnew[self.rows[sel]],
            cnew[self.cols[sel]],
            self.vals[sel],
        )

    def row_dicts(self) -> list[dict[int, int]]:
        out: list[dict[int, int]] = [dict() for _ in range(self.shape[0])]
        for i, j, v in zip(self.rows.tolist(), self.cols.tolist(), self.vals.tolist()):
            out[i][j] = v
        return out

    def col_degrees(self) -> np.ndarray:
        return np.bincount(self.cols, minlength=self.shape[1])

    def row_degrees(self) -> np.ndarray:
        return np.bincount(self.rows, minlength=self.shape[0])

    def __repr__(self) -> str:
        return f"SparseSignMatrix({self.shape[0]}x{self.shape[1]}, nnz={self.nnz})"


def _as_mask(keep, size: int) -> np.ndarray:
    keep = np.asarray(keep)
    if keep.dtype == bool:
        if keep.size != size:
            raise ValueError("mask has wrong length")
        return keep
    mask = np.zeros(size, dtype=bool)
    mask[keep.astype(np.int64)] = True
    return mask


# ---------------------------------------------------------------------------
# rank over GF(p)


class EchelonBasis:
    """Incrementally maintained row-echelon basis over GF(p).

    Each stored row is normalized to 1 at its pivot and is zero at the pivots
    of all rows inserted before it, so reducing a new vector against pivots in
    insertion order is exact.
    """

    def __init__(self, p: int = P_PRIMARY, col_weight=None):
        self.p = p
        self.pivots: dict[int, tuple[int, dict[int, int]]] = {}
        self._col_weight = col_weight

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, vec: dict[int, int]) -> dict[int, int]:
        p = self.p
        v = {c: x % p for c, x in vec.items() if x % p}
        heap = [(self.pivots[c][0], c) for c in v if c in self.pivots]
        heapq.heapify(heap)
        seen = set()
        while heap:
            _, c = heapq.heappop(heap)
            if c in seen:
                continue
            seen.add(c)
            coef = v.get(c)
            if not coef:
                continue
            _, row = self.pivots[c]
            for cc, x in row.items():
                nv = (v.get(cc, 0) - coef * x) % p
                if nv:
                    if cc not in v and cc in self.pivots and cc not in seen:
                        heapq.heappush(heap, (self.pivots[cc][0], cc))
                    v[cc] = nv
                else:
                    v.pop(cc, None)
        return v

    def contains(self, vec: dict[int, int]) -> bool:
        return not self.reduce(vec)

    def insert(self, vec: dict[int, int]) -> bool:
        """Add ``vec``; returns True when it was independent of the basis."""
        v = self.reduce(vec)
        if not v:
            return False
        if self._col_weight is None:
            piv = min(v)
        else:
            w = self._col_weight
            piv = min(v, key=lambda c: (w[c], c))
        inv = pow(v[piv], -1, self.p)
        row = {c: (x * inv) % self.p for c, x in v.items()}
        self.pivots[piv] = (len(self.pivots), row)
        return True


def rank_mod_p(M: SparseSignMatrix, p: int = P_PRIMARY) -> int:
    """Rank over GF(p) by sparse elimination.

    Rows are fed shortest-first and each new pivot is placed on the column of
    smallest original degree (a Markowitz-style fill-in heuristic).
    """
    if M.nnz == 0:
        return 0
    rows = M.row_dicts()
    deg = M.col_degrees()
    basis = EchelonBasis(p, col_weight=deg)
    for i in sorted(range(len(rows)), key=lambda i: len(rows[i])):
        if rows[i]:
            basis.insert(rows[i])
            if basis.rank == M.shape[1]:
                break
    return basis.rank


def rank_confirmed(M: SparseSignMatrix) -> int:
    """Rank over both working primes; disagreement raises InvariantViolation."""
    a = rank_mod_p(M, P_PRIMARY)
    b = rank_mod_p(M, P_CONFIRM)
    if a != b:
        raise InvariantViolation(
            f"rank mod {P_PRIMARY} is {a} but rank mod {P_CONFIRM} is {b} for {M!r}; "
            "re-check with rank_exact_small"
        )
    return a


def rank_exact_small(M: SparseSignMatrix) -> int:
    """Rank over the rationals by Fraction elimination (oracle scale only)."""
    m, n = M.shape
    if min(m, n) > ORACLE_LIMIT:
        raise OracleTooLarge(f"{m}x{n} exceeds the oracle limit of {ORACLE_LIMIT}")
    A = M.to_dense()
    if m > n:
        A = A.T
        m, n = n, m
    R = [[Fraction(int(x)) for x in row] for row in A]
    rank = 0
    for c in range(n):
        piv = next((i for i in range(rank, m) if R[i][c] != 0), None)
        if piv is None:
            continue
        R[rank], R[piv] = R[piv], R[rank]
        pr = R[rank]
        for i in range(rank + 1, m):
            if R[i][c] != 0:
                f = R[i][c] / pr[c]
                R[i] = [a - f * b for a, b in zip(R[i], pr)]
        rank += 1
        if rank == m:
            break
    return rank


# ---------------------------------------------------------------------------
# Tanner graph


@dataclass
class TannerGraph:
    """Bipartite support graph: row r ~ column c iff M(r, c) != 0.

    Vertices are tagged tuples ``("r", label)`` and ``("c", label)``.
    """

    row_ids: list
    col_ids: list
    row_adj: list[list[int]]
    col_adj: list[list[int]]

    def vertices_R(self) -> list[tuple]:
        return [("r", x) for x in self.row_ids]

    def vertices_C(self) -> list[tuple]:
        return [("c", x) for x in self.col_ids]

    def neighbors(self, v: tuple) -> list[tuple]:
        side, label = v
        if side == "r":
            i = self._row_pos[label]
            return [("c", self.col_ids[j]) for j in self.row_adj[i]]
        j = self._col_pos[label]
        return [("r", self.row_ids[i]) for i in self.col_adj[j]]

    def degree(self, v: tuple) -> int:
        side, label = v
        if side == "r":
            return len(self.row_adj[self._row_pos[label]])
        return len(self.col_adj[self._col_pos[label]])

    def __post_init__(self):
        self._row_pos = {x: i for i, x in enumerate(self.row_ids)}
        self._col_pos = {x: j for j, x in enumerate(self.col_ids)}


def tanner(M: SparseSignMatrix) -> TannerGraph:
    row_adj: list[list[int]] = [[] for _ in range(M.shape[0])]
    col_adj: list[list[int]] = [[] for _ in range(M.shape[1])]
    for i, j in zip(M.rows.tolist(), M.cols.tolist()):
        row_adj[i].append(j)
        col_adj[j].append(i)
    return TannerGraph(M.row_ids, M.col_ids, row_adj, col_adj)


# ---------------------------------------------------------------------------
# leaf removal


@dataclass
class PeelResult:
    """Outcome of leaf removal.

    ``col_level[c]`` is the first round i with c in L_i (0 if never) and
    ``row_level[r]`` the first round with r in K_i.  ``residual`` is M with the
    peeled rows and columns deleted.
    """

    col_level: np.ndarray
    row_level: np.ndarray
    rounds: int
    residual: SparseSignMatrix
    n_cols: int = field(default=0)

    @property
    def L_sets(self) -> list[frozenset[int]]:
        return [frozenset(np.flatnonzero((self.col_level > 0) & (self.col_level <= i)).tolist())
                for i in range(1, self.rounds + 1)]

    @property
    def K_sets(self) -> list[frozenset[int]]:
        return [frozenset(np.flatnonzero((self.row_level > 0) & (self.row_level <= i)).tolist())
                for i in range(1, self.rounds + 1)]

    @property
    def removed_rank(self) -> int:
        return int((self.row_level > 0).sum())

    @property
    def n_peeled_cols(self) -> int:
        return int((self.col_level > 0).sum())

    @property
    def rank_bound(self) -> int:
        return self.removed_rank + (self.n_cols - self.n_peeled_cols)


def leaf_removal(M: SparseSignMatrix, max_rounds: int | None = None) -> PeelResult:
    """Karp-Sipser style peeling with nested column/row sets.

    Round i puts into L_i every column with at most one neighbour outside
    K_{i-1}, and into K_i every row adjacent to L_i.  Rows in K are removed in
    level order, each through a column where it is the last remaining nonzero,
    so ``rank(M) = |K| + rank(residual)``.
    """
    m, n = M.shape
    g = tanner(M)
    outside = np.array([len(a) for a in g.col_adj], dtype=np.int64)
    col_level = np.zeros(n, dtype=np.int64)
    row_level = np.zeros(m, dtype=np.int64)
    frontier_cols = np.flatnonzero(outside <= 1).tolist()
    rounds = 0
    i = 0
    while frontier_cols and (max_rounds is None or i < max_rounds):
        i += 1
        for c in frontier_cols:
            col_level[c] = i
        new_rows = []
        for c in frontier_cols:
            for r in g.col_adj[c]:
                if row_level[r] == 0:
                    row_level[r] = i
                    new_rows.append(r)
        rounds = i
        cand = set()
        for r in new_rows:
            for c in g.row_adj[r]:
                outside[c] -= 1
                if col_level[c] == 0 and outside[c] <= 1:
                    cand.add(c)
        frontier_cols = sorted(cand)
    residual = M.submatrix(row_level == 0, col_level == 0)
    return PeelResult(col_level, row_level, rounds, residual, n_cols=n)


def leaf_removal_transpose_bound(M: SparseSignMatrix) -> int:
    """Best of the leaf-removal rank bounds for M and for its transpose."""
    return min(leaf_removal(M).rank_bound, leaf_removal(M.transpose()).rank_bound)


# ---------------------------------------------------------------------------
# file format: "rows cols" then "r c v" triplets, 0-based


def write_matrix(M: SparseSignMatrix, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{M.shape[0]} {M.shape[1]}\n")
        for i, j, v in zip(M.rows.tolist(), M.cols.tolist(), M.vals.tolist()):
            fh.write(f"{i} {j} {v}\n")


def read_matrix(path) -> SparseSignMatrix:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError("matrix header must be 'rows cols'")
        m, n = int(header[0]), int(header[1])
        rows, cols, vals = [], [], []
        for lineno, line in enumerate(fh, start=2):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected 'r c v'")
            rows.append(int(parts[0]))
            cols.append(int(parts[1]))
            vals.append(int(parts[2]))
    return SparseSignMatrix(
        [("r", i) for i in range(m)], [("c", j) for j in range(n)], rows, cols, vals
    )
