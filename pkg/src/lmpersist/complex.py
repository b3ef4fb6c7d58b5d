"""Linial-Meshulam filtrations on the vertex set [n].

Every (k+1)-subset of [n] receives an independent Uniform[0, n] arrival time and
brings all of its subsets with it; a lower face appears at the earliest arrival
among the top faces containing it.

Faces are tuples of 1-based vertices in increasing order.  Internally j-subsets
are addressed by their colexicographic rank over 0-based vertices,
``rank(a_0 < ... < a_{j-1}) = sum_i C(a_i, i + 1)``.
"""

from __future__ import annotations

from math import comb
from typing import Iterable, Sequence

import numpy as np

from .linalg import SparseSignMatrix

Face = tuple[int, ...]


class InvalidParameters(ValueError):
    pass


class InvalidFace(ValueError):
    pass


class InvalidWindow(ValueError):
    pass


def derive_seed(seed: int, *keys: int) -> int:
    """Child seed for a sub-stream of ``seed``.

    All randomness in the package flows from one 64-bit integer; independent
    sub-streams (trials, tree samples, population pools) are addressed by a key
    path and mapped through numpy's SeedSequence spawn mechanism.
    """
    ss = np.random.SeedSequence(int(seed) % 2**64, spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0])


# ---------------------------------------------------------------------------
# colex indexing


def binom_table(n: int, kmax: int) -> np.ndarray:
    """``T[a, j] = C(a, j)`` for ``0 <= a <= n``, ``0 <= j <= kmax``."""
    T = np.zeros((n + 1, kmax + 1), dtype=np.int64)
    for a in range(n + 1):
        for j in range(kmax + 1):
            T[a, j] = comb(a, j)
    return T


class FaceIndexer:
    """Colex rank/unrank of j-subsets of {0, ..., n-1}."""

    def __init__(self, n: int):
        self.n = n

    def count(self, j: int) -> int:
        return comb(self.n, j)

    def rank(self, subset: Sequence[int]) -> int:
        return sum(comb(a, i + 1) for i, a in enumerate(subset))

    def unrank(self, rank: int, j: int) -> tuple[int, ...]:
        if not 0 <= rank < comb(self.n, j):
            raise IndexError(f"rank {rank} out of range for {j}-subsets of {self.n}")
        out = []
        a = self.n - 1
        for i in range(j, 0, -1):
            while comb(a, i) > rank:
                a -= 1
            out.append(a)
            rank -= comb(a, i)
            a -= 1
        return tuple(reversed(out))

    def all_subsets(self, j: int) -> np.ndarray:
        """All j-subsets as rows of an int array, in colex order."""
        if j == 0:
            return np.zeros((1, 0), dtype=np.int32)
        prev = self.all_subsets(j - 1)
        blocks = []
        for m in range(j - 1, self.n):
            head = prev[: comb(m, j - 1)]
            tail = np.full((head.shape[0], 1), m, dtype=np.int32)
            blocks.append(np.hstack([head, tail]))
        if not blocks:
            return np.zeros((0, j), dtype=np.int32)
        return np.vstack(blocks)

    def ranks(self, subsets: np.ndarray, table: np.ndarray | None = None) -> np.ndarray:
        """Vectorized colex ranks of the rows of ``subsets`` (sorted ascending)."""
        j = subsets.shape[1]
        if table is None:
            table = binom_table(self.n, j)
        out = np.zeros(subsets.shape[0], dtype=np.int64)
        for i in range(j):
            out += table[subsets[:, i], i + 1]
        return out


def facet_ranks(subsets: np.ndarray, n: int) -> np.ndarray:
    """Colex ranks of the facets of each row; column i omits vertex i."""
    j = subsets.shape[1]
    table = binom_table(n, j)
    out = np.empty((subsets.shape[0], j), dtype=np.int64)
    idx = FaceIndexer(n)
    for i in range(j):
        keep = [c for c in range(j) if c != i]
        out[:, i] = idx.ranks(subsets[:, keep], table)
    return out


def boundary_signs(j: int) -> np.ndarray:
    """Sign of the facet omitting position i: (-1)^i."""
    return np.array([(-1) ** i for i in range(j)], dtype=np.int8)


# ---------------------------------------------------------------------------
# the filtration


class LMFiltration:
    """A sampled Linial-Meshulam filtration.

    ``top_times[i]`` is the arrival time of the (k+1)-subset with colex rank i.
    Treat instances as immutable; derived face times are cached on first use.
    """

    def __init__(self, n: int, k: int, top_times: np.ndarray, seed: int | None = None):
        if k < 1 or n < k + 1:
            raise InvalidParameters(f"need n >= k + 1 >= 2, got n={n}, k={k}")
        top_times = np.asarray(top_times, dtype=np.float64)
        if top_times.shape != (comb(n, k + 1),):
            raise InvalidParameters("one time per (k+1)-subset is required")
        if top_times.size and (top_times.min() < 0 or top_times.max() > n):
            raise InvalidParameters("times must lie in [0, n]")
        self.n = n
        self.k = k
        self.seed = seed
        self.top_times = top_times
        self.top_times.flags.writeable = False
        self.indexer = FaceIndexer(n)
        self._subsets: dict[int, np.ndarray] = {}
        self._times: dict[int, np.ndarray] = {k + 1: self.top_times}
        self._facets: dict[int, np.ndarray] = {}

    def __repr__(self) -> str:
        return f"LMFiltration(n={self.n}, k={self.k}, seed={self.seed})"

    @property
    def n_top(self) -> int:
        return self.top_times.size

    def subsets(self, j: int) -> np.ndarray:
        """0-based vertex arrays of all j-subsets, colex order (cached)."""
        if j not in self._subsets:
            self._subsets[j] = self.indexer.all_subsets(j)
        return self._subsets[j]

    def facets(self, j: int) -> np.ndarray:
        """Facet colex ranks of every j-subset (cached)."""
        if j not in self._facets:
            self._facets[j] = facet_ranks(self.subsets(j), self.n)
        return self._facets[j]

    def times(self, j: int) -> np.ndarray:
        """Arrival times of all j-subsets, 1 <= j <= k+1, in colex order."""
        if not 1 <= j <= self.k + 1:
            raise InvalidFace(f"no faces with {j} vertices in a {self.k}-complex")
        if j not in self._times:
            upper = self.times(j + 1)
            out = np.full(comb(self.n, j), np.inf)
            fr = self.facets(j + 1)
            for i in range(j + 1):
                np.minimum.at(out, fr[:, i], upper)
            out.flags.writeable = False
            self._times[j] = out
        return self._times[j]

    def rank_of(self, face: Iterable[int]) -> int:
        return self.indexer.rank([v - 1 for v in face])

    def face_of(self, rank: int, j: int) -> Face:
        return tuple(v + 1 for v in self.indexer.unrank(rank, j))

    def check_face(self, face: Iterable[int]) -> Face:
        face = tuple(int(v) for v in face)
        if not face or len(face) > self.k + 1:
            raise InvalidFace(f"face {face} has wrong size for k={self.k}")
        if any(b <= a for a, b in zip(face, face[1:])):
            raise InvalidFace(f"face {face} is not strictly increasing")
        if face[0] < 1 or face[-1] > self.n:
            raise InvalidFace(f"face {face} is not a subset of [1, {self.n}]")
        return face


def sample_filtration(n: int, k: int, seed: int) -> LMFiltration:
    """Draw i.i.d. Uniform[0, n] arrival times for all (k+1)-subsets of [n].

    Exact ties and exact zeros (both probability zero) are redrawn, so the time
    map is injective and every top face arrives strictly after time 0.
    """
    if k < 1 or n < k + 1:
        raise InvalidParameters(f"need n >= k + 1 >= 2, got n={n}, k={k}")
    rng = np.random.default_rng(derive_seed(seed, 0))
    size = comb(n, k + 1)
    times = rng.uniform(0.0, float(n), size=size)
    while True:
        order = np.argsort(times, kind="stable")
        st = times[order]
        bad = np.zeros(size, dtype=bool)
        bad[order[1:][st[1:] == st[:-1]]] = True
        bad |= times <= 0.0
        if not bad.any():
            break
        times[bad] = rng.uniform(0.0, float(n), size=int(bad.sum()))
    return LMFiltration(n, k, times, seed=seed)


def face_time(F: LMFiltration, face: Iterable[int]) -> float:
    """Arrival time of a face: the earliest time of a top face containing it."""
    face = F.check_face(face)
    return float(F.times(len(face))[F.rank_of(face)])


def complex_at(F: LMFiltration, t: float) -> dict[int, list[Face]]:
    """Faces present at time ``t``, keyed by dimension."""
    out: dict[int, list[Face]] = {}
    for j in range(1, F.k + 2):
        present = np.flatnonzero(F.times(j) <= t)
        subs = F.subsets(j)[present] + 1
        out[j - 1] = [tuple(int(v) for v in row) for row in subs]
    return out


def promoting_mask(F: LMFiltration) -> np.ndarray:
    """Top faces whose arrival introduces at least one new (k-1)-face."""
    lower = F.times(F.k)
    fr = F.facets(F.k + 1)
    return (lower[fr] == F.top_times[:, None]).any(axis=1)


def promoting_count(F: LMFiltration) -> int:
    return int(promoting_mask(F).sum())


def coboundary_matrix(F: LMFiltration, s: float, r: float | None = None) -> SparseSignMatrix:
    """Signed (k-1)-coboundary restricted to the window (r, s].

    Rows are the k-faces with time <= s (K_n).  With ``r`` given, rows with
    time <= r and columns for (k-1)-faces present at time r are dropped (M_n).
    Entry (sigma, tau) is (-1)^i when tau omits the i-th vertex of sigma.
    Row and column labels are the faces as 1-based vertex tuples.
    """
    if r is not None and r >= s:
        raise InvalidWindow(f"need r < s, got r={r}, s={s}")
    k = F.k
    top = F.top_times
    rows = top <= s
    col_keep = np.ones(comb(F.n, k), dtype=bool)
    if r is not None:
        rows &= top > r
        col_keep &= F.times(k) > r
    row_idx = np.flatnonzero(rows)
    col_idx = np.flatnonzero(col_keep)
    col_pos = np.full(col_keep.size, -1, dtype=np.int64)
    col_pos[col_idx] = np.arange(col_idx.size)

    fr = F.facets(k + 1)[row_idx]
    signs = boundary_signs(k + 1)
    pos = col_pos[fr]
    rr = np.repeat(np.arange(row_idx.size), k + 1).reshape(-1, k + 1)
    vv = np.broadcast_to(signs, pos.shape)
    keep = pos >= 0

    row_ids = [tuple(int(v) + 1 for v in s_) for s_ in F.subsets(k + 1)[row_idx]]
    col_ids = [tuple(int(v) + 1 for v in s_) for s_ in F.subsets(k)[col_idx]]
    return SparseSignMatrix(row_ids, col_ids, rr[keep], pos[keep], vv[keep])


def lower_boundary_matrix(F: LMFiltration, r: float) -> SparseSignMatrix:
    """Boundary map from the (k-1)-faces present at r to (k-2)-faces.

    For k = 1 the target is the single empty face (reduced homology), so each
    present vertex maps to +1 in one column.
    """
    k = F.k
    present = np.flatnonzero(F.times(k) <= r)
    row_ids = [tuple(int(v) + 1 for v in s_) for s_ in F.subsets(k)[present]]
    if k == 1:
        m = present.size
        return SparseSignMatrix(
            row_ids, [()], np.arange(m), np.zeros(m, dtype=np.int64), np.ones(m, dtype=np.int8)
        )
    fr = F.facets(k)[present]
    n_cols = comb(F.n, k - 1)
    rr = np.repeat(np.arange(present.size), k).reshape(-1, k)
    vv = np.broadcast_to(boundary_signs(k), fr.shape)
    col_ids = [tuple(int(v) + 1 for v in s_) for s_ in F.subsets(k - 1)]
    assert n_cols == len(col_ids)
    return SparseSignMatrix(row_ids, col_ids, rr.ravel(), fr.ravel(), vv.ravel())


# ---------------------------------------------------------------------------
# dump format: header "n k seed", then "v1 ... v_{k+1} time" per top face


def write_filtration(F: LMFiltration, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{F.n} {F.k} {F.seed if F.seed is not None else -1}\n")
        subs = F.subsets(F.k + 1) + 1
        for row, t in zip(subs, F.top_times):
            fh.write(" ".join(str(int(v)) for v in row) + f" {float(t)!r}\n")


def read_filtration(path) -> LMFiltration:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise InvalidParameters("filtration header must be 'n k seed'")
        n, k, seed = (int(x) for x in header)
        times = np.full(comb(n, k + 1), np.nan)
        idx = FaceIndexer(n)
        for lineno, line in enumerate(fh, start=2):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != k + 2:
                raise InvalidParameters(f"line {lineno}: expected {k + 1} vertices and a time")
            verts = [int(v) - 1 for v in parts[:-1]]
            if any(b <= a for a, b in zip(verts, verts[1:])) or verts[0] < 0 or verts[-1] >= n:
                raise InvalidFace(f"line {lineno}: bad face {parts[:-1]}")
            rk = idx.rank(verts)
            if not np.isnan(times[rk]):
                raise InvalidParameters(f"line {lineno}: duplicate face")
            times[rk] = float(parts[-1])
    if np.isnan(times).any():
        raise InvalidParameters("some top faces have no time")
    return LMFiltration(n, k, times, seed=None if seed < 0 else seed)
