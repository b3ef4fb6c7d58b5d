"""Closed-form limits: generating functions, the nullity functional, fixed
points, the limiting persistent Betti numbers and the limiting diagram CDF.

Notation used throughout:

* ``Lambda_{q,c}(t) = exp(-c(1-qt)^k) - c/(q(k+1)) * P(Bin(k+1, qt) >= 2)``
  (the nullity functional for Poisson(c) columns and Binomial(k+1, q) rows);
* ``phi_{q,c}(t) = exp(-c(1-qt)^k) - t``, whose roots are the critical points
  of Lambda;
* ``lambda_{q,c} = max_{[0,1]} Lambda_{q,c}``, attained at the smallest or the
  largest root of phi.

The binomial tail is summed term by term so that the ratio c/q stays accurate
for tiny q (late birth times).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, exp, expm1, log, log1p

import numpy as np
from scipy import optimize, stats

GRID_POINTS = 10_000
ROOT_TOL = 1e-13
DEDUP_TOL = 1e-9


class DomainError(ValueError):
    pass


# ---------------------------------------------------------------------------
# degree distributions


@dataclass(frozen=True)
class DegreeDistribution:
    """Offspring law: ``poisson(lam)``, ``binomial(m, q)``, ``dirac(m)`` or ``explicit(pmf)``."""

    kind: str
    lam: float = 0.0
    m: int = 0
    q: float = 0.0
    pmf_values: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if self.kind == "poisson":
            if self.lam < 0:
                raise DomainError("poisson rate must be >= 0")
        elif self.kind == "binomial":
            if self.m < 0 or not 0 <= self.q <= 1:
                raise DomainError("binomial needs m >= 0 and q in [0, 1]")
        elif self.kind == "dirac":
            if self.m < 0:
                raise DomainError("dirac needs m >= 0")
        elif self.kind == "explicit":
            p = np.asarray(self.pmf_values, dtype=np.float64)
            if p.size == 0 or (p < 0).any() or abs(p.sum() - 1) > 1e-12:
                raise DomainError("explicit pmf must be nonnegative and sum to 1")
        else:
            raise DomainError(f"unknown distribution kind {self.kind!r}")

    @classmethod
    def poisson(cls, lam: float) -> "DegreeDistribution":
        return cls("poisson", lam=float(lam))

    @classmethod
    def binomial(cls, m: int, q: float) -> "DegreeDistribution":
        return cls("binomial", m=int(m), q=float(q))

    @classmethod
    def dirac(cls, m: int) -> "DegreeDistribution":
        return cls("dirac", m=int(m))

    @classmethod
    def explicit(cls, pmf) -> "DegreeDistribution":
        return cls("explicit", pmf_values=tuple(float(x) for x in pmf))

    def __str__(self) -> str:
        if self.kind == "poisson":
            return f"Pois({self.lam:g})"
        if self.kind == "binomial":
            return f"Bin({self.m}, {self.q:g})"
        if self.kind == "dirac":
            return f"Dirac({self.m})"
        return f"Explicit({list(self.pmf_values)})"

    @property
    def mean(self) -> float:
        if self.kind == "poisson":
            return self.lam
        if self.kind == "binomial":
            return self.m * self.q
        if self.kind == "dirac":
            return float(self.m)
        p = np.asarray(self.pmf_values)
        return float((np.arange(p.size) * p).sum())

    @property
    def support_max(self) -> int | None:
        if self.kind == "poisson":
            return None
        if self.kind in ("binomial", "dirac"):
            return self.m
        return len(self.pmf_values) - 1

    def pmf(self, size: int | None = None) -> np.ndarray:
        """Probabilities of 0..size-1 (default: the full support, or up to a 1e-17 Poisson tail)."""
        if size is None:
            if self.kind == "poisson":
                size = int(stats.poisson.isf(1e-17, self.lam)) + 2 if self.lam > 0 else 1
            else:
                size = self.support_max + 1
        i = np.arange(size)
        if self.kind == "poisson":
            return stats.poisson.pmf(i, self.lam)
        if self.kind == "binomial":
            return stats.binom.pmf(i, self.m, self.q)
        if self.kind == "dirac":
            return (i == self.m).astype(np.float64)
        p = np.zeros(size)
        src = np.asarray(self.pmf_values)[:size]
        p[: src.size] = src
        return p

    def pgf(self, t):
        """E t^X, vectorized over ``t``; no domain check."""
        t = np.asarray(t, dtype=np.float64)
        if self.kind == "poisson":
            return np.exp(-self.lam * (1 - t))
        if self.kind == "binomial":
            return (1 - self.q + self.q * t) ** self.m
        if self.kind == "dirac":
            return t ** self.m  # 0 ** 0 == 1
        return np.polynomial.polynomial.polyval(t, np.asarray(self.pmf_values))

    def size_bias(self) -> "DegreeDistribution":
        """nu'_i = (i+1) nu_{i+1} / mean."""
        if self.mean <= 0:
            raise DomainError("size bias undefined for zero mean")
        if self.kind == "poisson":
            return self
        if self.kind == "binomial":
            return DegreeDistribution.binomial(self.m - 1, self.q)
        if self.kind == "dirac":
            return DegreeDistribution.dirac(self.m - 1)
        p = np.asarray(self.pmf_values)
        biased = np.arange(1, p.size) * p[1:] / self.mean
        return DegreeDistribution.explicit(biased / biased.sum())

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.kind == "poisson":
            return rng.poisson(self.lam, size)
        if self.kind == "binomial":
            return rng.binomial(self.m, self.q, size)
        if self.kind == "dirac":
            return np.full(size, self.m, dtype=np.int64)
        p = np.asarray(self.pmf_values)
        return rng.choice(p.size, size=size, p=p / p.sum())


def pgf(nu: DegreeDistribution, t: float) -> float:
    if not 0 <= t <= 1:
        raise DomainError(f"pgf argument {t} outside [0, 1]")
    return float(nu.pgf(t))


def size_bias(nu: DegreeDistribution) -> DegreeDistribution:
    return nu.size_bias()


def row_law(k: int, q: float) -> DegreeDistribution:
    """Row degree law Binomial(k+1, q) of the windowed coboundary matrix."""
    return DegreeDistribution.binomial(k + 1, q)


@dataclass(frozen=True)
class LimitParams:
    k: int
    q: float = 1.0
    c: float = 0.0
    r: float = 0.0
    s: float = 0.0

    def __post_init__(self):
        if self.k < 1:
            raise DomainError("k must be >= 1")
        if not 0 < self.q <= 1:
            raise DomainError("q must lie in (0, 1]")
        if self.c < 0 or self.r < 0 or self.s < 0:
            raise DomainError("c, r, s must be >= 0")


# ---------------------------------------------------------------------------
# the nullity functional


def lambda_general(mu: DegreeDistribution, nu: DegreeDistribution, t: float) -> float:
    """f(mu, 1 - f(nu', 1-t)) - (mean mu / mean nu)(1 - f(nu, 1-t) - mean(nu) t f(nu', 1-t))."""
    if not 0 <= t <= 1:
        raise DomainError(f"t={t} outside [0, 1]")
    if mu.mean < 0 or nu.mean <= 0:
        raise DomainError("need positive mean row law")
    nub = nu.size_bias()
    inner = float(nub.pgf(1 - t))
    head = float(mu.pgf(1 - inner))
    tail = 1 - float(nu.pgf(1 - t)) - nu.mean * t * inner
    return head - mu.mean / nu.mean * tail


def _binom_tail2(k: int, x):
    """P(Bin(k+1, x) >= 2), summed from positive terms."""
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    for j in range(2, k + 2):
        out = out + comb(k + 1, j) * x**j * (1 - x) ** (k + 1 - j)
    return out


def lambda_qc_curve(k: int, q: float, c: float, t):
    """Lambda_{q,c}(t); vectorized over t (and broadcastable q, c)."""
    t = np.asarray(t, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    x = q * t
    val = np.exp(-c * (1 - x) ** k) - c / (q * (k + 1)) * _binom_tail2(k, x)
    return val if val.ndim else float(val)


def phi_qc(k: int, q: float, c: float, t):
    t = np.asarray(t, dtype=np.float64)
    val = np.exp(-np.asarray(c) * (1 - np.asarray(q) * t) ** k) - t
    return val if val.ndim else float(val)


def psi_qc(k: int, q: float, t):
    """-log(t) / (1-qt)^k: the c for which t is a fixed point."""
    t = np.asarray(t, dtype=np.float64)
    with np.errstate(divide="ignore"):
        val = -np.log(t) / (1 - q * t) ** k
    return val if val.ndim else float(val)


def Phi_qc(k: int, q: float, c: float, t):
    """First-order surrogate of Lambda with exp(-x) replaced by 1 - x."""
    t = np.asarray(t, dtype=np.float64)
    x = q * t
    val = 1 - c * (1 - x) ** k - c / (q * (k + 1)) * _binom_tail2(k, x)
    return val if val.ndim else float(val)


def lambda_qc_derivative(k: int, q: float, c: float, t):
    return c * k * q * (1 - q * np.asarray(t)) ** (k - 1) * phi_qc(k, q, c, t)


# ---------------------------------------------------------------------------
# fixed points


@dataclass
class FixedPointReport:
    roots: np.ndarray
    residuals: np.ndarray

    @property
    def alpha(self) -> float:
        return float(self.roots[0])

    @property
    def alpha_prime(self) -> float:
        return float(self.roots[-1])


def _bisect(f, a: float, b: float, fa: float, tol: float = ROOT_TOL) -> float:
    while b - a > tol:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = f(m)
        if fm == 0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def _grid_roots(f, lo: float, hi: float, points: int = GRID_POINTS) -> list[float]:
    """Roots of a scalar function on [lo, hi] by sign-change bracketing and bisection.

    Near-tangencies (a shallow local extremum that may touch zero between grid
    points) are resolved by locating the extremum and bracketing on both sides.
    """
    xs = np.linspace(lo, hi, points + 1)
    fs = np.array([f(x) for x in xs])
    roots = [float(x) for x, v in zip(xs, fs) if v == 0]
    sgn = np.sign(fs)
    for i in np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]:
        roots.append(_bisect(f, xs[i], xs[i + 1], fs[i]))
    scale = np.abs(fs).max() + 1.0
    for i in range(1, points):
        v = fs[i]
        if v == 0:
            continue
        is_min = v > 0 and fs[i] <= fs[i - 1] and fs[i] <= fs[i + 1]
        is_max = v < 0 and fs[i] >= fs[i - 1] and fs[i] >= fs[i + 1]
        if not (is_min or is_max) or abs(v) > 1e-3 * scale:
            continue
        sign = 1.0 if is_min else -1.0
        res = optimize.minimize_scalar(
            lambda x: sign * f(x), bounds=(xs[i - 1], xs[i + 1]), method="bounded",
            options={"xatol": 1e-14},
        )
        xm, vm = float(res.x), f(float(res.x))
        if vm == 0:
            roots.append(xm)
        elif (vm > 0) != (v > 0):
            roots.append(_bisect(f, xs[i - 1], xm, fs[i - 1]))
            roots.append(_bisect(f, xm, xs[i + 1], vm))
    return roots


def _dedupe(roots: list[float]) -> np.ndarray:
    out: list[float] = []
    for x in sorted(roots):
        if not out or x - out[-1] > DEDUP_TOL:
            out.append(x)
    return np.array(out)


def fixed_points(k: int, q: float, c: float) -> FixedPointReport:
    """All roots of t = exp(-c(1-qt)^k) in [0, 1]."""
    LimitParams(k, q, c)
    phi = lambda t: exp(-c * (1 - q * t) ** k) - t
    if q == 1.0:
        # t = 1 is an exact root; factor it out: phi(1-u) = u h(u)
        def h(u: float) -> float:
            if u == 0:
                return 1.0 - (c if k == 1 else 0.0)
            return 1.0 + expm1(-c * u**k) / u

        us = [u for u in _grid_roots(h, 0.0, 1.0) if u > 0]
        roots = [1.0 - u for u in us] + [1.0]
    else:
        roots = _grid_roots(phi, 0.0, 1.0)
    roots_arr = _dedupe(roots)
    return FixedPointReport(roots_arr, np.array([phi(t) for t in roots_arr]))


def fixed_points_general(mu: DegreeDistribution, nu: DegreeDistribution) -> FixedPointReport:
    """All roots of t = f(mu', 1 - f(nu', 1-t)) in [0, 1]."""
    mub, nub = mu.size_bias(), nu.size_bias()
    psi = lambda t: float(mub.pgf(1 - float(nub.pgf(1 - t)))) - t
    roots = _grid_roots(psi, 0.0, 1.0)
    if float(nub.pgf(0.0)) == 0.0:
        roots.append(1.0)  # exact root when rows always have a child
    roots_arr = _dedupe(roots)
    return FixedPointReport(roots_arr, np.array([psi(t) for t in roots_arr]))


# ---------------------------------------------------------------------------
# lambda and its grid oracle


def lambda_qc(k: int, q: float, c: float) -> float:
    if c == 0:
        return 1.0
    fp = fixed_points(k, q, c)
    return max(lambda_qc_curve(k, q, c, fp.alpha), lambda_qc_curve(k, q, c, fp.alpha_prime))


def grid_max(f, points: int = 100_001) -> tuple[float, float]:
    """max of a vectorized f on [0, 1]: dense grid, then bounded refinement."""
    ts = np.linspace(0.0, 1.0, points)
    vals = f(ts)
    i = int(np.argmax(vals))
    best_t, best = float(ts[i]), float(vals[i])
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, points - 1)]
    res = optimize.minimize_scalar(
        lambda x: -float(f(np.array([x]))[0]), bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-13},
    )
    if -res.fun > best:
        best_t, best = float(res.x), float(-res.fun)
    return best, best_t


def lambda_qc_grid(k: int, q: float, c: float) -> float:
    """Independent oracle: direct maximization of Lambda_{q,c} on [0, 1]."""
    return grid_max(lambda t: lambda_qc_curve(k, q, c, t))[0]


def lambda_qc_batch(k: int, q, c, points: int = 2048, iters: int = 64, chunk: int = 2048) -> np.ndarray:
    """Vectorized lambda_{q,c} over arrays q, c (same shape).

    Only the smallest and largest roots are located: the first grid cell where
    phi becomes nonpositive and the last where it is still positive.
    """
    q, c = np.broadcast_arrays(np.asarray(q, dtype=np.float64), np.asarray(c, dtype=np.float64))
    shape = q.shape
    q, c = q.ravel(), c.ravel()
    out = np.ones(q.size)
    active = c > 0
    if not active.any():
        return out.reshape(shape)
    idx = np.flatnonzero(active)
    for lo in range(0, idx.size, chunk):
        sel = idx[lo : lo + chunk]
        out[sel] = _lambda_batch_chunk(k, q[sel], c[sel], points, iters)
    return out.reshape(shape)


def _lambda_batch_chunk(k: int, qa: np.ndarray, ca: np.ndarray, points: int, iters: int) -> np.ndarray:
    ts = np.linspace(0.0, 1.0, points + 1)
    phi = np.exp(-ca[:, None] * (1 - qa[:, None] * ts[None, :]) ** k) - ts[None, :]
    phi[qa == 1.0, -1] = 0.0
    nonpos = phi <= 0
    first = np.argmax(nonpos, axis=1)  # phi(1) <= 0 always, so a hit exists
    pos = phi > 0
    last = points + 1 - np.argmax(pos[:, ::-1], axis=1)  # first index after the last positive point

    def refine(idx: np.ndarray) -> np.ndarray:
        exact = phi[np.arange(idx.size), idx] == 0
        a = ts[np.maximum(idx - 1, 0)].copy()
        b = ts[idx].copy()
        for _ in range(iters):
            m = 0.5 * (a + b)
            fm = np.exp(-ca * (1 - qa * m) ** k) - m
            right = fm > 0
            a = np.where(right, m, a)
            b = np.where(right, b, m)
        return np.where(exact, ts[idx], 0.5 * (a + b))

    alpha = refine(first)
    alpha_p = refine(np.minimum(last, points))
    return np.maximum(lambda_qc_curve(k, qa, ca, alpha), lambda_qc_curve(k, qa, ca, alpha_p))


# ---------------------------------------------------------------------------
# limiting persistent Betti numbers and diagram CDF


def beta_hat(k: int, r: float, s: float) -> float:
    """Limit of beta^{r,s}_{k-1} / C(n, k)."""
    if r < 0 or s < 0:
        raise DomainError("r, s must be >= 0")
    lam_s = lambda_qc(k, 1.0, s)
    if r < s:
        q = exp(-r)
        return lam_s - q * lambda_qc(k, q, s - r)
    return lam_s - exp(-r)


def _cdf_from_lambdas(r, lam_s, lam_rs, s):
    r = np.asarray(r, dtype=np.float64)
    q = np.exp(-r)
    return np.where(r < s, 1 - lam_s - q * (1 - lam_rs), 1 - lam_s)


def _clamp_cdf(val):
    val = np.asarray(val, dtype=np.float64)
    if (val < -1e-9).any() or (val > 1 + 1e-9).any():
        raise ArithmeticError("limiting CDF left [0, 1] beyond numerical noise")
    return np.clip(val, 0.0, 1.0)


def xi_hat_cdf(k: int, r: float, s: float) -> float:
    """Limiting verbose-diagram CDF f(r, s) = 1 - e^{-r} - beta_hat^{r,s}."""
    val = 1 - exp(-r) - beta_hat(k, r, s)
    return float(_clamp_cdf(val))


def xi_hat_cdf_grid(k: int, r_values, s_values) -> np.ndarray:
    """f(r_i, s_j) on a product grid, using the batched lambda."""
    r = np.asarray(r_values, dtype=np.float64)
    s = np.asarray(s_values, dtype=np.float64)
    lam_s = lambda_qc_batch(k, np.ones_like(s), s)
    R, S = np.meshgrid(r, s, indexing="ij")
    below = R < S
    lam_rs = np.ones_like(R)
    if below.any():
        lam_rs[below] = lambda_qc_batch(k, np.exp(-R[below]), S[below] - R[below])
    val = np.where(below, 1 - lam_s[None, :] - np.exp(-R) * (1 - lam_rs), 1 - lam_s[None, :])
    return _clamp_cdf(val)


# ---------------------------------------------------------------------------
# quadrature


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-10, max_depth: int = 60) -> float:
    """Adaptive Simpson rule with absolute tolerance ``tol`` (explicit stack, no recursion)."""
    if a == b:
        return 0.0
    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    whole = (b - a) / 6 * (fa + 4 * fm + fb)
    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        a, b, fa, fm, fb, whole, eps, depth = stack.pop()
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6 * (fa + 4 * flm + fm)
        right = (b - m) / 6 * (fm + 4 * frm + fb)
        delta = left + right - whole
        if depth >= max_depth or abs(delta) <= 15 * eps:
            total += left + right + delta / 15
        else:
            stack.append((a, m, fa, flm, fm, left, eps / 2, depth + 1))
            stack.append((m, b, fm, frm, fb, right, eps / 2, depth + 1))
    return total


# ---------------------------------------------------------------------------
# diagonal mass


def diagonal_density(k: int, x: float) -> float:
    """(1 - (1 - e^{-x})^{k+1}) / (k+1)."""
    if x == 0:
        return 1.0 / (k + 1)
    return -expm1((k + 1) * log1p(-exp(-x))) / (k + 1)


def _tail_cut(k: int) -> float:
    # density <= e^{-x}; beyond this point the remaining mass is below 1e-14
    return log(k + 1) + 14 * log(10)


def diagonal_mass(k: int, a: float, b: float = float("inf")) -> float:
    if not 0 <= a <= b:
        raise DomainError("need 0 <= a <= b")
    b = min(b, max(a, _tail_cut(k)))
    return adaptive_simpson(lambda x: diagonal_density(k, x), a, b, tol=1e-10)


def diagonal_total(k: int) -> float:
    """(1/(k+1)) * H_{k+1}: total limiting mass on the diagonal."""
    return sum(1.0 / j for j in range(1, k + 2)) / (k + 1)


def promoting_expectation(n: int, k: int) -> float:
    """Expected number of promoting top faces divided by C(n-1, k)."""
    if n < k + 1:
        raise DomainError("need n >= k+1")
    e = n - k - 1

    def g(x: float) -> float:
        y = (1 - x / n) ** e
        if y >= 1:
            return 1.0
        return -expm1((k + 1) * log1p(-y))

    hi = min(float(n), _tail_cut(k) * n / max(e, 1) + 1) if e > 0 else float(n)
    return adaptive_simpson(g, 0.0, hi, tol=1e-10) / (k + 1)


# ---------------------------------------------------------------------------
# top-dimensional Betti numbers of the plain random complex


def lp_maximand(k: int, c: float, t: float) -> float:
    return c * t * (1 - t) ** k + c / (k + 1) * (1 - t) ** (k + 1) - (1 - t)


def lp_betti_limit(k: int, c: float) -> float:
    """Limit of beta_k / C(n, k) for the complex with top faces at rate c/n."""
    if c < 0:
        raise DomainError("c must be >= 0")
    if c == 0:
        return 0.0
    return max(lp_maximand(k, c, t) for t in fixed_points(k, 1.0, c).roots)


def _lp_bracket(k: int, c: float, t: float) -> float:
    # maximand at a root t < 1 divided by (1 - t)
    return c * t * (1 - t) ** (k - 1) + c / (k + 1) * (1 - t) ** k - 1


def _lp_positive(k: int, c: float) -> bool:
    fp = fixed_points(k, 1.0, c)
    t = fp.alpha
    return t < 1.0 and _lp_bracket(k, c, t) > 0


def lp_critical(k: int, tol: float = 1e-9) -> float:
    """Smallest c at which the maximand at the smallest fixed point exceeds its value at t = 1."""
    lo, hi = 0.0, 1.0
    while not _lp_positive(k, hi):
        lo, hi = hi, 2 * hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _lp_positive(k, mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def lp_critical_scan(k: int, points: int = 2_000_001) -> float:
    """Same threshold by scanning the fixed-point curve c = psi(t) directly.

    t is the smallest root at c = psi(t) exactly when psi(t) is a strict
    running minimum from the left; among those, the threshold is the least c
    at which the bracketed maximand is positive.
    """
    ts = np.linspace(0.0, 1.0, points)[1:-1]
    psi = psi_qc(k, 1.0, ts)
    run_min = np.minimum.accumulate(psi)
    record = np.empty(ts.size, dtype=bool)
    record[0] = True
    record[1:] = psi[1:] < run_min[:-1]
    g = psi * ts * (1 - ts) ** (k - 1) + psi / (k + 1) * (1 - ts) ** k - 1
    cand = np.nonzero(record & (g > 0))[0]
    if cand.size == 0:
        raise ArithmeticError("no positive branch found")
    i = cand[np.argmin(psi[cand])]
    # refine along the branch if the crossing sits between two record points
    for j in (i - 1, i + 1):
        if 0 <= j < ts.size and record[j] and g[j] <= 0:
            G = lambda t: float(psi_qc(k, 1.0, t)) * t * (1 - t) ** (k - 1) + float(psi_qc(k, 1.0, t)) / (k + 1) * (1 - t) ** k - 1
            a, b = sorted((ts[i], ts[j]))
            return float(psi_qc(k, 1.0, optimize.brentq(G, a, b, xtol=1e-15)))
    return float(psi[i])


# ---------------------------------------------------------------------------
# rank limit for general degree laws


@dataclass
class RankLimit:
    value: float
    alpha: float
    alpha_prime: float
    lambda_at_roots: float
    lambda_grid: float
    hypothesis_ok: bool


def rank_limit(mu: DegreeDistribution, nu: DegreeDistribution) -> RankLimit:
    """Limit of rank / #columns for sparse matrices locally like GW_*(mu, nu).

    The formula assumes max Lambda over [0, 1] is attained at the extreme fixed
    points; this is checked on a dense grid and reported in ``hypothesis_ok``.
    """
    if mu.mean <= 0 or nu.mean <= 0:
        if mu.mean == 0:
            return RankLimit(0.0, 1.0, 1.0, 1.0, 1.0, True)
        raise DomainError("row law must have positive mean")
    fp = fixed_points_general(mu, nu)
    at_roots = max(lambda_general(mu, nu, fp.alpha), lambda_general(mu, nu, fp.alpha_prime))
    vec = np.vectorize(lambda t: lambda_general(mu, nu, float(t)))
    grid = grid_max(vec, points=20_001)[0]
    ok = grid <= at_roots + 1e-9
    return RankLimit(1.0 - at_roots, fp.alpha, fp.alpha_prime, at_roots, grid, bool(ok))
