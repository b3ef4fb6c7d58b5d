"""Monte Carlo harness comparing finite-n simulations with the limit formulas.

Every trial t of a configuration with base seed ``seed0`` samples its filtration
from ``derive_seed(seed0, t)``; results are folded in trial order, so reports
do not depend on how trials were scheduled.
"""

from __future__ import annotations

import ast
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache, partial
from math import comb, exp

import numpy as np

from . import limits
from .complex import coboundary_matrix, derive_seed, promoting_count, sample_filtration
from .linalg import leaf_removal, rank_confirmed
from .persistence import (
    VerboseDiagram,
    betti_grid,
    cycle_dim,
    diagram_cdf_many,
    reduce_diagram,
)

SCHEMA = 1


@dataclass
class TrialConfig:
    n: int
    k: int = 1
    trials: int = 10
    seed0: int = 42
    r_list: list[float] = field(default_factory=lambda: [1.0])
    s_list: list[float] = field(default_factory=lambda: [2.0])
    tolerances: dict[str, float] = field(default_factory=dict)
    jobs: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.r_list or not self.s_list:
            raise ValueError("r_list and s_list must be nonempty")
        if self.n < self.k + 1:
            raise ValueError("need n >= k+1")

    def trial_seed(self, t: int) -> int:
        return derive_seed(self.seed0, t)


@dataclass
class Report:
    """Per-trial values of named quantities against theory values."""

    name: str
    labels: list[str]
    per_trial: np.ndarray  # trials x quantities
    theory: np.ndarray
    tolerance: np.ndarray  # nan = no pass/fail
    config: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def mean(self) -> np.ndarray:
        return self.per_trial.mean(axis=0)

    @property
    def sd(self) -> np.ndarray:
        if self.per_trial.shape[0] < 2:
            return np.zeros(self.per_trial.shape[1])
        return self.per_trial.std(axis=0, ddof=1)

    @property
    def passed(self) -> list[bool | None]:
        out = []
        for m, th, tol in zip(self.mean, self.theory, self.tolerance):
            out.append(None if np.isnan(tol) else bool(abs(m - th) <= tol))
        return out

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "report": self.name,
            "config": self.config,
            "quantities": [
                {
                    "label": lab,
                    "mean": float(m),
                    "sd": float(s),
                    "theory": None if np.isnan(th) else float(th),
                    "tolerance": None if np.isnan(tol) else float(tol),
                    "pass": p,
                }
                for lab, m, s, th, tol, p in zip(
                    self.labels, self.mean, self.sd, self.theory, self.tolerance, self.passed
                )
            ],
            "per_trial": self.per_trial.tolist(),
            "extra": self.extra,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"{self.name}  ({self.per_trial.shape[0]} trials)"]
        lines.append(f"{'quantity':<28}{'mean':>12}{'sd':>12}{'theory':>12}{'tol':>10}  result")
        for lab, m, s, th, tol, p in zip(
            self.labels, self.mean, self.sd, self.theory, self.tolerance, self.passed
        ):
            th_s = "-" if np.isnan(th) else f"{th:.6f}"
            tol_s = "-" if np.isnan(tol) else f"{tol:g}"
            res = "-" if p is None else ("PASS" if p else "FAIL")
            lines.append(f"{lab:<28}{m:>12.6f}{s:>12.6f}{th_s:>12}{tol_s:>10}  {res}")
        return "\n".join(lines)

    def to_csv(self) -> str:
        rows = ["trial," + ",".join(self.labels)]
        for t, vals in enumerate(self.per_trial):
            rows.append(f"{t}," + ",".join(repr(float(v)) for v in vals))
        return "\n".join(rows) + "\n"


def _run_trials(fn, cfg: TrialConfig) -> np.ndarray:
    seeds = [cfg.trial_seed(t) for t in range(cfg.trials)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            rows = list(ex.map(fn, seeds))
    else:
        rows = [fn(sd) for sd in seeds]
    return np.array(rows, dtype=np.float64)


def _cfg_dict(cfg: TrialConfig) -> dict:
    d = asdict(cfg)
    d.pop("jobs")
    return d


# ---------------------------------------------------------------------------
# persistent Betti numbers


def _betti_trial(seed: int, n: int, k: int, pairs: tuple) -> list[float]:
    F = sample_filtration(n, k, seed)
    rs = sorted({r for r, _ in pairs})
    ss = sorted({s for _, s in pairs})
    grid = betti_grid(F, rs, ss)
    zdim = {r: cycle_dim(F, r) for r in rs}
    norm = comb(n, k)
    return [(zdim[r] - grid.values[rs.index(r), ss.index(s)]) / norm for r, s in pairs]


def mc_persistent_betti(cfg: TrialConfig) -> Report:
    """beta^{r,s} / C(n, k) for the pairs zip(r_list, s_list) against the limit."""
    pairs = tuple(zip(map(float, cfg.r_list), map(float, cfg.s_list)))
    vals = _run_trials(partial(_betti_trial, n=cfg.n, k=cfg.k, pairs=pairs), cfg)
    theory = np.array([limits.beta_hat(cfg.k, r, s) for r, s in pairs])
    tol = np.full(len(pairs), cfg.tolerances.get("betti", np.nan))
    labels = [f"beta(r={r:g},s={s:g})" for r, s in pairs]
    return Report("persistent_betti", labels, vals, theory, tol, _cfg_dict(cfg))


# ---------------------------------------------------------------------------
# diagram distance


def rho_pairs(terms: int = 60) -> np.ndarray:
    """Fixed enumeration of half-integer corners, diagonal by diagonal.

    Diagonal m lists (a/2, (m-a)/2) for a = 0..m; the i-th pair (i >= 1) gets
    weight 2^{-i}.  Sixty terms leave a truncation weight below 1e-18.
    """
    out = []
    m = 0
    while len(out) < terms:
        for a in range(m + 1):
            out.append((a / 2, (m - a) / 2))
        m += 1
    return np.array(out[:terms])


@lru_cache(maxsize=None)
def _rho_limit_values(k: int, terms: int) -> np.ndarray:
    return np.array([limits.xi_hat_cdf(k, r, s) for r, s in rho_pairs(terms)])


def rho_distance(D: VerboseDiagram, k: int, terms: int = 60) -> float:
    pairs = rho_pairs(terms)
    emp = diagram_cdf_many(D, pairs[:, 0], pairs[:, 1])
    weights = 0.5 ** np.arange(1, terms + 1)
    return float((weights * np.abs(emp - _rho_limit_values(k, terms))).sum())


def rho_of_cdf(cdf, k: int, terms: int = 60) -> float:
    """rho between an arbitrary CDF callable and the limit."""
    pairs = rho_pairs(terms)
    emp = np.array([cdf(r, s) for r, s in pairs])
    weights = 0.5 ** np.arange(1, terms + 1)
    return float((weights * np.abs(emp - _rho_limit_values(k, terms))).sum())


def _rho_trial(seed: int, n: int, k: int) -> list[float]:
    return [rho_distance(reduce_diagram(sample_filtration(n, k, seed)), k)]


def mc_diagram_distance(cfg: TrialConfig) -> Report:
    vals = _run_trials(partial(_rho_trial, n=cfg.n, k=cfg.k), cfg)
    return Report(
        "diagram_distance", ["rho"], vals, np.array([0.0]), np.array([np.nan]), _cfg_dict(cfg)
    )


# ---------------------------------------------------------------------------
# diagonal mass


def _diag_trial(seed: int, n: int, k: int, with_diagram: bool) -> list[float]:
    F = sample_filtration(n, k, seed)
    norm = comb(n - 1, k)
    prom = promoting_count(F)
    if not with_diagram:
        return [prom / norm, np.nan, np.nan, 1.0]
    D = reduce_diagram(F)
    on_diag = int(D.mult[D.births == D.deaths].sum())
    off_diag = int(D.mult[D.births < D.deaths].sum())
    agree = on_diag == prom and norm - off_diag == prom
    return [prom / norm, on_diag / norm, (norm - off_diag) / norm, float(agree)]


def mc_diagonal_mass(cfg: TrialConfig, with_diagram: bool = True) -> Report:
    """Diagonal mass three ways per trial, against the exact finite-n expectation.

    ``promoting_expectation`` is already divided by C(n-1, k).
    """
    vals = _run_trials(partial(_diag_trial, n=cfg.n, k=cfg.k, with_diagram=with_diagram), cfg)
    finite = limits.promoting_expectation(cfg.n, cfg.k)
    tol = cfg.tolerances.get("diagonal", np.nan)
    labels = ["promoting/C(n-1,k)", "diagram diagonal", "1 - off-diagonal", "identity holds"]
    theory = np.array([finite, finite, finite, 1.0])
    tols = np.array([tol, np.nan, np.nan, 0.0 if with_diagram else np.nan])
    extra = {"limit_total": limits.diagonal_total(cfg.k), "finite_n_expectation": finite}
    return Report("diagonal_mass", labels, vals, theory, tols, _cfg_dict(cfg), extra)


# ---------------------------------------------------------------------------
# observables


class ObservableError(ValueError):
    pass


_ALLOWED_NAMES = {"r", "s"}


def _is_const(node) -> bool:
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return True
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        return _is_const(node.operand)
    if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div)):
        return _is_const(node.left) and _is_const(node.right)
    return False


def _const_value(node) -> float:
    return float(eval(compile(ast.Expression(node), "<const>", "eval"), {"__builtins__": {}}))


def _is_linear_form(node) -> bool:
    """c, r, s, s - r and constant multiples thereof."""
    if _is_const(node) or (isinstance(node, ast.Name) and node.id in _ALLOWED_NAMES):
        return True
    if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub)):
        return _is_linear_form(node.left) and _is_linear_form(node.right)
    if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Mult):
        return (_is_const(node.left) and _is_linear_form(node.right)) or (
            _is_const(node.right) and _is_linear_form(node.left)
        )
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        return _is_linear_form(node.operand)
    return False


def _check_node(node) -> None:
    if isinstance(node, ast.Expression):
        return _check_node(node.body)
    if _is_const(node):
        return
    if isinstance(node, ast.Name):
        if node.id not in _ALLOWED_NAMES:
            raise ObservableError(f"unknown variable {node.id!r}")
        return
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        return _check_node(node.operand)
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, (ast.Add, ast.Sub, ast.Mult)):
            _check_node(node.left)
            return _check_node(node.right)
        if isinstance(node.op, ast.Div):
            if not _is_const(node.right) or _const_value(node.right) == 0:
                raise ObservableError("division only by nonzero constants")
            return _check_node(node.left)
        if isinstance(node.op, ast.Pow):
            if not _is_const(node.right):
                raise ObservableError("exponents must be constants")
            e = _const_value(node.right)
            if e < 0 or e != int(e):
                raise ObservableError("exponents must be nonnegative integers")
            return _check_node(node.left)
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
        name = node.func.id
        if name == "exp" and len(node.args) == 1:
            _check_decay(node.args[0])
            return
        if name == "min" and len(node.args) == 2:
            if not _is_const(node.args[1]):
                raise ObservableError("min(expr, M) needs a constant M")
            return _check_node(node.args[0])
    raise ObservableError(f"unsupported expression: {ast.dump(node)}")


def _check_decay(arg) -> None:
    if not _is_linear_form(arg):
        raise ObservableError("exp argument must be linear in r and s")
    _, a1, a2 = _linear_coeffs(arg)
    # a0 + a1 r + a2 s is bounded above on 0 <= r <= s iff a2 <= 0 and a1 + a2 <= 0
    if a2 > 1e-15 or a1 + a2 > 1e-15:
        raise ObservableError("exp argument must be nonincreasing on 0 <= r <= s")


def _linear_coeffs(arg) -> tuple[float, float, float]:
    code = compile(ast.Expression(arg), "<arg>", "eval")
    ev = lambda r, s: float(eval(code, {"__builtins__": {}}, {"r": r, "s": s}))  # noqa: S307
    a0 = ev(0.0, 0.0)
    return a0, ev(1.0, 0.0) - a0, ev(0.0, 1.0) - a0


@dataclass(frozen=True)
class Observable:
    spec: str
    fn: object = field(repr=False, compare=False)

    def __call__(self, r, s):
        return self.fn(r, s)


def parse_observable(spec: str) -> Observable:
    """Compile an observable f(r, s) from a small whitelisted expression language.

    Allowed: numbers, r, s, + - *, division by constants, nonnegative integer
    powers, exp(-a*r), exp(-a*s), exp(-a*(s-r)) with a >= 0, and min(expr, M).
    """
    try:
        tree = ast.parse(spec.strip(), mode="eval")
    except SyntaxError as exc:
        raise ObservableError(f"cannot parse {spec!r}: {exc.msg}") from None
    _check_node(tree)
    code = compile(tree, "<observable>", "eval")
    namespace = {"__builtins__": {}, "exp": np.exp, "min": np.minimum}

    def fn(r, s):
        r = np.asarray(r, dtype=np.float64)
        s = np.asarray(s, dtype=np.float64)
        val = eval(code, namespace, {"r": r, "s": s})  # noqa: S307 - AST whitelisted above
        return np.broadcast_to(np.asarray(val, dtype=np.float64), np.broadcast(r, s).shape).copy()

    return Observable(spec, fn)


def observable_integral(D: VerboseDiagram, f: Observable | str) -> float:
    """Exact sum of f over the atoms of a diagram, weighted by multiplicity."""
    if isinstance(f, str):
        f = parse_observable(f)
    return float((f(D.births, D.deaths) * D.mult).sum() / D.normalizer)


@dataclass
class LimitIntegral:
    value: float
    h: float
    previous: float
    tail_mass: float
    cutoff: float


def observable_limit_integral(
    k: int, f: Observable | str, cutoff: float = 16.0, h0: float = 0.1, tol: float = 1e-4, h_min: float = 0.01
) -> LimitIntegral:
    """Stieltjes integral of f against the limiting verbose diagram.

    Cell masses come from second differences of the limiting CDF on a uniform
    grid over [0, cutoff]^2 and f is evaluated at cell midpoints; the step is
    halved until two successive estimates differ by less than ``tol``.  Mass
    outside the square is reported as ``tail_mass``.
    """
    if isinstance(f, str):
        f = parse_observable(f)
    prev = None
    h = h0
    while True:
        g = np.linspace(0.0, cutoff, int(round(cutoff / h)) + 1)
        F = limits.xi_hat_cdf_grid(k, g, g)
        cell = F[1:, 1:] - F[:-1, 1:] - F[1:, :-1] + F[:-1, :-1]
        mid = 0.5 * (g[1:] + g[:-1])
        val = float((f(mid[:, None], mid[None, :]) * cell).sum())
        if prev is not None and (abs(val - prev) < tol or h / 2 < h_min):
            return LimitIntegral(val, h, prev, float(1 - F[-1, -1]), cutoff)
        prev = val
        h /= 2


def lifetime_limit_1d(k: int) -> float:
    """Independent value of the limiting mean lifetime.

    Births are Exp(1) in the limit and deaths have survival function
    lambda_{1,s}, so the mean of s - r is int_0^inf lambda_{1,s} ds - 1.
    """
    cut = 60.0
    return limits.adaptive_simpson(lambda s: limits.lambda_qc(k, 1.0, s), 0.0, cut, tol=1e-9) - 1.0


def _obs_trial(seed: int, n: int, k: int, spec: str) -> list[float]:
    return [observable_integral(reduce_diagram(sample_filtration(n, k, seed)), parse_observable(spec))]


def mc_observable(cfg: TrialConfig, spec: str = "s - r", limit_value: float | None = None) -> Report:
    parse_observable(spec)
    vals = _run_trials(partial(_obs_trial, n=cfg.n, k=cfg.k, spec=spec), cfg)
    if limit_value is None:
        limit_value = observable_limit_integral(cfg.k, spec).value
    tol = np.array([cfg.tolerances.get("observable", np.nan)])
    return Report(
        "observable", [f"int({spec})"], vals, np.array([limit_value]), tol, _cfg_dict(cfg), {"observable": spec}
    )


# ---------------------------------------------------------------------------
# rank experiment


def _rank_trial(seed: int, n: int, k: int, r: float, s: float) -> list[float]:
    F = sample_filtration(n, k, seed)
    norm = comb(n, k)
    if s <= 0:
        return [0.0, 0.0, 0.0, np.nan]
    M = coboundary_matrix(F, s, r if r > 0 else None)
    rank = rank_confirmed(M)
    bound = leaf_removal(M).rank_bound
    n_rows, n_cols = M.shape
    return [rank / norm, bound / norm, (bound - rank) / norm, n_rows / n_cols if n_cols else np.nan]


def rank_experiment(k: int, r: float, s: float, n: int, trials: int, seed0: int = 42, tolerance: float = np.nan, jobs: int = 1) -> Report:
    """rank M_n(r, s) / C(n, k) against q (1 - lambda_{q,c}), q = e^{-r}, c = s - r."""
    if s < r:
        raise ValueError("need r <= s")
    cfg = TrialConfig(n=n, k=k, trials=trials, seed0=seed0, r_list=[r], s_list=[s], jobs=jobs)
    vals = _run_trials(partial(_rank_trial, n=n, k=k, r=float(r), s=float(s)), cfg)
    q, c = exp(-r), s - r
    lim = q * (1 - limits.lambda_qc(k, q, c)) if c > 0 else 0.0
    ratio = c / (q * (k + 1))
    labels = ["rank/C(n,k)", "peel bound/C(n,k)", "bound gap/C(n,k)", "|R|/|C|"]
    theory = np.array([lim, np.nan, np.nan, ratio])
    tol = np.array([tolerance, np.nan, np.nan, np.nan])
    return Report("rank", labels, vals, theory, tol, _cfg_dict(cfg))


# ---------------------------------------------------------------------------
# tail mass


def _tail_trial(seed: int, n: int, k: int, us: tuple) -> list[float]:
    D = reduce_diagram(sample_filtration(n, k, seed))
    return [float(D.mult[D.deaths > u].sum()) / D.normalizer for u in us]


def tail_mass(cfg: TrialConfig, u_list) -> Report:
    """Empirical mass of atoms dying after u, for each u."""
    us = tuple(float(u) for u in u_list)
    vals = _run_trials(partial(_tail_trial, n=cfg.n, k=cfg.k, us=us), cfg)
    nan = np.full(len(us), np.nan)
    return Report("tail_mass", [f"mass(death>{u:g})" for u in us], vals, nan, nan, _cfg_dict(cfg))
