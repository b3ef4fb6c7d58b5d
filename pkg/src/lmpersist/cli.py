"""Command line interface: ``lmpersist <subcommand> [flags]``.

Exit status is 0 on success, 2 on usage or domain errors and 1 when an
internal invariant fails (for example two primes disagreeing on a rank).
All randomness derives from ``--seed`` (default 42).
"""

from __future__ import annotations

import argparse
import json
import sys
from math import comb, exp
from pathlib import Path

import numpy as np

from . import experiments as ex
from . import gw, limits
from .complex import coboundary_matrix, read_filtration, sample_filtration, write_filtration
from .linalg import (
    InvariantViolation,
    leaf_removal,
    leaf_removal_transpose_bound,
    rank_confirmed,
    read_matrix,
    tanner,
)
from .persistence import reduce_diagram, write_diagram

DEFAULT_SEED = 42
SCHEMA = 1


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def parse_distribution(text: str) -> limits.DegreeDistribution:
    """``pois:LAM``, ``bin:M,Q``, ``dirac:M`` or ``explicit:P0,P1,...``."""
    kind, _, args = text.partition(":")
    try:
        vals = [float(x) for x in args.split(",")] if args else []
        if kind == "pois" and len(vals) == 1:
            return limits.DegreeDistribution.poisson(vals[0])
        if kind == "bin" and len(vals) == 2:
            return limits.DegreeDistribution.binomial(int(vals[0]), vals[1])
        if kind == "dirac" and len(vals) == 1:
            return limits.DegreeDistribution.dirac(int(vals[0]))
        if kind == "explicit" and vals:
            return limits.DegreeDistribution.explicit(vals)
    except (ValueError, limits.DomainError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    raise argparse.ArgumentTypeError(f"bad distribution {text!r}")


def _emit(payload: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps({"schema": SCHEMA, **payload}, indent=2, sort_keys=True) + "\n")
    elif fmt == "csv":
        keys = sorted(k for k, v in payload.items() if not isinstance(v, (dict, list)))
        out.write(",".join(keys) + "\n" + ",".join(str(payload[k]) for k in keys) + "\n")
    else:
        for key in sorted(payload):
            out.write(f"{key}: {payload[key]}\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(a, out) -> None:
    if a.input:
        F = read_filtration(a.input)
    else:
        if a.n is None:
            raise UsageError("simulate needs --n or --input")
        F = sample_filtration(a.n, a.k, a.seed)
    prefix = a.prefix or f"lm_n{F.n}_k{F.k}_seed{F.seed if F.seed is not None else 'x'}"
    D = reduce_diagram(F)
    files = {"diagram": f"{prefix}.diagram.txt"}
    if not a.input:
        files["filtration"] = f"{prefix}.filtration.txt"
        write_filtration(F, files["filtration"])
    write_diagram(D, files["diagram"])
    payload = {
        "n": F.n,
        "k": F.k,
        "seed": F.seed,
        "normalizer": D.normalizer,
        "atoms": int(D.births.size),
        "diagonal_mass": D.diagonal_mass(),
        "files": files,
    }
    _emit(payload, a.format, out)


def cmd_limit(a, out) -> None:
    k, r, s = a.k, a.r, a.s
    if r < 0 or s < 0:
        raise UsageError("r and s must be >= 0")
    q = a.q if a.q is not None else exp(-r)
    c = a.c if a.c is not None else max(s - r, 0.0)
    fp = limits.fixed_points(k, q, c)
    payload = {
        "k": k,
        "r": r,
        "s": s,
        "q": q,
        "c": c,
        "alpha": fp.alpha,
        "alpha_prime": fp.alpha_prime,
        "lambda": limits.lambda_qc(k, q, c),
        "beta_hat": limits.beta_hat(k, r, s),
        "cdf": limits.xi_hat_cdf(k, r, s),
    }
    if a.grid_csv:
        g = np.arange(0.0, a.grid_max + 1e-12, a.grid_step)
        cdf = limits.xi_hat_cdf_grid(k, g, g)
        with open(a.grid_csv, "w") as fh:
            fh.write("r,s,cdf,beta_hat\n")
            for i, rv in enumerate(g):
                for j, sv in enumerate(g):
                    fh.write(f"{rv!r},{sv!r},{cdf[i, j]!r},{1 - exp(-rv) - cdf[i, j]!r}\n")
        payload["grid_csv"] = a.grid_csv
    _emit(payload, a.format, out)


def cmd_compare(a, out) -> None:
    tolerances = {} if a.tol is None else {a.experiment: a.tol}
    r_list, s_list = a.r or [1.0], a.s or [2.0]
    if a.experiment == "rank":
        rep = ex.rank_experiment(
            a.k, r_list[0], s_list[0], a.n, a.trials, a.seed,
            tolerance=np.nan if a.tol is None else a.tol, jobs=a.jobs,
        )
    else:
        cfg = ex.TrialConfig(a.n, a.k, a.trials, a.seed, r_list, s_list, tolerances, a.jobs)
        if a.experiment == "betti":
            rep = ex.mc_persistent_betti(cfg)
        elif a.experiment == "rho":
            rep = ex.mc_diagram_distance(cfg)
        elif a.experiment == "diagonal":
            rep = ex.mc_diagonal_mass(cfg)
        elif a.experiment == "observable":
            rep = ex.mc_observable(cfg, a.observable)
        else:
            rep = ex.tail_mass(cfg, a.u or [0.0, 1.0, 2.0, 4.0])
    if a.trial_csv:
        Path(a.trial_csv).write_text(rep.to_csv())
    if a.format == "json":
        out.write(rep.to_json() + "\n")
    elif a.format == "csv":
        out.write(rep.to_csv())
    else:
        out.write(rep.to_text() + "\n")


def cmd_rank(a, out) -> None:
    if a.input:
        M = read_matrix(a.input)
        source = {"input": a.input}
    else:
        if a.n is None or a.s is None:
            raise UsageError("rank needs --input or --n and --s")
        F = sample_filtration(a.n, a.k, a.seed)
        M = coboundary_matrix(F, a.s, a.r if a.r else None)
        source = {"n": a.n, "k": a.k, "r": a.r, "s": a.s, "seed": a.seed}
    rank = rank_confirmed(M)
    peel = leaf_removal(M)
    payload = {
        **source,
        "rows": M.shape[0],
        "cols": M.shape[1],
        "nnz": M.nnz,
        "rank": rank,
        "peel_rounds": peel.rounds,
        "peel_removed_rank": peel.removed_rank,
        "peel_rank_bound": peel.rank_bound,
        "transpose_bound": leaf_removal_transpose_bound(M),
        "residual_shape": list(peel.residual.shape),
    }
    if not a.input:
        payload["rank_normalized"] = rank / comb(a.n, a.k)
    _emit(payload, a.format, out)


def cmd_gw(a, out) -> None:
    if a.mu is not None or a.nu is not None:
        if a.mu is None or a.nu is None:
            raise UsageError("give both --mu and --nu")
        mu, nu = a.mu, a.nu
    else:
        q = a.q if a.q is not None else 1.0
        c = a.c if a.c is not None else 1.0
        mu, nu = limits.DegreeDistribution.poisson(c), limits.row_law(a.k, q)
    res = gw.population_dynamics(mu, nu, a.pool, a.iters, a.init, a.seed)
    fp = limits.fixed_points_general(mu, nu) if mu.mean > 0 else None
    payload = {
        "mu": str(mu),
        "nu": str(nu),
        "pool": a.pool,
        "iters": a.iters,
        "init": a.init,
        "seed": a.seed,
        "t_est": res.t_est,
        "eta_est": res.eta_est,
    }
    if fp is not None:
        payload.update(
            alpha=fp.alpha,
            alpha_prime=fp.alpha_prime,
            Lambda_alpha=limits.lambda_general(mu, nu, fp.alpha),
            Lambda_alpha_prime=limits.lambda_general(mu, nu, fp.alpha_prime),
        )
    _emit(payload, a.format, out)


def cmd_census(a, out) -> None:
    F = sample_filtration(a.n, a.k, a.seed)
    M = coboundary_matrix(F, a.s, a.r if a.r else None)
    freq = gw.census(tanner(M), radius=a.radius)
    ranked = sorted(freq.items(), key=lambda kv: (-kv[1], kv[0]))
    payload = {"n": a.n, "k": a.k, "r": a.r, "s": a.s, "radius": a.radius, "roots": M.shape[1]}
    if a.gw_samples:
        q = exp(-a.r)
        ref = gw.gw_star_census(
            limits.DegreeDistribution.poisson(a.s - a.r), limits.row_law(a.k, q), a.radius, a.gw_samples, a.seed
        )
        payload["tv_to_limit"] = gw.tv_distance(freq, ref)
    if a.format == "text":
        for key, f in ranked:
            out.write(f"{key} {f!r}\n")
        if "tv_to_limit" in payload:
            out.write(f"# tv_to_limit {payload['tv_to_limit']!r}\n")
    else:
        payload["frequencies"] = dict(ranked)
        _emit(payload, "json", out)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lmpersist", description="Persistence of random simplicial complexes")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt_default="json"):
        sp.add_argument("--k", type=int, default=1, help="top dimension (default 1)")
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"base seed (default {DEFAULT_SEED})")
        sp.add_argument("--format", choices=("json", "csv", "text"), default=fmt_default)

    sp = sub.add_parser("simulate", help="sample a filtration and write filtration + diagram files")
    common(sp)
    sp.add_argument("--n", type=int)
    sp.add_argument("--input", help="read a filtration dump instead of sampling")
    sp.add_argument("--prefix", help="output file prefix")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("limit", help="evaluate limiting quantities at (r, s)")
    common(sp)
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--q", type=float, help="override q (default e^-r)")
    sp.add_argument("--c", type=float, help="override c (default s - r)")
    sp.add_argument("--grid-csv", help="also write the limiting CDF on a grid to this CSV")
    sp.add_argument("--grid-max", type=float, default=6.0)
    sp.add_argument("--grid-step", type=float, default=0.25)
    sp.set_defaults(func=cmd_limit)

    sp = sub.add_parser("compare", help="Monte Carlo comparison with the limit")
    common(sp)
    sp.add_argument(
        "--experiment", choices=("betti", "rho", "diagonal", "observable", "rank", "tail"), default="betti"
    )
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--trials", type=int, default=10)
    sp.add_argument("--r", type=_floats, help="comma-separated birth times")
    sp.add_argument("--s", type=_floats, help="comma-separated death times (paired with --r)")
    sp.add_argument("--u", type=_floats, help="tail thresholds for --experiment tail")
    sp.add_argument("--tol", type=float)
    sp.add_argument("--observable", default="s - r")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--trial-csv", help="write per-trial values to this CSV")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("rank", help="rank and leaf-removal certificate of a matrix")
    common(sp)
    sp.add_argument("--input", help="matrix file ('rows cols' then 'r c v')")
    sp.add_argument("--n", type=int)
    sp.add_argument("--r", type=float, default=0.0)
    sp.add_argument("--s", type=float)
    sp.set_defaults(func=cmd_rank)

    sp = sub.add_parser("gw", help="population dynamics on GW_*(mu, nu)")
    common(sp)
    sp.add_argument("--mu", type=parse_distribution, help="column law, e.g. pois:4")
    sp.add_argument("--nu", type=parse_distribution, help="row law, e.g. bin:2,1")
    sp.add_argument("--q", type=float)
    sp.add_argument("--c", type=float)
    sp.add_argument("--pool", type=int, default=100_000)
    sp.add_argument("--iters", type=int, default=200)
    sp.add_argument("--init", choices=("zeros", "ones"), default="zeros")
    sp.set_defaults(func=cmd_gw)

    sp = sub.add_parser("census", help="radius-r ball census of the windowed Tanner graph")
    common(sp, fmt_default="text")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--r", type=float, default=0.0)
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--radius", type=int, default=2)
    sp.add_argument("--gw-samples", type=int, default=0, help="also compare with this many limit trees")
    sp.set_defaults(func=cmd_census)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args, sys.stdout)
    except InvariantViolation as exc:
        print(f"lmpersist: invariant violation: {exc}", file=sys.stderr)
        return 1
    except (UsageError, ValueError, OSError) as exc:
        print(f"lmpersist {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
