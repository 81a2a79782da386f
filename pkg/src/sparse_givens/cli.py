"""Command-line surface: data I/O, configuration, and output serialization.

Subcommands: ``explore``, ``fit``, ``mixfit``, ``simulate``, ``prior-curves``.
Matrices and heat maps are written as CSV, models and summaries as JSON, and
every run writes a manifest with the fully resolved configuration so outputs
can be reproduced bit for bit.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .explore import ExploreConfig, exploratory_fit
from .givens import GivensModel, build_covariance, compose_eigenmatrix
from .likelihood import SumOfSquares
from .mcmc import McmcConfig, run_chain, summarize
from .mixture import MixtureConfig, run_mixture_chain
from .priors import AnglePrior, EigenPrior, prior_sparsity_curve
from .simstudy import StudyConfig, run_study, study_percentiles

__all__ = ["main", "parse_and_dispatch", "read_csv_matrix", "write_csv_matrix",
           "load_model", "save_model"]


class DataFormatError(ValueError):
    """Malformed input data with a row/column location."""


def read_csv_matrix(path) -> np.ndarray:
    """Read a rectangular numeric CSV, tolerating one optional header row."""
    rows: list[list[float]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, cells in enumerate(reader, start=1):
            if not cells or all(c.strip() == "" for c in cells):
                continue
            parsed = []
            for colno, cell in enumerate(cells, start=1):
                try:
                    value = float(cell)
                except ValueError:
                    if lineno == 1 and not rows:
                        parsed = None  # header row
                        break
                    raise DataFormatError(
                        f"{path}: row {lineno}, column {colno}: "
                        f"cannot parse {cell.strip()!r} as a number"
                    ) from None
                if not np.isfinite(value):
                    raise DataFormatError(
                        f"{path}: row {lineno}, column {colno}: non-finite value"
                    )
                parsed.append(value)
            if parsed is None:
                continue
            if rows and len(parsed) != len(rows[0]):
                raise DataFormatError(
                    f"{path}: row {lineno}: expected {len(rows[0])} columns, "
                    f"found {len(parsed)}"
                )
            rows.append(parsed)
    if not rows:
        raise DataFormatError(f"{path}: no numeric rows found")
    return np.asarray(rows, dtype=np.float64)


def write_csv_matrix(path, M: np.ndarray, header: list[str] | None = None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if header is not None:
            writer.writerow(header)
        for row in np.atleast_2d(M):
            writer.writerow([repr(float(v)) for v in row])


def save_model(model: GivensModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model.to_dict(), fh, indent=1)
        fh.write("\n")


def load_model(path) -> GivensModel:
    with open(path, encoding="utf-8") as fh:
        return GivensModel.from_dict(json.load(fh))


def _write_manifest(out_base: Path, command: str, resolved: dict) -> None:
    manifest = {"command": command, "version": __version__, "config": resolved}
    path = out_base.parent / (out_base.stem + ".manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1, default=str)
        fh.write("\n")


def _load_centered(args) -> np.ndarray:
    X = read_csv_matrix(args.data)
    if args.center:
        X = X - X.mean(axis=0, keepdims=True)
    return X


def _angle_prior(args) -> AnglePrior:
    return AnglePrior(beta_half=args.betahalf, beta_zero=args.beta0,
                      kappa=args.kappa)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_explore(args) -> int:
    X = _load_centered(args)
    ss = SumOfSquares.from_data(X, center=False)
    model, trace = exploratory_fit(ss, ExploreConfig(rho=args.rho,
                                                     max_passes=args.passes))
    out = Path(args.out)
    save_model(model, out)
    V = build_covariance(model)
    dsd = np.sqrt(np.diag(V))
    corr = V / np.outer(dsd, dsd)
    write_csv_matrix(out.parent / (out.stem + ".correlation.csv"), corr)
    R = compose_eigenmatrix(model)
    loadings = R * np.sqrt(model.eigenvalues)[None, :]
    write_csv_matrix(out.parent / (out.stem + ".scaled_eigenmatrix.csv"), loadings)
    _write_manifest(out, "explore", {
        "data": str(args.data), "rho": args.rho, "passes": args.passes,
        "center": args.center, "rotators": model.z,
        "included": [{"i": p[0], "j": p[1], "r": r, "angle": w}
                     for p, r, w in trace],
    })
    print(f"explore: {model.z} rotators kept at rho={args.rho}; wrote {out}")
    return 0


def _cmd_fit(args) -> int:
    X = _load_centered(args)
    ss = SumOfSquares.from_data(X, center=False)
    base = McmcConfig(
        iterations=args.iters, burn_in=args.burnin, thin=args.thin,
        rj_proposals_per_iter=args.rj_per_iter,
        angle_prior=_angle_prior(args),
        eigen_prior=EigenPrior(args.eta1, args.eta2),
        seed=args.seed, init_rho=args.init_rho,
    )
    samples = run_chain(ss, base)
    for extra in range(1, args.chains):
        cfg = McmcConfig(**{**base.__dict__, "seed": args.seed + extra})
        samples.extend(run_chain(ss, cfg))
    out = Path(args.out)
    tables = summarize(samples)
    doc = samples.to_dict()
    doc["summaries"] = {
        "rotator_count_quantiles": list(tables["rotator_count_quantiles"]),
        "pct_nonzero_rotators_quantiles":
            list(tables["pct_nonzero_rotators_quantiles"]),
        "pct_zeros_r_quantiles": list(tables["pct_zeros_r_quantiles"]),
    }
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")
    write_csv_matrix(out.parent / (out.stem + ".edge_probability.csv"),
                     tables["edge_probability"])
    write_csv_matrix(out.parent / (out.stem + ".scaled_eigenmatrix.csv"),
                     tables["mean_scaled_eigenmatrix"])
    _write_manifest(out, "fit", {
        "data": str(args.data), "iters": args.iters, "burnin": args.burnin,
        "thin": args.thin, "beta0": args.beta0, "betahalf": args.betahalf,
        "kappa": args.kappa, "eta1": args.eta1, "eta2": args.eta2,
        "seed": args.seed, "chains": args.chains, "center": args.center,
        "init_rho": args.init_rho, "rj_per_iter": args.rj_per_iter,
        "counters": samples.counters,
    })
    print(f"fit: stored {len(samples)} draws; wrote {out}")
    return 0


def _cmd_mixfit(args) -> int:
    X = _load_centered(args)
    config = MixtureConfig(
        n_components=args.components, iterations=args.iters,
        burn_in=args.burnin, thin=args.thin, tau=args.tau,
        psi_a=args.psi_a, psi_b=args.psi_b,
        angle_prior=_angle_prior(args),
        eigen_prior=EigenPrior(args.eta1, args.eta2),
        seed=args.seed, init_rho=args.init_rho,
    )
    samples = run_mixture_chain(X, config)
    out = Path(args.out)
    doc = {
        "n_components": args.components,
        "mean_weights": [float(v) for v in samples.mean_weights()],
        "mean_means": np.mean(samples.mu_draws, axis=0).tolist(),
        "mean_psi": np.mean(samples.psi_draws, axis=0).tolist(),
        "sparsity_quantiles": samples.sparsity_quantiles(),
        "kept_draws": samples.kept,
    }
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    for c in range(args.components):
        write_csv_matrix(out.parent / (out.stem + f".component{c+1}.edge_probability.csv"),
                         samples.edge_probability(c))
        write_csv_matrix(out.parent / (out.stem + f".component{c+1}.scaled_eigenmatrix.csv"),
                         samples.mean_scaled_eigenmatrix(c))
    write_csv_matrix(out.parent / (out.stem + ".classification.csv"),
                     samples.classification_probabilities(),
                     header=[f"component{c+1}" for c in range(args.components)])
    _write_manifest(out, "mixfit", {
        "data": str(args.data), "components": args.components,
        "iters": args.iters, "burnin": args.burnin, "thin": args.thin,
        "tau": args.tau, "psi_a": args.psi_a, "psi_b": args.psi_b,
        "beta0": args.beta0, "betahalf": args.betahalf, "kappa": args.kappa,
        "eta1": args.eta1, "eta2": args.eta2, "seed": args.seed,
        "center": args.center, "init_rho": args.init_rho,
    })
    print(f"mixfit: kept {samples.kept} draws; "
          f"mean weights {np.round(samples.mean_weights(), 4)}; wrote {out}")
    return 0


def _cmd_simulate(args) -> int:
    dims = tuple(int(v) for v in args.dims.split(","))
    config = StudyConfig(dims=dims, n=args.n, reps=args.reps,
                         iterations=args.iters, burn_in=args.burnin,
                         seed=args.seed, threads=args.threads)
    results = run_study(config)
    out = Path(args.out)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["p", "rep", "draw_index", "kl", "plug_in_kl"])
        for r in results:
            for t, kl in enumerate(r["kl"]):
                writer.writerow([r["p"], r["rep"], t, repr(float(kl)),
                                 repr(float(r["plug_in_kl"]))])
    summary = study_percentiles(results)
    with open(out.parent / (out.stem + ".summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=1)
        fh.write("\n")
    _write_manifest(out, "simulate", {
        "dims": list(dims), "n": args.n, "reps": args.reps,
        "iters": args.iters, "burnin": args.burnin,
        "seed": args.seed, "threads": args.threads,
    })
    print(f"simulate: {len(results)} replicates; wrote {out}")
    return 0


def _cmd_prior_curves(args) -> int:
    qs = [int(v) for v in args.q.split(",")]
    rng = np.random.default_rng(args.seed)
    out = Path(args.out)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["q", "z", "median_R_sparsity", "median_K_sparsity"])
        for q in qs:
            m = q * (q - 1) // 2
            if args.z_step > 1:
                zs = sorted(set(range(1, m, args.z_step)) | {m - 1})
            else:
                zs = list(range(1, m))
            for z in zs:
                r_prop, k_prop = prior_sparsity_curve(q, z, args.nsim, rng)
                writer.writerow([q, z, repr(r_prop), repr(k_prop)])
    _write_manifest(out, "prior-curves", {
        "q": qs, "nsim": args.nsim, "z_step": args.z_step, "seed": args.seed,
    })
    print(f"prior-curves: wrote {out}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_prior_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--beta0", type=float, default=0.99,
                   help="conditional prior mass at angle 0")
    p.add_argument("--betahalf", type=float, default=0.25,
                   help="prior mass at angle pi/2")
    p.add_argument("--kappa", type=float, default=0.0,
                   help="concentration of the continuous angle prior")
    p.add_argument("--eta1", type=float, default=0.001)
    p.add_argument("--eta2", type=float, default=0.001)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparse-givens",
        description="Sparse Givens-rotation models for Bayesian covariance estimation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("explore", help="forward-selection exploratory fit")
    p.add_argument("--data", required=True)
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--passes", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--center", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=_cmd_explore)

    p = sub.add_parser("fit", help="RJ-MCMC posterior for one Gaussian sample")
    p.add_argument("--data", required=True)
    p.add_argument("--iters", type=int, default=15000)
    p.add_argument("--burnin", type=int, default=10000)
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--chains", type=int, default=1)
    p.add_argument("--rj-per-iter", type=int, default=None, dest="rj_per_iter")
    p.add_argument("--init-rho", type=float, default=0.5, dest="init_rho")
    _add_prior_flags(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--center", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("mixfit", help="mixture of sparse factor models")
    p.add_argument("--data", required=True)
    p.add_argument("--components", type=int, required=True)
    p.add_argument("--iters", type=int, default=200000)
    p.add_argument("--burnin", type=int, default=100000)
    p.add_argument("--thin", type=int, default=10)
    p.add_argument("--tau", type=float, default=1000.0)
    p.add_argument("--psi-a", type=float, default=3.1, dest="psi_a")
    p.add_argument("--psi-b", type=float, default=0.17, dest="psi_b")
    p.add_argument("--init-rho", type=float, default=0.5, dest="init_rho")
    _add_prior_flags(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--center", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=_cmd_mixfit)

    p = sub.add_parser("simulate", help="synthetic precision recovery study")
    p.add_argument("--dims", default="10,20,30")
    p.add_argument("--n", type=int, default=150)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--iters", type=int, default=15000)
    p.add_argument("--burnin", type=int, default=10000)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("prior-curves", help="prior-predictive sparsity curves")
    p.add_argument("--q", default="20")
    p.add_argument("--nsim", type=int, default=10000)
    p.add_argument("--z-step", type=int, default=1, dest="z_step")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_prior_curves)
    return parser


def parse_and_dispatch(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(parse_and_dispatch())
