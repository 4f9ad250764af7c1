"""Command-line interface.

Subcommands: generate, fit, predict, eigvecs, bench-error, bench-time, plot.
Exit codes: 0 success, 2 invalid arguments, 3 numerical failure, 4 resource
cap exceeded.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields

import numpy as np

from . import bench as bench_mod
from .baselines import krr_fit
from .bench import ExperimentConfig, preset, run_error_curve, run_timing, write_records_csv
from .errors import EXIT_INVALID_ARGUMENT, EXIT_OK, InvalidArgumentError, KerlapError
from .estimator import decode_sign, fit, fit_exact, model_from_json, model_to_json, predict
from .filters import FILTER_KINDS, FilterSpec
from .kernel import GaussianKernel
from .operators import load_dataset_csv, save_dataset_csv
from .svgplot import plot_svg
from .synthdata import CirclesSpec, GaussianMixSpec, gen_circles, gen_gaussian_mix


def _add_generate(sub):
    p = sub.add_parser("generate", help="write a synthetic dataset CSV")
    p.add_argument("--family", choices=["circles", "gauss2"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--n-labeled", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--num-circles", type=int, default=4)
    p.add_argument("--inner-radius", type=float, default=1.0)
    p.add_argument("--radius-step", type=float, default=None)
    p.add_argument("--angles", choices=["uniform", "equispaced"], default="uniform")
    p.add_argument("--allocation", choices=["equal", "proportional"], default="equal")
    p.add_argument("--d", type=int, default=10)
    p.add_argument("--separation", type=float, default=3.0)


def _add_fit(sub):
    p = sub.add_parser("fit", help="fit a model on a dataset CSV and write model JSON")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--method", choices=["kernel_laplacian", "krr", "exact"],
                   default="kernel_laplacian")
    p.add_argument("--sigma", type=float, required=True, help="Gaussian kernel bandwidth")
    p.add_argument("--p", type=int, default=50, help="number of landmarks")
    p.add_argument("--mu", type=float, default=1e-3)
    p.add_argument("--filter", choices=list(FILTER_KINDS), default="tikhonov")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--ridge", type=float, default=1e-3, help="krr ridge strength")
    p.add_argument("--dense-cap", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma-over-labeled", action="store_true",
                   help="average the covariance over labeled points only")
    p.add_argument("--clip", action="store_true", help="clip predictions to max |label|")


def _add_predict(sub):
    p = sub.add_parser("predict", help="evaluate a model JSON on query points")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True, help="dataset CSV; all rows are queried")
    p.add_argument("--out", required=True, help="output CSV with score and sign columns")


def _add_eigvecs(sub):
    p = sub.add_parser("eigvecs", help="export top generalized eigenvectors on a grid")
    p.add_argument("--data", required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--grid", default=None,
                   help="CSV of grid points (dataset format); defaults to the data points")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)


_OVERRIDE_FIELDS = {
    "family": str, "method": str, "trials": int, "label_ratio": float,
    "n_labeled": int, "d": int, "separation": float, "num_circles": int,
    "inner_radius": float, "radius_step": float, "angles": str, "allocation": str,
    "kernel_sigma": float, "lam": float, "ridge": float, "dense_cap": int,
    "metric": str, "inductive_test": int, "seed": int, "filter_kind": str,
}


def _add_bench(sub, name: str, help_text: str):
    p = sub.add_parser(name, help=help_text)
    p.add_argument("--config", default=None, help="ExperimentConfig JSON file")
    p.add_argument("--preset", choices=sorted(bench_mod.PRESETS), default=None)
    p.add_argument("--out", required=True, help="records CSV path")
    p.add_argument("--n-grid", default=None, help="comma-separated sample sizes")
    p.add_argument("--mu", default=None, help="float or '1/n'")
    p.add_argument("--p", default=None, help="int, 'n' or 'sqrt-log'")
    p.add_argument("--filter", dest="filter_kind", choices=list(FILTER_KINDS), default=None)
    p.add_argument("--baseline", choices=["graph", "krr"], default=None,
                   help="shorthand for --method graph|krr")
    p.add_argument("--graph-sigma", default=None, help="float or 'auto'")
    p.add_argument("--sigma-over-labeled", action="store_true", default=None)
    p.add_argument("--low-memory", action="store_true", default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    for field_name, typ in _OVERRIDE_FIELDS.items():
        if field_name in ("filter_kind", "lam"):
            continue
        p.add_argument(f"--{field_name.replace('_', '-')}", type=typ, default=None)


def _add_plot(sub):
    p = sub.add_parser("plot", help="render a records CSV as a deterministic SVG")
    p.add_argument("--records", required=True)
    p.add_argument("--out", required=True)


def _bench_config(args) -> ExperimentConfig:
    if args.config and args.preset:
        raise InvalidArgumentError("--config and --preset are mutually exclusive")
    if args.config:
        with open(args.config) as fh:
            cfg = ExperimentConfig.from_json(fh.read())
    elif args.preset:
        cfg = preset(args.preset)
    else:
        cfg = ExperimentConfig()
    updates = {}
    if args.baseline is not None:
        updates["method"] = args.baseline
    if args.n_grid is not None:
        updates["n_grid"] = [int(v) for v in args.n_grid.split(",")]
    if args.mu is not None:
        updates["mu"] = args.mu if args.mu == "1/n" else float(args.mu)
    if args.p is not None:
        updates["p"] = args.p if args.p in ("n", "sqrt-log") else int(args.p)
    if args.graph_sigma is not None:
        updates["graph_sigma"] = (
            args.graph_sigma if args.graph_sigma == "auto" else float(args.graph_sigma)
        )
    for field_name in list(_OVERRIDE_FIELDS) + ["lam", "sigma_over_labeled", "low_memory"]:
        val = getattr(args, field_name, None)
        if val is not None:
            updates[field_name] = val
    doc = {f.name: getattr(cfg, f.name) for f in fields(cfg)}
    doc.update(updates)
    return ExperimentConfig(**doc)


def _cmd_generate(args) -> int:
    if args.family == "circles":
        spec = CirclesSpec(
            n=args.n, n_labeled=args.n_labeled, num_circles=args.num_circles,
            inner_radius=args.inner_radius, radius_step=args.radius_step,
            angles=args.angles, allocation=args.allocation, seed=args.seed,
        )
        ds = gen_circles(spec)
    else:
        spec = GaussianMixSpec(
            n=args.n, n_labeled=args.n_labeled, d=args.d,
            separation=args.separation, seed=args.seed,
        )
        ds = gen_gaussian_mix(spec)
    save_dataset_csv(ds, args.out)
    print(f"wrote {ds.n} points (d={ds.d}, {ds.n_labeled} labeled) to {args.out}")
    return EXIT_OK


def _cmd_fit(args) -> int:
    ds = load_dataset_csv(args.data)
    kernel = GaussianKernel(args.sigma)
    if args.method == "kernel_laplacian":
        model = fit(
            ds, kernel, args.p, args.mu, FilterSpec(args.filter, args.lam), args.seed,
            sigma_over_labeled=args.sigma_over_labeled, clip=args.clip,
        )
    elif args.method == "krr":
        model = krr_fit(ds.inputs[: ds.n_labeled], ds.labels, kernel, args.ridge)
    else:
        model = fit_exact(ds, kernel, args.lam, args.mu,
                          dense_cap=args.dense_cap, clip=args.clip)
    with open(args.out, "w") as fh:
        fh.write(model_to_json(model))
    print(f"wrote {args.method} model ({model.coefficients.size} coefficients) to {args.out}")
    return EXIT_OK


def _cmd_predict(args) -> int:
    with open(args.model) as fh:
        model = model_from_json(fh.read())
    ds = load_dataset_csv(args.data)
    scores = predict(model, ds.inputs)
    signs = decode_sign(scores)
    with open(args.out, "w", newline="") as fh:
        fh.write("score,label\n")
        for s, l in zip(scores, signs):
            fh.write(f"{float(s)!r},{int(l)}\n")
    print(f"wrote {scores.size} predictions to {args.out}")
    return EXIT_OK


def _cmd_eigvecs(args) -> int:
    ds = load_dataset_csv(args.data)
    grid = load_dataset_csv(args.grid).inputs if args.grid else ds.inputs
    bench_mod.export_eigenvectors(
        ds, GaussianKernel(args.sigma), args.p, args.mu, args.count,
        grid, seed=args.seed, path=args.out,
    )
    print(f"wrote {args.count} eigenvector columns over {grid.shape[0]} grid points to {args.out}")
    return EXIT_OK


def _cmd_bench(args, runner) -> int:
    cfg = _bench_config(args)
    records = runner(cfg)
    write_records_csv(records, args.out)
    failed = sum(1 for r in records if np.isnan(r.error))
    print(f"wrote {len(records)} records to {args.out}" +
          (f" ({failed} failed)" if failed else ""))
    return EXIT_OK


def _cmd_plot(args) -> int:
    plot_svg(args.records, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="kerlap",
        description="Laplacian-regularized kernel regression benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_generate(sub)
    _add_fit(sub)
    _add_predict(sub)
    _add_eigvecs(sub)
    _add_bench(sub, "bench-error", "error-vs-n sweep, records CSV output")
    _add_bench(sub, "bench-time", "fit-time sweep, records CSV output")
    _add_plot(sub)

    args = parser.parse_args(argv)
    handlers = {
        "generate": _cmd_generate,
        "fit": _cmd_fit,
        "predict": _cmd_predict,
        "eigvecs": _cmd_eigvecs,
        "bench-error": lambda a: _cmd_bench(a, run_error_curve),
        "bench-time": lambda a: _cmd_bench(a, run_timing),
        "plot": _cmd_plot,
    }
    try:
        return handlers[args.command](args)
    except KerlapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_ARGUMENT


if __name__ == "__main__":
    sys.exit(main())
