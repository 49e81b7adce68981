"""Command-line front end: ``nrdep {fit,cca,eval,gen,table1}``."""

import argparse
import logging
import platform
import sys
from dataclasses import replace

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .cca import cca_fit
from .data import FitConfig, LinearMap, split_indices, validate_dataset
from .evaluation import mean_precision_recall, retrieval_curves, table1_protocol
from .exceptions import NrdepError
from .io import (
    atomic_write_text,
    format_matrix_csv,
    load_config_file,
    load_view_csv,
    report_csv,
    staged_output,
    trace_csv,
    write_json,
)
from .optimizer import fit
from .synthgen import SyntheticSpec, generate

logger = logging.getLogger("nrdep")

# flag name -> FitConfig field
FIT_FLAGS = {
    "rounds": "n_rounds",
    "gamma_mult": "gamma_multiplier",
    "sigma_frac": "sigma_fraction",
    "restarts": "n_restarts",
    "max_iters": "lbfgs_max_iters",
    "memory": "lbfgs_memory",
    "grad_tol": "grad_tolerance",
    "init_ratio": "init_median_ratio",
    "prob_floor": "prob_floor",
    "redraws": "degenerate_redraws",
}


def _manifest(args, command, **extra):
    info = {
        "command": command,
        "argv": [str(a) for a in getattr(args, "_argv", [])],
        "version": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
        "seed": getattr(args, "seed", None),
    }
    info.update(extra)
    return info


def _fit_config(args, dims):
    cfg = {}
    if args.config:
        cfg.update(load_config_file(args.config))
    for flag, name in FIT_FLAGS.items():
        val = getattr(args, flag, None)
        if val is not None:
            cfg[name] = val
    if dims is not None:
        cfg["subspace_dims"] = dims
    if args.seed is not None:
        cfg["rng_seed"] = args.seed
    cfg.pop("split_fraction", None)
    return FitConfig.from_dict(cfg)


def _add_fit_flags(p):
    p.add_argument("--rounds", type=int, help="annealed L-BFGS rounds (30)")
    p.add_argument("--gamma-mult", type=float, help="penalty multiplier per round (0.9)")
    p.add_argument("--sigma-frac", type=float, help="bandwidth fraction of max distance (0.05)")
    p.add_argument("--restarts", type=int, help="random restarts (3)")
    p.add_argument("--max-iters", type=int, help="L-BFGS iterations per round (100)")
    p.add_argument("--memory", type=int, help="L-BFGS history length (10)")
    p.add_argument("--grad-tol", type=float, help="gradient infinity-norm tolerance (1e-6)")
    p.add_argument("--init-ratio", type=float,
                   help="initial median projected squared distance in units of sigma^2 (16)")
    p.add_argument("--prob-floor", type=float, help="KL probability floor (1e-12)")
    p.add_argument("--redraws", type=int,
                   help="spare random starts for restarts that collapse to uniform neighborhoods (6)")
    p.add_argument("--config", help="JSON file of fit settings; flags take precedence")


def _load_views(paths):
    return validate_dataset([load_view_csv(p) for p in paths])


def cmd_fit(args):
    data = _load_views(args.views)
    cfg = _fit_config(args, args.dims)
    split = args.split_fraction
    if split is None and args.config:
        split = load_config_file(args.config).get("split_fraction")
    split = 1.0 if split is None else split
    train, test = split_indices(data.n_samples, split, cfg.rng_seed)
    train_data = data.subset(train) if len(test) else data

    res = fit(train_data, cfg)
    with staged_output(args.out) as out:
        for v, m in enumerate(res.maps, start=1):
            atomic_write_text(out / f"map_{v}.csv", format_matrix_csv(m.weights))
        atomic_write_text(out / "trace.csv", trace_csv(res.restart_traces))
        if len(test):
            atomic_write_text(out / "train_index.csv", "".join(f"{i}\n" for i in train))
            atomic_write_text(out / "test_index.csv", "".join(f"{i}\n" for i in test))
        write_json(out / "manifest.json", _manifest(
            args, "fit", config=cfg.to_dict(), views=[str(p) for p in args.views],
            split_fraction=split, n_train=int(len(train)), n_test=int(len(test)),
            sigmas=res.sigmas, gamma_init=res.gamma_init,
            final_objective=res.final_objective, restart_index=res.restart_index,
            restart_objectives=res.restart_objectives, converged=res.converged))
    logger.info("fit: C=%.6g restart=%d converged=%s", res.final_objective,
                res.restart_index, res.converged)
    return 0


def cmd_cca(args):
    data = _load_views(args.views)
    if data.n_views != 2:
        raise NrdepError("cca needs exactly 2 views")
    res = cca_fit(data.views[0], data.views[1], n_components=args.dims, ridge=args.ridge)
    with staged_output(args.out) as out:
        atomic_write_text(out / "map_1.csv", format_matrix_csv(res.w1.weights))
        atomic_write_text(out / "map_2.csv", format_matrix_csv(res.w2.weights))
        atomic_write_text(out / "correlations.csv", format_matrix_csv(res.correlations[:, None]))
        write_json(out / "manifest.json", _manifest(
            args, "cca", views=[str(p) for p in args.views], n_components=args.dims,
            ridge=args.ridge, correlations=res.correlations))
    return 0


def cmd_eval(args):
    k_range = range(1, args.k_max + 1)
    if args.truth or args.retrieval:
        if not (args.truth and args.retrieval):
            raise NrdepError("--truth and --retrieval must be given together")
        rep = mean_precision_recall(load_view_csv(args.truth), load_view_csv(args.retrieval),
                                    args.k_truth, k_range)
        atomic_write_text(args.out, report_csv(rep))
        return 0

    if not (args.views and args.maps):
        raise NrdepError("give either --truth/--retrieval or --views/--maps")
    data = _load_views(args.views)
    maps = [LinearMap(load_view_csv(p)) for p in args.maps]
    if data.n_views != 2 or len(maps) != 2:
        raise NrdepError("eval with maps needs exactly 2 views and 2 maps")
    train, test = split_indices(data.n_samples, args.split_fraction, args.seed or 0)
    parts = {"train": train}
    if len(test):
        parts["test"] = test
    with staged_output(args.out) as out:
        for part, rows in parts.items():
            views = [v[rows] for v in data.views]
            subs = [m.transform(v) for m, v in zip(maps, views)]
            for name, rep in retrieval_curves(views, subs, args.k_truth, k_range).items():
                atomic_write_text(out / f"curves_{part}_{name}.csv", report_csv(rep))
        write_json(out / "manifest.json", _manifest(
            args, "eval", views=[str(p) for p in args.views], maps=[str(p) for p in args.maps],
            split_fraction=args.split_fraction, k_truth=args.k_truth, k_max=args.k_max))
    return 0


def _synth_spec(args, seed):
    spec = SyntheticSpec(rng_seed=seed)
    if args.groups is not None:
        spec = replace(spec, n_groups_per_dim=args.groups)
    if args.group_size is not None:
        spec = replace(spec, group_size=args.group_size)
    return spec


def cmd_gen(args):
    synth = generate(_synth_spec(args, args.seed))
    with staged_output(args.out) as out:
        for v, x in enumerate(synth.dataset.views, start=1):
            atomic_write_text(out / f"view{v}.csv", format_matrix_csv(x))
        atomic_write_text(out / "ground_truth.csv", format_matrix_csv(synth.ground_truth))
        write_json(out / "manifest.json", _manifest(args, "gen", spec=vars(synth.spec)))
    return 0


def cmd_table1(args):
    cfg = _fit_config(args, (1, 1))
    spec = _synth_spec(args, 0)

    def progress(i, m, c):
        logger.info("dataset %d: method %.3f, cca %.3f", i + 1, m, c)

    summary = table1_protocol(args.n, cfg, seed=args.seed, spec=spec, progress=progress)
    with staged_output(args.out) as out:
        lines = ["method,mean,std"] + [f"{m},{mu:.17g},{sd:.17g}" for m, mu, sd in summary.rows()]
        atomic_write_text(out / "summary.csv", "\n".join(lines) + "\n")
        rows = ["dataset,seed,method_score,cca_score"]
        for i, (s, m, c) in enumerate(zip(summary.seeds, summary.method_scores,
                                          summary.cca_scores)):
            rows.append(f"{i},{s},{m:.17g},{c:.17g}")
        atomic_write_text(out / "scores.csv", "\n".join(rows) + "\n")
        write_json(out / "manifest.json", _manifest(
            args, "table1", n_datasets=args.n, config=cfg.to_dict(), spec=vars(spec),
            method=summary.method, cca=summary.cca))
    for m, mu, sd in summary.rows():
        print(f"{m}: mean {mu:.3f} std {sd:.3f}")
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=1,
                        help="cap on BLAS threads (default 1, reproducible)")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="nrdep", description=(
        "Dependent subspaces of paired views by cross-view neighbor retrieval."))
    parser.add_argument("--version", action="version", version=f"nrdep {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", parents=[common], help="fit dependent subspaces")
    p.add_argument("--views", nargs="+", required=True, metavar="CSV")
    p.add_argument("--dims", nargs="+", type=int, required=True, metavar="K")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--split-fraction", type=float,
                   help="fraction of rows used for fitting (default 1)")
    _add_fit_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("cca", parents=[common], help="fit the CCA baseline")
    p.add_argument("--views", nargs=2, required=True, metavar="CSV")
    p.add_argument("--dims", type=int, required=True, metavar="K")
    p.add_argument("--ridge", type=float, default=None)
    p.add_argument("--out", required=True, metavar="DIR")
    p.set_defaults(func=cmd_cca)

    p = sub.add_parser("eval", parents=[common], help="mean precision / mean recall curves")
    p.add_argument("--truth", metavar="CSV")
    p.add_argument("--retrieval", metavar="CSV")
    p.add_argument("--views", nargs=2, metavar="CSV")
    p.add_argument("--maps", nargs=2, metavar="CSV")
    p.add_argument("--split-fraction", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--k-truth", type=int, default=5)
    p.add_argument("--k-max", type=int, default=10)
    p.add_argument("--out", required=True, help="CSV file (truth/retrieval) or directory")
    p.set_defaults(func=cmd_eval)

    for name, helptext in [("gen", "write a synthetic dataset"),
                           ("table1", "repeat the synthetic recovery benchmark")]:
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--out", required=True, metavar="DIR")
        p.add_argument("--groups", type=int, help="groups per dimension (20)")
        p.add_argument("--group-size", type=int, help="points per group (50)")
        if name == "table1":
            p.add_argument("--n", type=int, default=20, help="number of datasets")
            _add_fit_flags(p)
            p.set_defaults(func=cmd_table1)
        else:
            p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args._argv = argv
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        with threadpool_limits(limits=args.threads):
            return args.func(args)
    except (NrdepError, OSError, ValueError) as e:
        print(f"nrdep {args.command}: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
