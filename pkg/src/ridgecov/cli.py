"""Command-line front end: ``ridgecov {simulate,fit,grid,cv,eval,qda}``.

Exit codes: 0 success, 1 usage, 2 numeric or dimension error,
3 every candidate penalty failed.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import evaluate, gicf, linalg, penalty_bounds, selection, simulate
from .model import DataSet, PenaltyPair, SparsityGraph, center_columns, sums_of_squares

EXIT_USAGE, EXIT_NUMERIC, EXIT_ALL_FAILED = 1, 2, 3

DEFAULTS = {
    "lam": 0.0, "kappa": 0.0, "center": False, "seed": 0, "folds": 5,
    "grid_r": 10, "grid_s1": 10, "out": ".", "header": False, "n": 100,
    "max_outer": 500, "outer_tol": 1e-6, "max_inner": 200, "inner_tol": 1e-8,
    "lambda_zero": True, "refit": False, "zero_tol": 1e-12, "outer_folds": 5,
    "penalties": "both", "kappa_count": None, "kappa_ceiling": None,
}


class UsageError(Exception):
    pass


class DimensionError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- file I/O

def _is_number(text):
    try:
        float(text)
        return True
    except ValueError:
        return False


def read_matrix(path):
    """Comma-separated numeric matrix; a non-numeric first row is a header."""
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if rows and not all(_is_number(x) for x in rows[0]):
        rows = rows[1:]
    if not rows:
        raise ValueError(f"{path}: no numeric rows")
    return np.array([[float(x) for x in row] for row in rows])


def read_labeled(path):
    """Numeric features followed by a class label in the last column."""
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if rows and not all(_is_number(x) for x in rows[0][:-1]):
        rows = rows[1:]
    X = np.array([[float(x) for x in row[:-1]] for row in rows])
    return X, np.array([row[-1].strip() for row in rows])


def write_matrix(path, A, header=None):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    with open(path, "w", newline="") as fh:
        if header:
            fh.write(",".join(header) + "\n")
        for row in A:
            fh.write(",".join(format(x, ".17g") for x in row) + "\n")


def read_graph(path, p):
    """Edge list ``j k`` per line, 0-based; ``None`` means the complete graph."""
    if path is None:
        return SparsityGraph.complete(p)
    edges = set()
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            j, k = (int(tok) for tok in line.split())
            edges.add((j, k))
    return SparsityGraph(p, frozenset(edges))


def write_graph(path, G):
    lines = [f"# p={G.p}"] + [f"{j} {k}" for j, k in sorted(G.edges)]
    Path(path).write_text("\n".join(lines) + "\n")


def write_json(path, payload):
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_table(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(x if isinstance(x, str) else format(x, ".17g") for x in row)
                     + "\n")


# ---------------------------------------------------------------- helpers

def _config(args):
    return gicf.GicfConfig(max_outer_iterations=args.max_outer,
                           outer_tolerance=args.outer_tol,
                           max_inner_iterations=args.max_inner,
                           inner_tolerance=args.inner_tol)


def _require(args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required")


def _load_data(args):
    _require(args, "data")
    Y = DataSet(read_matrix(args.data))
    return center_columns(Y) if args.center else Y


def _out(args, name):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    target = out / name
    for attr in ("data", "graph", "estimate", "truth", "grid_file", "config"):
        src = getattr(args, attr, None)
        if src is not None and Path(src).resolve() == target.resolve():
            raise UsageError(f"output {target} would overwrite input --{attr}")
    return target


def fit_report(result, S, G):
    sigma = result.sigma_hat
    detected = SparsityGraph.from_support(sigma)
    return {
        "lambda": result.penalty.lam,
        "kappa": result.penalty.kappa,
        "objective_trace": [float(v) for v in result.objective_trace],
        "outer_iterations": result.outer_iterations,
        "converged": result.converged,
        "lambda_max": penalty_bounds.lambda_max(S, G, result.penalty.kappa),
        "diagonal_solution": len(detected) == 0,
        "edges": [list(e) for e in sorted(detected.edges)],
    }


# ---------------------------------------------------------------- commands

def cmd_simulate(args):
    _require(args, "p")
    if (args.bands is None) == (args.density is None):
        raise UsageError("give exactly one of --bands and --density")
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    try:
        spec = simulate.BandedSpec(args.p, bands=args.bands, target_density=args.density,
                                   seed=args.seed)
    except ValueError as exc:
        raise UsageError(f"--p/--bands/--density: {exc}") from exc
    truth = simulate.make_banded_sigma(spec)
    Y = simulate.sample_gaussian(truth.sigma, args.n, args.seed + 1)
    header = [f"V{j + 1}" for j in range(args.p)] if args.header else None
    write_matrix(_out(args, "data.csv"), Y.values, header)
    write_matrix(_out(args, "sigma_true.csv"), truth.sigma)
    write_graph(_out(args, "graph.edges"), truth.graph)
    write_json(_out(args, "simulate.json"), {
        "p": args.p, "n": args.n, "seed": args.seed, "bands": truth.bands,
        "diagonal": truth.diagonal, "density": truth.graph.density(),
        "edges": len(truth.graph), "condition_target_reached": truth.target_reached,
    })


def cmd_fit(args):
    Y = _load_data(args)
    if args.lam < 0 or args.kappa < 0:
        raise UsageError("--lambda and --kappa must be >= 0")
    S = sums_of_squares(Y)
    G = read_graph(args.graph, Y.p)
    try:
        result = gicf.fit(S, Y.n, G, PenaltyPair(args.lam, args.kappa), _config(args))
    except linalg.NotPositiveDefinite as exc:
        raise linalg.NotPositiveDefinite(
            f"{exc}; S is singular (n={Y.n}, p={Y.p}), rerun with --kappa > 0") from exc
    write_matrix(_out(args, "sigma_hat.csv"), result.sigma_hat)
    write_json(_out(args, "fit_report.json"), fit_report(result, S, G))


def _grid_from_args(args, S, G):
    if args.grid_file is not None:
        table = read_matrix(args.grid_file)
        return penalty_bounds.PenaltyGrid(
            tuple(dict.fromkeys(PenaltyPair(l, k) for l, k in table[:, :2])), (), ())
    if args.kappa_count is not None:
        _require(args, "kappa_ceiling")
        return penalty_bounds.kappa_path(args.kappa_ceiling, args.kappa_count, args.lam)
    if args.grid_r < 2 or args.grid_s1 < 1:
        raise UsageError("--grid-r must be >= 2 and --grid-s1 >= 1")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", penalty_bounds.DegenerateGridWarning)
        return penalty_bounds.build_grid(S, G, args.grid_r, args.grid_s1,
                                         include_lambda_zero=args.lambda_zero,
                                         kappa_ceiling=args.kappa_ceiling)


def cmd_grid(args):
    Y = _load_data(args)
    S = sums_of_squares(Y)
    G = read_graph(args.graph, Y.p)
    grid = _grid_from_args(args, S, G)
    if grid.degenerate:
        print("warning: sample covariance is diagonal on the graph; grid is (0, 0)",
              file=sys.stderr)
    write_table(_out(args, "grid.csv"), ["lambda", "kappa"],
                [(pt.lam, pt.kappa) for pt in grid])
    levels = []
    for lam in grid.lambda_levels:
        kmax = penalty_bounds.kappa_max(S, G, lam) if lam > 0 and not grid.degenerate else None
        levels.append({"lambda": lam, "kappa_max": kmax})
    write_json(_out(args, "grid_report.json"), {
        "lambda_max0": penalty_bounds.lambda_max(S, G, 0.0),
        "levels": levels,
        "kappa_counts": list(grid.per_lambda_kappa_counts),
        "points": len(grid),
        "degenerate": grid.degenerate,
    })


def cmd_cv(args):
    _require(args, "data")
    raw = DataSet(read_matrix(args.data))
    G = read_graph(args.graph, raw.p)
    S_all = sums_of_squares(center_columns(raw) if args.center else raw)
    grid = _grid_from_args(args, S_all, G)
    if not 2 <= args.folds <= raw.n:
        raise UsageError(f"--folds must lie in [2, {raw.n}]")
    plan = selection.make_folds(raw.n, args.folds, args.seed)
    result = selection.cross_validate(raw, G, grid, plan, _config(args), center=args.center)
    rows = [(pt.lam, pt.kappa, result.scores[pt],
             sum(1 for v in result.fold_scores[pt] if v == -np.inf))
            for pt in sorted(result.scores)]
    write_table(_out(args, "cv_scores.csv"), ["lambda", "kappa", "score", "failures"], rows)
    write_json(_out(args, "cv_best.json"), {
        "lambda": result.best.lam, "kappa": result.best.kappa,
        "score": result.scores[result.best], "folds": plan.M, "seed": args.seed,
        "fold_sizes": [int(np.sum(plan.assignments == m)) for m in range(plan.M)],
        "failures": result.per_fold_failures,
    })
    if args.refit:
        fitted = gicf.fit(S_all, raw.n, G, result.best, _config(args))
        write_matrix(_out(args, "sigma_hat.csv"), fitted.sigma_hat)
        write_json(_out(args, "fit_report.json"), fit_report(fitted, S_all, G))


def cmd_eval(args):
    _require(args, "estimate", "truth")
    est, truth = read_matrix(args.estimate), read_matrix(args.truth)
    if est.shape != truth.shape or est.shape[0] != est.shape[1]:
        raise DimensionError(f"estimate has shape {est.shape}, truth has shape {truth.shape}")
    p = est.shape[0]
    G_true = (read_graph(args.graph, p) if args.graph is not None
              else SparsityGraph.from_support(truth))
    conf = evaluate.edge_confusion(est, G_true, args.zero_tol)
    write_json(_out(args, "eval.json"), {
        "rmse": evaluate.rmse(est, truth),
        "entropy_loss": evaluate.entropy_loss(est, truth),
        "condition_number": linalg.condition_number(est),
        "f1": conf.f1, "tpr": conf.tpr, "tnr": conf.tnr, "ppv": conf.ppv,
        "tp": conf.tp, "fp": conf.fp, "tn": conf.tn, "fn": conf.fn,
        "density": SparsityGraph.from_support(est, args.zero_tol).density(),
    })


def cmd_qda(args):
    _require(args, "data")
    X, labels = read_labeled(args.data)
    classes = sorted(set(labels.tolist()))
    graphs = {c: read_graph(args.graph, X.shape[1]) for c in classes}
    for item in args.class_graph or []:
        label, _, path = item.partition("=")
        if label not in graphs:
            raise UsageError(f"--class-graph: unknown class {label!r}")
        graphs[label] = read_graph(path, X.shape[1])
    report = evaluate.qda_cross_validated_error(
        X, labels, graphs, mode=args.penalties, outer_folds=args.outer_folds,
        inner_folds=args.folds, r=args.grid_r, s1=args.grid_s1, seed=args.seed,
        config=_config(args))
    rows = []
    for m, err in enumerate(report.fold_errors):
        pens = report.penalties[m] or {}
        cells = [str(m), format(100 * err, ".17g"), str(report.fold_sizes[m]),
                 "failed" if m in report.failed_folds else "ok"]
        for c in classes:
            pen = pens.get(c)
            cells += ["" if pen is None else format(pen.lam, ".17g"),
                      "" if pen is None else format(pen.kappa, ".17g")]
        rows.append(cells)
    header = ["fold", "error_pct", "size", "status"]
    for c in classes:
        header += [f"lambda_{c}", f"kappa_{c}"]
    write_table(_out(args, "qda_folds.csv"), header, rows)
    write_json(_out(args, "qda_summary.json"), {
        "error_pct": report.error_rate, "mode": args.penalties,
        "outer_folds": args.outer_folds, "inner_folds": args.folds, "seed": args.seed,
        "failed_folds": report.failed_folds, "classes": classes,
    })


COMMANDS = {"simulate": cmd_simulate, "fit": cmd_fit, "grid": cmd_grid, "cv": cmd_cv,
            "eval": cmd_eval, "qda": cmd_qda}


def build_parser():
    shared = argparse.ArgumentParser(add_help=False)
    add = shared.add_argument
    add("--data")
    add("--graph")
    add("--lambda", dest="lam", type=float)
    add("--kappa", type=float)
    add("--center", action="store_const", const=True)
    add("--seed", type=int)
    add("--folds", type=int)
    add("--grid-r", type=int)
    add("--grid-s1", type=int)
    add("--out")
    add("--config")
    add("--header", action="store_const", const=True)
    add("--max-outer", type=int)
    add("--outer-tol", type=float)
    add("--max-inner", type=int)
    add("--inner-tol", type=float)

    parser = _Parser(prog="ridgecov",
                     description="Sparse covariance estimation with lasso and ridge penalties.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", parents=[shared], help="banded covariance and data")
    p.add_argument("--p", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--bands", type=int)
    p.add_argument("--density", type=float)

    sub.add_parser("fit", parents=[shared], help="penalized estimate at fixed penalties")

    for name, text in (("grid", "penalty grid"), ("cv", "cross-validated penalties")):
        p = sub.add_parser(name, parents=[shared], help=text)
        p.add_argument("--no-lambda-zero", dest="lambda_zero", action="store_const",
                       const=False)
        p.add_argument("--kappa-ceiling", type=float)
        p.add_argument("--kappa-count", type=int)
        p.add_argument("--grid-file")
        if name == "cv":
            p.add_argument("--refit", action="store_const", const=True)

    p = sub.add_parser("eval", parents=[shared], help="compare estimate with truth")
    p.add_argument("--estimate")
    p.add_argument("--truth")
    p.add_argument("--zero-tol", type=float)

    p = sub.add_parser("qda", parents=[shared], help="cross-validated QDA error")
    p.add_argument("--outer-folds", type=int)
    p.add_argument("--penalties", choices=evaluate.PENALTY_MODES)
    p.add_argument("--class-graph", action="append", metavar="LABEL=PATH")
    return parser


def parse_args(argv):
    """Parse flags; values from ``--config`` fill only the flags not given."""
    args = build_parser().parse_args(argv)
    if args.config is not None:
        try:
            from_file = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"--config: {exc}") from exc
        for key, value in from_file.items():
            key = {"lambda": "lam"}.get(key, key.replace("-", "_"))
            if getattr(args, key, None) is None:
                setattr(args, key, value)
    for key, value in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    for key in ("grid_file", "estimate", "truth", "p", "bands", "density", "class_graph"):
        if not hasattr(args, key):
            setattr(args, key, None)
    return args


def main(argv=None):
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return exc.code
    except UsageError as exc:
        print(f"ridgecov: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"ridgecov: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except selection.AllPairsFailed as exc:
        print(f"ridgecov: error: {exc}", file=sys.stderr)
        return EXIT_ALL_FAILED
    except (linalg.NotPositiveDefinite, gicf.DegenerateVariance, gicf.NonFiniteValue,
            DimensionError) as exc:
        print(f"ridgecov: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, ValueError) as exc:
        print(f"ridgecov: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
