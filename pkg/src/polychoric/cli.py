"""Command-line interface.

Four subcommands over CSV inputs:

* ``estimate``  -- polychoric correlation of one item pair (table or raw
  two-column data) by any or all of: sample correlation, two-step, ML,
  and the robust method;
* ``residuals`` -- fitted cell probabilities and Pearson residuals with a
  misfit-cell shortlist;
* ``matrix``    -- pairwise correlation matrix of a multi-item dataset;
* ``simulate``  -- Monte Carlo study driver from a JSON study config.

Input formats: ``table`` is a K_X x K_Y grid of counts (optional header
row), ``raw`` is one header row of item names then one row of integer
category codes per respondent, with missing responses empty or ``NA``.
``--format auto`` (default) treats a non-numeric first row as raw data.

Reports are JSON (default) or CSV; floats are printed with 6 significant
digits unless ``--full-precision`` is given.  Every JSON report embeds
``schema_version`` (see :mod:`polychoric.schemas`).  Exit codes: 0 on
success, 1 for input or configuration problems, 2 for numerical failure.
"""

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import estimation, inference, model, simulation
from .errors import (
    CodeError,
    ConfigError,
    DomainError,
    ParseError,
    PolychoricError,
)
from .estimation import DiscrepancyConfig, FitOptions
from .model import ContingencyTable
from .pairwise import MISSING, OrdinalDataset, fit_matrix, pairwise_table
from .schemas import SCHEMA_VERSION
from .simulation import (
    BivariateNormalComponent,
    IndependentGumbelComponent,
    MixtureSpec,
    run_study,
)

__all__ = ["main", "ingest", "write_table"]

_INPUT_ERRORS = (ParseError, CodeError, ConfigError, DomainError, FileNotFoundError, IsADirectoryError)


def _verbose():
    return os.environ.get("POLYCHORIC_VERBOSE", "") not in ("", "0")


def _read_rows(path):
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            return [row for row in csv.reader(fh)]
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _is_number(token):
    try:
        float(token)
        return True
    except ValueError:
        return False


_NA_CODE = -1  # internal pre-normalization sentinel; real codes may be 0


def _parse_code(token, line_no):
    token = token.strip()
    if token == "" or token.upper() == "NA":
        return _NA_CODE
    try:
        value = float(token)
    except ValueError:
        raise CodeError(f"line {line_no}: non-integer category code {token!r}") from None
    if value != int(value):
        raise CodeError(f"line {line_no}: non-integer category code {token!r}")
    code = int(value)
    if code < 0:
        raise CodeError(f"line {line_no}: negative category code {code}")
    return code


def _normalize_codes(raw, names):
    """Shift each item's codes to 1..K, keeping interior gaps as empty levels.

    Observed-but-unlabeled categories are never re-indexed away: a code set
    like {1, 2, 4} becomes 4 levels with level 3 empty (flagged).
    Returns (codes, n_levels, label_offsets, warnings).
    """
    codes = raw.copy()
    levels = []
    offsets = []
    warnings = []
    for j, name in enumerate(names):
        observed_mask = codes[:, j] != _NA_CODE
        observed = codes[observed_mask, j]
        if observed.size == 0:
            raise CodeError(f"item {name!r} has no observed responses")
        lo = int(observed.min())
        hi = int(observed.max())
        offset = lo - 1
        codes[observed_mask, j] -= offset
        k = hi - lo + 1
        levels.append(k)
        offsets.append(offset)
        present = np.unique(observed - offset)
        if present.size < k:
            missing_levels = sorted(set(range(1, k + 1)) - set(present.tolist()))
            warnings.append(
                f"item {name!r}: empty interior categor{'ies' if len(missing_levels) > 1 else 'y'} "
                f"{missing_levels} (kept, not re-indexed; fitting will fail on them)"
            )
        if k < 2:
            raise CodeError(f"item {name!r} has a single observed category")
    codes[codes == _NA_CODE] = MISSING
    return codes, levels, offsets, warnings


def ingest(path, fmt="auto"):
    """Read a CSV file into a ContingencyTable or OrdinalDataset.

    Returns ``(data, warnings)``.  ``fmt`` is ``"table"``, ``"raw"``, or
    ``"auto"`` (raw when the first row is non-numeric).
    """
    rows = [(i + 1, row) for i, row in enumerate(_read_rows(path)) if any(t.strip() for t in row)]
    if not rows:
        raise ParseError(f"{path}: no data rows")
    first = rows[0][1]
    if fmt == "auto":
        fmt = "raw" if any(not _is_number(t) for t in first if t.strip()) else "table"
    if fmt == "table":
        return _ingest_table(rows, path), []
    if fmt == "raw":
        return _ingest_raw(rows, path)
    raise ConfigError(f"unknown input format {fmt!r}")


def _ingest_table(rows, path):
    start = 0
    if any(not _is_number(t) for t in rows[0][1] if t.strip()):
        start = 1  # header row of category labels
        if len(rows) < 2:
            raise ParseError(f"{path}: header but no data rows")
    width = len(rows[start][1])
    counts = []
    for line_no, row in rows[start:]:
        if len(row) != width:
            raise ParseError(f"{path}: line {line_no}: expected {width} fields, got {len(row)}")
        parsed = []
        for token in row:
            token = token.strip()
            if not _is_number(token):
                raise CodeError(f"{path}: line {line_no}: non-numeric count {token!r}")
            value = float(token)
            if value != int(value) or value < 0:
                raise CodeError(f"{path}: line {line_no}: counts must be nonnegative integers, got {token!r}")
            parsed.append(int(value))
        counts.append(parsed)
    counts = np.asarray(counts, dtype=np.int64)
    if counts.shape[0] < 2 or counts.shape[1] < 2:
        raise ParseError(f"{path}: a contingency table needs at least 2 rows and 2 columns")
    return ContingencyTable(counts=counts)


def _ingest_raw(rows, path):
    header_no, header = rows[0]
    names = [t.strip() for t in header]
    if any(not n for n in names):
        raise ParseError(f"{path}: line {header_no}: empty item name in header")
    if len(names) < 2:
        raise ParseError(f"{path}: raw data needs at least 2 items")
    width = len(names)
    parsed = []
    for line_no, row in rows[1:]:
        if len(row) != width:
            raise ParseError(f"{path}: line {line_no}: expected {width} fields, got {len(row)}")
        parsed.append([_parse_code(t, line_no) for t in row])
    if not parsed:
        raise ParseError(f"{path}: no respondent rows")
    raw = np.asarray(parsed, dtype=np.int64)
    codes, levels, offsets, warnings = _normalize_codes(raw, names)
    data = OrdinalDataset(codes=codes, item_names=tuple(names), n_levels=tuple(levels))
    return data, warnings


def write_table(table, path):
    """Write a contingency table as a plain CSV count grid."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for row in table.counts:
            writer.writerow([int(v) for v in row])


def _parse_c(text):
    if text.lower() in ("inf", "+inf", "infinity"):
        return math.inf
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"--c must be a number or 'inf', got {text!r}") from None
    return value


# ---------------------------------------------------------------------------
# number formatting / JSON emission

def _round6(x):
    return float(f"{x:.6g}")


def _jsonable(obj, full):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v, full) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v, full) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist(), full)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x if full else _round6(x)
    return obj


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_report(report, args, csv_rows=None):
    if getattr(args, "csv", False):
        buf = io.StringIO()
        writer = csv.writer(buf)
        for row in csv_rows or []:
            writer.writerow(["" if v is None else v for v in _jsonable(list(row), args.full_precision)])
        _emit(buf.getvalue(), args.out)
    else:
        _emit(json.dumps(_jsonable(report, args.full_precision), indent=2) + "\n", args.out)


# ---------------------------------------------------------------------------
# estimate

_ALL_METHODS = ("sample", "twostep", "ml", "robust")


def _pair_table_from_input(args):
    data, warnings = ingest(args.input, args.format)
    if isinstance(data, OrdinalDataset):
        if data.q != 2:
            raise ConfigError(f"{args.input}: pair estimation needs exactly 2 items, found {data.q}")
        table = pairwise_table(data, 0, 1)
    else:
        table = data
    return table, warnings


def _ci_dict(estimate, se, level):
    if se is None or not np.isfinite(se):
        return None
    ci = inference.confidence_interval(estimate, se, level)
    clipped, changed = ci.clipped()
    return {
        "lower": ci.lower, "upper": ci.upper, "level": ci.level,
        "clipped_lower": clipped.lower, "clipped_upper": clipped.upper,
        "clipped": changed,
    }


def _run_method(method, table, cfg, opts):
    if method == "twostep":
        return estimation.fit_twostep(table)
    if method == "ml":
        return estimation.fit(table, estimation.ML_CONFIG, opts)
    return estimation.fit(table, cfg, opts)


def _entry_from_result(result, level):
    theta = result.theta_hat
    se = result.std_errors
    return {
        "method": result.method,
        "c": result.c_used,
        "rho": theta.rho,
        "a": theta.a.tolist(),
        "b": theta.b.tolist(),
        "std_errors": None if se is None else {
            "rho": se[0],
            "a": se[1:theta.k_x].tolist(),
            "b": se[theta.k_x:].tolist(),
        },
        "rho_ci": _ci_dict(theta.rho, result.se_rho, level),
        "loss": result.loss_value,
        "converged": result.converged,
        "warnings": list(result.instability),
        "n": result.n,
    }


def _method_entry(method, table, cfg, opts, level):
    if method == "sample":
        r, se = estimation.pearson_sample_correlation(table)
        return {
            "method": "sample", "c": None, "rho": r, "a": None, "b": None,
            "std_errors": {"rho": se, "a": None, "b": None},
            "rho_ci": _ci_dict(r, se, level),
            "loss": None, "converged": None, "warnings": [], "n": table.n,
        }
    return _entry_from_result(_run_method(method, table, cfg, opts), level)


def cmd_estimate(args):
    table, warnings = _pair_table_from_input(args)
    cfg = DiscrepancyConfig(c=args.c)
    opts = FitOptions()
    level = 1.0 - args.alpha
    methods = _ALL_METHODS if args.method == "all" else (args.method,)
    results = [_method_entry(m, table, cfg, opts, level) for m in methods]
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "estimate",
        "input": args.input,
        "n": table.n,
        "alpha": args.alpha,
        "ingest_warnings": warnings,
        "table": table.counts.tolist(),
        "results": results,
    }
    rows = [("method", "parameter", "estimate", "std_error", "ci_lower", "ci_upper")]
    for entry in results:
        se = entry["std_errors"] or {}
        ci = entry["rho_ci"] or {}
        rows.append((entry["method"], "rho", entry["rho"], se.get("rho"),
                     ci.get("lower"), ci.get("upper")))
        for group in ("a", "b"):
            values = entry.get(group) or []
            ses = (se.get(group) or [None] * len(values))
            for i, value in enumerate(values):
                rows.append((entry["method"], f"{group}{i + 1}", value, ses[i], None, None))
    _emit_report(report, args, rows)
    return 0


# ---------------------------------------------------------------------------
# residuals

def cmd_residuals(args):
    table, warnings = _pair_table_from_input(args)
    cfg = DiscrepancyConfig(c=args.c)
    opts = FitOptions()
    level = 1.0 - args.alpha
    method = "robust" if args.method in ("all", "robust") else args.method
    result = _run_method(method, table, cfg, opts)
    entry = _entry_from_result(result, level)
    theta = result.theta_hat
    f_grid = model.empirical_frequencies(table)
    p_grid = model.cell_probs(theta)
    residuals = inference.pearson_residuals(table, theta)
    flagged = inference.flag_misfit_cells(residuals, threshold=args.flag_threshold)
    floored_cells = [
        [x + 1, y + 1]
        for x in range(residuals.k_x)
        for y in range(residuals.k_y)
        if math.isinf(residuals.values[x, y])
    ]
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "residuals",
        "input": args.input,
        "n": table.n,
        "method": method,
        "flag_threshold": args.flag_threshold,
        "ingest_warnings": warnings,
        "estimate": entry,
        "empirical_frequencies": f_grid.values.tolist(),
        "model_probabilities": p_grid.values.tolist(),
        "pearson_residuals": residuals.floored_values.tolist(),
        "floored_cells": floored_cells,
        "flagged_cells": [{"x": x, "y": y, "pearson_residual": pr} for x, y, pr in flagged],
    }
    rows = [("grid", "x", "y", "value")]
    for name, grid in (("empirical_frequency", f_grid.values),
                       ("model_probability", p_grid.values),
                       ("pearson_residual", residuals.floored_values)):
        for x in range(grid.shape[0]):
            for y in range(grid.shape[1]):
                rows.append((name, x + 1, y + 1, grid[x, y]))
    _emit_report(report, args, rows)
    return 0


# ---------------------------------------------------------------------------
# matrix

def cmd_matrix(args):
    data, warnings = ingest(args.input, args.format)
    if isinstance(data, ContingencyTable):
        raise ConfigError("matrix estimation needs raw respondent data, not a contingency table")
    cfg = DiscrepancyConfig(c=args.c)
    opts = FitOptions()
    methods = ("ml", "robust") if args.method == "all" else ({"twostep": "two-step"}.get(args.method, args.method),)
    results = []
    by_method = {}
    for method in methods:
        res = fit_matrix(data, cfg=cfg, opts=opts, method=method)
        by_method[method] = res
        results.append({
            "method": method,
            "estimates": res.estimates.tolist(),
            "std_errors": res.std_errors.tolist(),
            "pair_n": res.pair_n.tolist(),
            "min_eigenvalue": res.min_eigenvalue,
            "warnings": {"-".join(map(str, k)): v for k, v in res.warnings.items()},
            "failures": {f"{i}-{j}": msg for (i, j), msg in res.failures.items()},
        })
    difference = None
    if args.method == "all":
        difference = (np.abs(by_method["robust"].estimates) - np.abs(by_method["ml"].estimates))
        np.fill_diagonal(difference, 0.0)
        difference = difference.tolist()
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "matrix",
        "input": args.input,
        "items": list(data.item_names),
        "n": data.n,
        "ingest_warnings": warnings,
        "results": results,
        "difference_matrix": difference,
    }
    rows = [("method", "item_row", "item_col", "estimate", "std_error", "pair_n")]
    for method in methods:
        res = by_method[method]
        for i in range(data.q):
            for j in range(i + 1, data.q):
                rows.append((method, data.item_names[i], data.item_names[j],
                             res.estimates[i, j], res.std_errors[i, j], int(res.pair_n[i, j])))
    _emit_report(report, args, rows)
    return 0


# ---------------------------------------------------------------------------
# simulate

_CONFIG_KEYS = {"design", "misspecifying", "epsilon", "n", "replications",
                "methods", "alpha", "seed", "c"}


def _load_study_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            config = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read study config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigError(f"{path}: study config must be a JSON object")
    for key in config:
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown study config key {key!r}")
    for key in ("design", "epsilon", "n", "replications"):
        if key not in config:
            raise ConfigError(f"missing study config key {key!r}")
    return config


def _component_from_config(cfg_entry):
    if cfg_entry is None:
        return None
    kind = cfg_entry.get("kind", "none")
    params = {k: v for k, v in cfg_entry.items() if k != "kind"}
    allowed = {
        "none": set(),
        "bivariate-normal": {"mean", "variances", "covariance"},
        "independent-gumbel": {"location", "scale"},
    }
    if kind not in allowed:
        raise ConfigError(f"misspecifying: unknown kind {kind!r}")
    unknown = set(params) - allowed[kind]
    if unknown:
        raise ConfigError(f"misspecifying: unknown entries {sorted(unknown)}")
    try:
        if kind == "none":
            return None
        if kind == "bivariate-normal":
            return BivariateNormalComponent(
                mean=tuple(params.get("mean", (2.0, -2.0))),
                variances=tuple(params.get("variances", (0.2, 0.2))),
                covariance=float(params.get("covariance", 0.0)),
            )
        return IndependentGumbelComponent(
            location=float(params.get("location", 0.0)),
            scale=float(params.get("scale", 3.0)),
        )
    except (TypeError, ValueError, DomainError) as exc:
        raise ConfigError(f"misspecifying: {exc}") from exc


def cmd_simulate(args):
    config = _load_study_config(args.config)
    design = config["design"]
    if not isinstance(design, dict) or "rho" not in design:
        raise ConfigError("design: needs at least the key 'rho'")
    unknown = set(design) - {"rho", "thresholds_x", "thresholds_y"}
    if unknown:
        raise ConfigError(f"design: unknown entries {sorted(unknown)}")
    component = _component_from_config(config.get("misspecifying"))
    epsilons = config["epsilon"]
    if not isinstance(epsilons, list):
        epsilons = [epsilons]
    replications = args.reps if args.reps is not None else config["replications"]
    if not isinstance(replications, int) or replications < 1:
        raise ConfigError(f"replications: must be a positive integer, got {replications!r}")
    n = config["n"]
    if not isinstance(n, int) or n < 1:
        raise ConfigError(f"n: must be a positive integer, got {n!r}")
    methods = tuple(config.get("methods", ["ml", "robust", "sample"]))
    for m in methods:
        if m not in simulation.STUDY_METHODS:
            raise ConfigError(f"methods: unknown method {m!r}")
    alpha = float(config.get("alpha", 0.05))
    if not (0.0 < alpha < 1.0):
        raise ConfigError(f"alpha: must be in (0, 1), got {alpha}")
    seed = args.seed if args.seed is not None else int(config.get("seed", 0))
    c = float(config.get("c", 0.6))
    studies = []
    for i, eps in enumerate(epsilons):
        try:
            spec = MixtureSpec(
                epsilon=float(eps),
                rho_star=float(design["rho"]),
                thresholds_x=np.asarray(design.get("thresholds_x", [-1.5, -0.5, 0.5, 1.5]), dtype=float),
                thresholds_y=np.asarray(design.get("thresholds_y", design.get("thresholds_x", [-1.5, -0.5, 0.5, 1.5])), dtype=float),
                misspecifying=component if float(eps) > 0 else None,
            )
        except DomainError as exc:
            raise ConfigError(f"epsilon[{i}]: {exc}") from exc
        report = run_study(spec, n=n, replications=replications, methods=methods,
                           alpha=alpha, seed=seed, cfg=DiscrepancyConfig(c=c))
        studies.append(report.to_dict())
        if _verbose():
            print(f"epsilon={eps}: done", file=sys.stderr)
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "simulate",
        "config": args.config,
        "seed": seed,
        "studies": studies,
    }
    rows = [("epsilon", "method", "mean_estimate", "mean_bias", "std_dev",
             "coverage", "mean_ci_length", "n_failed", "replications_used")]
    for study in studies:
        for row in study["rows"]:
            rows.append((study["epsilon"], row["method"], row["mean_estimate"],
                         row["mean_bias"], row["std_dev"], row["coverage"],
                         row["mean_ci_length"], row["n_failed"], row["replications_used"]))
    _emit_report(report, args, rows)
    return 0


# ---------------------------------------------------------------------------
# argument parsing / dispatch

def _add_io_args(p, needs_input=True):
    if needs_input:
        p.add_argument("--input", required=True, help="input CSV file")
        p.add_argument("--format", choices=("auto", "raw", "table"), default="auto",
                       help="input layout (default: auto-detect)")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--json", dest="csv", action="store_false", default=False,
                       help="JSON report (default)")
    group.add_argument("--csv", dest="csv", action="store_true", help="CSV report")
    p.add_argument("--full-precision", action="store_true",
                   help="print full float precision instead of 6 significant digits")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="polychoric",
        description="Polychoric correlation estimation with a misspecification-robust option.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="fit a single item pair")
    _add_io_args(p_est)
    p_est.add_argument("--c", type=_parse_c, default=0.6,
                       help="robustness tuning constant; 'inf' recovers ML (default 0.6)")
    p_est.add_argument("--alpha", type=float, default=0.05, help="CI significance level (default 0.05)")
    p_est.add_argument("--method", choices=("ml", "robust", "twostep", "all"), default="all")
    p_est.set_defaults(func=cmd_estimate)

    p_res = sub.add_parser("residuals", help="cell-level diagnostics of a fitted pair")
    _add_io_args(p_res)
    p_res.add_argument("--c", type=_parse_c, default=0.6)
    p_res.add_argument("--alpha", type=float, default=0.05)
    p_res.add_argument("--method", choices=("ml", "robust", "twostep", "all"), default="robust")
    p_res.add_argument("--flag-threshold", type=float, default=3.0,
                       help="report cells with Pearson residual above this (default 3)")
    p_res.set_defaults(func=cmd_residuals)

    p_mat = sub.add_parser("matrix", help="pairwise correlation matrix of a multi-item dataset")
    _add_io_args(p_mat)
    p_mat.add_argument("--c", type=_parse_c, default=0.6)
    p_mat.add_argument("--method", choices=("ml", "robust", "twostep", "all"), default="all")
    p_mat.set_defaults(func=cmd_matrix)

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo study from a config file")
    p_sim.add_argument("--config", required=True, help="JSON study configuration")
    p_sim.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_sim.add_argument("--reps", type=int, default=None, help="override the config replication count")
    _add_io_args(p_sim, needs_input=False)
    p_sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "alpha") and not (0.0 < args.alpha < 1.0):
        print(f"polychoric: alpha must be in (0, 1), got {args.alpha}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"polychoric: {exc}", file=sys.stderr)
        return 1
    except PolychoricError as exc:
        print(f"polychoric: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
