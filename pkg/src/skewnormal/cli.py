"""
Command-line interface.

Results go to stdout as JSON or CSV; diagnostics go to stderr. Exit codes:
0 success, 2 malformed input, 3 boundary fit, 4 fit failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import discrim, diagnostics, fit_mv, fit_uv, param, sample, transform

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BOUNDARY = 3
EXIT_FAILURE = 4


class InputError(Exception):
    """Malformed command-line input or file."""


def read_csv(path):
    """Header names and the rows of a comma-separated file."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    if not rows:
        raise InputError(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    body = [r for r in rows[1:] if r]
    if any(len(r) != len(header) for r in body):
        raise InputError(f"{path} is not rectangular")
    return header, body


def numeric_columns(header, body, names):
    idx = []
    for name in names:
        if name not in header:
            raise InputError(f"column {name!r} not found")
        idx.append(header.index(name))
    try:
        return np.array([[float(r[i]) for i in idx] for r in body], dtype=float).reshape(-1, len(idx))
    except ValueError as exc:
        raise InputError(f"non-numeric value: {exc}") from None


def split_names(s):
    return [c.strip() for c in s.split(",") if c.strip()] if s else []


def design(header, body, covariates):
    n = len(body)
    cols = [np.ones(n)]
    if covariates:
        cols.append(numeric_columns(header, body, covariates))
    return np.column_stack(cols)


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read JSON from {path}: {exc}") from None


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"{type(o).__name__} is not JSON serializable")


def emit_json(obj):
    # serialise fully before writing so a failure leaves stdout empty
    text = json.dumps(obj, indent=2, default=_json_default)
    sys.stdout.write(text + "\n")


def emit_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    sys.stdout.write(buf.getvalue())


def _status_code(convergence):
    if convergence == "converged":
        return EXIT_OK
    if convergence in ("boundary", "boundary_resolved"):
        return EXIT_BOUNDARY
    return EXIT_FAILURE


# -- subcommands -------------------------------------------------------------

def cmd_fit_uv(args):
    header, body = read_csv(args.data)
    y = numeric_columns(header, body, [args.response])[:, 0]
    data = fit_uv.RegressionData(y, design(header, body, split_names(args.covariates)))
    res = fit_uv.fit(data)
    if res.convergence == "boundary":
        print(f"boundary solution; resolving with drop = {args.drop}", file=sys.stderr)
        res = fit_uv.boundary_resolve(res, data, args.drop)
    out = res.to_dict()
    out["parametrization"] = args.param
    out["estimates"] = out[args.param]
    emit_json(out)
    return _status_code(res.convergence)


def cmd_fit_mv(args):
    header, body = read_csv(args.data)
    y = numeric_columns(header, body, split_names(args.responses))
    data = fit_mv.MvRegressionData(y, design(header, body, split_names(args.covariates)))
    opts = fit_mv.FitOptionsMv(drop=args.drop)
    res = fit_mv.fit_mv(data, opts)
    out = res.to_dict()
    out["report"] = diagnostics.fit_report(res, data)
    emit_json(out)
    return _status_code(res.convergence)


def cmd_sample(args):
    dp = param.params_from_dict(read_json(args.params))
    if args.n < 1:
        raise InputError("--n must be positive")
    draws = sample.rvs_sn_chunked(dp, args.n, args.seed, args.streams)
    names = [f"y{j + 1}" for j in range(dp.k)]
    emit_csv(names, draws.tolist())
    return EXIT_OK


def cmd_convert(args):
    dp = param.params_from_dict(read_json(args.params))
    emit_json(param.params_to_dict(dp, args.to))
    return EXIT_OK


def parse_given(s):
    pairs = {}
    for part in split_names(s):
        if "=" not in part:
            raise InputError(f"malformed --given entry {part!r}; expected j=value")
        j, v = part.split("=", 1)
        try:
            pairs[int(j)] = float(v)
        except ValueError:
            raise InputError(f"malformed --given entry {part!r}") from None
    if not pairs:
        raise InputError("--given is empty")
    return pairs


def cmd_conditional(args):
    dp = param.params_from_dict(read_json(args.params))
    given = parse_given(args.given)
    idx = list(given)
    law = transform.conditional_exact(dp, idx, [given[i] for i in idx])
    out = {
        "free_indices": list(law.free_indices),
        "xi2c": law.xi2c.tolist(),
        "Omega22_1": law.omega22_1.tolist(),
        "alpha2": law.alpha2.tolist(),
        "x0": law.x0,
        "x0_prime": law.x0_prime,
        "tau": law.tau.tolist(),
        "normalizer": law.normalizer,
        "mean": law.mean.tolist(),
        "variance": law.variance.tolist(),
    }
    if args.approx:
        ap = transform.conditional_sn_approx(law)
        out["approx"] = {
            "feasible": ap.feasible,
            "dp": param.params_to_dict(ap.dp) if ap.dp is not None else None,
            "matched_cumulant_error": ap.matched_cumulant_error.tolist(),
            "fallback_normal": param.params_to_dict(ap.fallback),
        }
    emit_json(out)
    return EXIT_OK


def cmd_classify(args):
    header, body = read_csv(args.data)
    y = numeric_columns(header, body, split_names(args.responses))
    if args.action == "train":
        if not args.label or args.label not in header:
            raise InputError("training needs --label naming a column")
        li = header.index(args.label)
        labels = np.array([r[li] for r in body])
        model, res, groups = discrim.train(y, labels)
        out = {"model": model.to_dict(), "groups": groups, "convergence": res.convergence}
        emit_json(out)
        return _status_code(res.convergence)
    if not args.model:
        raise InputError("prediction needs --model")
    saved = read_json(args.model)
    model = discrim.DiscrimModel.from_dict(saved["model"])
    groups = saved.get("groups", list(range(model.g)))
    rule = discrim.classify_likelihood if args.rule == "likelihood" else discrim.classify_fisher
    alloc = np.atleast_1d(rule(model, y))
    emit_csv(["row", "group"], [[i + 1, groups[int(a)]] for i, a in enumerate(alloc)])
    return EXIT_OK


def cmd_discrim_sim(args):
    cfg = discrim.Table1Config(n_rep=args.nrep, seed=args.seed)
    rows = discrim.table1_sweep(cfg)
    emit_csv(list(discrim.TABLE1_HEADER), [[f"{round(v, 4) + 0.0:.4f}" for v in r.as_tuple()] for r in rows])
    return EXIT_OK


def cmd_healy(args):
    dp = param.params_from_dict(read_json(args.params))
    header, body = read_csv(args.data)
    cols = split_names(args.columns) if args.columns else header[: dp.k]
    y = numeric_columns(header, body, cols)
    h = diagnostics.healy(dp, y)
    print(f"max abs deviation {h.max_abs_dev:.4f}", file=sys.stderr)
    emit_csv(["nominal", "observed"], h.rows(args.variant).tolist())
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="skewnormal", description="Skew-normal toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("fit-uv", help="fit a univariate SN regression")
    s.add_argument("--data", required=True)
    s.add_argument("--response", required=True)
    s.add_argument("--covariates", default="")
    s.add_argument("--param", choices=["cp", "dp"], default="cp")
    s.add_argument("--drop", type=float, default=2.0)
    s.set_defaults(func=cmd_fit_uv)

    s = sub.add_parser("fit-mv", help="fit a multivariate SN regression")
    s.add_argument("--data", required=True)
    s.add_argument("--responses", required=True)
    s.add_argument("--covariates", default="")
    s.add_argument("--drop", type=float, default=None)
    s.set_defaults(func=cmd_fit_mv)

    s = sub.add_parser("sample", help="draw SN variates as CSV")
    s.add_argument("--params", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--streams", type=int, default=1)
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("convert", help="convert parameter JSON")
    s.add_argument("--params", required=True)
    s.add_argument("--to", choices=["dp", "lambda_psi", "cp"], required=True)
    s.set_defaults(func=cmd_convert)

    s = sub.add_parser("conditional", help="conditional law given some components")
    s.add_argument("--params", required=True)
    s.add_argument("--given", required=True, help='0-based "j=v,..."')
    s.add_argument("--approx", action="store_true")
    s.set_defaults(func=cmd_conditional)

    s = sub.add_parser("classify", help="train or apply a discriminant model")
    s.add_argument("action", choices=["train", "predict"])
    s.add_argument("--data", required=True)
    s.add_argument("--responses", required=True)
    s.add_argument("--label")
    s.add_argument("--model")
    s.add_argument("--rule", choices=["likelihood", "fisher"], default="likelihood")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("discrim-sim", help="two-group misclassification table")
    s.add_argument("--nrep", type=int, default=100_000)
    s.add_argument("--seed", type=int, required=True)
    s.set_defaults(func=cmd_discrim_sim)

    s = sub.add_parser("healy", help="Healy plot data")
    s.add_argument("--params", required=True)
    s.add_argument("--data", required=True)
    s.add_argument("--columns", default="")
    s.add_argument("--variant", choices=["cdf", "qq"], default="cdf")
    s.set_defaults(func=cmd_healy)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError, KeyError, IndexError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except np.linalg.LinAlgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
