"""Command-line surface: fitting, reports, samples, and plot-ready tables.

Every command prints one Report (JSON by default) to stdout or --out.
Exit codes: 0 success, 1 usage or data-file problem, 2 numerical failure.
"""

import argparse
import io
import json
import math
import sys
import warnings

from . import distribution as dist
from . import inference
from . import series
from .distribution import Params, Seed, SubModel
from .errors import (
    DataError,
    EmptyDatasetError,
    NonpositiveValueError,
    ParseError,
    Rgb1IweiError,
)
from .series import SeriesControl, StressStrengthPair

SCHEMA_VERSION = "1"

# commands whose report is a natural row table, projectable to csv
_CSV_COMMANDS = {"table", "ttt", "sample", "moments"}


def load_dataset(path, scale=1.0, label=""):
    """Read one observation per line; '#' comments and blank lines skipped.

    scale divides every value before validation, so a file in days with
    --scale 1000 is validated (and stored) in thousands of days.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}")
    values = []
    for number, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        parts = text.split()
        if len(parts) != 1:
            raise ParseError(f"expected one number, got {text!r}",
                             line_number=number)
        try:
            value = float(parts[0])
        except ValueError:
            raise ParseError(f"not a number: {parts[0]!r}",
                             line_number=number) from None
        if not math.isfinite(value):
            raise ParseError(f"not a finite number: {parts[0]!r}",
                             line_number=number)
        value /= scale
        if value <= 0.0:
            raise NonpositiveValueError(
                f"observation {value!r} is not positive", line_number=number)
        values.append(value)
    if not values:
        raise EmptyDatasetError(f"no observations in {path}")
    note = f"divided by {scale:g}" if scale != 1.0 else ""
    return inference.Dataset(values, label=label or str(path),
                             scale_note=note)


def _round_floats(obj):
    """Serialize every real with 10 significant digits (round-half-even);
    non-finite reals have no JSON form and become null."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, (int, str)) or obj is None:
        return obj
    if isinstance(obj, dict):
        return {key: _round_floats(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(value) for value in obj]
    value = float(obj)
    if not math.isfinite(value):
        return None
    return float(format(value, ".10g"))


def _fmt(value):
    value = float(value)
    if not math.isfinite(value):
        return ""
    return format(value, ".10g")


def _params_from(args, suffix=""):
    names = ("a", "b", "c", "gamma", "theta")
    return Params(*(float(getattr(args, name + suffix)) for name in names))


def _series_control(args):
    return SeriesControl(rel_tol=args.series_rel_tol,
                         max_terms_per_index=args.series_max_terms)


def _fit_config(args):
    return inference.FitConfig(n_starts=args.starts, seed=Seed(args.seed),
                               polish=args.polish)


def _fit_dict(result):
    p = result.params_hat
    return {
        "model": result.submodel.value,
        "params_hat": {"a": p.a, "b": p.b, "c": p.c, "gamma": p.gamma,
                       "theta": p.theta},
        "loglik": result.loglik,
        "aic": inference.aic(result),
        "score_at_hat": [float(v) for v in result.score_at_hat],
        "std_errors": [float(v) for v in result.std_errors],
        "observed_info": [[float(v) for v in row]
                          for row in result.observed_info],
        "cond_number": float(result.cond_number),
        "converged": result.converged,
        "n_iter": result.n_iter,
        "n_starts": result.n_starts,
    }


def _gof_dict(report):
    out = {"aic": report.aic, "ks_stat": report.ks_stat,
           "ks_pvalue": report.ks_pvalue}
    if report.lr_stat is not None:
        out["lr_stat"] = report.lr_stat
        out["lr_df"] = report.lr_df
        out["lr_pvalue"] = report.lr_pvalue
    return out


class _UsageError(Exception):
    pass


def _fit_with_compare(d, args):
    """Fit the chosen model, optionally the comparison model, and all the
    derived goodness-of-fit numbers."""
    cfg = _fit_config(args)
    main_sub = SubModel.from_name(args.model)
    result = inference.fit(d, main_sub, cfg)
    payload = {"n": d.n, "fit": _fit_dict(result)}
    compare = None
    if args.compare is not None:
        other_sub = SubModel.from_name(args.compare)
        if len(other_sub.free_names) >= len(main_sub.free_names):
            raise _UsageError(
                f"--compare model {args.compare!r} must have fewer free "
                f"parameters than --model {args.model!r}")
        compare = inference.fit(d, other_sub, cfg)
        lr_df = len(main_sub.free_names) - len(other_sub.free_names)
        lr_stat, lr_pvalue = inference.lr_test(result, compare, df=lr_df)
        ks_main = inference.ks_test(d, result.params_hat)
        ks_other = inference.ks_test(d, compare.params_hat)
        payload["comparison"] = {
            "model": [main_sub.value, other_sub.value],
            "loglik": [result.loglik, compare.loglik],
            "aic": [inference.aic(result), inference.aic(compare)],
            "ks_stat": [ks_main[0], ks_other[0]],
            "ks_pvalue": [ks_main[1], ks_other[1]],
            "lr_stat": lr_stat,
            "lr_df": lr_df,
            "lr_pvalue": lr_pvalue,
        }
    return result, compare, payload


def _cmd_fit(args):
    d = load_dataset(args.data, args.scale)
    _, _, payload = _fit_with_compare(d, args)
    return payload, [], None


def _cmd_gof(args):
    d = load_dataset(args.data, args.scale)
    result, compare, fit_payload = _fit_with_compare(d, args)
    ks_stat, ks_pvalue = inference.ks_test(d, result.params_hat)
    if compare is not None:
        comp = fit_payload["comparison"]
        report = inference.GofReport(aic=inference.aic(result),
                                     ks_stat=ks_stat, ks_pvalue=ks_pvalue,
                                     lr_stat=comp["lr_stat"],
                                     lr_df=comp["lr_df"],
                                     lr_pvalue=comp["lr_pvalue"])
    else:
        report = inference.GofReport(aic=inference.aic(result),
                                     ks_stat=ks_stat, ks_pvalue=ks_pvalue)
    payload = {"n": d.n, "model": result.submodel.value,
               "loglik": result.loglik, "gof": _gof_dict(report)}
    return payload, [], None


def _cmd_sample(args):
    if args.n < 1:
        raise _UsageError("--n must be at least 1")
    p = _params_from(args)
    draws = dist.sample(args.n, p, Seed(args.seed))
    payload = {"n": args.n, "seed": args.seed, "samples":
               [float(v) for v in draws]}
    rows = (["x"], [(v,) for v in draws])
    return payload, [], rows


def _cmd_quantile(args):
    if not 0.0 < args.q < 1.0:
        raise _UsageError("--q must lie strictly between 0 and 1")
    p = _params_from(args)
    value = float(dist.quantile(args.q, p))
    return {"q": args.q, "quantile": value}, [], None


def _cmd_moments(args):
    p = _params_from(args)
    control = _series_control(args)
    orders = _parse_orders(args.orders)
    out = []
    extra = []
    for r in orders:
        sv = series.raw_moment(r, p, control)
        out.append({"r": r, "value": sv.value})
        if sv.used_fallback:
            extra.append(f"FallbackQuadrature: raw moment r={r:g}")
    rows = (["r", "value"], [(m["r"], m["value"]) for m in out])
    return {"moments": out}, extra, rows


def _parse_orders(text):
    try:
        orders = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise _UsageError(f"--orders must be comma-separated numbers, "
                          f"got {text!r}") from None
    if not orders:
        raise _UsageError("--orders is empty")
    return orders


def _cmd_entropy(args):
    p = _params_from(args)
    control = _series_control(args)
    extra = []
    if args.rho is not None:
        sv = series.renyi_entropy(args.rho, p, control)
        payload = {"entropy": {"kind": "renyi", "rho": args.rho,
                               "value": sv.value}}
        if sv.used_fallback:
            extra.append(f"FallbackQuadrature: renyi entropy rho="
                         f"{args.rho:g}")
    else:
        sv = series.shannon_entropy(p, control)
        payload = {"entropy": {"kind": "shannon", "value": sv.value}}
        if sv.used_fallback:
            extra.append("FallbackQuadrature: shannon entropy")
    return payload, extra, None


def _cmd_reliability(args):
    strength = _params_from(args)
    stress_theta = args.theta if args.theta2 is None else args.theta2
    stress = Params(args.a2, args.b2, args.c2, args.gamma2, stress_theta)
    pair = StressStrengthPair(strength, stress)
    sv = series.reliability(pair, _series_control(args))
    extra = []
    if sv.used_fallback:
        extra.append("FallbackQuadrature: stress-strength reliability")
    payload = {"reliability": sv.value,
               "strength": {"a": strength.a, "b": strength.b,
                            "c": strength.c, "gamma": strength.gamma,
                            "theta": strength.theta},
               "stress": {"a": stress.a, "b": stress.b, "c": stress.c,
                          "gamma": stress.gamma, "theta": stress.theta}}
    return payload, extra, None


def _explicit_params(args):
    names = ("a", "b", "c", "gamma", "theta")
    given = [name for name in names
             if getattr(args, name) is not None]
    if given and len(given) != len(names):
        missing = ", ".join(f"--{n}" for n in names
                            if getattr(args, n) is None)
        raise _UsageError(f"give all five parameters or none ({missing} "
                          f"missing)")
    if not given:
        return None
    return Params(*(float(getattr(args, name)) for name in names))


def _cmd_ttt(args):
    d = load_dataset(args.data, args.scale)
    p = _explicit_params(args)
    extra = []
    payload = {"n": d.n}
    if p is None:
        result = inference.fit(d, SubModel.from_name(args.model),
                               _fit_config(args))
        p = result.params_hat
        payload["model"] = result.submodel.value
        payload["loglik"] = result.loglik
    payload["params"] = {"a": p.a, "b": p.b, "c": p.c, "gamma": p.gamma,
                         "theta": p.theta}
    empirical = inference.ttt_empirical(d)
    fitted = inference.ttt_fitted(p, grid_size=args.grid_size)
    if fitted.kind is inference.TTTKind.FITTED_TRUNCATED:
        extra.append("TruncatedTTT: infinite mean; fitted curve normalized "
                     "through quantile(1 - 1e-6)")
    payload["ttt"] = {
        "empirical": {"u": [float(v) for v in empirical.u_grid],
                      "phi": [float(v) for v in empirical.phi],
                      "kind": empirical.kind.value},
        "fitted": {"u": [float(v) for v in fitted.u_grid],
                   "phi": [float(v) for v in fitted.phi],
                   "kind": fitted.kind.value},
    }
    rows = (["curve", "u", "phi"],
            [("empirical", u, phi)
             for u, phi in zip(empirical.u_grid, empirical.phi)]
            + [("fitted", u, phi)
               for u, phi in zip(fitted.u_grid, fitted.phi)])
    return payload, extra, rows


def _cmd_table(args):
    p = _params_from(args)
    if not (args.x_min > 0.0 and args.x_max > args.x_min):
        raise _UsageError("need 0 < --x-min < --x-max")
    if args.count < 2:
        raise _UsageError("--count must be at least 2")
    import numpy as np

    xs = np.linspace(args.x_min, args.x_max, args.count)
    pdf = dist.pdf(xs, p)
    cdf = dist.cdf(xs, p)
    hazard = dist.hazard(xs, p)
    table = [{"x": float(x), "pdf": float(f), "cdf": float(big_f),
              "hazard": float(h)}
             for x, f, big_f, h in zip(xs, pdf, cdf, hazard)]
    rows = (["x", "pdf", "cdf", "hazard"],
            [(r["x"], r["pdf"], r["cdf"], r["hazard"]) for r in table])
    return {"table": table}, [], rows


_COMMANDS = {
    "fit": _cmd_fit,
    "gof": _cmd_gof,
    "sample": _cmd_sample,
    "quantile": _cmd_quantile,
    "moments": _cmd_moments,
    "entropy": _cmd_entropy,
    "reliability": _cmd_reliability,
    "ttt": _cmd_ttt,
    "table": _cmd_table,
}


def _add_param_flags(sub, default=1.0):
    for name in ("a", "b", "c", "gamma", "theta"):
        sub.add_argument(f"--{name}", type=float, default=default)


def _add_series_flags(sub):
    sub.add_argument("--series-rel-tol", type=float, default=1e-10)
    sub.add_argument("--series-max-terms", type=int, default=500)


def _add_data_flags(sub):
    sub.add_argument("--data", required=True, help="path to the data file")
    sub.add_argument("--scale", type=float, default=1.0,
                     help="divide every observation by this before use")


def _add_fit_flags(sub):
    sub.add_argument("--model", default="full",
                     choices=[m.value for m in SubModel])
    sub.add_argument("--starts", type=int, default=16)
    sub.add_argument("--polish", action="store_true")
    sub.add_argument("--compare", default=None,
                     choices=[m.value for m in SubModel])


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rgb1iwei",
        description="Reflected GB1 inverse Weibull lifetime toolkit")
    commands = parser.add_subparsers(dest="command", required=True)

    common = dict(format_choices=("json", "csv"))
    for name in _COMMANDS:
        sub = commands.add_parser(name)
        sub.add_argument("--format", default="json",
                         choices=common["format_choices"])
        sub.add_argument("--out", default=None,
                         help="write the report here instead of stdout")
        sub.add_argument("--seed", type=int, default=0)
        if name in ("fit", "gof", "ttt"):
            _add_data_flags(sub)
            _add_fit_flags(sub)
        if name == "sample":
            sub.add_argument("--n", type=int, required=True)
            _add_param_flags(sub)
        if name == "quantile":
            sub.add_argument("--q", type=float, required=True)
            _add_param_flags(sub)
        if name in ("moments", "entropy", "table"):
            _add_param_flags(sub)
            _add_series_flags(sub)
        if name == "moments":
            sub.add_argument("--orders", default="1,2")
        if name == "entropy":
            sub.add_argument("--rho", type=float, default=None)
        if name == "reliability":
            _add_param_flags(sub)
            _add_series_flags(sub)
            for flag in ("a2", "b2", "c2", "gamma2"):
                sub.add_argument(f"--{flag}", type=float, default=1.0)
            sub.add_argument("--theta2", type=float, default=None)
        if name == "ttt":
            # explicit parameters skip the fit
            for flag in ("a", "b", "c", "gamma", "theta"):
                sub.add_argument(f"--{flag}", type=float, default=None)
            sub.add_argument("--grid-size", type=int, default=101)
        if name == "table":
            sub.add_argument("--x-min", type=float, default=0.05)
            sub.add_argument("--x-max", type=float, default=5.0)
            sub.add_argument("--count", type=int, default=50)
    return parser


def _csv_text(rows):
    header, data = rows
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in data:
        buf.write(",".join(value if isinstance(value, str) else _fmt(value)
                           for value in row) + "\n")
    return buf.getvalue()


def _emit(text, out_path):
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def run(args):
    """Execute one parsed command; returns the process exit code."""
    if args.command in ("fit", "gof", "ttt") and not args.scale > 0.0:
        raise _UsageError("--scale must be positive")
    if args.format == "csv" and args.command not in _CSV_COMMANDS:
        raise _UsageError(
            f"--format csv applies only to table-shaped commands "
            f"({', '.join(sorted(_CSV_COMMANDS))})")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        payload, extra_warnings, rows = _COMMANDS[args.command](args)
    notes = []
    for item in caught:
        name = type(item.message).__name__
        if name.endswith("Warning"):
            name = name[:-len("Warning")]
        notes.append(f"{name}: {item.message}")
    notes.extend(extra_warnings)
    if args.format == "csv":
        _emit(_csv_text(rows), args.out)
        return 0
    report = {"schema_version": SCHEMA_VERSION, "command": args.command,
              "warnings": notes}
    report.update(payload)
    _emit(json.dumps(_round_floats(report), indent=2) + "\n", args.out)
    return 0


def _emit_error(args, exc, kind):
    report = {"schema_version": SCHEMA_VERSION, "command": args.command,
              "warnings": [],
              "error": {"type": type(exc).__name__, "message": str(exc)}}
    sys.stdout.write(json.dumps(report, indent=2) + "\n")
    sys.stderr.write(f"{kind}: {exc}\n")


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return run(args)
    except _UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    except DataError as exc:
        _emit_error(args, exc, "data error")
        return 1
    except Rgb1IweiError as exc:
        _emit_error(args, exc, "numerical error")
        return 2


if __name__ == "__main__":
    sys.exit(main())
