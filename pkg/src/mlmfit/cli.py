"""Command-line interface: ``mlmfit <subcommand> ...``.

Exit codes: 0 success, 2 input error, 3 numerical failure.
Every JSON artifact carries the tool version, the resolved configuration and
the seed; CSV and value files written with ``-o`` get a ``.meta.json`` sidecar
holding the same record. ``--deterministic`` drops the timestamp so reruns are
byte-identical.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .distributions import FAMILIES, MlmParams, degree_pmf, model_from_dict, model_params, model_sample
from .estimation import FitResult, fit_model
from .gof import ALL_FAMILIES, bootstrap_pvalue, compare_models, discretize
from .graph_io import ParseError, degree_histogram, iter_edges, load_histogram, save_histogram
from .tailprops import run_all_checks

THREADS_ENV = "MLMFIT_THREADS"
EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


class InputError(Exception):
    pass


class NumericalFailure(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    threads: int = 1
    format: str = "json"
    deterministic: bool = False
    options: dict = field(default_factory=dict)


def resolve_threads(value) -> int:
    """Thread count from a flag value, else $MLMFIT_THREADS, else 1; 'auto' means all CPUs."""
    if value is None:
        value = os.environ.get(THREADS_ENV, "1")
    if str(value).strip().lower() == "auto":
        return os.cpu_count() or 1
    try:
        n = int(value)
    except ValueError:
        raise InputError(f"thread count must be a positive integer or 'auto', got {value!r}") from None
    if n < 1:
        raise InputError(f"thread count must be positive, got {n}")
    return n


def _envelope(cfg: RunConfig) -> dict:
    env = {"tool": "mlmfit", "version": __version__, "command": cfg.command,
           "config": asdict(cfg), "seed": cfg.seed}
    if not cfg.deterministic:
        env["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    return env


def _clean(v):
    """JSON-safe copy: numpy scalars and arrays to Python, non-finite floats to strings."""
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, np.ndarray):
        return _clean(v.tolist())
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer, int)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        f = float(v)
        if math.isfinite(f):
            return f
        return "nan" if math.isnan(f) else ("inf" if f > 0 else "-inf")
    return v


def _dump_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2) + "\n"


def _emit(text: str, output: str | None):
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _write_sidecar(output: str | None, cfg: RunConfig, extra: dict):
    if output in (None, "-"):
        return
    meta = _envelope(cfg)
    meta.update(extra)
    Path(str(output) + ".meta.json").write_text(_dump_json(meta))


def _load_hist(path):
    try:
        return load_histogram(path)
    except FileNotFoundError:
        raise InputError(f"histogram file not found: {path}") from None
    except (ParseError, ValueError) as e:
        raise InputError(f"cannot read histogram {path}: {e}") from None


# ---------------------------------------------------------------------------
# fit JSON


def fit_to_dict(fr: FitResult) -> dict:
    ci = None
    if fr.intervals:
        ci = {k: [lo, hi] for k, (lo, hi) in fr.intervals.items()}
    return {
        "model": fr.family,
        "params": fr.estimates,
        "likelihood": fr.likelihood,
        "n": fr.n,
        "loglik": {"total": fr.loglik, "per_observation": fr.loglik_per_obs},
        "converged": fr.converged,
        "iterations": fr.iterations,
        "grad_norm": fr.grad_norm,
        "cv": fr.cv,
        "existence_ok": fr.existence_ok,
        "existence": ({"verdict": fr.existence.verdict, "message": fr.existence.message}
                      if fr.existence else None),
        "covariance": fr.covariance,
        "ci_level": fr.ci_level,
        "ci95": ci,
        "condition_number": fr.condition_number,
        "pseudo_inverse": fr.pseudo_inverse,
        "singular_information": fr.singular,
        "message": fr.message,
    }


def _parse_init(text):
    try:
        a, b, s = (float(v) for v in text.split(","))
        return MlmParams(a, b, s)
    except ValueError as e:
        raise InputError(f"--init expects alpha,beta,sigma: {e}") from None


def _fit(h, model, args) -> FitResult:
    opts = {}
    if model == "mlm":
        opts = {"restarts": args.restarts, "seed": args.seed, "tol": args.tol,
                "max_iter": args.max_iter}
        if args.init:
            opts["init"] = _parse_init(args.init)
    try:
        return fit_model(h.to_sample(), model, likelihood=args.likelihood, **opts)
    except (ArithmeticError, RuntimeError) as e:
        raise NumericalFailure(f"{model} fit failed: {e}") from None
    except ValueError as e:
        raise InputError(str(e)) from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_degrees(args, cfg) -> int:
    path = Path(args.input)
    if not path.exists():
        raise InputError(f"edge-list file not found: {path}")
    try:
        with open(path) as fh:
            h = degree_histogram(iter_edges(fh, str(path)), args.mode, args.dedup, args.drop_self_loops)
    except ParseError as e:
        raise InputError(f"parse error: {e}") from None
    except ValueError as e:
        raise InputError(str(e)) from None
    if args.output in (None, "-"):
        save_histogram(h, sys.stdout)
    else:
        save_histogram(h, args.output)
    summary = {"nodes_with_degree": h.n, "excluded_zero_degree": h.excluded_zero_degree,
               "nodes_total": h.n + h.excluded_zero_degree,
               "edges_counted": int(np.dot(h.degrees, h.counts)) // (2 if args.mode == "total" else 1)}
    _write_sidecar(args.output, cfg, {"summary": summary})
    print(f"nodes: {summary['nodes_total']} ({h.n} with degree >= 1, "
          f"{h.excluded_zero_degree} excluded with degree 0), unique degrees: {h.degrees.size}, "
          f"edges: {summary['edges_counted']}", file=sys.stderr)
    return EXIT_OK


def cmd_fit(args, cfg) -> int:
    h = _load_hist(args.histogram)
    fr = _fit(h, args.model, args)
    out = _envelope(cfg)
    out.update(fit_to_dict(fr))
    _emit(_dump_json(out), args.output)
    if not fr.converged and not args.allow_nonconverged:
        print(f"error: {args.model} fit did not converge: {fr.message}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _parse_models(text):
    if text in (None, "all"):
        return list(ALL_FAMILIES)
    fams = [f.strip() for f in text.split(",") if f.strip()]
    bad = [f for f in fams if f not in FAMILIES]
    if bad or not fams:
        raise InputError(f"unknown model(s) {bad}; choose from {', '.join(ALL_FAMILIES)}")
    return fams


def cmd_compare(args, cfg) -> int:
    h = _load_hist(args.histogram)
    fams = _parse_models(args.models)
    opts = {"mlm": {"seed": args.seed}}
    report, _ = compare_models(h, fams, opts, likelihood=args.likelihood)
    rows = [asdict(r) for r in report.rows]
    if args.format == "json":
        out = _envelope(cfg)
        out["n"] = h.n
        out["rows"] = rows
        _emit(_dump_json(out), args.output)
    elif args.format == "csv":
        lines = ["family,kld,rmse,mae,loglik,converged,params,error"]
        for r in report.rows:
            params = ";".join(f"{k}={v:.10g}" for k, v in r.params.items())
            lines.append(f"{r.family},{r.kld:.10g},{r.rmse:.10g},{r.mae:.10g},{r.loglik:.10g},"
                         f"{str(r.converged).lower()},{params},{r.error.replace(',', ';')}")
        _emit("\n".join(lines) + "\n", args.output)
        _write_sidecar(args.output, cfg, {"n": h.n})
    else:
        lines = [f"{'family':<16}{'KLD':>12}{'RMSE':>12}{'MAE':>12}{'loglik':>16}  params"]
        for r in report.rows:
            if r.failed:
                lines.append(f"{r.family:<16}{'failed: ' + r.error}")
                continue
            params = ", ".join(f"{k}={v:.5g}" for k, v in r.params.items())
            flag = "" if r.converged else "  [not converged]"
            lines.append(f"{r.family:<16}{r.kld:>12.5g}{r.rmse:>12.5g}{r.mae:>12.5g}"
                         f"{r.loglik:>16.8g}  {params}{flag}")
        _emit("\n".join(lines) + "\n", args.output)
    if all(r.failed for r in report.rows):
        print("error: every family failed to fit", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_gof(args, cfg) -> int:
    if args.B < 99:
        raise InputError(f"-B must be at least 99, got {args.B}")
    h = _load_hist(args.histogram)
    fr = _fit(h, args.model, args)
    if not fr.converged or fr.model is None:
        print(f"error: base {args.model} fit did not converge: {fr.message}", file=sys.stderr)
        return EXIT_NUMERIC

    progress = None
    if args.progress:
        step = max(1, args.B // 100)

        def progress(done, total):
            if done % step == 0 or done == total:
                print(f"\rbootstrap {done}/{total}", end="", file=sys.stderr, flush=True)
                if done == total:
                    print(file=sys.stderr)
    try:
        rep = bootstrap_pvalue(h, fr, B=args.B, seed=args.seed, refit=not args.no_refit,
                               min_expected=args.min_expected, threads=cfg.threads, progress=progress)
    except RuntimeError as e:
        raise NumericalFailure(str(e)) from None
    except ValueError as e:
        raise InputError(str(e)) from None
    out = _envelope(cfg)
    out.update({"model": fr.family, "params": fr.estimates, "likelihood": fr.likelihood,
                "n": h.n, "statistic": rep.statistic, "p_value": rep.p_value, "B": rep.replicates,
                "bins": rep.bins, "refit": rep.refit_per_replicate, "exceedances": rep.exceedances,
                "redraws": rep.redraws, "min_expected": rep.min_expected})
    _emit(_dump_json(out), args.output)
    return EXIT_OK


def _parse_model_args(family, assignments):
    if family not in FAMILIES:
        raise InputError(f"unknown model {family!r}; choose from {', '.join(ALL_FAMILIES)}")
    params = {}
    for a in assignments:
        key, sep, val = a.partition("=")
        if not sep:
            raise InputError(f"parameter must look like name=value, got {a!r}")
        try:
            params[key.strip()] = float(val)
        except ValueError:
            raise InputError(f"parameter {key!r} is not a number: {val!r}") from None
    try:
        return model_from_dict({"family": family, "params": params})
    except TypeError as e:
        raise InputError(f"bad parameters for {family}: {e}") from None
    except ValueError as e:
        raise InputError(str(e)) from None


def cmd_sample(args, cfg) -> int:
    m = _parse_model_args(args.model, args.params)
    if args.n < 1:
        raise InputError("-n must be positive")
    rng = np.random.default_rng(args.seed)
    x = model_sample(m, args.n, rng)
    if args.discrete:
        text = "\n".join(map(str, discretize(x).tolist()))
    else:
        text = "\n".join(repr(float(v)) for v in x.tolist())
    _emit(text + "\n", args.output)
    _write_sidecar(args.output, cfg, {"model": m.family, "params": model_params(m)})
    return EXIT_OK


def cmd_plotdata(args, cfg) -> int:
    h = _load_hist(args.histogram)
    cols, names = [], []
    for fp in args.fits:
        try:
            d = json.loads(Path(fp).read_text())
            m = model_from_dict({"family": d["model"], "params": d["params"]})
        except FileNotFoundError:
            raise InputError(f"fit file not found: {fp}") from None
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"cannot read fit JSON {fp}: {e}") from None
        fit_n = d.get("n")
        if fit_n is not None and int(round(float(fit_n))) != h.n:
            print(f"warning: {fp} was fit to n={fit_n}, histogram has n={h.n}; "
                  "predictions use the histogram n", file=sys.stderr)
        name = m.family
        k = 2
        while name in names:
            name = f"{m.family}_{k}"
            k += 1
        names.append(name)
        cols.append(h.n * np.asarray(degree_pmf(m, h.degrees.astype(float))))
    lines = [",".join(["degree", "observed_count"] + names)]
    for i, (d, c) in enumerate(zip(h.degrees.tolist(), h.counts.tolist())):
        lines.append(",".join([str(d), str(c)] + [f"{col[i]:.10g}" for col in cols]))
    _emit("\n".join(lines) + "\n", args.output)
    _write_sidecar(args.output, cfg, {"fits": list(args.fits), "columns": names})
    return EXIT_OK


def cmd_tailcheck(args, cfg) -> int:
    m = _parse_model_args("mlm", args.params)
    checks = run_all_checks(m, t=args.t, lam=args.lam, y=args.y, n=args.n, seed=args.seed)
    if args.format == "json":
        out = _envelope(cfg)
        out["params"] = model_params(m)
        out["checks"] = [c.to_dict() for c in checks]
        _emit(_dump_json(out), args.output)
    else:
        lines = [f"{'check':<20}{'theoretical':>16}{'final value':>18}{'error':>12}{'tol':>10}  verdict"]
        for c in checks:
            verdict = "inconclusive" if c.inconclusive else ("converged" if c.converged else "NOT converged")
            lines.append(f"{c.name:<20}{c.theoretical:>16.8g}{c.final_value:>18.10g}"
                         f"{c.final_rel_err:>12.3g}{c.tolerance:>10.3g}  {verdict}")
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _common(p, fmt_choices=("json",), default_fmt="json"):
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("-o", "--output", help="output path (default stdout)")
    p.add_argument("--format", choices=fmt_choices, default=default_fmt)
    p.add_argument("--deterministic", action="store_true", help="omit the timestamp field")


def _fit_flags(p):
    p.add_argument("--likelihood", choices=("discrete", "continuous"), default="discrete",
                   help="discrete: integer degrees as rounded draws (default); continuous: density")
    p.add_argument("--init", help="MLM start alpha,beta,sigma (default 1,0,1)")
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=500)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mlmfit", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"mlmfit {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("degrees", help="edge list -> degree histogram CSV")
    p.add_argument("input")
    p.add_argument("--mode", choices=("in", "out", "total"), default="total")
    p.add_argument("--dedup", action="store_true", help="count repeated edges once")
    p.add_argument("--drop-self-loops", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_degrees)

    p = sub.add_parser("fit", help="fit one model to a histogram")
    p.add_argument("histogram")
    p.add_argument("--model", choices=ALL_FAMILIES, default="mlm")
    p.add_argument("--allow-nonconverged", action="store_true")
    _fit_flags(p)
    _common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("compare", help="fit several models and rank by KLD")
    p.add_argument("histogram")
    p.add_argument("--models", default="all", help="'all' or a comma list of families")
    p.add_argument("--likelihood", choices=("discrete", "continuous"), default="discrete")
    _common(p, ("table", "csv", "json"), "table")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("gof", help="parametric-bootstrap chi-square goodness of fit")
    p.add_argument("histogram")
    p.add_argument("--model", choices=ALL_FAMILIES, default="mlm")
    p.add_argument("-B", type=int, default=1000, help="bootstrap replicates (>= 99)")
    p.add_argument("--no-refit", action="store_true", help="keep the fitted parameters in replicates")
    p.add_argument("--min-expected", type=float, default=5.0)
    p.add_argument("--threads", help=f"worker processes or 'auto' (default ${THREADS_ENV} or 1)")
    p.add_argument("--progress", action="store_true")
    _fit_flags(p)
    _common(p)
    p.set_defaults(func=cmd_gof)

    p = sub.add_parser("sample", help="draw values from a model, e.g. 'mlm alpha=2 beta=0 sigma=30'")
    p.add_argument("model")
    p.add_argument("params", nargs="*", metavar="name=value")
    p.add_argument("-n", type=int, default=1000)
    p.add_argument("--discrete", action="store_true", help="round to integer degrees (floor 1)")
    _common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("plotdata", help="observed and predicted counts per degree as CSV")
    p.add_argument("histogram")
    p.add_argument("fits", nargs="+", help="fit JSON files written by 'mlmfit fit'")
    _common(p)
    p.set_defaults(func=cmd_plotdata)

    p = sub.add_parser("tailcheck", help="numerical tail-limit checks for MLM parameters")
    p.add_argument("params", nargs="+", metavar="name=value", help="alpha=.. beta=.. sigma=..")
    p.add_argument("--t", type=float, default=2.0, help="regular-variation scale factor")
    p.add_argument("--lam", type=float, default=0.01, help="heavy-tail exponential rate")
    p.add_argument("--y", type=float, default=1.0, help="long-tail shift")
    p.add_argument("-n", type=int, default=1_000_000, help="Monte Carlo pairs for subexponentiality")
    _common(p, ("json", "table"), "json")
    p.set_defaults(func=cmd_tailcheck)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    skip = {"func", "command", "seed", "format", "deterministic", "threads"}
    try:
        threads = resolve_threads(getattr(args, "threads", None)) if args.command == "gof" else 1
        cfg = RunConfig(args.command, args.seed, threads, args.format, args.deterministic,
                        {k: v for k, v in vars(args).items() if k not in skip})
        return args.func(args, cfg)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalFailure as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
