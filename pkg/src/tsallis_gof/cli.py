"""Command-line interface.

Reports go to stdout unless ``--out`` is given.  Usage errors exit with 2
(argparse), domain errors with 1 and a one-line message on stderr.
"""

from __future__ import annotations

import argparse
import itertools
import sys
from pathlib import Path

import numpy as np

from . import __version__, datasets
from ._random import key_of, substream
from .censoring import (
    Boundary,
    CensoringScheme,
    PC2Sample,
    default_window,
    exp_mle_pc2,
    generate_pc2_batch,
    tsallis_divergence_pc2,
    tsallis_pc2,
)
from .distributions import DistributionModel
from .divergence import FittedFamily, tsallis_divergence
from .errors import TsallisGofError
from .experiments import (
    MCReport,
    eif_report,
    run_bias_mse,
    run_clt,
    run_eif,
    run_pc2_table,
    run_power_table,
    run_quantile_table,
)
from .inference import (
    NullCache,
    exponentiality_test,
    normality_test,
    pc2_exponentiality_test,
    statistic_test,
)
from .quantile import KernelSpec, errors_csv, tsallis_quantile, tsallis_quantile_soni
from .sample import Sample
from .spacings import estimate, window_default


class DataError(TsallisGofError):
    pass


def read_values(spec: str) -> np.ndarray:
    """Values from ``inline:1,2,3``, a registered dataset name, or a file.

    Files hold one value per line or comma-separated values; ``#`` starts a
    comment.
    """
    if spec.startswith("inline:"):
        text = spec[len("inline:"):]
    else:
        path = Path(spec)
        if not path.exists():
            try:
                return datasets.get(spec).array()
            except KeyError:
                raise DataError(f"no data file or dataset named {spec!r}") from None
        text = path.read_text(encoding="utf-8")
    values = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        for token in line.replace(",", " ").split():
            try:
                values.append(float(token))
            except ValueError:
                raise DataError(f"not a number: {token!r}") from None
    if not values:
        raise DataError(f"no values found in {spec!r}")
    return np.array(values)


def read_pc2(spec: str, scheme: str | None, n: int | None) -> PC2Sample:
    if scheme is None:
        try:
            return datasets.get(spec).pc2()
        except (KeyError, ValueError):
            raise DataError("censored data needs --scheme unless it is a registered censored dataset") from None
    return PC2Sample(np.sort(read_values(spec)), CensoringScheme.parse(scheme, n))


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _emit(report: MCReport, args) -> None:
    text = report.render(args.format)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _single(experiment: str, row: dict, reps: int = 0, seed: int = 0) -> MCReport:
    return MCReport(experiment, reps, seed, [row])


# -- subcommands ---------------------------------------------------------------

def cmd_estimate(args) -> MCReport:
    name = args.estimator.lower()
    row: dict = {"estimator": name, "alpha": args.alpha}
    if name == "pc2":
        s = read_pc2(args.data, args.scheme, args.n)
        m = default_window(s.scheme.r) if args.m is None else args.m
        row.update(n=s.scheme.n, r=s.scheme.r, scheme=s.scheme.label(), m=m,
                   estimate=tsallis_pc2(s, m, args.alpha, args.boundary))
        return _single("estimate", row)
    x = read_values(args.data)
    sample = Sample(x, jitter=args.jitter)
    row["n"] = sample.n
    if name in ("quantile", "quantile-soni"):
        spec = KernelSpec(args.h) if args.h else None
        fn = tsallis_quantile if name == "quantile" else tsallis_quantile_soni
        row["estimate"] = fn(sample, spec, args.alpha)
        return _single("estimate", row)
    m = window_default(sample.n) if args.m is None else args.m
    row.update(m=m, estimate=estimate(name, sample, m, args.alpha))
    return _single("estimate", row)


def cmd_divergence(args) -> MCReport:
    x = read_values(args.data)
    family = {"normal": "normal", "exp": "exponential"}[args.family]
    m = window_default(x.size) if args.m is None else args.m
    fit = FittedFamily.fit(x, family)
    row = {"family": family, "n": x.size, "m": m, "alpha": args.alpha,
           "theta_hat": ";".join(repr(v) for v in fit.theta_hat),
           "statistic": tsallis_divergence(x, fit, m, args.alpha)}
    return _single("divergence", row)


def cmd_gof(args) -> MCReport:
    cache = NullCache(args.cache_dir) if args.cache_dir else None
    common = dict(alpha=args.alpha, m=args.m, reps=args.reps, seed=args.seed,
                  cache=cache, workers=args.workers)
    if args.level is not None:
        common["level"] = args.level
    row: dict = {"test": args.test}
    if args.test == "exp-pc2":
        s = read_pc2(args.data, args.scheme, args.n)
        res = pc2_exponentiality_test(s, **common)
        row.update(scheme=s.scheme.label(), theta_hat=exp_mle_pc2(s))
    else:
        x = read_values(args.data)
        if args.statistic:
            res = statistic_test(args.statistic, x, **common)
        elif args.test == "normal":
            res = normality_test(x, **common)
            row["theta_hat"] = ";".join(repr(v) for v in FittedFamily.fit(x, "normal").theta_hat)
        else:
            res = exponentiality_test(x, **common)
            row["theta_hat"] = FittedFamily.fit(x, "exponential").theta_hat[0]
    d = res.as_dict()
    row.update({k: d[k] for k in ("name", "n", "m", "alpha", "statistic", "critical_value",
                                  "p_value", "level", "reject", "tail")})
    return _single("gof", row, args.reps, args.seed)


def cmd_pc2_gen(args) -> MCReport:
    scheme = CensoringScheme.parse(args.scheme, args.n)
    model = DistributionModel.parse(args.dist)
    rng = substream(args.seed, key_of("pc2-gen"))
    x = generate_pc2_batch(model, scheme, args.count, rng)
    report = MCReport("pc2-gen", args.count, args.seed)
    for k, row in enumerate(x):
        for i, (t, r) in enumerate(zip(row, scheme.removals), start=1):
            report.cells.append({"sample": k + 1, "i": i, "time": float(t), "removed": r})
    return report


def cmd_eif(args) -> MCReport:
    grid = np.linspace(-4 * args.sigma, 4 * args.sigma, args.points)
    curves = run_eif(args.estimator, args.mu, args.sigma, args.n, _ints(args.m), args.alpha, grid)
    return eif_report(curves, args.mu, args.sigma)


def cmd_table(args) -> MCReport:
    kind = args.kind
    models = args.model or []
    if kind == "bias-mse":
        grid = list(itertools.product(_ints(args.n), _ints(args.m), _floats(args.alpha)))
        return run_bias_mse(args.estimators.split(","), models or ["norm:0,1"], grid,
                            args.reps, args.seed, workers=args.workers)
    if kind == "pc2":
        schemes = [CensoringScheme.parse(s, int(args.n) if args.n else None) for s in args.scheme]
        return run_pc2_table(schemes, models or ["exp:1"], _floats(args.alpha), args.reps,
                             args.seed, m=int(args.m) if args.m else None, workers=args.workers)
    if kind == "power":
        ms = [None] if not args.m else _ints(args.m)
        if args.test == "exp-pc2":
            sizes = [CensoringScheme.parse(s, int(args.n) if args.n else None) for s in args.scheme]
        else:
            sizes = _ints(args.n)
        grid = list(itertools.product(sizes, ms, _floats(args.alpha)))
        if args.test != "exp-pc2":
            grid = [(n, window_default(n) if m is None else m, a) for n, m, a in grid]
        stats_ = args.statistics.split(",") if args.statistics else None
        return run_power_table(args.test, models, grid, args.reps, args.seed, args.level,
                               statistics=stats_, workers=args.workers)
    grid = list(itertools.product(_ints(args.n), _floats(args.alpha)))
    return run_quantile_table(models or ["norm:0,1"], grid, args.reps, args.seed,
                              workers=args.workers)


def cmd_dataset(args) -> MCReport:
    if args.action == "list":
        report = MCReport("datasets", 0, 0)
        for name, ds in sorted(datasets.REGISTRY.items()):
            report.cells.append({"name": name, "n": len(ds.values), "scheme": ds.scheme,
                                 "sha256": ds.checksum(), "description": ds.description})
        return report
    if not args.name:
        raise DataError("dataset show needs a name")
    ds = datasets.get(args.name)
    report = MCReport(f"dataset-{ds.name}", 0, 0)
    removals = CensoringScheme.parse(ds.scheme, len(datasets.MILEAGES)).removals if ds.scheme else None
    for i, v in enumerate(ds.values, start=1):
        cell = {"i": i, "value": float(v)}
        if removals is not None:
            cell["removed"] = removals[i - 1]
        report.cells.append(cell)
    return report


def cmd_clt(args) -> MCReport:
    report, err = run_clt(args.dist, args.n, args.alpha, args.reps, args.seed, args.workers)
    if args.errors_out:
        Path(args.errors_out).write_text(errors_csv(err), encoding="utf-8")
    return report


# -- parser --------------------------------------------------------------------

def _output_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="write the report here instead of stdout")


def _mc_opts(p: argparse.ArgumentParser, reps: int) -> None:
    p.add_argument("--seed", type=int, required=True, help="master seed (required)")
    p.add_argument("--reps", type=int, default=reps)
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsallis-gof", description="Tsallis entropy estimators and goodness-of-fit tests."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate Tsallis entropy from data")
    p.add_argument("--estimator", default="tv",
                   help="tv, th, te, tw, pc2, quantile or quantile-soni")
    p.add_argument("--data", required=True, help="file, dataset name or inline:v1,v2,...")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--m", type=int)
    p.add_argument("--h", type=float, help="bandwidth for the quantile estimators")
    p.add_argument("--scheme", help="removal plan for censored data, e.g. '10,0*9'")
    p.add_argument("--n", type=int, help="units on test for censored data")
    p.add_argument("--boundary", choices=[b.value for b in Boundary], default="clamp")
    p.add_argument("--jitter", action="store_true", help="break exact ties before estimating")
    _output_opts(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("divergence", help="Tsallis divergence to a fitted family")
    p.add_argument("--family", choices=("normal", "exp"), required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--m", type=int)
    _output_opts(p)
    p.set_defaults(func=cmd_divergence)

    p = sub.add_parser("gof", help="Monte Carlo goodness-of-fit test")
    p.add_argument("test", choices=("normal", "exp", "exp-pc2"))
    p.add_argument("--data", required=True)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--m", type=int)
    p.add_argument("--level", type=float)
    p.add_argument("--scheme")
    p.add_argument("--n", type=int)
    p.add_argument("--statistic", help="use a competitor statistic, e.g. ks-normal or br-exp")
    p.add_argument("--cache-dir", help="directory for cached null distributions")
    _mc_opts(p, 10_000)
    _output_opts(p)
    p.set_defaults(func=cmd_gof)

    p = sub.add_parser("pc2", help="progressive type-II censoring tools")
    pc2_sub = p.add_subparsers(dest="action", required=True)
    g = pc2_sub.add_parser("gen", help="generate censored samples")
    g.add_argument("--scheme", required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--dist", default="exp:1")
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--seed", type=int, required=True)
    _output_opts(g)
    g.set_defaults(func=cmd_pc2_gen)

    p = sub.add_parser("eif", help="empirical influence function on a normal-scores sample")
    p.add_argument("--estimator", default="tv")
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--m", default="5", help="comma-separated window sizes")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--points", type=int, default=161)
    _output_opts(p)
    p.set_defaults(func=cmd_eif)

    p = sub.add_parser("table", help="Monte Carlo tables")
    p.add_argument("kind", choices=("bias-mse", "pc2", "power", "quantile"))
    p.add_argument("--model", action="append", help="distribution, e.g. norm:0,1 (repeatable)")
    p.add_argument("--estimators", default="v,h,e,w")
    p.add_argument("--n", help="comma-separated sample sizes")
    p.add_argument("--m", help="comma-separated window sizes")
    p.add_argument("--alpha", default="2")
    p.add_argument("--scheme", action="append", help="removal plan (repeatable)")
    p.add_argument("--test", choices=("normality", "exponentiality", "exp-pc2"), default="normality")
    p.add_argument("--statistics", help="comma-separated statistics for the power table")
    p.add_argument("--level", type=float, default=0.05)
    _mc_opts(p, 10_000)
    _output_opts(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("dataset", help="bundled real data sets")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("name", nargs="?")
    _output_opts(p)
    p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("clt", help="normality check of quantile-estimator errors")
    p.add_argument("--dist", default="norm:0,1")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--alpha", type=float, default=1.5)
    p.add_argument("--errors-out", help="also write the raw errors as a one-column CSV")
    _mc_opts(p, 1000)
    _output_opts(p)
    p.set_defaults(func=cmd_clt)
    return parser


def _check_table_args(parser, args) -> None:
    if args.command != "table":
        return
    if args.kind in ("bias-mse", "quantile") and not args.n:
        parser.error(f"table {args.kind} needs --n")
    if args.kind == "bias-mse" and not args.m:
        parser.error("table bias-mse needs --m")
    if args.kind == "pc2" and not args.scheme:
        parser.error("table pc2 needs --scheme")
    if args.kind == "power":
        if not args.model:
            parser.error("table power needs at least one --model")
        if args.test == "exp-pc2" and not args.scheme:
            parser.error("table power --test exp-pc2 needs --scheme")
        if args.test != "exp-pc2" and not args.n:
            parser.error("table power needs --n")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _check_table_args(parser, args)
    try:
        report = args.func(args)
        _emit(report, args)
    except (TsallisGofError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"tsallis-gof: error: {msg}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"tsallis-gof: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
