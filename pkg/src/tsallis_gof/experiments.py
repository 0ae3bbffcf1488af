"""Monte Carlo harnesses behind the simulation tables, plus the EIF study.

Every harness returns an :class:`MCReport` whose cells are flat dicts.  Each
cell draws its samples from a substream keyed by a stable label (model, size,
scheme) rather than by its position in the grid, so a cell can be recomputed
on its own and gives bit-identical numbers whatever else was in the run.
Samples are shared across estimators, windows and orders of the same
(model, n) pair, which keeps comparisons within a table row paired.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import special, stats

from ._random import key_of, replicate
from .censoring import CensoringScheme, default_window, generate_pc2_batch, tsallis_pc2_sorted
from .distributions import DistributionModel
from .errors import InvalidParameter, NonexistentEntropy
from .inference import (
    STATISTICS,
    critical_value,
    get_statistic,
    simulate_null,
    simulate_statistic,
)
from .quantile import tsallis_quantile_sorted
from .spacings import ESTIMATORS, estimator_sorted

REPORT_FORMAT = "tsallis-gof-report/1"
FAILURE_FLAG = 1e-3  # fraction of failed replications that flags a cell

POWER_TESTS = {
    "normality": ("tsallis-normal", "kl-normal", "ks-normal"),
    "exponentiality": ("tsallis-exp", "klmn-exp", "br-exp"),
    "exp-pc2": ("tsallis-exp-pc2",),
}


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _plain(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


@dataclass
class MCReport:
    """A table of Monte Carlo cells.

    ``cells`` holds one dict per cell; every cell carries its own ``reps``,
    ``failed`` count and ``substream`` key.
    """

    experiment: str
    reps: int
    seed: int
    cells: list[dict] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def columns(self) -> list[str]:
        cols: list[str] = []
        for cell in self.cells:
            cols.extend(k for k in cell if k not in cols)
        return cols

    def __len__(self) -> int:
        return len(self.cells)

    def to_csv(self) -> str:
        """CSV text with a versioned comment header and round-trip floats."""
        buf = io.StringIO()
        buf.write(f"# format={REPORT_FORMAT} experiment={self.experiment} "
                  f"reps={self.reps} seed={self.seed}\n")
        cols = self.columns
        writer = csv.writer(buf, lineterminator="\n")
        if cols:
            writer.writerow(cols)
        for cell in self.cells:
            writer.writerow([_fmt(cell.get(c)) for c in cols])
        return buf.getvalue()

    def to_dict(self, wall_time: bool = True) -> dict:
        d = {
            "format": REPORT_FORMAT,
            "experiment": self.experiment,
            "reps": self.reps,
            "seed": self.seed,
            "cells": [{k: _plain(v) for k, v in c.items()} for c in self.cells],
        }
        if wall_time:
            d["wall_time"] = self.wall_time
        return d

    def to_json(self, wall_time: bool = True) -> str:
        return json.dumps(self.to_dict(wall_time), indent=2) + "\n"

    def render(self, fmt: str = "csv") -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise InvalidParameter(f"unknown report format {fmt!r}")


def _summary(est: np.ndarray, truth: float | None, reps: int) -> dict:
    ok = est[np.isfinite(est)]
    failed = int(est.size - ok.size)
    out: dict = {}
    if truth is not None:
        out["true"] = truth
    if ok.size:
        out["mean"] = float(ok.mean())
        out["var"] = float(ok.var(ddof=1)) if ok.size > 1 else 0.0
        if truth is not None:
            err = ok - truth
            out["bias"] = float(err.mean())
            out["mse"] = float(np.mean(err * err))
    else:
        out.update(mean=math.nan, var=math.nan)
        if truth is not None:
            out.update(bias=math.nan, mse=math.nan)
    out["reps"] = reps
    out["failed"] = failed
    out["flagged"] = failed > FAILURE_FLAG * reps
    return out


def _draws(model: DistributionModel, n: int, reps: int, seed: int, tag: str, workers: int):
    key = key_of(f"{tag}|{model.label()}|{n}")

    def chunk(rng, size):
        return np.sort(model.draw((size, n), rng), axis=1)

    return key, replicate(chunk, reps, seed, keys=(key,), workers=workers)


def _as_models(models) -> list[DistributionModel]:
    return [DistributionModel.parse(m) if isinstance(m, str) else m for m in models]


def run_bias_mse(
    estimators: Sequence[str],
    models: Sequence[DistributionModel | str],
    grid: Iterable[tuple[int, int, float]],
    reps: int,
    seed: int,
    workers: int = 1,
) -> MCReport:
    """Bias and MSE of spacings estimators against the true entropy.

    ``grid`` lists ``(n, m, alpha)`` triples.  Replications with a zero
    spacing are dropped from the averages and counted in ``failed``.
    """
    t0 = time.perf_counter()
    estimators = [e.lower().removeprefix("t") for e in estimators]
    for e in estimators:
        if e not in ESTIMATORS:
            raise InvalidParameter(f"unknown estimator {e!r}; known: {ESTIMATORS}")
    grid = list(grid)
    report = MCReport("bias-mse", reps, seed)
    for model in _as_models(models):
        samples: dict[int, tuple[int, np.ndarray]] = {}
        for n, m, alpha in grid:
            if n not in samples:
                samples[n] = _draws(model, n, reps, seed, "bias-mse", workers)
            key, x = samples[n]
            truth = model.entropy(alpha).value
            for e in estimators:
                limit = n if e == "h" else n / 2
                if not 1 <= m < limit:
                    raise InvalidParameter(f"window m={m} is invalid for T{e.upper()} with n={n}")
                est = np.atleast_1d(estimator_sorted(e)(x, m, alpha))
                cell = {"model": model.label(), "estimator": f"T{e.upper()}",
                        "n": n, "m": m, "alpha": float(alpha)}
                cell.update(_summary(est, truth, reps))
                cell["substream"] = key
                report.cells.append(cell)
    report.wall_time = time.perf_counter() - t0
    return report


def run_pc2_table(
    schemes: Sequence[CensoringScheme | str],
    models: Sequence[DistributionModel | str],
    alphas: Sequence[float],
    reps: int,
    seed: int,
    m: int | None = None,
    workers: int = 1,
) -> MCReport:
    """Average estimate (AE) and variance of the censored-data estimator.

    The window defaults to ``floor(sqrt(r) + 0.5)`` for each scheme.
    """
    t0 = time.perf_counter()
    report = MCReport("pc2", reps, seed)
    schemes = [CensoringScheme.parse(s) if isinstance(s, str) else s for s in schemes]
    for model in _as_models(models):
        for scheme in schemes:
            mm = default_window(scheme.r) if m is None else m
            key = key_of(f"pc2|{model.label()}|{scheme.n}|{scheme.label()}")

            def chunk(rng, size, scheme=scheme):
                return generate_pc2_batch(model, scheme, size, rng)

            x = replicate(chunk, reps, seed, keys=(key,), workers=workers)
            for alpha in alphas:
                est = tsallis_pc2_sorted(x, scheme, mm, alpha)
                try:
                    truth = model.entropy(alpha).value
                except NonexistentEntropy:
                    truth = None
                s = _summary(est, truth, reps)
                cell = {"model": model.label(), "n": scheme.n, "r": scheme.r,
                        "scheme": scheme.label(), "m": mm, "alpha": float(alpha),
                        "AE": s.pop("mean"), "Var": s.pop("var")}
                cell.update(s)
                cell["substream"] = key
                report.cells.append(cell)
    report.wall_time = time.perf_counter() - t0
    return report


def run_power_table(
    test: str,
    alternatives: Sequence[DistributionModel | str],
    grid: Iterable[tuple],
    reps: int,
    seed: int,
    level: float = 0.05,
    statistics: Sequence[str] | None = None,
    workers: int = 1,
) -> MCReport:
    """Rejection frequencies of a test and its competitors.

    ``test`` is ``"normality"``, ``"exponentiality"`` or ``"exp-pc2"``.  For
    complete samples ``grid`` lists ``(n, m, alpha)``; for ``exp-pc2`` it
    lists ``(scheme, m, alpha)`` with ``m=None`` meaning the default window.
    Null critical values are simulated once per (statistic, n, m, alpha) and
    reused for every alternative.
    """
    if test not in POWER_TESTS:
        raise InvalidParameter(f"unknown test {test!r}; known: {sorted(POWER_TESTS)}")
    t0 = time.perf_counter()
    names = list(statistics or POWER_TESTS[test])
    for name in names:
        get_statistic(name)
    censored = test == "exp-pc2"
    report = MCReport(f"power-{test}", reps, seed)
    crit_cache: dict[tuple, float] = {}
    grid = list(grid)
    for model in _as_models(alternatives):
        for size_spec, m, alpha in grid:
            if censored:
                scheme = CensoringScheme.parse(size_spec) if isinstance(size_spec, str) else size_spec
                n = scheme.n
                m = default_window(scheme.r) if m is None else m
                size_label = scheme.label()
            else:
                scheme, n, size_label = None, int(size_spec), None
            key = key_of(f"power|{model.label()}|{n}|{size_label}")
            for name in names:
                stat = STATISTICS[name]
                mm = m if stat.uses_m else 0
                aa = float(alpha) if stat.uses_alpha else 1.0
                ck = (name, n, size_label, mm, aa)
                if ck not in crit_cache:
                    nd = simulate_null(name, n=n, scheme=size_label, m=mm, alpha=aa,
                                       reps=reps, seed=seed, workers=workers)
                    crit_cache[ck] = critical_value(nd, level)
                crit = crit_cache[ck]
                values = simulate_statistic(stat, model, n=n, scheme=scheme, m=mm, alpha=aa,
                                            reps=reps, seed=seed, keys=(key,), workers=workers)
                ok = values[np.isfinite(values)]
                rejected = ok > crit if stat.tail.value == "upper" else ok < crit
                failed = int(values.size - ok.size)
                cell = {"alternative": model.label(), "statistic": name, "n": n,
                        "scheme": size_label, "m": mm, "alpha": aa, "level": float(level),
                        "critical_value": crit,
                        "power": float(rejected.mean()) if ok.size else math.nan,
                        "reps": reps, "failed": failed,
                        "flagged": failed > FAILURE_FLAG * reps, "substream": key}
                report.cells.append(cell)
    report.wall_time = time.perf_counter() - t0
    return report


def run_quantile_table(
    models: Sequence[DistributionModel | str],
    grid: Iterable[tuple[int, float]],
    reps: int,
    seed: int,
    workers: int = 1,
) -> MCReport:
    """Bias and MSE of the kernel/quantile-density estimator.

    Cells whose population entropy does not exist are kept with
    ``skipped`` set to the reason instead of numbers.
    """
    t0 = time.perf_counter()
    report = MCReport("quantile", reps, seed)
    grid = list(grid)
    for model in _as_models(models):
        samples: dict[int, tuple[int, np.ndarray]] = {}
        for n, alpha in grid:
            cell = {"model": model.label(), "n": n, "alpha": float(alpha)}
            try:
                truth = model.entropy(alpha).value
            except NonexistentEntropy as exc:
                cell.update(reps=reps, skipped=str(exc))
                report.cells.append(cell)
                continue
            if n not in samples:
                samples[n] = _draws(model, n, reps, seed, "quantile", workers)
            key, x = samples[n]
            est = np.atleast_1d(tsallis_quantile_sorted(x, alpha))
            cell.update(_summary(est, truth, reps))
            cell["substream"] = key
            report.cells.append(cell)
    report.wall_time = time.perf_counter() - t0
    return report


def run_clt(
    model: DistributionModel | str, n: int, alpha: float, reps: int, seed: int, workers: int = 1
) -> tuple[MCReport, np.ndarray]:
    """Errors of the quantile estimator and a KS check of their normality.

    The errors are standardised by their own mean and standard deviation
    before the KS test, so the p-value is conservative.
    """
    from .quantile import clt_error_samples

    t0 = time.perf_counter()
    (model,) = _as_models([model])
    err = clt_error_samples(model, n, alpha, reps, seed, workers)
    ok = err[np.isfinite(err)]
    z = (ok - ok.mean()) / ok.std(ddof=1)
    ks = stats.kstest(z, "norm")
    report = MCReport("clt", reps, seed)
    report.cells.append({
        "model": model.label(), "n": n, "alpha": float(alpha),
        "mean_error": float(ok.mean()), "sd_error": float(ok.std(ddof=1)),
        "sd_root_n": float(ok.std(ddof=1) * math.sqrt(n)),
        "ks_statistic": float(ks.statistic), "ks_pvalue": float(ks.pvalue),
        "reps": reps, "failed": int(err.size - ok.size),
    })
    report.wall_time = time.perf_counter() - t0
    return report, err


@dataclass(frozen=True)
class EIFCurve:
    """Empirical influence function of one estimator setting."""

    estimator: str
    m: int
    alpha: float
    base: np.ndarray = field(repr=False)
    r: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)


def normal_scores(mu: float, sigma: float, n: int) -> np.ndarray:
    """``mu + sigma * Phi^{-1}(i/(n+1))`` for i = 1..n."""
    return mu + sigma * special.ndtri(np.arange(1, n + 1) / (n + 1.0))


def eif_grid(sigma: float, points: int = 161) -> np.ndarray:
    return np.linspace(-4.0 * sigma, 4.0 * sigma, points)


def _estimator_fn(estimator) -> tuple[str, Callable]:
    if callable(estimator):
        return getattr(estimator, "__name__", "custom"), estimator
    name = estimator.lower().removeprefix("t")
    kernel = estimator_sorted(name)
    return f"T{name.upper()}", lambda x, m, alpha: float(kernel(x, m, alpha))


def run_eif(
    estimator,
    mu: float,
    sigma: float,
    n: int,
    ms: Sequence[int],
    alpha: float,
    grid: np.ndarray | None = None,
) -> list[EIFCurve]:
    """``EIF(r) = (n+1)(est(X with r added) - est(X))`` on the normal-scores sample.

    ``estimator`` is a spacings estimator name or any callable
    ``f(sorted_x, m, alpha) -> float``.  Nothing here is random.
    """
    name, fn = _estimator_fn(estimator)
    base = normal_scores(mu, sigma, n)
    r = eif_grid(sigma) if grid is None else np.asarray(grid, dtype=float)
    curves = []
    for m in ms:
        if n < 2 * m + 2:
            raise InvalidParameter(f"EIF needs n >= 2m + 2 (n={n}, m={m})")
        ref = fn(base, m, alpha)
        vals = np.array([
            (n + 1) * (fn(np.sort(np.append(base, ri)), m, alpha) - ref) for ri in r
        ])
        curves.append(EIFCurve(name, int(m), float(alpha), base, r, vals))
    return curves


def eif_report(curves: Sequence[EIFCurve], mu: float, sigma: float) -> MCReport:
    report = MCReport("eif", 0, 0)
    for c in curves:
        for ri, v in zip(c.r, c.values):
            report.cells.append({"estimator": c.estimator, "mu": float(mu), "sigma": float(sigma),
                                 "n": c.base.size, "m": c.m, "alpha": c.alpha,
                                 "r": float(ri), "eif": float(v)})
    return report
