"""Monte Carlo null distributions, critical values and goodness-of-fit tests.

Every statistic here is (asymptotically or exactly) free of the null
parameter once the MLE is re-fitted inside each replication, so nulls are
simulated at unit parameters unless ``theta`` says otherwise.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable

import numpy as np

from ._random import key_of, replicate
from .censoring import (
    CensoringScheme,
    PC2Sample,
    default_window,
    generate_pc2_batch,
    tsallis_divergence_pc2,
    tsallis_divergence_pc2_sorted,
)
from .distributions import DistributionModel, exponential, normal
from .divergence import (
    baratpour_rad_sorted,
    kl_mn_sorted,
    ks_normal_sorted,
    tsallis_divergence,
    tsallis_divergence_sorted,
)
from .errors import InvalidParameter
from .sample import as_sorted
from .spacings import window_default

CACHE_VERSION = 1
DEFAULT_REPS = 10_000
DEFAULT_REPS_PC2 = 5_000


class Tail(str, Enum):
    UPPER = "upper"
    LOWER = "lower"


@dataclass(frozen=True)
class StatisticDef:
    name: str
    tail: Tail
    null_family: str  # "normal" or "exponential"
    censored: bool
    batch: Callable  # (sorted batch, m, alpha, scheme) -> values
    uses_alpha: bool = True
    uses_m: bool = True


STATISTICS: dict[str, StatisticDef] = {
    s.name: s
    for s in [
        StatisticDef(
            "tsallis-normal", Tail.UPPER, "normal", False,
            lambda x, m, a, sc: tsallis_divergence_sorted(x, m, a, "normal"),
        ),
        StatisticDef(
            "kl-normal", Tail.UPPER, "normal", False,
            lambda x, m, a, sc: tsallis_divergence_sorted(x, m, 1.0, "normal"),
            uses_alpha=False,
        ),
        StatisticDef(
            "ks-normal", Tail.UPPER, "normal", False,
            lambda x, m, a, sc: ks_normal_sorted(x),
            uses_alpha=False, uses_m=False,
        ),
        StatisticDef(
            "tsallis-exp", Tail.UPPER, "exponential", False,
            lambda x, m, a, sc: tsallis_divergence_sorted(x, m, a, "exponential"),
        ),
        StatisticDef(
            "klmn-exp", Tail.LOWER, "exponential", False,
            lambda x, m, a, sc: kl_mn_sorted(x, m),
            uses_alpha=False,
        ),
        StatisticDef(
            "br-exp", Tail.UPPER, "exponential", False,
            lambda x, m, a, sc: baratpour_rad_sorted(x),
            uses_alpha=False, uses_m=False,
        ),
        StatisticDef(
            "tsallis-exp-pc2", Tail.UPPER, "exponential", True,
            lambda x, m, a, sc: tsallis_divergence_pc2_sorted(x, sc, m, a),
        ),
    ]
}


def get_statistic(name: str) -> StatisticDef:
    try:
        return STATISTICS[name]
    except KeyError:
        raise InvalidParameter(f"unknown statistic {name!r}; known: {sorted(STATISTICS)}") from None


def null_model(stat: StatisticDef, theta: float = 1.0) -> DistributionModel:
    if stat.null_family == "normal":
        return normal(0.0, theta)
    return exponential(theta)


def draw_sorted(model: DistributionModel, size: int, rng, n: int | None, scheme=None) -> np.ndarray:
    """Batch of sorted complete samples, or censored samples if ``scheme`` is set."""
    if scheme is not None:
        return generate_pc2_batch(model, scheme, size, rng)
    return np.sort(model.draw((size, n), rng), axis=1)


def simulate_statistic(
    stat: StatisticDef,
    model: DistributionModel,
    *,
    n: int | None,
    scheme: CensoringScheme | None,
    m: int,
    alpha: float,
    reps: int,
    seed: int,
    keys: tuple[int, ...] = (),
    workers: int = 1,
) -> np.ndarray:
    """Statistic values on ``reps`` samples from ``model`` (NaN marks failures)."""

    def chunk(rng, size):
        x = draw_sorted(model, size, rng, n, scheme)
        return np.asarray(stat.batch(x, m, alpha, scheme), dtype=float)

    return replicate(chunk, reps, seed, keys=keys, workers=workers)


@dataclass(frozen=True)
class NullDistribution:
    statistic: str
    n: int
    scheme: str | None
    m: int
    alpha: float
    reps: int
    seed: int
    theta: float
    values: np.ndarray = field(repr=False)
    failures: int = 0

    @property
    def tail(self) -> Tail:
        return get_statistic(self.statistic).tail

    def key(self) -> dict:
        return {
            "version": CACHE_VERSION,
            "statistic": self.statistic,
            "n": self.n,
            "scheme": self.scheme,
            "m": self.m,
            "alpha": self.alpha,
            "reps": self.reps,
            "seed": self.seed,
            "theta": self.theta,
        }

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        meta = self.key() | {"failures": self.failures}
        with open(path, "wb") as fh:
            np.savez(fh, values=self.values, meta=np.array(json.dumps(meta)))
        return path

    @classmethod
    def load(cls, path: str | Path) -> "NullDistribution":
        with np.load(path, allow_pickle=False) as data:
            meta = json.loads(str(data["meta"]))
            values = data["values"].copy()
        if meta.pop("version") != CACHE_VERSION:
            raise InvalidParameter(f"cache file {path} has an incompatible version")
        values.setflags(write=False)
        return cls(values=values, **meta)


def _null_seed_keys(statistic: str, n: int, scheme: str | None, m: int, alpha: float, theta: float):
    # each key is independent of reps so a longer run extends a shorter one
    label = f"{statistic}|{n}|{scheme}|{m}|{alpha!r}|{theta!r}"
    return (key_of("null"), key_of(label))


def simulate_null(
    statistic: str,
    n: int | None = None,
    scheme: CensoringScheme | str | None = None,
    m: int | None = None,
    alpha: float = 2.0,
    reps: int = DEFAULT_REPS,
    seed: int = 0,
    theta: float = 1.0,
    workers: int = 1,
) -> NullDistribution:
    """Simulate the null distribution of a registered statistic."""
    stat = get_statistic(statistic)
    if reps < 1000:
        raise InvalidParameter("null simulation needs reps >= 1000")
    if stat.censored:
        if scheme is None:
            raise InvalidParameter(f"{statistic} needs a censoring scheme")
        if isinstance(scheme, str):
            scheme = CensoringScheme.parse(scheme, n)
        n = scheme.n
        m = default_window(scheme.r) if m is None else m
    else:
        if n is None:
            raise InvalidParameter(f"{statistic} needs a sample size n")
        scheme = None
        m = window_default(n) if m is None else m
    if not stat.uses_m:
        m = 0
    if not stat.uses_alpha:
        alpha = 1.0
    label = scheme.label() if scheme is not None else None
    values = simulate_statistic(
        stat,
        null_model(stat, theta),
        n=n,
        scheme=scheme,
        m=m,
        alpha=alpha,
        reps=reps,
        seed=seed,
        keys=_null_seed_keys(statistic, n, label, m, alpha, theta),
        workers=workers,
    )
    ok = values[np.isfinite(values)]
    ok.sort()
    ok.setflags(write=False)
    return NullDistribution(
        statistic, int(n), label, int(m), float(alpha), int(reps), int(seed), float(theta),
        ok, int(values.size - ok.size),
    )


class NullCache:
    """Directory of persisted null distributions keyed by their parameters."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)

    def path_for(self, **key) -> Path:
        digest = hashlib.sha1(json.dumps(key, sort_keys=True).encode()).hexdigest()[:16]
        return self.directory / f"{key['statistic']}-{digest}.npz"

    def get(self, **kwargs) -> NullDistribution:
        fresh_key = {
            "version": CACHE_VERSION,
            **{k: kwargs.get(k) for k in ("statistic", "n", "scheme", "m", "alpha", "reps", "seed")},
            "theta": kwargs.get("theta", 1.0),
        }
        path = self.path_for(**fresh_key)
        if path.exists():
            return NullDistribution.load(path)
        nd = simulate_null(**kwargs)
        self.directory.mkdir(parents=True, exist_ok=True)
        nd.save(path)
        return nd


def critical_value(nd: NullDistribution | np.ndarray, level: float, tail: Tail | str | None = None) -> float:
    """Empirical null quantile with linear interpolation at ``(reps-1)p + 1``."""
    if not 0 < level < 1:
        raise InvalidParameter("level must lie in (0, 1)")
    if isinstance(nd, NullDistribution):
        values, tail = nd.values, Tail(tail or nd.tail)
    else:
        values, tail = np.sort(np.asarray(nd, dtype=float)), Tail(tail or Tail.UPPER)
    p = 1.0 - level if tail is Tail.UPPER else level
    return float(np.quantile(values, p, method="linear"))


def p_value(nd: NullDistribution | np.ndarray, observed: float, tail: Tail | str | None = None) -> float:
    """Monte Carlo p-value ``(1 + #{as or more extreme}) / (reps + 1)``."""
    if isinstance(nd, NullDistribution):
        values, tail = nd.values, Tail(tail or nd.tail)
    else:
        values, tail = np.sort(np.asarray(nd, dtype=float)), Tail(tail or Tail.UPPER)
    if tail is Tail.UPPER:
        extreme = values.size - np.searchsorted(values, observed, side="left")
    else:
        extreme = np.searchsorted(values, observed, side="right")
    return (1.0 + extreme) / (values.size + 1.0)


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    critical_value: float
    level: float
    reject: bool
    tail: Tail
    name: str = ""
    n: int = 0
    m: int = 0
    alpha: float = 0.0
    reps: int = 0
    seed: int = 0

    def as_dict(self) -> dict:
        d = asdict(self)
        d["tail"] = self.tail.value
        return d


def decide(nd: NullDistribution, observed: float, level: float) -> TestResult:
    crit = critical_value(nd, level)
    tail = nd.tail
    reject = observed > crit if tail is Tail.UPPER else observed < crit
    return TestResult(
        statistic=float(observed),
        p_value=p_value(nd, observed),
        critical_value=crit,
        level=float(level),
        reject=bool(reject),
        tail=tail,
        name=nd.statistic,
        n=nd.n,
        m=nd.m,
        alpha=nd.alpha,
        reps=nd.reps,
        seed=nd.seed,
    )


def _null(cache: NullCache | None, **kwargs) -> NullDistribution:
    if cache is not None:
        return cache.get(**kwargs)
    return simulate_null(**kwargs)


def normality_test(
    s, alpha: float = 2.0, m: int | None = None, reps: int = DEFAULT_REPS, seed: int = 0,
    level: float = 0.05, cache: NullCache | None = None, workers: int = 1,
) -> TestResult:
    """Upper-tail test of normality based on the Tsallis divergence to the normal MLE."""
    x = as_sorted(s)
    n = x.size
    if n < 6:
        raise InvalidParameter("normality test needs n >= 6")
    m = window_default(n) if m is None else m
    observed = tsallis_divergence(x, "normal", m, alpha)
    nd = _null(cache, statistic="tsallis-normal", n=n, m=m, alpha=alpha, reps=reps,
               seed=seed, workers=workers)
    return decide(nd, observed, level)


def exponentiality_test(
    s, alpha: float = 2.0, m: int | None = None, reps: int = DEFAULT_REPS, seed: int = 0,
    level: float = 0.05, cache: NullCache | None = None, workers: int = 1,
) -> TestResult:
    """Upper-tail test of exponentiality based on the Tsallis divergence to the exponential MLE."""
    x = as_sorted(s)
    if not np.all(x > 0):
        raise InvalidParameter("exponentiality test needs strictly positive data")
    n = x.size
    m = window_default(n) if m is None else m
    observed = tsallis_divergence(x, "exponential", m, alpha)
    nd = _null(cache, statistic="tsallis-exp", n=n, m=m, alpha=alpha, reps=reps,
               seed=seed, workers=workers)
    return decide(nd, observed, level)


def pc2_exponentiality_test(
    s: PC2Sample, alpha: float = 2.0, m: int | None = None, reps: int = DEFAULT_REPS_PC2,
    seed: int = 0, level: float = 0.10, cache: NullCache | None = None, workers: int = 1,
) -> TestResult:
    """Exponentiality test for a censored sample; the null uses the same scheme."""
    if not np.all(s.times > 0):
        raise InvalidParameter("exponentiality test needs strictly positive failure times")
    scheme = s.scheme
    m = default_window(scheme.r) if m is None else m
    observed = tsallis_divergence_pc2(s, None, m, alpha)
    nd = _null(cache, statistic="tsallis-exp-pc2", scheme=scheme.label(), n=scheme.n, m=m,
               alpha=alpha, reps=reps, seed=seed, workers=workers)
    return decide(nd, observed, level)


def statistic_test(
    statistic: str, s, alpha: float = 2.0, m: int | None = None, reps: int = DEFAULT_REPS,
    seed: int = 0, level: float = 0.05, cache: NullCache | None = None, workers: int = 1,
) -> TestResult:
    """Generic Monte Carlo test for any registered complete-sample statistic."""
    stat = get_statistic(statistic)
    if stat.censored:
        raise InvalidParameter("use pc2_exponentiality_test for censored samples")
    x = as_sorted(s)
    n = x.size
    m = window_default(n) if m is None else m
    observed = float(stat.batch(x[None, :], m, alpha, None)[0])
    if math.isnan(observed):
        raise InvalidParameter(f"{statistic} is undefined for this sample")
    nd = _null(cache, statistic=statistic, n=n, m=m, alpha=alpha, reps=reps, seed=seed,
               workers=workers)
    return decide(nd, observed, level)
