"""Reference distributions with density, cdf, quantile, sampler and true entropy.

Parametrizations follow the one-parameter alternative labels used in power
studies: ``GA(k)`` is Gamma(shape k, rate 1), ``WE(k)`` is Weibull(shape k,
scale 1), ``LN(s)`` is LogNormal(log-sd s, log-mean 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import integrate, special, stats

from .errors import InvalidParameter, NonexistentEntropy
from .sample import Sample


class Family(str, Enum):
    NORMAL = "normal"
    EXPONENTIAL = "exponential"
    CAUCHY = "cauchy"
    GAMMA = "gamma"
    WEIBULL = "weibull"
    LOGNORMAL = "lognormal"
    UNIFORM01 = "uniform01"
    BETA = "beta"
    GOVINDARAJULU = "govindarajulu"
    CHEN = "chen"


# (parameter names, default values)
_PARAMS: dict[Family, tuple[tuple[str, ...], tuple[float, ...]]] = {
    Family.NORMAL: (("mu", "sigma"), (0.0, 1.0)),
    Family.EXPONENTIAL: (("rate",), (1.0,)),
    Family.CAUCHY: ((), ()),
    Family.GAMMA: (("shape",), (1.0,)),
    Family.WEIBULL: (("shape",), (1.0,)),
    Family.LOGNORMAL: (("sigma",), (1.0,)),
    Family.UNIFORM01: ((), ()),
    Family.BETA: (("a", "b"), (1.0, 1.0)),
    Family.GOVINDARAJULU: (("mu", "sigma", "gamma"), (0.0, 1.0, 1.0)),
    Family.CHEN: (("eta", "lam"), (1.0, 1.0)),
}

_ALIASES = {
    "norm": Family.NORMAL, "n": Family.NORMAL, "normal": Family.NORMAL,
    "exp": Family.EXPONENTIAL, "exponential": Family.EXPONENTIAL,
    "cauchy": Family.CAUCHY, "c": Family.CAUCHY,
    "gamma": Family.GAMMA, "ga": Family.GAMMA,
    "weibull": Family.WEIBULL, "we": Family.WEIBULL,
    "lognormal": Family.LOGNORMAL, "lognorm": Family.LOGNORMAL, "ln": Family.LOGNORMAL,
    "uniform": Family.UNIFORM01, "uniform01": Family.UNIFORM01, "u": Family.UNIFORM01,
    "beta": Family.BETA,
    "govindarajulu": Family.GOVINDARAJULU, "gov": Family.GOVINDARAJULU,
    "chen": Family.CHEN,
}

_BISECTION_STEPS = 60  # halves (0, 1) well below 1e-12


@dataclass(frozen=True)
class TrueEntropyValue:
    alpha: float
    value: float
    provenance: str  # "closed-form" or "quadrature"


@dataclass(frozen=True)
class DistributionModel:
    """A distribution identity with its parameter vector."""

    family: Family
    params: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        family = Family(self.family)
        names, defaults = _PARAMS[family]
        params = tuple(float(p) for p in self.params) or defaults
        if len(params) != len(names):
            raise InvalidParameter(
                f"{family.value} expects {len(names)} parameters {names}, got {len(params)}"
            )
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "params", params)
        positive = {
            Family.NORMAL: params[1:],
            Family.GOVINDARAJULU: params[1:],
        }.get(family, params)
        if any(not (p > 0 and math.isfinite(p)) for p in positive):
            raise InvalidParameter(f"{family.value} parameters must be positive: {params}")
        if not all(math.isfinite(p) for p in params):
            raise InvalidParameter(f"non-finite parameter in {params}")

    # -- construction helpers -------------------------------------------------

    @classmethod
    def parse(cls, text: str) -> "DistributionModel":
        """Build a model from ``"name"`` or ``"name:p1,p2"``, e.g. ``"exp:1"``."""
        name, _, rest = text.strip().partition(":")
        try:
            family = _ALIASES[name.strip().lower()]
        except KeyError:
            raise InvalidParameter(f"unknown distribution {name!r}") from None
        params = tuple(float(p) for p in rest.split(",")) if rest.strip() else ()
        return cls(family, params)

    def label(self) -> str:
        if not self.params:
            return self.family.value
        return f"{self.family.value}:" + ",".join(f"{p:g}" for p in self.params)

    @property
    def support(self) -> tuple[float, float]:
        f = self.family
        if f in (Family.NORMAL, Family.CAUCHY):
            return (-math.inf, math.inf)
        if f in (Family.UNIFORM01, Family.BETA):
            return (0.0, 1.0)
        if f is Family.GOVINDARAJULU:
            mu, sigma, _ = self.params
            return (mu, mu + sigma)
        return (0.0, math.inf)

    def _scipy(self):
        f, p = self.family, self.params
        if f is Family.NORMAL:
            return stats.norm(loc=p[0], scale=p[1])
        if f is Family.EXPONENTIAL:
            return stats.expon(scale=1.0 / p[0])
        if f is Family.CAUCHY:
            return stats.cauchy()
        if f is Family.GAMMA:
            return stats.gamma(p[0])
        if f is Family.WEIBULL:
            return stats.weibull_min(p[0])
        if f is Family.LOGNORMAL:
            return stats.lognorm(p[0])
        if f is Family.UNIFORM01:
            return stats.uniform()
        if f is Family.BETA:
            return stats.beta(p[0], p[1])
        return None

    # -- Govindarajulu helpers -----------------------------------------------

    def _gov_quantile(self, w):
        mu, sigma, gamma = self.params
        return mu + sigma * ((gamma + 1.0) * w**gamma - gamma * w ** (gamma + 1.0))

    def _gov_qdf(self, w):
        _, sigma, gamma = self.params
        return sigma * gamma * (gamma + 1.0) * w ** (gamma - 1.0) * (1.0 - w)

    def _gov_cdf(self, x):
        mu, sigma, _ = self.params
        x = np.asarray(x, dtype=float)
        lo = np.zeros_like(x)
        hi = np.ones_like(x)
        for _ in range(_BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            below = self._gov_quantile(mid) < x
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        w = 0.5 * (lo + hi)
        w = np.where(x <= mu, 0.0, w)
        return np.where(x >= mu + sigma, 1.0, w)

    # -- public surface --------------------------------------------------------

    def pdf(self, x):
        """Density at ``x``; zero outside the support."""
        x = np.asarray(x, dtype=float)
        f = self.family
        if f is Family.GOVINDARAJULU:
            lo, hi = self.support
            inside = (x > lo) & (x < hi)
            w = self._gov_cdf(np.where(inside, x, 0.5 * (lo + hi)))
            with np.errstate(divide="ignore"):
                out = 1.0 / self._gov_qdf(w)
            return _scalar(np.where(inside, out, 0.0))
        if f is Family.CHEN:
            eta, lam = self.params
            xp = np.where(x > 0, x, 1.0)
            t = xp**lam
            with np.errstate(over="ignore"):  # far tail: exp(-inf) = 0
                out = eta * lam * xp ** (lam - 1.0) * np.exp(t + eta * (1.0 - np.exp(t)))
            return _scalar(np.where(x > 0, out, 0.0))
        return _scalar(self._scipy().pdf(x))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        f = self.family
        if f is Family.GOVINDARAJULU:
            return _scalar(self._gov_cdf(x))
        if f is Family.CHEN:
            eta, lam = self.params
            xp = np.where(x > 0, x, 0.0)
            return _scalar(-np.expm1(eta * (1.0 - np.exp(xp**lam))))
        return _scalar(self._scipy().cdf(x))

    def quantile(self, w):
        w = np.asarray(w, dtype=float)
        if np.any((w <= 0) | (w >= 1) | np.isnan(w)):
            if self.family is not Family.GOVINDARAJULU or np.any((w < 0) | (w > 1)):
                raise InvalidParameter("quantile level must lie in (0, 1)")
        f = self.family
        if f is Family.GOVINDARAJULU:
            return _scalar(self._gov_quantile(w))
        if f is Family.CHEN:
            eta, lam = self.params
            return _scalar(np.log1p(-np.log1p(-w) / eta) ** (1.0 / lam))
        return _scalar(self._scipy().ppf(w))

    def qdf(self, w):
        """Quantile density ``dQ/dw = 1 / f(Q(w))``."""
        w = np.asarray(w, dtype=float)
        if self.family is Family.GOVINDARAJULU:
            return _scalar(self._gov_qdf(w))
        return _scalar(1.0 / np.asarray(self.pdf(self.quantile(w))))

    def draw(self, size, rng: np.random.Generator) -> np.ndarray:
        """Raw i.i.d. draws of shape ``size`` (no sorting)."""
        f, p = self.family, self.params
        if f is Family.NORMAL:
            return p[0] + p[1] * rng.standard_normal(size)
        if f is Family.EXPONENTIAL:
            return rng.standard_exponential(size) / p[0]
        if f is Family.CAUCHY:
            return rng.standard_cauchy(size)
        if f is Family.GAMMA:
            return rng.standard_gamma(p[0], size)
        if f is Family.WEIBULL:
            return rng.weibull(p[0], size)
        if f is Family.LOGNORMAL:
            return rng.lognormal(0.0, p[0], size)
        if f is Family.UNIFORM01:
            return rng.random(size)
        if f is Family.BETA:
            return rng.beta(p[0], p[1], size)
        # quantile-only families: inverse transform
        return np.asarray(self.quantile(rng.random(size)))

    def sample(self, n: int, rng: np.random.Generator) -> Sample:
        if n < 1:
            raise InvalidParameter("n must be >= 1")
        return Sample(self.draw(n, rng))

    # -- entropy -----------------------------------------------------------------

    def true_tsallis(self, alpha: float) -> TrueEntropyValue:
        """Population Tsallis entropy of order ``alpha``."""
        _check_alpha(alpha)
        f, p = self.family, self.params
        a = float(alpha)
        if f is Family.NORMAL:
            sigma = p[1]
            integral = (2.0 * math.pi * sigma**2) ** (-(a - 1.0) / 2.0) / math.sqrt(a)
            return TrueEntropyValue(a, (1.0 - integral) / (a - 1.0), "closed-form")
        if f is Family.EXPONENTIAL:
            lam = p[0]
            return TrueEntropyValue(a, (1.0 - lam ** (a - 1.0) / a) / (a - 1.0), "closed-form")
        if f is Family.UNIFORM01:
            return TrueEntropyValue(a, 0.0, "closed-form")
        if f is Family.GOVINDARAJULU:
            _, _, gamma = p
            # integrand ~ w^{(gamma-1)(1-alpha)} at 0 and (1-w)^{1-alpha} at 1
            if (gamma - 1.0) * (1.0 - a) <= -1.0 or a >= 2.0:
                raise NonexistentEntropy(
                    f"integral of q^(1-alpha) diverges for {self.label()} at alpha={a}"
                )
            integral = quantile_integral(self, a)
            return TrueEntropyValue(a, (1.0 - integral) / (a - 1.0), "quadrature")
        integral = quantile_integral(self, a)
        return TrueEntropyValue(a, (1.0 - integral) / (a - 1.0), "quadrature")

    def true_shannon(self) -> TrueEntropyValue:
        """Shannon entropy, the ``alpha -> 1`` limit of :meth:`true_tsallis`."""
        f, p = self.family, self.params
        if f is Family.NORMAL:
            return TrueEntropyValue(1.0, 0.5 * math.log(2.0 * math.pi * math.e * p[1] ** 2), "closed-form")
        if f is Family.EXPONENTIAL:
            return TrueEntropyValue(1.0, 1.0 - math.log(p[0]), "closed-form")
        if f is Family.GOVINDARAJULU:
            value, err = integrate.quad(
                lambda w: math.log(float(self.qdf(w))), 0.0, 1.0, epsabs=1e-13, epsrel=1e-12, limit=500
            )
        else:
            def integrand(x: float) -> float:
                d = float(self.pdf(x))
                return -d * math.log(d) if d > 0 else 0.0

            lo, hi = self.support
            med = float(self.quantile(0.5))
            parts = [integrate.quad(integrand, a, b, limit=500) for a, b in ((lo, med), (med, hi))]
            value, err = sum(v for v, _ in parts), sum(e for _, e in parts)
        if not math.isfinite(value) or err > 1e-7 * max(1.0, abs(value)):
            raise NonexistentEntropy(f"quadrature did not converge for {self.label()} at alpha=1")
        return TrueEntropyValue(1.0, value, "quadrature")

    def entropy(self, alpha: float) -> TrueEntropyValue:
        """:meth:`true_tsallis`, or :meth:`true_shannon` when ``alpha == 1``."""
        return self.true_shannon() if alpha == 1 else self.true_tsallis(alpha)


def quantile_integral(model: DistributionModel, alpha: float) -> float:
    """Adaptive quadrature of ``int_0^1 q(w)^(1-alpha) dw``.

    QUADPACK's extrapolating rule never evaluates the endpoints, so integrable
    endpoint singularities (Govindarajulu with gamma < 1) are handled without
    truncating the interval.  Families with a closed density use the
    equivalent ``int f(x)^alpha dx`` instead (substitute ``w = F(x)``): the
    quantile form of an unbounded-support model overflows near the ends.
    """
    if model.family is Family.GOVINDARAJULU:
        def integrand(w: float) -> float:
            return float(model.qdf(w)) ** (1.0 - alpha)

        pieces = ((0.0, 0.5), (0.5, 1.0))
    else:
        def integrand(x: float) -> float:
            d = float(model.pdf(x))
            return d**alpha if d > 0 else 0.0

        lo, hi = model.support
        med = float(model.quantile(0.5))
        pieces = ((lo, med), (med, hi))
    value = err = 0.0
    for a, b in pieces:
        v, e = integrate.quad(integrand, a, b, epsabs=1e-13, epsrel=1e-12, limit=500)
        value, err = value + v, err + e
    if not math.isfinite(value) or err > 1e-7 * max(1.0, abs(value)):
        raise NonexistentEntropy(
            f"quadrature did not converge for {model.label()} at alpha={alpha} (err={err:.2e})"
        )
    return value


def govindarajulu_beta_integral(sigma: float, gamma: float, alpha: float) -> float:
    """Closed form of ``int_0^1 q(w)^(1-alpha) dw`` through the Beta function."""
    c = sigma * gamma * (gamma + 1.0)
    return c ** (1.0 - alpha) * special.beta((gamma - 1.0) * (1.0 - alpha) + 1.0, 2.0 - alpha)


def renyi_from_tsallis(t: float, alpha: float) -> float:
    """Renyi entropy implied by a Tsallis value of the same order."""
    if alpha == 1:
        return float(t)
    arg = 1.0 - (alpha - 1.0) * t  # = int f^alpha
    if arg <= 0:
        raise InvalidParameter("1 - (alpha - 1) * t must be positive")
    return math.log(arg) / (1.0 - alpha)


def _check_alpha(alpha: float) -> None:
    if not alpha > 0 or alpha == 1:
        raise InvalidParameter("alpha must be positive and different from 1")


def _scalar(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a


# Convenience constructors
def normal(mu: float = 0.0, sigma: float = 1.0) -> DistributionModel:
    return DistributionModel(Family.NORMAL, (mu, sigma))


def exponential(rate: float = 1.0) -> DistributionModel:
    return DistributionModel(Family.EXPONENTIAL, (rate,))


def govindarajulu(mu: float, sigma: float, gamma: float) -> DistributionModel:
    return DistributionModel(Family.GOVINDARAJULU, (mu, sigma, gamma))
