"""Progressive type-II censoring: schemes, sample generation and estimators.

A scheme ``(R_1, ..., R_r)`` on ``n`` units removes ``R_i`` survivors at the
i-th failure, so ``sum(R) = n - r``.  Expected uniform progressively censored
order statistics are ``E(U_i) = 1 - prod_{k=r-i+1}^{r} beta_k`` with

    beta_k = (k + S_k) / (k + 1 + S_k),   S_k = R_{r-k+1} + ... + R_r.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np

from .distributions import DistributionModel, Family
from .divergence import divergence_from_ratio
from .errors import DegenerateIncrement, InvalidParameter, TiedSpacings
from .spacings import _tsallis_from_ratio

_TOKEN = re.compile(r"^\s*(\d+)\s*(?:\*\s*(\d+))?\s*$")


class Boundary(str, Enum):
    """How window indices outside ``1..r`` are mapped to expected uniforms.

    ``clamp`` treats ``E(U_j)`` with the same index clamping as the failure
    times (``j -> 1`` below, ``j -> r`` above).  ``extend`` continues the
    first and last expected increments linearly, which keeps every window
    denominator equal to ``2m/(n+1)`` under conventional type-II censoring.
    """

    CLAMP = "clamp"
    EXTEND = "extend"


def parse_scheme(text: str) -> tuple[int, ...]:
    """Parse ``"10,0*9"`` style removal plans; ``a*b`` is ``b`` copies of ``a``."""
    text = text.strip().strip("()[]")
    out: list[int] = []
    for token in text.split(","):
        match = _TOKEN.match(token)
        if not match:
            raise InvalidParameter(f"bad scheme token {token!r} in {text!r}")
        value, count = int(match.group(1)), int(match.group(2) or 1)
        out.extend([value] * count)
    return tuple(out)


def format_scheme(removals) -> str:
    """Compact scheme string; runs of three or more use ``a*b``."""
    parts: list[str] = []
    removals = list(removals)
    i = 0
    while i < len(removals):
        j = i
        while j < len(removals) and removals[j] == removals[i]:
            j += 1
        run = j - i
        if run >= 3:
            parts.append(f"{removals[i]}*{run}")
        else:
            parts.extend(str(removals[i]) for _ in range(run))
        i = j
    return ",".join(parts)


@dataclass(frozen=True)
class CensoringScheme:
    n: int
    removals: tuple[int, ...]

    def __post_init__(self) -> None:
        removals = tuple(int(v) for v in self.removals)
        object.__setattr__(self, "removals", removals)
        r = len(removals)
        if r < 2:
            raise InvalidParameter("a scheme needs at least two observed failures")
        if r > self.n:
            raise InvalidParameter("more failures than units on test")
        if any(v < 0 for v in removals):
            raise InvalidParameter("removals must be non-negative")
        if sum(removals) != self.n - r:
            raise InvalidParameter(
                f"removals sum to {sum(removals)} but n - r = {self.n - r}"
            )

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "CensoringScheme":
        removals = parse_scheme(text)
        if n is None:
            n = len(removals) + sum(removals)
        return cls(n, removals)

    @classmethod
    def complete(cls, n: int) -> "CensoringScheme":
        return cls(n, (0,) * n)

    @classmethod
    def type2(cls, n: int, r: int) -> "CensoringScheme":
        return cls(n, (0,) * (r - 1) + (n - r,))

    @property
    def r(self) -> int:
        return len(self.removals)

    def label(self) -> str:
        return format_scheme(self.removals)

    @cached_property
    def beta(self) -> np.ndarray:
        """beta_1 .. beta_r."""
        rev = np.cumsum(self.removals[::-1], dtype=float)  # S_k for k = 1..r
        k = np.arange(1, self.r + 1, dtype=float)
        return (k + rev) / (k + 1.0 + rev)

    @cached_property
    def tail_products(self) -> np.ndarray:
        """``P[j] = prod_{k=r-j+1}^{r} beta_k`` for j = 0..r (``P[0] = 1``)."""
        b = self.beta
        p = np.ones(self.r + 1)
        for j in range(1, self.r + 1):
            p[j] = p[j - 1] * b[self.r - j]
        return p

    def expected_uniform(self) -> np.ndarray:
        """``E(U_{i:r:n})`` for i = 1..r."""
        return 1.0 - self.tail_products[1:]

    def window_widths(self, m: int, boundary: Boundary | str = Boundary.CLAMP) -> np.ndarray:
        """``E(U_{i+m}) - E(U_{i-m})`` for i = 1..r under ``boundary``."""
        boundary = Boundary(boundary)
        r = self.r
        eu = self.expected_uniform()
        i = np.arange(1, r + 1)
        if boundary is Boundary.CLAMP:
            return eu[np.minimum(i + m, r) - 1] - eu[np.maximum(i - m, 1) - 1]
        first, last = eu[0], eu[-1] - eu[-2]

        def ext(j: np.ndarray) -> np.ndarray:
            inner = eu[np.clip(j, 1, r) - 1]
            return np.where(j < 1, j * first, np.where(j > r, eu[-1] + (j - r) * last, inner))

        return ext(i + m) - ext(i - m)


@dataclass(frozen=True)
class PC2Sample:
    times: np.ndarray
    scheme: CensoringScheme = field(repr=False)

    def __post_init__(self) -> None:
        t = np.array(self.times, dtype=float).ravel()
        if t.size != self.scheme.r:
            raise InvalidParameter(f"{t.size} failure times for a scheme with r={self.scheme.r}")
        if np.any(np.diff(t) < 0):
            raise InvalidParameter("failure times must be ascending")
        t.setflags(write=False)
        object.__setattr__(self, "times", t)


def default_window(r: int) -> int:
    return int(math.floor(math.sqrt(r) + 0.5))


def _generate_uniform(scheme: CensoringScheme, size: int, rng: np.random.Generator):
    """Return ``(U, -log(1-U))`` arrays of shape ``(size, r)``."""
    r = scheme.r
    exponents = np.arange(1, r + 1) + np.cumsum(scheme.removals[::-1])
    w = 1.0 - rng.random((size, r))  # in (0, 1]
    log_v = np.log(w) / exponents  # log V_1..V_r
    # -log(1 - U_i) = -sum_{j=r-i+1}^{r} log V_j
    neg_log_surv = -np.cumsum(log_v[:, ::-1], axis=1)
    return -np.expm1(-neg_log_surv), neg_log_surv


def generate_pc2_batch(
    model: DistributionModel, scheme: CensoringScheme, size: int, rng: np.random.Generator
) -> np.ndarray:
    """``size`` independent censored samples as rows of a ``(size, r)`` array."""
    if all(v == 0 for v in scheme.removals):
        return np.sort(model.draw((size, scheme.n), rng), axis=1)
    u, neg_log_surv = _generate_uniform(scheme, size, rng)
    if model.family is Family.EXPONENTIAL:
        return neg_log_surv / model.params[0]
    return np.asarray(model.quantile(u))


def generate_pc2(model: DistributionModel, scheme: CensoringScheme, rng) -> PC2Sample:
    """Progressively censored failure times from ``model`` under ``scheme``.

    Uses the uniform-spacings construction of Balakrishnan and Sandhu
    followed by the model quantile; a scheme without removals returns the
    ordered complete sample.
    """
    return PC2Sample(generate_pc2_batch(model, scheme, 1, rng)[0], scheme)


def _window_times(x: np.ndarray, m: int):
    r = x.shape[-1]
    i = np.arange(r)
    return x[..., np.maximum(i - m, 0)], x[..., np.minimum(i + m, r - 1)]


def _check_m(r: int, m: int) -> None:
    if m < 1 or not m < r / 2:
        raise InvalidParameter(f"window size m={m} must satisfy 1 <= m < r/2 (r={r})")


def tsallis_pc2_sorted(x, scheme, m, alpha, boundary=Boundary.CLAMP) -> np.ndarray:
    lo, hi = _window_times(x, m)
    return _tsallis_from_ratio((hi - lo) / scheme.window_widths(m, boundary), alpha)


def tsallis_pc2(
    s: PC2Sample, m: int | None = None, alpha: float = 2.0, boundary: Boundary | str = Boundary.CLAMP
) -> float:
    """Spacings estimator of Tsallis entropy from a censored sample."""
    scheme = s.scheme
    m = default_window(scheme.r) if m is None else m
    _check_m(scheme.r, m)
    if not alpha > 0:
        raise InvalidParameter("alpha must be positive")
    widths = scheme.window_widths(m, boundary)
    if not np.all(widths > 0):
        raise DegenerateIncrement("an expected-uniform window width is zero")
    value = float(tsallis_pc2_sorted(s.times, scheme, m, alpha, boundary))
    if math.isnan(value):
        raise TiedSpacings("a zero spacing between failure times makes the estimate undefined")
    return value


def exp_mle_pc2_sorted(x: np.ndarray, scheme: CensoringScheme) -> np.ndarray:
    return scheme.r / (x * (1.0 + np.asarray(scheme.removals))).sum(axis=-1)


def exp_mle_pc2(s: PC2Sample) -> float:
    """Exponential rate MLE ``r / sum((1 + R_i) X_i)``."""
    if not np.all(s.times > 0):
        raise InvalidParameter("exponential MLE needs positive failure times")
    return float(exp_mle_pc2_sorted(s.times, s.scheme))


def tsallis_divergence_pc2_sorted(x, scheme, m, alpha, rate=None, boundary=Boundary.CLAMP):
    if rate is None:
        rate = exp_mle_pc2_sorted(x, scheme)
    rate = np.asarray(rate, dtype=float)[..., None]
    lo, hi = _window_times(x, m)
    inc = np.exp(-rate * lo) - np.exp(-rate * hi)
    with np.errstate(divide="ignore", invalid="ignore"):
        return divergence_from_ratio(scheme.window_widths(m, boundary) / inc, alpha)


def tsallis_divergence_pc2(
    s: PC2Sample,
    theta_hat: float | None = None,
    m: int | None = None,
    alpha: float = 2.0,
    boundary: Boundary | str = Boundary.CLAMP,
) -> float:
    """Censored-data Tsallis divergence to the exponential fit.

    ``theta_hat`` defaults to :func:`exp_mle_pc2`.  Large values reject
    exponentiality.
    """
    scheme = s.scheme
    m = default_window(scheme.r) if m is None else m
    _check_m(scheme.r, m)
    rate = exp_mle_pc2(s) if theta_hat is None else float(theta_hat)
    if not rate > 0:
        raise InvalidParameter("rate must be positive")
    lo, hi = _window_times(s.times, m)
    if not np.all(np.exp(-rate * lo) - np.exp(-rate * hi) > 0):
        raise DegenerateIncrement("a fitted-cdf increment is zero")
    value = float(tsallis_divergence_pc2_sorted(s.times, scheme, m, alpha, rate, boundary))
    if math.isnan(value):
        raise DegenerateIncrement("the divergence statistic is not finite for this sample")
    return value
