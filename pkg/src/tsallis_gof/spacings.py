"""m-spacings estimators of Tsallis entropy and their Shannon limits.

All estimators index order statistics with the boundary convention
``X(i) = X(1)`` for ``i < 1`` and ``X(i) = X(n)`` for ``i > n``.

The ``*_sorted`` functions are the computational kernels.  They accept an
array whose last axis holds ascending order statistics, so a whole batch of
Monte Carlo replicates is evaluated in one call; degenerate rows (a zero
spacing where the term is undefined) come back as NaN.  The public functions
wrap them for a single sample and raise :class:`TiedSpacings` instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidParameter, TiedSpacings
from .sample import as_sorted


class WindowRule(str, Enum):
    SQRT = "sqrt"    # floor(sqrt(n) + 0.5)
    THIRD = "third"  # floor(n / 3)


class WeightScheme(str, Enum):
    EBRAHIMI_C = "ebrahimi"
    MINIMAL_W = "minimal"


@dataclass(frozen=True)
class SpacingsConfig:
    m: int
    alpha: float

    def __post_init__(self) -> None:
        if int(self.m) != self.m or self.m < 1:
            raise InvalidParameter("window size m must be a positive integer")
        if not self.alpha > 0:
            raise InvalidParameter("alpha must be positive")


def window_default(n: int, rule: WindowRule | str = WindowRule.SQRT) -> int:
    """Default window size, clamped so that ``m < n / 2``."""
    rule = WindowRule(rule)
    if n < 4:
        raise InvalidParameter("window rules need n >= 4")
    m = math.floor(math.sqrt(n) + 0.5) if rule is WindowRule.SQRT else n // 3
    while m > 1 and not m < n / 2:
        m -= 1
    return max(m, 1)


def _check_window(n: int, m: int, limit: float) -> None:
    if m < 1 or not m < limit:
        raise InvalidParameter(f"window size m={m} must satisfy 1 <= m < {limit:g} (n={n})")


def window_spacings(x: np.ndarray, m: int) -> np.ndarray:
    """Clamped 2m-spacings ``X(i+m) - X(i-m)`` along the last axis."""
    n = x.shape[-1]
    i = np.arange(n)
    return x[..., np.minimum(i + m, n - 1)] - x[..., np.maximum(i - m, 0)]


def weights(n: int, m: int, scheme: WeightScheme | str) -> np.ndarray:
    """Boundary weights C_i (Ebrahimi) or W_i (minimal) for i = 1..n."""
    scheme = WeightScheme(scheme)
    i = np.arange(1, n + 1, dtype=float)
    w = np.full(n, 2.0)
    left, right = i <= m, i >= n - m + 1
    if scheme is WeightScheme.EBRAHIMI_C:
        w[left] = 1.0 + (i[left] - 1.0) / m
        w[right] = 1.0 + (n - i[right]) / m
    else:
        w[left | right] = 1.0
    return w


def _tsallis_from_ratio(ratio: np.ndarray, alpha: float) -> np.ndarray:
    """(1/(alpha-1)) (1 - mean(ratio^(1-alpha))), or mean(log ratio) at alpha=1."""
    with np.errstate(divide="ignore", invalid="ignore"):
        if alpha == 1:
            terms = np.log(ratio)
            out = terms.mean(axis=-1)
        else:
            terms = ratio ** (1.0 - alpha)
            out = (1.0 - terms.mean(axis=-1)) / (alpha - 1.0)
    bad = ~np.isfinite(terms).all(axis=-1)
    return np.where(bad, np.nan, out)


def tsallis_v_sorted(x: np.ndarray, m: int, alpha: float) -> np.ndarray:
    n = x.shape[-1]
    return _tsallis_from_ratio(window_spacings(x, m) / (2.0 * m / n), alpha)


def tsallis_h_sorted(x: np.ndarray, m: int, alpha: float) -> np.ndarray:
    n = x.shape[-1]
    sp = x[..., m:] - x[..., : n - m]
    return _tsallis_from_ratio(sp / (m / (n + 1.0)), alpha)


def _weighted_sorted(x: np.ndarray, m: int, alpha: float, scheme: WeightScheme) -> np.ndarray:
    n = x.shape[-1]
    return _tsallis_from_ratio(window_spacings(x, m) / (weights(n, m, scheme) * m / n), alpha)


def tsallis_e_sorted(x: np.ndarray, m: int, alpha: float) -> np.ndarray:
    return _weighted_sorted(x, m, alpha, WeightScheme.EBRAHIMI_C)


def tsallis_w_sorted(x: np.ndarray, m: int, alpha: float) -> np.ndarray:
    return _weighted_sorted(x, m, alpha, WeightScheme.MINIMAL_W)


_KERNELS = {
    "v": (tsallis_v_sorted, 0.5),
    "h": (tsallis_h_sorted, 1.0),
    "e": (tsallis_e_sorted, 0.5),
    "w": (tsallis_w_sorted, 0.5),
}

ESTIMATORS = tuple(_KERNELS)


def estimator_sorted(name: str):
    """Batch kernel for estimator ``name`` in {"v", "h", "e", "w"}."""
    return _KERNELS[name.lower()][0]


def _evaluate(name: str, s, m: int, alpha: float) -> float:
    kernel, frac = _KERNELS[name]
    x = as_sorted(s)
    n = x.size
    if n < 2:
        raise InvalidParameter("spacings estimators need n >= 2")
    SpacingsConfig(m, alpha)
    _check_window(n, m, frac * n)
    value = float(kernel(x, m, alpha))
    if math.isnan(value):
        raise TiedSpacings(
            f"a zero spacing makes the T{name.upper()} estimator undefined at alpha={alpha}; "
            "pass jitter=True to Sample to break ties"
        )
    return value


def tsallis_v(s, m: int, alpha: float) -> float:
    """Vasicek-type estimator; ``alpha == 1`` gives the Vasicek entropy estimate."""
    return _evaluate("v", s, m, alpha)


def tsallis_h(s, m: int, alpha: float) -> float:
    """Forward m-spacings estimator with ``m / (n + 1)`` normalisation."""
    return _evaluate("h", s, m, alpha)


def tsallis_e(s, m: int, alpha: float) -> float:
    """Ebrahimi-weighted estimator (weights C_i in [1, 2])."""
    return _evaluate("e", s, m, alpha)


def tsallis_w(s, m: int, alpha: float) -> float:
    """Estimator with minimal boundary weights W_i in {1, 2}."""
    return _evaluate("w", s, m, alpha)


def shannon_vasicek(s, m: int) -> float:
    return _evaluate("v", s, m, 1.0)


def estimate(name: str, s, m: int, alpha: float) -> float:
    """Dispatch by short estimator name (``"v"``, ``"h"``, ``"e"``, ``"w"``)."""
    key = name.lower().removeprefix("t")
    if key not in _KERNELS:
        raise InvalidParameter(f"unknown estimator {name!r}; expected one of tv, th, te, tw")
    return _evaluate(key, s, m, alpha)
