"""Immutable sample container with cached order statistics."""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .errors import InvalidParameter

JITTER_EPS = 1e-12


class Sample:
    """An ordered batch of real observations.

    Parameters
    ----------
    values : array_like
        Observations in the order they were recorded.
    jitter : bool, optional
        Break exact ties deterministically by adding ``k * 1e-12 * range`` to
        the k-th order statistic (k = 0, 1, ...).  Off by default, in which
        case tied observations make the spacings estimators raise.
    """

    __slots__ = ("_values", "_jitter", "__dict__")

    def __init__(self, values, jitter: bool = False):
        arr = np.array(values, dtype=float).ravel()
        if arr.size == 0:
            raise InvalidParameter("a sample needs at least one observation")
        if not np.all(np.isfinite(arr)):
            raise InvalidParameter("sample contains non-finite values")
        arr.setflags(write=False)
        self._values = arr
        self._jitter = bool(jitter)

    @property
    def values(self) -> np.ndarray:
        return self._values

    @cached_property
    def sorted(self) -> np.ndarray:
        s = np.sort(self._values)
        if self._jitter and s.size > 1:
            span = s[-1] - s[0]
            s = s + np.arange(s.size) * JITTER_EPS * (span if span > 0 else 1.0)
        s.setflags(write=False)
        return s

    @property
    def n(self) -> int:
        return self._values.size

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"Sample(n={self.n})"


def as_sorted(data) -> np.ndarray:
    """Ascending order statistics of a :class:`Sample` or array-like."""
    if isinstance(data, Sample):
        return data.sorted
    return np.sort(np.asarray(data, dtype=float))
