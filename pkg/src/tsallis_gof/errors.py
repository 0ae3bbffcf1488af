"""Exception types raised by the estimators and tests."""


class TsallisGofError(ValueError):
    """Base class for domain errors in this package."""


class TiedSpacings(TsallisGofError):
    """A spacing used by an estimator is zero, so a term is undefined."""


class DegenerateIncrement(TsallisGofError):
    """A fitted-cdf or expected-uniform increment is zero."""


class NonexistentEntropy(TsallisGofError):
    """The entropy integral diverges for the requested alpha."""


class InvalidParameter(TsallisGofError):
    """A model or configuration parameter is outside its admissible range."""
