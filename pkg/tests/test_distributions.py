import math

import numpy as np
import pytest
from scipy import integrate, stats

from tsallis_gof.distributions import (
    DistributionModel,
    Family,
    exponential,
    govindarajulu,
    govindarajulu_beta_integral,
    normal,
    quantile_integral,
    renyi_from_tsallis,
)
from tsallis_gof.errors import InvalidParameter, NonexistentEntropy

GOV = govindarajulu(0.0, 0.75, 0.25)

CLOSED_CDF = [
    "norm:0,1", "exp:1", "cauchy", "gamma:2", "we:1.5", "ln:0.5", "uniform",
    "beta:2,3", "chen:1,1", "gamma:0.4", "we:0.5",
]
ALL_MODELS = CLOSED_CDF + ["gov:0,0.75,0.25", "gov:0,1,1", "gov:1,2,3"]


def test_pdf_examples():
    assert normal().pdf(0.0) == pytest.approx(1 / math.sqrt(2 * math.pi), abs=1e-12)
    assert exponential().pdf(0.0) == pytest.approx(1.0)
    w = 0.5
    sigma, gamma = 0.75, 0.25
    q = sigma * gamma * (gamma + 1) * w ** (gamma - 1) * (1 - w)
    assert GOV.pdf(GOV.quantile(w)) == pytest.approx(1 / q, rel=1e-8)


def test_pdf_zero_outside_support():
    assert exponential().pdf(-1.0) == 0.0
    assert GOV.pdf(-0.1) == 0.0
    assert GOV.pdf(0.8) == 0.0


def test_cdf_examples():
    assert exponential().cdf(math.log(2)) == pytest.approx(0.5, abs=1e-15)
    assert DistributionModel.parse("chen:1,1").cdf(0.0) == 0.0
    assert GOV.cdf(GOV.quantile(0.3)) == pytest.approx(0.3, abs=1e-8)


def test_quantile_examples():
    assert DistributionModel.parse("uniform").quantile(0.25) == 0.25
    assert GOV.quantile(1.0) == pytest.approx(0.75, abs=1e-15)
    assert normal().quantile(0.975) == pytest.approx(1.959964, abs=1e-6)


def test_quantile_rejects_outside_unit_interval():
    with pytest.raises(InvalidParameter):
        normal().quantile(1.5)


@pytest.mark.parametrize("spec", CLOSED_CDF)
def test_cdf_quantile_round_trip(spec):
    model = DistributionModel.parse(spec)
    w = np.linspace(0.001, 0.999, 199)
    assert np.max(np.abs(model.cdf(model.quantile(w)) - w)) < 1e-9


def test_govindarajulu_round_trip_through_bisection():
    w = np.linspace(0.01, 0.99, 99)
    assert np.max(np.abs(GOV.cdf(GOV.quantile(w)) - w)) < 1e-9


@pytest.mark.parametrize("spec", ALL_MODELS)
def test_pdf_integrates_to_one(spec):
    model = DistributionModel.parse(spec)
    lo, hi = model.support
    # split at the median so quad sees the bulk of the mass on both sides
    med = float(model.quantile(0.5))
    total = sum(
        integrate.quad(lambda x: float(model.pdf(x)), a, b, limit=400)[0]
        for a, b in ((lo, med), (med, hi))
    )
    assert total == pytest.approx(1.0, abs=1e-6)


def test_govindarajulu_qdf_identity():
    w = np.linspace(0.01, 0.99, 99)
    for model in (GOV, govindarajulu(0, 0.25, 0.75), govindarajulu(1, 2, 3)):
        assert np.max(np.abs(model.pdf(model.quantile(w)) * model.qdf(w) - 1)) < 1e-8


@pytest.mark.parametrize("spec", ALL_MODELS)
def test_sampling_law_ks(spec):
    model = DistributionModel.parse(spec)
    x = model.draw(10_000, np.random.default_rng(12345))
    # 1% one-sample KS critical value for n = 10^4
    assert stats.kstest(x, model.cdf).statistic < 1.63 / math.sqrt(10_000)


def test_sample_is_deterministic():
    a = exponential().sample(5, np.random.default_rng(3)).values
    b = exponential().sample(5, np.random.default_rng(3)).values
    assert np.array_equal(a, b)


def test_govindarajulu_draw_is_inverse_transform():
    model = govindarajulu(0, 1, 1)
    x = model.draw(50, np.random.default_rng(9))
    u = np.random.default_rng(9).random(50)
    assert np.array_equal(x, model.quantile(u))


def test_normal_sample_mean_clt_bound():
    x = normal().draw(100_000, np.random.default_rng(2024))
    assert abs(x.mean()) < 4 / math.sqrt(100_000)


def test_true_tsallis_examples():
    assert exponential().true_tsallis(2).value == 0.5
    assert normal().true_tsallis(2).value == pytest.approx(1 - 1 / (2 * math.sqrt(math.pi)), abs=1e-6)
    assert normal().true_tsallis(2).provenance == "closed-form"


@pytest.mark.parametrize("spec", ["norm:0,1", "norm:2,3", "exp:1", "exp:2.5"])
@pytest.mark.parametrize("alpha", [0.3, 0.8, 1.5, 2.0, 3.0])
def test_quadrature_agrees_with_closed_form(spec, alpha):
    model = DistributionModel.parse(spec)
    closed = model.true_tsallis(alpha).value
    quad = (1 - quantile_integral(model, alpha)) / (alpha - 1)
    assert quad == pytest.approx(closed, abs=1e-6)


# Frozen from the Beta-function identity int_0^1 q^(1-a) = c^(1-a) B((g-1)(1-a)+1, 2-a)
GOV_TRUE = [
    ((0, 0.75, 0.25), 0.15, -0.4591690800),
    ((0, 0.75, 0.25), 0.75, -1.1769381067),
    ((0, 0.25, 0.75), 0.15, -0.8307800271),
    ((0, 0.25, 0.75), 0.75, -1.3918671007),
]


@pytest.mark.parametrize("params,alpha,expected", GOV_TRUE)
def test_govindarajulu_true_values(params, alpha, expected):
    value = govindarajulu(*params).true_tsallis(alpha)
    assert value.provenance == "quadrature"
    assert value.value == pytest.approx(expected, abs=1e-8)
    beta = (1 - govindarajulu_beta_integral(params[1], params[2], alpha)) / (alpha - 1)
    assert value.value == pytest.approx(beta, abs=1e-9)


@pytest.mark.parametrize("alpha", [2.0, 2.5, 3.0])
def test_govindarajulu_nonexistent_entropy(alpha):
    with pytest.raises(NonexistentEntropy):
        GOV.true_tsallis(alpha)


def test_govindarajulu_lower_endpoint_divergence():
    # (gamma-1)(1-alpha) <= -1 makes the integrand non-integrable at 0
    with pytest.raises(NonexistentEntropy):
        govindarajulu(0, 1, 3).true_tsallis(1.6)
    # finite for 1 < alpha < 2 when gamma <= 1
    assert math.isfinite(govindarajulu(0, 1, 0.5).true_tsallis(1.6).value)


def test_true_tsallis_rejects_alpha_one():
    with pytest.raises(InvalidParameter):
        normal().true_tsallis(1.0)


def test_shannon_limit():
    for model in (normal(0, 2), exponential(3), GOV):
        h = model.true_shannon().value
        assert model.true_tsallis(1 + 1e-6).value == pytest.approx(h, abs=1e-4)
    assert DistributionModel.parse("gamma:2").true_shannon().value == pytest.approx(
        float(stats.gamma(2).entropy()), abs=1e-8
    )
    assert normal().entropy(1).value == pytest.approx(0.5 * math.log(2 * math.pi * math.e))


@pytest.mark.parametrize("spec", ["gamma:2", "we:1.5", "ln:0.5", "beta:2,3", "cauchy"])
def test_quadrature_families_against_scipy_renyi_oracle(spec):
    # int f^2 evaluated independently by scipy's expect on the frozen law
    model = DistributionModel.parse(spec)
    oracle = model._scipy().expect(lambda x: model._scipy().pdf(x))
    assert model.true_tsallis(2.0).value == pytest.approx(1 - oracle, abs=1e-6)


def test_renyi_from_tsallis():
    assert renyi_from_tsallis(0.0, 3.0) == 0.0
    # Exp(1), alpha=2: int f^2 = 1/2, so the Renyi entropy is -log(1/2)
    assert renyi_from_tsallis(0.5, 2.0) == pytest.approx(math.log(2.0))
    assert renyi_from_tsallis(0.3, 1 + 1e-6) == pytest.approx(0.3, abs=1e-4)
    with pytest.raises(InvalidParameter):
        renyi_from_tsallis(2.0, 2.0)


@pytest.mark.parametrize("spec", ["norm:0,-1", "exp:0", "gov:0,1,-1", "chen:0,1", "beta:1"])
def test_invalid_parameters_rejected(spec):
    with pytest.raises(InvalidParameter):
        DistributionModel.parse(spec)


def test_parse_aliases_and_label():
    assert DistributionModel.parse("we:0.5").family is Family.WEIBULL
    assert DistributionModel.parse("GA:0.4").label() == "gamma:0.4"
    with pytest.raises(InvalidParameter):
        DistributionModel.parse("nosuch:1")
