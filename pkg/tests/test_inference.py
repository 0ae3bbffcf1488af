import numpy as np
import pytest
from scipy import stats

from tsallis_gof.censoring import CensoringScheme, PC2Sample, generate_pc2
from tsallis_gof.distributions import exponential, normal
from tsallis_gof.errors import InvalidParameter
from tsallis_gof.inference import (
    NullCache,
    NullDistribution,
    Tail,
    critical_value,
    exponentiality_test,
    get_statistic,
    normality_test,
    p_value,
    pc2_exponentiality_test,
    simulate_null,
    simulate_statistic,
    statistic_test,
)


def test_critical_value_interpolation():
    values = np.arange(1.0, 101.0)
    assert critical_value(values, 0.05) == pytest.approx(95.05, abs=1e-12)
    assert critical_value(values[::-1], 0.05) == pytest.approx(95.05, abs=1e-12)
    assert critical_value(values, 0.05, Tail.LOWER) == pytest.approx(5.95, abs=1e-12)
    with pytest.raises(InvalidParameter):
        critical_value(values, 1.0)


def test_critical_value_monotone_in_level():
    values = np.random.default_rng(0).normal(size=1000)
    crit = [critical_value(values, a) for a in (0.01, 0.05, 0.1, 0.2)]
    assert crit == sorted(crit, reverse=True)


def test_p_value_counts():
    values = np.arange(1.0, 100.0)
    assert p_value(values, 1000.0) == pytest.approx(1 / 100)
    assert p_value(values, -5.0) == pytest.approx(1.0)
    assert p_value(values, 99.0) == pytest.approx(2 / 100)
    assert p_value(values, 1.0, Tail.LOWER) == pytest.approx(2 / 100)


def test_null_is_deterministic():
    a = simulate_null("tsallis-exp", n=20, m=4, alpha=2.0, reps=1000, seed=11)
    b = simulate_null("tsallis-exp", n=20, m=4, alpha=2.0, reps=1000, seed=11)
    c = simulate_null("tsallis-exp", n=20, m=4, alpha=2.0, reps=1000, seed=12)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)
    assert a.failures == 0


def test_null_extends_with_reps():
    short = simulate_null("tsallis-normal", n=15, m=3, alpha=2.0, reps=1000, seed=5)
    long = simulate_null("tsallis-normal", n=15, m=3, alpha=2.0, reps=2000, seed=5)
    assert set(short.values) <= set(long.values)


def test_null_worker_count_determinism():
    one = simulate_null("tsallis-normal", n=20, m=4, alpha=1.5, reps=3000, seed=8, workers=1)
    three = simulate_null("tsallis-normal", n=20, m=4, alpha=1.5, reps=3000, seed=8, workers=3)
    assert np.array_equal(one.values, three.values)


def test_reps_floor():
    with pytest.raises(InvalidParameter):
        simulate_null("tsallis-exp", n=20, reps=999, seed=1)


def test_unknown_statistic():
    with pytest.raises(InvalidParameter):
        get_statistic("nope")


@pytest.mark.parametrize("statistic,n", [("tsallis-normal", 20), ("tsallis-exp", 20), ("ks-normal", 20)])
def test_null_free_of_parameter(statistic, n):
    # MLE re-fitting makes the null law independent of the scale
    a = simulate_null(statistic, n=n, alpha=2.0, reps=3000, seed=21, theta=1.0)
    b = simulate_null(statistic, n=n, alpha=2.0, reps=3000, seed=21, theta=5 / 7)
    assert not np.array_equal(a.values, b.values)
    assert stats.ks_2samp(a.values, b.values).pvalue > 0.01


def test_pc2_null_free_of_parameter():
    a = simulate_null("tsallis-exp-pc2", scheme="5,0*9", n=15, alpha=2.0, reps=2000, seed=2, theta=1.0)
    b = simulate_null("tsallis-exp-pc2", scheme="5,0*9", n=15, alpha=2.0, reps=2000, seed=2, theta=5 / 7)
    assert stats.ks_2samp(a.values, b.values).pvalue > 0.01


def _size(statistic, model, n, scheme=None, reps=10_000):
    nd = simulate_null(statistic, n=n, scheme=scheme, alpha=2.0, reps=reps, seed=100)
    stat = get_statistic(statistic)
    sc = CensoringScheme.parse(scheme, n) if scheme else None
    obs = simulate_statistic(stat, model, n=n, scheme=sc, m=nd.m, alpha=nd.alpha, reps=reps,
                             seed=200, keys=(99,))
    level = 0.05 if scheme is None else 0.10
    return np.mean(obs > critical_value(nd, level)), level


@pytest.mark.parametrize("statistic,model", [
    ("tsallis-normal", normal(3.0, 2.0)),
    ("tsallis-exp", exponential(0.4)),
    ("ks-normal", normal(-1.0, 0.5)),
])
def test_empirical_size(statistic, model):
    size, level = _size(statistic, model, 20)
    assert abs(size - level) < 0.01


def test_empirical_size_pc2():
    size, level = _size("tsallis-exp-pc2", exponential(2.0), 20, scheme="0*9,10", reps=5000)
    assert abs(size - level) < 0.015


def test_p_values_uniform_under_null():
    nd = simulate_null("tsallis-exp", n=20, m=4, alpha=2.0, reps=5000, seed=31)
    obs = simulate_statistic(get_statistic("tsallis-exp"), exponential(), n=20, scheme=None,
                             m=4, alpha=2.0, reps=2000, seed=32)
    p = np.array([p_value(nd, o) for o in obs])
    assert stats.kstest(p, "uniform").pvalue > 0.01


def test_cache_round_trip(tmp_path):
    nd = simulate_null("tsallis-exp", n=12, m=2, alpha=1.5, reps=1000, seed=4)
    path = nd.save(tmp_path / "null.npz")
    back = NullDistribution.load(path)
    assert np.array_equal(back.values, nd.values)
    assert back.key() == nd.key()
    assert (back.values.tobytes()) == nd.values.tobytes()


def test_cache_directory_reuse(tmp_path):
    cache = NullCache(tmp_path)
    x = np.random.default_rng(3).standard_exponential(15)
    first = exponentiality_test(x, reps=1000, seed=9, cache=cache)
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    second = exponentiality_test(x, reps=1000, seed=9, cache=cache)
    uncached = exponentiality_test(x, reps=1000, seed=9)
    assert first == second == uncached


def test_decision_invariant_to_scale():
    x = np.random.default_rng(4).normal(size=25)
    a = normality_test(x, reps=1000, seed=3)
    b = normality_test(5 * x + 2, reps=1000, seed=3)
    assert a.reject == b.reject
    assert a.p_value == b.p_value
    assert a.statistic == pytest.approx(b.statistic, abs=1e-10)


def test_normality_detects_exponential():
    x = np.random.default_rng(6).standard_exponential(100)
    assert normality_test(x, reps=1000, seed=1).reject


def test_exponentiality_requires_positive():
    with pytest.raises(InvalidParameter):
        exponentiality_test([-1.0, 1.0, 2.0, 3.0, 4.0], reps=1000, seed=1)


def test_statistic_test_matches_specialised():
    x = np.random.default_rng(7).normal(size=30)
    assert statistic_test("tsallis-normal", x, reps=1000, seed=2) == normality_test(x, reps=1000, seed=2)
    with pytest.raises(InvalidParameter):
        statistic_test("tsallis-exp-pc2", x, reps=1000, seed=2)


def test_pc2_test_runs():
    scheme = CensoringScheme.parse("2,0*5,2", 11)
    s = generate_pc2(exponential(), scheme, np.random.default_rng(1))
    assert isinstance(s, PC2Sample)
    res = pc2_exponentiality_test(s, reps=1000, seed=5)
    assert 0 < res.p_value <= 1
    assert res.level == 0.10


def _pc2_power(scheme, model="we:2"):
    from tsallis_gof.experiments import run_power_table

    sc = CensoringScheme.parse(scheme, 20)
    return run_power_table("exp-pc2", [model], [(sc, None, 2.0)], 5000, 1, level=0.10).cells[0]["power"]


@pytest.mark.parametrize("scheme,target", [("0*14,5", 0.8750), ("0*9,10", 0.6650)])
def test_pc2_power_type2_rows(scheme, target):
    assert abs(_pc2_power(scheme) - target) < 0.02


@pytest.mark.xfail(strict=True, reason="non-type-II censored rows are not reproducible; see the ledger")
def test_pc2_power_published_example():
    assert abs(_pc2_power("1,1,0*5,1,0*5,1,1") - 0.9772) < 0.02
