import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsallis_gof.errors import InvalidParameter, TiedSpacings
from tsallis_gof.sample import Sample
from tsallis_gof.spacings import (
    WeightScheme,
    estimate,
    shannon_vasicek,
    tsallis_e,
    tsallis_h,
    tsallis_v,
    tsallis_w,
    weights,
    window_default,
    window_spacings,
)

S4 = (1.0, 2.0, 3.0, 4.0)
ESTIMATORS = {"v": tsallis_v, "h": tsallis_h, "e": tsallis_e, "w": tsallis_w}


def _naive(x, m, alpha, kind):
    """Loop-based re-implementation with 1-based indices, used as an oracle."""
    x = sorted(x)
    n = len(x)
    at = lambda i: x[min(max(i, 1), n) - 1]
    if kind == "h":
        terms = [((at(i + m) - at(i)) / (m / (n + 1))) for i in range(1, n - m + 1)]
    else:
        terms = []
        for i in range(1, n + 1):
            if kind == "v":
                c = 2.0
            elif kind == "e":
                c = 1 + (i - 1) / m if i <= m else (1 + (n - i) / m if i >= n - m + 1 else 2.0)
            else:
                c = 1.0 if (i <= m or i >= n - m + 1) else 2.0
            terms.append((at(i + m) - at(i - m)) / (c * m / n))
    if alpha == 1:
        return sum(math.log(t) for t in terms) / len(terms)
    return (1 - sum(t ** (1 - alpha) for t in terms) / len(terms)) / (alpha - 1)


def test_hand_examples():
    assert tsallis_v(S4, 1, 2) == pytest.approx(0.625, abs=1e-15)
    assert tsallis_h(S4, 1, 2) == pytest.approx(0.8, abs=1e-15)
    assert tsallis_h(S4, 1, 1) == pytest.approx(math.log(5), abs=1e-15)
    assert tsallis_e(S4, 1, 2) == pytest.approx(0.75, abs=1e-15)
    assert tsallis_w(S4, 1, 2) == pytest.approx(0.75, abs=1e-15)
    assert shannon_vasicek(S4, 1) == pytest.approx(6 * math.log(2) / 4, abs=1e-15)
    assert shannon_vasicek(S4, 1) == pytest.approx(1.039721, abs=1e-6)


@pytest.mark.parametrize("kind", "vhew")
@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 3.3])
@pytest.mark.parametrize("m", [1, 3, 7])
def test_against_loop_oracle(kind, alpha, m):
    x = np.random.default_rng(m).gamma(2.0, size=20)
    assert ESTIMATORS[kind](x, m, alpha) == pytest.approx(_naive(x, m, alpha, kind), rel=1e-12)


def test_window_default_examples():
    assert window_default(20) == 4
    assert [window_default(n) for n in (20, 50, 100)] == [4, 7, 10]
    assert [window_default(n, "third") for n in (20, 50, 100)] == [6, 16, 33]
    assert window_default(4) == 1
    with pytest.raises(InvalidParameter):
        window_default(3)


def test_weights_invariants():
    for n, m in [(10, 1), (10, 3), (50, 7), (9, 4)]:
        c = weights(n, m, WeightScheme.EBRAHIMI_C)
        w = weights(n, m, WeightScheme.MINIMAL_W)
        assert np.all((c >= 1) & (c <= 2))
        assert set(np.unique(w)) <= {1.0, 2.0}
        assert np.all(w <= c)
        if m == 1:
            assert np.array_equal(c, w)


def test_window_spacings_clamp():
    assert np.array_equal(window_spacings(np.array(S4), 1), [1.0, 2.0, 2.0, 1.0])


def test_tied_spacings_raise():
    with pytest.raises(TiedSpacings):
        tsallis_v([1.0, 1.0, 1.0, 2.0, 3.0, 4.0], 1, 2)
    with pytest.raises(TiedSpacings):
        shannon_vasicek([1.0, 1.0, 1.0, 2.0, 3.0, 4.0], 1)


def test_jitter_breaks_ties():
    s = Sample([1.0, 1.0, 1.0, 2.0, 3.0, 4.0], jitter=True)
    assert math.isfinite(tsallis_v(s, 1, 2))
    assert np.all(np.diff(s.sorted) > 0)


def test_window_preconditions():
    with pytest.raises(InvalidParameter):
        tsallis_v(S4, 2, 2)  # m must be < n/2
    assert math.isfinite(tsallis_h(np.arange(1.0, 6.0), 3, 2))  # H allows m < n
    with pytest.raises(InvalidParameter):
        tsallis_h(S4, 4, 2)
    with pytest.raises(InvalidParameter):
        tsallis_v(S4, 1, -1.0)


def test_estimate_dispatch():
    assert estimate("tv", S4, 1, 2) == tsallis_v(S4, 1, 2)
    assert estimate("E", S4, 1, 2) == tsallis_e(S4, 1, 2)


# distinct values built from positive gaps
samples = st.builds(
    lambda start, gaps: list(start + np.cumsum(gaps)),
    st.floats(-50, 50),
    st.lists(st.floats(1e-2, 5.0), min_size=8, max_size=30),
)
alphas = st.sampled_from([0.4, 0.9, 1.0, 1.5, 2.0, 3.0])


@settings(max_examples=60, deadline=None)
@given(x=samples, alpha=alphas, b=st.floats(-100, 100), kind=st.sampled_from("vhew"))
def test_shift_invariance(x, alpha, b, kind):
    x = np.array(x)
    m = max(1, len(x) // 5)
    assert ESTIMATORS[kind](x + b, m, alpha) == pytest.approx(ESTIMATORS[kind](x, m, alpha), abs=1e-8)


@settings(max_examples=60, deadline=None)
@given(x=samples, alpha=st.sampled_from([0.4, 0.9, 1.5, 2.0, 3.0]), a=st.floats(0.1, 10),
       kind=st.sampled_from("vhew"))
def test_scale_covariance_identity(x, alpha, a, kind):
    x = np.array(x)
    m = max(1, len(x) // 5)
    t = ESTIMATORS[kind](x, m, alpha)
    expected = (1 - a ** (1 - alpha) * (1 - (alpha - 1) * t)) / (alpha - 1)
    assert ESTIMATORS[kind](a * x, m, alpha) == pytest.approx(expected, rel=1e-9, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(x=samples, a=st.floats(0.1, 10), b=st.floats(-10, 10))
def test_vasicek_affine(x, a, b):
    x = np.array(x)
    m = max(1, len(x) // 5)
    assert shannon_vasicek(a * x + b, m) == pytest.approx(shannon_vasicek(x, m) + math.log(a), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(x=samples, kind=st.sampled_from("vhew"))
def test_alpha_one_continuity(x, kind):
    x = np.array(x)
    m = max(1, len(x) // 5)
    limit = ESTIMATORS[kind](x, m, 1.0)
    for alpha in (1 - 1e-5, 1 + 1e-5):
        assert abs(ESTIMATORS[kind](x, m, alpha) - limit) < 1e-3
    assert abs(tsallis_v(x, m, 1 + 1e-7) - shannon_vasicek(x, m)) < 1e-4


@settings(max_examples=40, deadline=None)
@given(x=samples, alpha=alphas)
def test_e_equals_w_at_m1(x, alpha):
    assert tsallis_e(x, 1, alpha) == tsallis_w(x, 1, alpha)


def test_vasicek_consistency_exp():
    rng = np.random.default_rng(77)
    x = rng.standard_exponential(10_000)
    assert abs(shannon_vasicek(x, window_default(x.size)) - 1.0) < 0.05


def test_consistency_mae_decreases_with_n():
    rng = np.random.default_rng(5)
    from tsallis_gof.spacings import tsallis_v_sorted

    mae = {}
    for n in (50, 400):
        x = np.sort(rng.standard_exponential((2000, n)), axis=1)
        mae[n] = np.mean(np.abs(tsallis_v_sorted(x, window_default(n), 2.0) - 0.5))
    assert mae[400] < mae[50]


def test_minimal_weight_column_spot_check():
    from tsallis_gof.experiments import run_bias_mse

    cell = run_bias_mse(["tw"], ["norm:0,1"], [(20, 4, 1.0)], 10_000, 1).cells[0]
    assert abs(cell["bias"] - -0.0521) < 0.006
    assert abs(cell["mse"] - 0.0357) < 0.005
