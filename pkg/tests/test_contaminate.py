import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tsrvlab import (
    AdditiveGaussian,
    NoiseThenRound,
    PureRounding,
    contaminate_series,
    f_bar,
    kernel_from_dict,
    observe_one,
    round_price,
    round_ticks,
)
from tsrvlab._random import make_rng


@pytest.mark.parametrize("s, expected", [(0.014, 0.01), (0.015, 0.02), (1.2349, 1.23), (0.0, 0.0)])
def test_round_price(s, expected):
    assert round_price(s, 0.01) == pytest.approx(expected, abs=1e-15)


def test_round_price_rejects_negative():
    with pytest.raises(ValueError):
        round_price(-0.01, 0.01)
    with pytest.raises(ValueError):
        round_ticks([0.1, -1e-9], 0.01)


@given(s=st.floats(0, 1e4), alpha=st.sampled_from([0.01, 0.05, 0.125, 1.0]))
def test_rounding_idempotent(s, alpha):
    once = round_price(s, alpha)
    assert round_price(once, alpha) == once


@given(a=st.floats(0, 1e3), b=st.floats(0, 1e3))
def test_rounding_monotone(a, b):
    lo, hi = sorted((a, b))
    assert round_price(lo, 0.01) <= round_price(hi, 0.01)


def test_pure_rounding_observation():
    y = observe_one(PureRounding(0.01), math.log(1.234), rng=None)
    assert y == pytest.approx(math.log(1.23), abs=1e-15)


class _FixedDraw:
    """Stand-in generator whose standard normal draw is fixed."""

    def __init__(self, z):
        self.z = z

    def standard_normal(self, size=None):
        return self.z if size is None else np.full(size, self.z)


def test_noise_then_round_floor():
    kernel = NoiseThenRound(gamma=0.1, alpha=0.01)
    x = 0.0
    z = (math.log(0.004) - x) / kernel.gamma
    assert observe_one(kernel, x, _FixedDraw(z)) == pytest.approx(math.log(0.01), abs=1e-15)


def test_additive_forced_draw():
    kernel = AdditiveGaussian(0.004)
    assert observe_one(kernel, 0.0, _FixedDraw(0.5)) == pytest.approx(0.002, abs=1e-15)


def test_same_rng_state_same_observation():
    kernel = NoiseThenRound(0.003)
    a = observe_one(kernel, 0.1, make_rng(3, 4, 1))
    b = observe_one(kernel, 0.1, make_rng(3, 4, 1))
    assert a == b


def test_pure_rounding_ignores_seed():
    x = np.linspace(-0.05, 0.05, 101)
    a = contaminate_series(PureRounding(0.01), x, seed=1).y
    b = contaminate_series(PureRounding(0.01), x, seed=2, stream=9).y
    np.testing.assert_array_equal(a, b)


def test_rounded_series_invariants():
    x = np.random.default_rng(0).normal(-3.0, 1.5, 5000)
    obs = contaminate_series(NoiseThenRound(0.01, 0.01), x, seed=4)
    ratio = np.exp(obs.y) / 0.01
    np.testing.assert_allclose(ratio, np.round(ratio), rtol=1e-9)
    assert np.all(obs.ticks >= 1)
    assert obs.y.min() >= math.log(0.01)
    assert len(obs) == x.size
    np.testing.assert_array_equal(obs.prices, obs.ticks * 0.01)


def test_additive_variance_mc():
    gamma = 0.004
    y = contaminate_series(AdditiveGaussian(gamma), np.zeros(1_000_000), seed=8).y
    assert abs(y.var() / gamma**2 - 1) < 0.01


def test_noise_then_round_mean_matches_f_bar():
    kernel = NoiseThenRound(0.005, 0.01)
    y = contaminate_series(kernel, np.zeros(1_000_000), seed=21).y
    se = y.std(ddof=1) / math.sqrt(y.size)
    assert abs(y.mean() - f_bar(kernel, 0.0)) <= 3 * se


def test_kernel_dict_round_trip():
    for k in (AdditiveGaussian(0.001), PureRounding(0.05), NoiseThenRound(0.002, 0.01)):
        assert kernel_from_dict(k.to_dict()) == k
    with pytest.raises(ValueError):
        kernel_from_dict({"kernel": "bid_ask"})


@pytest.mark.parametrize("bad", [0.0, -1.0, float("inf")])
def test_kernel_parameters_positive(bad):
    with pytest.raises(ValueError):
        AdditiveGaussian(bad)
    with pytest.raises(ValueError):
        NoiseThenRound(0.001, bad)
