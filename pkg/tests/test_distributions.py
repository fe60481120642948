import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from tailweight.distributions import (
    Burr,
    Frechet,
    Mixture,
    Pareto,
    SeedSpec,
    cdf,
    draw,
    draw_mixture,
    format_model,
    ideal_pareto_sample,
    isf,
    parse_model,
    quantile,
    sample,
    sf,
    target_gamma,
)

MODELS = [
    Burr(0.5, 0.25),
    Burr(2.0, 0.5),
    Frechet(0.5),
    Frechet(1.0),
    Pareto(0.6),
    Mixture(0.1, Burr(0.6, 0.25), Burr(2.0, 0.5)),
    Mixture(0.2, Frechet(0.5), Pareto(2.0)),
]
PROBS = np.round(np.arange(0.01, 1.0, 0.01), 2)


def test_cdf_examples():
    assert cdf(Burr(0.5, 0.25), 1.0) == pytest.approx(1 - 2**-0.5, abs=1e-15)
    assert cdf(Frechet(1.0), 1 / math.log(2)) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("m", MODELS, ids=format_model)
def test_cdf_limits_and_monotone(m):
    assert cdf(m, 1e300) == pytest.approx(1.0)
    assert cdf(m, 0.0) == 0.0
    assert cdf(m, -3.0) == 0.0
    x = np.geomspace(1e-3, 1e6, 5000)
    f = cdf(m, x)
    assert np.all((f >= 0) & (f <= 1))
    assert np.all(np.diff(f) >= 0)
    assert np.allclose(sf(m, x), 1 - f, atol=1e-15)


def test_quantile_examples():
    assert quantile(Frechet(1.0), math.exp(-1)) == pytest.approx(1.0, rel=1e-14)
    assert quantile(Burr(0.5, 0.25), 1 - 2**-0.5) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("m", MODELS, ids=format_model)
def test_round_trips(m):
    x = quantile(m, PROBS)
    assert np.allclose(cdf(m, x), PROBS, rtol=0, atol=1e-10)
    assert np.allclose(quantile(m, cdf(m, x)), x, rtol=1e-10)
    assert np.allclose(sf(m, isf(m, PROBS)), PROBS, rtol=1e-10)


@pytest.mark.parametrize("m", [Burr(0.5, 0.25), Frechet(0.5), Pareto(1.0)], ids=format_model)
def test_isf_keeps_extreme_tail(m):
    v = np.array([1e-12, 1e-50, 1e-200])
    x = isf(m, v)
    assert np.all(np.isfinite(x))
    assert np.allclose(np.log(sf(m, x)), np.log(v), rtol=1e-12, atol=0)


def test_domain_errors():
    for bad in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            quantile(Frechet(1.0), bad)
        with pytest.raises(ValueError):
            isf(Frechet(1.0), bad)


def test_model_validation():
    with pytest.raises(ValueError):
        Burr(0, 1)
    with pytest.raises(ValueError):
        Frechet(-1)
    with pytest.raises(ValueError):
        Pareto(float("nan"))
    for eps in (0.0, 1.0, -0.1):
        with pytest.raises(ValueError):
            Mixture(eps, Pareto(1), Pareto(2))
    inner = Mixture(0.1, Pareto(1), Pareto(2))
    with pytest.raises(ValueError, match="nested"):
        Mixture(0.1, inner, Pareto(2))


@pytest.mark.parametrize("m", MODELS, ids=format_model)
def test_sample_deterministic_and_sorted(m):
    a = sample(m, 500, SeedSpec(7, 3))
    b = sample(m, 500, SeedSpec(7, 3))
    assert np.array_equal(a.values, b.values)
    assert np.all(np.diff(a.values) >= 0)
    c = sample(m, 500, SeedSpec(7, 4))
    assert not np.array_equal(a.values, c.values)


def test_sample_requires_n():
    with pytest.raises(ValueError):
        sample(Pareto(1), 2, SeedSpec(0))


def test_streams_independent_of_base_seed_collision():
    # (base, stream) pairs map to distinct Philox keys
    a = sample(Pareto(1), 50, SeedSpec(1, 0)).values
    b = sample(Pareto(1), 50, SeedSpec(0, 1)).values
    assert not np.array_equal(a, b)


def test_kolmogorov_smirnov_frechet():
    m = Frechet(0.5)
    x = sample(m, 10**5, SeedSpec(2024, 0)).values
    d = stats.kstest(x, lambda t: cdf(m, t)).statistic
    assert d < 1.63 / math.sqrt(10**5)


@pytest.mark.parametrize("m", [Burr(0.6, 0.25), Mixture(0.1, Burr(0.6, 0.25), Burr(2.0, 0.5))], ids=format_model)
def test_kolmogorov_smirnov_others(m):
    x = sample(m, 20000, SeedSpec(11, 1)).values
    assert stats.kstest(x, lambda t: cdf(m, t)).statistic < 1.63 / math.sqrt(20000)


def test_mixture_branch_fraction():
    m = Mixture(0.1, Burr(0.6, 0.25), Frechet(2.0))
    _, branch = draw_mixture(m, 10**6, SeedSpec(99, 0).generator())
    assert abs(branch.mean() - 0.1) < 0.001


def test_draw_matches_draw_mixture():
    m = Mixture(0.1, Burr(0.6, 0.25), Frechet(2.0))
    x, _ = draw_mixture(m, 100, SeedSpec(5).generator())
    assert np.array_equal(draw(m, 100, SeedSpec(5).generator()), x)


@pytest.mark.parametrize("m", [Burr(0.5, 0.25), Burr(1.0, 1.0), Frechet(0.5), Frechet(2.0)], ids=format_model)
def test_regular_variation(m):
    g = m.gamma
    ratios = [sf(m, 2 * x) / sf(m, x) for x in (1e2, 1e3, 1e4)]
    target = 2 ** (-1 / g)
    assert abs(ratios[-1] / target - 1) < 0.02
    errs = [abs(r / target - 1) for r in ratios]
    assert errs[2] <= errs[0] + 1e-15


def test_target_gamma():
    assert target_gamma(Pareto(0.6)) == 0.6
    assert target_gamma(Mixture(0.1, Burr(0.6, 0.25), Frechet(2))) == 0.6
    assert target_gamma(Mixture(0.3, Burr(0.6, 0.25), Frechet(2))) == 0.6


@pytest.mark.parametrize("m", MODELS, ids=format_model)
def test_parse_format_round_trip(m):
    assert parse_model(format_model(m)) == m


def test_parse_examples_and_errors():
    assert parse_model("burr:0.5:0.25") == Burr(0.5, 0.25)
    assert parse_model("MIX:0.1:burr:1:0.25:burr:2:0.5") == Mixture(0.1, Burr(1, 0.25), Burr(2, 0.5))
    for bad in ("burr:0.5", "weibull:1", "pareto:x", "pareto:1:2", "mix:0.1:pareto:1", "frechet:-1"):
        with pytest.raises(ValueError):
            parse_model(bad)


def test_ideal_pareto_sample_relative_excesses():
    g, n = 0.7, 101
    s = ideal_pareto_sample(g, n)
    for k in (10, 50, 100):
        i = np.arange(1, k + 1)
        assert np.allclose(np.exp(s.log_excesses(k)), ((k + 1) / i) ** g, rtol=1e-12)


@given(g=st.floats(0.1, 3.0), d=st.floats(0.1, 3.0), p=st.floats(1e-6, 1 - 1e-6))
@settings(max_examples=200, deadline=None)
def test_burr_round_trip_property(g, d, p):
    m = Burr(g, d)
    x = quantile(m, p)
    assert cdf(m, x) == pytest.approx(p, abs=1e-10)
