import math

import numpy as np
import pytest
import sympy as sp

from tailweight.asymptotics import (
    AsymptoticSpec,
    bias_b1,
    bias_b2,
    clt_variance,
    eta,
    j_dpsi,
    psi_s,
    sigma2,
    summary,
)
from tailweight.paretomodel import ModelPoint, ell_gamma_J, psi1, quad01
from tailweight.weights import WeightFunction as W, j_derivative, j_value

GRID = [(g, a, w) for g in (0.25, 0.5, 1.0, 2.0) for a in (0.1, 0.5, 1.0) for w in W]
N_RIEMANN = 10**6


def _midpoints(n=N_RIEMANN):
    edges = np.linspace(0.0, 1.0, n + 1)
    return edges, 0.5 * (edges[:-1] + edges[1:])


def _j0_symbolic(g, a):
    """eta and sigma2 for J0 in closed form (sympy)."""
    s = sp.symbols("s", positive=True)
    ell = s ** (g + 1) / g
    score = (-sp.log(s) - 1) / g
    psi = a * ell**a * score
    eta_ = (1 + a) * sp.integrate(ell ** (a + 1) * score**2 / s ** (g + 1) * g, (s, 0, 1))
    # Var of int B dpsi: int F^2 - (int F)^2 with F(s) = psi(1) - psi(s)
    F = psi.subs(s, 1) - psi
    sig = sp.integrate(F**2, (s, 0, 1)) - sp.integrate(F, (s, 0, 1)) ** 2
    return float(eta_), float(sig)


def test_spec_validation():
    with pytest.raises(ValueError):
        AsymptoticSpec(0, 1, W.J0)
    with pytest.raises(ValueError):
        AsymptoticSpec(1, 0, W.J0)
    with pytest.raises(ValueError):
        AsymptoticSpec(1, 1, W.J0, tau=0.0)
    assert AsymptoticSpec(1, 1, "j3").weight is W.J3


def test_eta_example():
    assert eta(AsymptoticSpec(1, 1, W.J0)) == pytest.approx(10 / 27, abs=1e-9)


def test_sigma2_example_exact():
    assert sigma2(AsymptoticSpec(1, 1, W.J0)) == pytest.approx(877 / 10125, abs=1e-10)


@pytest.mark.parametrize("g,a", [(1, 1), (sp.Rational(1, 2), sp.Rational(1, 2)), (2, sp.Rational(1, 2))])
def test_j0_symbolic_oracles(g, a):
    e, s2 = _j0_symbolic(sp.nsimplify(g), sp.nsimplify(a))
    spec = AsymptoticSpec(float(g), float(a), W.J0)
    assert eta(spec) == pytest.approx(e, rel=1e-9)
    assert sigma2(spec) == pytest.approx(s2, rel=1e-9)


@pytest.mark.parametrize("g,a,w", GRID)
def test_positivity_and_finiteness_on_grid(g, a, w):
    spec = AsymptoticSpec(g, a, w)
    assert eta(spec) > 0
    assert sigma2(spec) > 0
    assert math.isfinite(bias_b1(spec))


@pytest.mark.parametrize("w", list(W))
@pytest.mark.parametrize("g,a", [(0.5, 0.5), (1.0, 1.0), (2.0, 0.1)])
def test_sigma2_orders_agree(w, g, a):
    spec = AsymptoticSpec(g, a, w)
    assert sigma2(spec, "lower") == pytest.approx(sigma2(spec, "upper"), abs=1e-10)


@pytest.mark.parametrize("w", [W.J0, W.J3, W.JLog])
@pytest.mark.parametrize("g,a", [(0.5, 0.5), (1.0, 1.0)])
def test_sigma2_variance_identity(w, g, a):
    # int int (min - st) dF dF = int T^2 - (int T)^2 with T(s) = int_s^1 J dpsi
    spec = AsymptoticSpec(g, a, w)
    f = lambda t: float(j_dpsi(spec, t))  # noqa: E731
    T = lambda s: quad01(f, a=s, b=1.0, epsabs=1e-12, epsrel=1e-11) if s > 0 else quad01(f)  # noqa: E731
    m2 = quad01(lambda s: T(s) ** 2, epsabs=1e-11, epsrel=1e-10)
    m1 = quad01(T, epsabs=1e-11, epsrel=1e-10)
    assert sigma2(spec) == pytest.approx(m2 - m1 * m1, rel=1e-7)


def test_sigma2_brownian_bridge_monte_carlo():
    spec = AsymptoticSpec(1, 1, W.J0)
    m = 1000
    edges = np.linspace(0.0, 1.0, m + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    dpsi = np.diff(psi_s(spec, np.clip(edges, 1e-300, 1.0)) * 1.0)
    # int B dpsi = sum_j dW_j (tail_j - int s dpsi) for the bridge B = W - s W(1)
    tail = np.cumsum(dpsi[::-1])[::-1]
    c = tail - np.sum(mid * dpsi)
    rng = np.random.Generator(np.random.Philox(20240607))
    draws = np.concatenate([rng.standard_normal((5000, m)) @ c for _ in range(20)]) / math.sqrt(m)
    assert draws.var() == pytest.approx(sigma2(spec), rel=0.01)


def test_eta_riemann_oracle():
    g, a = 1.0, 1.0
    spec = AsymptoticSpec(g, a, W.J0)
    _, mid = _midpoints()
    x = mid**-g
    # (1 + a) int (Psi_{g,1})^2 l^(a-1) dx with dx = g s^(-g-1) ds
    p = ModelPoint(g, 1.0, W.J0)
    vals = (1 + a) * psi1(p, x) ** 2 * ell_gamma_J(p, x) ** (a - 1) * g * mid ** (-g - 1)
    assert np.mean(vals) == pytest.approx(eta(spec), rel=1e-6)


@pytest.mark.parametrize("w", [W.J0, W.J3, W.JLog])
@pytest.mark.parametrize("g,a", [(0.5, 0.5), (1.0, 1.0), (2.0, 0.5)])
def test_eta_two_ways(w, g, a):
    spec = AsymptoticSpec(g, a, w)
    p = ModelPoint(g, a, w)

    def f(s):
        if s <= 0 or s >= 1:
            return 0.0
        x = s**-g
        ell = ell_gamma_J(p, x)
        if ell <= 0:
            return 0.0
        psi_one = psi1(p, x) / (a * ell ** (a - 1))
        return psi_one**2 * ell ** (a - 1) * g * s ** (-g - 1)

    assert eta(spec) == pytest.approx((1 + a) * quad01(f, epsabs=1e-12, epsrel=1e-10), rel=1e-8)


@pytest.mark.parametrize("w", list(W))
def test_j_dpsi_matches_finite_difference(w):
    spec = AsymptoticSpec(0.7, 0.6, w)
    s = np.linspace(0.05, 0.95, 19)
    h = 1e-6
    fd = (psi_s(spec, s + h) - psi_s(spec, s - h)) / (2 * h)
    ref = j_value(w, s) * fd
    assert np.allclose(j_dpsi(spec, s), ref, rtol=1e-6, atol=1e-9)


def _stieltjes_bias(spec, m, n=N_RIEMANN):
    """-sum s q J (psi(s_{i+1}) - psi(s_i)) at midpoints, from psi values alone."""
    edges, mid = _midpoints(n)
    e = np.clip(edges, 1e-300, 1.0)
    dpsi = np.diff(psi_s(spec, e, m))
    q = np.expm1(-spec.tau * np.log(mid)) / (spec.tau * spec.gamma0)
    return -np.sum(mid * q * j_value(spec.weight, mid) * dpsi)


def test_b1_riemann_oracle():
    spec = AsymptoticSpec(1, 1, W.J0, tau=-1)
    assert bias_b1(spec) == pytest.approx(_stieltjes_bias(spec, 1), rel=1e-5)


def test_b2_riemann_oracle():
    spec = AsymptoticSpec(1, 1, W.J0, tau=-1)
    assert bias_b2(spec) == pytest.approx(_stieltjes_bias(spec, 2), rel=1e-4)


@pytest.mark.parametrize("w", [W.J0, W.J3, W.JLog])
def test_b1_b2_weighted_riemann(w):
    spec = AsymptoticSpec(0.5, 0.5, w, tau=-0.5)
    assert bias_b1(spec) == pytest.approx(_stieltjes_bias(spec, 1, 2 * 10**5), rel=1e-4)
    assert bias_b2(spec) == pytest.approx(_stieltjes_bias(spec, 2, 2 * 10**5), rel=1e-3)


@pytest.mark.parametrize("w", list(W))
@pytest.mark.parametrize("g,a,t", [(0.5, 0.5, -1.0), (1.0, 1.0, -0.5), (2.0, 0.1, -2.0)])
def test_b1_three_routes(w, g, a, t):
    spec = AsymptoticSpec(g, a, w, tau=t)
    d = bias_b1(spec, "direct")
    assert bias_b1(spec, "parts") == pytest.approx(d, rel=1e-8, abs=1e-9)
    assert bias_b1(spec, "x") == pytest.approx(d, rel=1e-6, abs=1e-8)


def test_bias_method_errors():
    spec = AsymptoticSpec(1, 1, W.J0)
    with pytest.raises(ValueError):
        bias_b1(spec, "magic")
    with pytest.raises(ValueError):
        bias_b2(spec, "direct")


@pytest.mark.parametrize("w", [W.J0, W.J3])
def test_tau_to_zero_limit(w):
    g, a = 0.5, 0.5
    spec = AsymptoticSpec(g, a, w, tau=-1e-8)

    def lim(m):
        # limit weight s J(s) (-log s / g), integrated by parts against psi_m
        def f(s):
            if s <= 0 or s >= 1:
                return 0.0
            jp = 0.0 if w is W.J0 else float(j_derivative(w, s, 1))
            dhb = (j_value(w, s) + s * jp) * (-math.log(s) / g) - j_value(w, s) / g
            return dhb * float(psi_s(spec, s, m))

        return quad01(f)

    assert bias_b1(spec) == pytest.approx(lim(1), abs=1e-4)
    assert bias_b2(spec) == pytest.approx(lim(2), abs=1e-4)


@pytest.mark.parametrize("w", [W.J0, W.J3])
def test_bias_continuous_in_tau(w):
    taus = -np.geomspace(1e-6, 5.0, 25)
    b1 = np.array([bias_b1(AsymptoticSpec(0.5, 0.5, w, tau=t)) for t in taus])
    b2 = np.array([bias_b2(AsymptoticSpec(0.5, 0.5, w, tau=t)) for t in taus])
    assert np.all(np.isfinite(b1)) and np.all(np.isfinite(b2))
    # smooth in tau: adjacent jumps shrink with the step
    for b in (b1, b2):
        steps = np.abs(np.diff(b)) / np.abs(np.diff(taus))
        assert np.max(steps) < 10 * (1 + np.max(np.abs(b)))


def test_clt_variance_lambda_zero():
    var, shift = clt_variance(AsymptoticSpec(0.5, 0.5, W.J3))
    assert var > 0 and shift == 0.0


def test_clt_mean_shift_formula():
    spec = AsymptoticSpec(0.5, 0.5, W.J3, tau=-1, lam=0.7)
    var, shift = clt_variance(spec)
    c = 1 + 1 / 0.5
    assert shift == pytest.approx(c * 0.7 * bias_b1(spec) / eta(spec), rel=1e-12)
    assert var == pytest.approx(c * c * sigma2(spec) / eta(spec) ** 2, rel=1e-12)


def test_clt_hill_limit():
    var, _ = clt_variance(AsymptoticSpec(0.5, 1e-3, W.J0))
    assert var == pytest.approx(0.25, rel=0.05)


def test_summary_keys():
    out = summary(AsymptoticSpec(1, 1, W.J0, lam=0.5))
    assert set(out) == {"eta", "sigma2", "b1", "b2", "clt_variance", "clt_mean_shift"}
    assert out["eta"] == pytest.approx(10 / 27, abs=1e-9)
    assert out["clt_mean_shift"] != 0.0
