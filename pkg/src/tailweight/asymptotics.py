"""Limiting constants of the WMDPD estimator.

Under the second-order condition with parameter tau < 0 and sqrt(k) A(n/k) -> lam,

    (1 + 1/alpha)^-1 eta sqrt(k) (gamma_hat - gamma0) -> N(lam B1, sigma2).

Every integral is evaluated in s = x^(-1/gamma0) on (0, 1). With
psi(s) = Psi^(1)_{gamma0,alpha}(s^-gamma0) the measure J(s) dpsi(s) has the
closed-form density

    J psi' = alpha gamma^(-alpha-1) s^(a-1) J^alpha [(alpha s J' + a J) h + s J h'],

where a = alpha (gamma + 1), h = -log s - 1 - L(s) and h' = -1/s - L'(s).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .paretomodel import QuadratureError, _psi1_logx, _psi_m_logx, quad01, richardson
from .weights import (
    WeightFunction,
    _ell_L_derivative_log,
    _ell_L_log,
    _j_log_domain,
    _scalar_terms,
    j_derivative,
    parse_weight,
)

__all__ = [
    "AsymptoticSpec",
    "eta",
    "sigma2",
    "bias_b1",
    "bias_b2",
    "clt_variance",
    "summary",
    "j_dpsi",
    "psi_s",
]

EPSABS = 1e-10
EPSREL = 1e-8
# the two triangle orderings must agree to ~1e-10, so sigma2 runs tighter
DBL_EPSABS = 1e-13
DBL_EPSREL = 1e-12
DBL_MAX_ERR = 1e-8


@dataclass(frozen=True)
class AsymptoticSpec:
    gamma0: float
    alpha: float
    weight: WeightFunction
    tau: float = -1.0
    lam: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "weight", parse_weight(self.weight))
        if not self.gamma0 > 0:
            raise ValueError(f"gamma0 must be > 0, got {self.gamma0}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if not self.tau < 0:
            raise ValueError(f"tau must be < 0, got {self.tau}")


def _arr(s):
    return np.atleast_1d(np.asarray(s, dtype=float))


def _out(val, s):
    return float(val[0]) if np.ndim(s) == 0 else val


def _jprime(w, s):
    if w is WeightFunction.J0:
        return np.zeros_like(s)
    return np.asarray(j_derivative(w, s, 1), dtype=float)


def psi_s(spec: AsymptoticSpec, s, m: int = 1):
    """psi_m(s) = Psi^(m)_{gamma0,alpha}(s^-gamma0); m = 1 closed form, m = 2, 3 finite differences."""
    s1 = _arr(s)
    with np.errstate(divide="ignore"):
        logx = -spec.gamma0 * np.log(s1)
    if m == 1:
        val = _psi1_logx(spec.gamma0, spec.alpha, spec.weight, logx)
    else:
        val = _psi_m_logx(spec.gamma0, spec.alpha, spec.weight, logx, m)
    return _out(val, s)


def j_dpsi(spec: AsymptoticSpec, s):
    """Density of the measure J(s) dpsi(s) on (0, 1), analytic."""
    g, al, w = spec.gamma0, spec.alpha, spec.weight
    s1 = _arr(s)
    log_s = np.log(s1)
    a = al * (g + 1.0)
    j = _j_log_domain(w, s1, log_s)
    h = -log_s - 1.0 - _ell_L_log(w, s1, log_s)
    dh = -1.0 / s1 - _ell_L_derivative_log(w, s1, log_s)
    sj1 = s1 * _jprime(w, s1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ja = np.exp(al * np.log(j))
    core = (al * sj1 + a * j) * h + s1 * j * dh
    val = al * g ** (-al - 1.0) * np.exp((a - 1.0) * log_s) * ja * core
    val = np.where(j > 0, val, 0.0)
    return _out(val, s)


def _w_scalar(spec):
    """Plain-float version of :func:`j_dpsi` for nested quadrature."""
    g, al, w = spec.gamma0, spec.alpha, spec.weight
    a = al * (g + 1.0)
    pref = al * g ** (-al - 1.0)

    def f(s):
        if s <= 0.0 or s >= 1.0:
            return 0.0
        log_s = math.log(s)
        j, sj1, ell, dell = _scalar_terms(w, s, log_s)
        if j <= 0.0:
            return 0.0
        h = -log_s - 1.0 - ell
        core = (al * sj1 + a * j) * h + j * (-1.0 - s * dell)
        return pref * math.exp((a - 1.0) * log_s + al * math.log(j)) * core

    return f


def eta(spec: AsymptoticSpec) -> float:
    """eta = (1 + alpha) int (Psi^(1)_{gamma0,1})^2 l^(alpha-1) dx > 0."""
    g, al, w = spec.gamma0, spec.alpha, spec.weight

    def f(s):
        if s <= 0.0 or s >= 1.0:
            return 0.0
        log_s = math.log(s)
        j, _, ell, _ = _scalar_terms(w, s, log_s)
        if j <= 0.0:
            return 0.0
        sc = (-log_s - 1.0 - ell) / g
        return j ** (1.0 + al) * math.exp(al * (g + 1.0) * log_s) * sc * sc

    return (1.0 + al) * g**-al * quad01(f, epsabs=EPSABS, epsrel=EPSREL)


def _dblquad(f, gfun, hfun):
    # the tight tolerances can sit below roundoff for small alpha; the error
    # estimate, not the QUADPACK warning, decides whether the value is usable
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.dblquad(f, 0.0, 1.0, gfun, hfun, epsabs=DBL_EPSABS, epsrel=DBL_EPSREL)
    if not np.isfinite(val) or err > DBL_MAX_ERR * max(1.0, abs(val)):
        raise QuadratureError(f"double integral failed (estimate {val}, error {err})")
    return val


def sigma2(spec: AsymptoticSpec, order: str = "lower") -> float:
    """sigma2 = int int (min(s,t) - s t) J(s) J(t) dpsi(s) dpsi(t) over (0,1)^2.

    The square is split along the diagonal and the symmetric integrand is
    integrated over one triangle: ``order='lower'`` integrates s < t with s
    innermost, ``order='upper'`` integrates t > s with t innermost.
    """
    w = _w_scalar(spec)
    if order == "lower":
        # 2 int_0^1 (1-t) w(t) int_0^t s w(s) ds dt; dblquad integrand is f(inner, outer)
        val = _dblquad(lambda s, t: s * (1.0 - t) * w(s) * w(t), lambda t: 0.0, lambda t: t)
    elif order == "upper":
        val = _dblquad(lambda t, s: s * (1.0 - t) * w(s) * w(t), lambda s: s, lambda s: 1.0)
    else:
        raise ValueError("order must be 'lower' or 'upper'")
    return 2.0 * val


def _qtilde(s, gamma, tau):
    """(s^-tau - 1)/(tau gamma), i.e. (x^(tau/gamma) - 1)/(tau gamma) at x = s^-gamma."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.expm1(-tau * np.log(s)) / (tau * gamma)


def _bias_weight(spec, s):
    """h_b(s) = s J(s) (s^-tau - 1)/(tau gamma) and its s-derivative."""
    g, t, w = spec.gamma0, spec.tau, spec.weight
    s1 = _arr(s)
    log_s = np.log(s1)
    j = _j_log_domain(w, s1, log_s)
    q = _qtilde(s1, g, t)
    hb = s1 * j * q
    dhb = s1 * _jprime(w, s1) * q + j * (q - np.exp(-t * log_s) / g)
    return hb, dhb


def _bias(spec, m, method):
    g, t, w = spec.gamma0, spec.tau, spec.weight
    if method == "direct":
        if m != 1:
            raise ValueError("direct route is available for m = 1 only")

        wf = _w_scalar(spec)

        def f(s):
            if s <= 0.0 or s >= 1.0:
                return 0.0
            return -s * math.expm1(-t * math.log(s)) / (t * g) * wf(s)

        return quad01(f, epsabs=EPSABS, epsrel=EPSREL)
    if method == "parts":
        # -int hb dpsi_m = int hb' psi_m ds, boundary terms vanish (hb(0) = hb(1) = 0)
        def f(s):
            if s <= 0.0 or s >= 1.0:
                return 0.0
            return float(_bias_weight(spec, s)[1][0] * psi_s(spec, s, m))

        return quad01(f, epsabs=EPSABS, epsrel=EPSREL)
    if method == "x":
        # literal form on [1, inf): int x^(-1/g) (x^(t/g)-1)/(t g) J(x^(-1/g)) dPsi_m(x)
        def dpsi_dx(x):
            def psi_of(xx):
                return float(_psi_m_logx(g, spec.alpha, w, np.array([math.log(xx)]), m)[0])

            return richardson(psi_of, x, 1e-4 * x)

        def f(x):
            sx = x ** (-1.0 / g)
            jx = float(_j_log_domain(w, np.array([sx]), np.array([-math.log(x) / g]))[0])
            if jx == 0.0:
                return 0.0
            return sx * math.expm1(t * math.log(x) / g) / (t * g) * jx * dpsi_dx(x)

        val, err = integrate.quad(f, 1.0, np.inf, epsabs=EPSABS, epsrel=1e-6, limit=400)
        return val
    raise ValueError(f"unknown method {method!r}")


def bias_b1(spec: AsymptoticSpec, method: str = "direct") -> float:
    """B1 = int_1^inf x^(-1/g) (x^(tau/g)-1)/(tau g) J(x^(-1/g)) dPsi^(1)_{g,alpha}(x).

    ``method`` selects the closed-form s-domain density ('direct'),
    integration by parts against psi ('parts') or the x-domain form with a
    numerical x-derivative ('x').
    """
    return _bias(spec, 1, method)


def bias_b2(spec: AsymptoticSpec, method: str = "parts") -> float:
    """B2: as :func:`bias_b1` with Psi^(2) (finite differences in gamma)."""
    return _bias(spec, 2, method)


def clt_variance(spec: AsymptoticSpec, sig2: float | None = None, et: float | None = None,
                 b1: float | None = None) -> tuple[float, float]:
    """Variance and mean of the limiting law of sqrt(k) (gamma_hat - gamma0).

    Returns ((1 + 1/alpha)^2 sigma2 / eta^2, (1 + 1/alpha) lam B1 / eta).
    """
    et = eta(spec) if et is None else et
    sig2 = sigma2(spec) if sig2 is None else sig2
    c = 1.0 + 1.0 / spec.alpha
    var = c * c * sig2 / (et * et)
    if spec.lam == 0.0:
        return var, 0.0
    b1 = bias_b1(spec) if b1 is None else b1
    return var, c * spec.lam * b1 / et


def summary(spec: AsymptoticSpec) -> dict:
    """All limiting constants as a dict (keys eta, sigma2, b1, b2, clt_variance, clt_mean_shift)."""
    et = eta(spec)
    sig2 = sigma2(spec)
    b1 = bias_b1(spec)
    b2 = bias_b2(spec)
    var, shift = clt_variance(spec, sig2, et, b1)
    return {"eta": et, "sigma2": sig2, "b1": b1, "b2": b2, "clt_variance": var, "clt_mean_shift": shift}
