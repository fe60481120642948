"""Weighted Pareto density and its gamma-derivatives.

The weighted density is l_{gamma,J}(x) = J(x^{-1/gamma}) l_gamma(x) on x >= 1,
with l_gamma the standard Pareto density. Integrals over [1, inf) are taken in
s = x^{-1/gamma}, where l_{gamma,J}(x) dx = J(s) ds and
l_{gamma,J}(x) = J(s) s^{gamma+1} / gamma.

Psi^(m)_{gamma,alpha}(x) denotes the m-th gamma-derivative of l_{gamma,J}^alpha.
The first derivative is closed form; higher orders use Richardson-extrapolated
central differences of it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .weights import (
    WeightFunction,
    _ell_L_log,
    _j_log_domain,
    power_moment,
    power_moment_dlog,
)

__all__ = [
    "ModelPoint",
    "QuadratureError",
    "ell_gamma",
    "ell_gamma_J",
    "score",
    "psi1",
    "psi_m",
    "integral_power",
    "integral_psi1",
    "integral_ell_psi1",
    "quad01",
    "richardson",
]

QUAD_EPSABS = 1e-10
QUAD_EPSREL = 1e-8


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


@dataclass(frozen=True)
class ModelPoint:
    gamma: float
    alpha: float
    weight: WeightFunction

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if not isinstance(self.weight, WeightFunction):
            raise TypeError("weight must be a WeightFunction")

    def replace(self, **changes) -> "ModelPoint":
        fields = {"gamma": self.gamma, "alpha": self.alpha, "weight": self.weight}
        fields.update(changes)
        return ModelPoint(**fields)


def quad01(f, *, epsabs: float = QUAD_EPSABS, epsrel: float = QUAD_EPSREL, a=0.0, b=1.0, limit=200):
    """Adaptive Gauss-Kronrod quadrature (QUADPACK) raising on failure."""
    res = integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1)
    val, err = res[0], res[1]
    if len(res) > 3:
        raise QuadratureError(f"quadrature on [{a}, {b}] failed: {res[3]} (estimate {val}, error {err})")
    return val


def richardson(f, x: float, h: float):
    """Central difference of f at x with one Richardson step (O(h^4))."""
    d1 = (f(x + h) - f(x - h)) / (2.0 * h)
    h2 = 0.5 * h
    d2 = (f(x + h2) - f(x - h2)) / (2.0 * h2)
    return (4.0 * d2 - d1) / 3.0


def _check_x(x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 1.0):
        raise ValueError("x must be >= 1")
    return x


def ell_gamma(gamma: float, x):
    """Standard Pareto density gamma^-1 x^(-1 - 1/gamma), x >= 1."""
    if not gamma > 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    x = _check_x(x)
    out = x ** (-1.0 - 1.0 / gamma) / gamma
    return float(out) if out.ndim == 0 else out


def _log_ell_J(gamma, w, s, log_s):
    with np.errstate(divide="ignore"):
        return np.log(_j_log_domain(w, s, log_s)) - np.log(gamma) + (gamma + 1.0) * log_s


def _s_from_logx(gamma, logx):
    log_s = -logx / gamma
    return np.exp(log_s), log_s


def ell_gamma_J(p: ModelPoint, x):
    """Weighted density J(x^(-1/gamma)) l_gamma(x)."""
    x = _check_x(x)
    s, log_s = _s_from_logx(p.gamma, np.log(np.atleast_1d(x)))
    out = np.exp(_log_ell_J(p.gamma, p.weight, s, log_s))
    return float(out[0]) if x.ndim == 0 else out


def _score_s(gamma, w, s, log_s):
    # d/dgamma log l_{gamma,J} = (log x / gamma - 1 - L(s)) / gamma, log x = -gamma log s
    return (-log_s - 1.0 - _ell_L_log(w, s, log_s)) / gamma


def score(p: ModelPoint, x):
    """gamma-derivative of log l_{gamma,J}(x)."""
    x = _check_x(x)
    s, log_s = _s_from_logx(p.gamma, np.log(np.atleast_1d(x)))
    out = _score_s(p.gamma, p.weight, s, log_s)
    return float(out[0]) if x.ndim == 0 else out


def _psi1_s(gamma, alpha, w, s, log_s):
    """Psi^(1)_{gamma,alpha} at x = s^(-gamma), from s and log s."""
    la = np.exp(alpha * _log_ell_J(gamma, w, s, log_s))
    return alpha * la * _score_s(gamma, w, s, log_s)


def _psi1_logx(gamma, alpha, w, logx):
    s, log_s = _s_from_logx(gamma, logx)
    return _psi1_s(gamma, alpha, w, s, log_s)


def psi1(p: ModelPoint, x):
    """First gamma-derivative of l_{gamma,J}^alpha at x, closed form."""
    if not p.alpha > 0:
        raise ValueError("psi1 requires alpha > 0")
    x = _check_x(x)
    out = _psi1_logx(p.gamma, p.alpha, p.weight, np.log(np.atleast_1d(x)))
    return float(out[0]) if x.ndim == 0 else out


def _fd_step(gamma: float) -> float:
    return 1e-4 * gamma


def _psi_m_logx(gamma, alpha, w, logx, m):
    if m == 1:
        return _psi1_logx(gamma, alpha, w, logx)
    return richardson(lambda g: _psi_m_logx(g, alpha, w, logx, m - 1), gamma, _fd_step(gamma))


def psi_m(p: ModelPoint, x, m: int):
    """m-th gamma-derivative of l_{gamma,J}^alpha, m in {2, 3}, by Richardson differences."""
    if m not in (2, 3):
        raise ValueError(f"psi_m supports m = 2 or 3, got {m}")
    if not p.alpha > 0:
        raise ValueError("psi_m requires alpha > 0")
    x = _check_x(x)
    out = _psi_m_logx(p.gamma, p.alpha, p.weight, np.log(np.atleast_1d(x)), m)
    return float(out[0]) if x.ndim == 0 else out


def _integral_power_exact(gamma, w, power):
    return gamma ** (1.0 - power) * power_moment(w, power, (power - 1.0) * (gamma + 1.0))


def integral_power(p: ModelPoint, power: float, method: str = "exact") -> float:
    """int_1^inf l_{gamma,J}(x)^power dx.

    In s this is gamma^(1-power) int_0^1 J(s)^power s^((power-1)(gamma+1)) ds;
    ``method='exact'`` uses Beta/Gamma closed forms, ``'quad'`` adaptive quadrature.
    """
    if not power > 0:
        raise ValueError("power must be > 0")
    g, w = p.gamma, p.weight
    if (power - 1.0) * (g + 1.0) <= -1.0:
        raise ValueError(f"int l^power diverges at s = 0 for power = {power}, gamma = {g}")
    if method == "exact":
        return float(_integral_power_exact(g, w, power))
    if method == "quad":
        a = (power - 1.0) * (g + 1.0)

        def f(s):
            s1 = np.atleast_1d(s)
            with np.errstate(divide="ignore"):
                j = _j_log_domain(w, s1, np.log(s1))
            return float(j[0] ** power * s ** a) if s > 0 else 0.0

        return g ** (1.0 - power) * quad01(f, epsabs=1e-12, epsrel=1e-10)
    raise ValueError(f"unknown method {method!r}")


def _integral_psi1_exact(gamma, alpha, w):
    power = 1.0 + alpha
    a = alpha * (gamma + 1.0)
    val = _integral_power_exact(gamma, w, power)
    # d/dgamma [gamma^(1-p) M(p, a(gamma))], da/dgamma = alpha
    return val * ((1.0 - power) / gamma + alpha * power_moment_dlog(w, power, a))


def integral_psi1(p: ModelPoint, method: str = "exact") -> float:
    """int_1^inf Psi^(1)_{gamma,alpha+1}(x) dx.

    This is the gamma-derivative of int l_{gamma,J}^(1+alpha) dx; ``'exact'``
    differentiates the closed form, ``'quad'`` integrates Psi^(1) in s.
    """
    if not p.alpha > 0:
        raise ValueError("integral_psi1 requires alpha > 0")
    g, a, w = p.gamma, p.alpha, p.weight
    if method == "exact":
        return float(_integral_psi1_exact(g, a, w))
    if method == "quad":
        # Psi^(1)_{g,a+1}(x) dx = (a+1) g^-a J^(a+1) s^(a(g+1)) score ds
        def f(s):
            if s <= 0.0:
                return 0.0
            s1 = np.array([s])
            log_s = np.log(s1)
            j = _j_log_domain(w, s1, log_s)[0]
            if j <= 0.0:
                return 0.0
            sc = _score_s(g, w, s1, log_s)[0]
            return (a + 1.0) * g**-a * j ** (a + 1.0) * s ** (a * (g + 1.0)) * sc

        return quad01(f)
    raise ValueError(f"unknown method {method!r}")


def integral_ell_psi1(p: ModelPoint) -> float:
    """int_1^inf l_{gamma,J}(x) Psi^(1)_{gamma,alpha}(x) dx = int_0^1 J(s) Psi^(1)(s^-gamma) ds."""
    g, a, w = p.gamma, p.alpha, p.weight

    def f(s):
        if s <= 0.0:
            return 0.0
        s1 = np.array([s])
        log_s = np.log(s1)
        return float(_j_log_domain(w, s1, log_s)[0] * _psi1_s(g, a, w, s1, log_s)[0])

    return quad01(f)
