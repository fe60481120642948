"""Weight-function catalog for weighted tail-index estimators.

Each catalog entry J is a nonincreasing function on (0, 1) used to downweight
the most extreme relative excesses. The module exposes J, its derivatives, the
log-derivative correction term L(s) = s J'(s)/J(s) log s and its derivative,
the WLSE normalizer beta = -int_0^1 J(s) log s ds, and the kernel
K(s) = phi(s) / (s beta) with phi(s) = int_0^s J(t) dt.

The polynomial entries are J_q(s) = c_q (1 - s^2)^q. Everything that depends
on J is evaluated in closed form (polynomials, Beta and Gamma functions).
"""

from __future__ import annotations

import enum
import math
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial
from scipy import special

__all__ = [
    "WeightFunction",
    "parse_weight",
    "j_value",
    "j_derivative",
    "ell_L",
    "ell_L_derivative",
    "beta",
    "phi",
    "kernel_from_weight",
    "power_moment",
    "power_moment_dlog",
]

# below this |log s| the removable singularity of L at s = 1 is evaluated by series
_L_SERIES_THRESHOLD = 1e-6
# L'(s) has a cancelling numerator; the series is used on a wider band
_DL_SERIES_THRESHOLD = 1e-2


class WeightFunction(enum.Enum):
    JLog = "JLog"
    J0 = "J0"
    J1 = "J1"
    J2 = "J2"
    J3 = "J3"
    J4 = "J4"

    def __str__(self) -> str:
        return self.value


# (coefficient, power) for J(s) = c (1 - s^2)^q
_POLY = {
    WeightFunction.J1: (2.0 / 3.0, 1),
    WeightFunction.J2: (15.0 / 8.0, 2),
    WeightFunction.J3: (35.0 / 16.0, 3),
    WeightFunction.J4: (315.0 / 128.0, 4),
}


def parse_weight(name: str | WeightFunction) -> WeightFunction:
    """Look up a catalog entry by name (case-insensitive: 'J3', 'jlog', ...)."""
    if isinstance(name, WeightFunction):
        return name
    for w in WeightFunction:
        if w.value.lower() == str(name).strip().lower():
            return w
    valid = ", ".join(w.value for w in WeightFunction)
    raise ValueError(f"unknown weight function {name!r}; expected one of {valid}")


@lru_cache(maxsize=None)
def _poly(w: WeightFunction) -> Polynomial:
    c, q = _POLY[w]
    return c * Polynomial([1.0, 0.0, -1.0]) ** q


def _as_array(s):
    return np.asarray(s, dtype=float)


def _ret(out, scalar: bool):
    return float(out) if scalar else out


def j_value(w: WeightFunction, s):
    """J(s). Zero outside [0, 1]; endpoints take the one-sided limits.

    The closed interval matters at s = 1 (relative excess x = 1, a tie with the
    threshold), where J0 is 1 and the polynomial entries vanish.
    """
    s_arr = _as_array(s)
    scalar = s_arr.ndim == 0
    s_arr = np.atleast_1d(s_arr)
    inside = (s_arr >= 0.0) & (s_arr <= 1.0)
    out = np.zeros_like(s_arr)
    si = s_arr[inside]
    if w is WeightFunction.J0:
        out[inside] = 1.0
    elif w is WeightFunction.JLog:
        with np.errstate(divide="ignore"):
            out[inside] = -np.log(si)
    else:
        c, q = _POLY[w]
        out[inside] = c * (1.0 - si * si) ** q
    return _ret(out[0] if scalar else out, scalar)


def j_derivative(w: WeightFunction, s, m: int = 1):
    """m-th derivative of J on (0, 1), m in 1..3."""
    if m not in (1, 2, 3):
        raise ValueError(f"derivative order m must be 1, 2 or 3, got {m}")
    s_arr = _as_array(s)
    if w is WeightFunction.J0:
        out = np.zeros_like(s_arr)
    elif w is WeightFunction.JLog:
        # d^m/ds^m (-log s) = (-1)^m (m-1)! / s^m
        out = (-1.0) ** m * special.factorial(m - 1) / s_arr**m
    else:
        out = _poly(w).deriv(m)(s_arr)
    return _ret(out, s_arr.ndim == 0)


def _j_log_domain(w: WeightFunction, s: np.ndarray, log_s: np.ndarray) -> np.ndarray:
    # J evaluated from log s so that J_log stays finite when s underflows
    if w is WeightFunction.J0:
        return np.ones_like(s)
    if w is WeightFunction.JLog:
        return -log_s
    c, q = _POLY[w]
    # factored form: 1 - s^2 = -expm1(2 log s) keeps J >= 0 and accurate near s = 1
    return c * (-np.expm1(2.0 * log_s)) ** q


def _log_ratio(u: np.ndarray) -> np.ndarray:
    """log(s) / (s^2 - 1) written in u = log s; equals 1/2 at s = 1."""
    out = np.empty_like(u)
    small = np.abs(u) < _L_SERIES_THRESHOLD
    us = u[small]
    out[small] = 0.5 * (1.0 - us + us * us / 3.0)
    ub = u[~small]
    out[~small] = ub / np.expm1(2.0 * ub)
    return out


def _dl_ratio(u: np.ndarray) -> np.ndarray:
    """(s^2 - 2 log s - 1) / (s^2 - 1)^2 in u = log s; equals 1/2 at s = 1."""
    out = np.empty_like(u)
    small = np.abs(u) < _DL_SERIES_THRESHOLD
    us = u[small]
    if us.size:
        t = 2.0 * us
        # expm1(t) - t = sum_{m>=2} t^m / m!
        num = sum(t**m / special.factorial(m) for m in range(2, 12))
        den = np.expm1(t)
        tiny = us == 0.0
        ratio = np.empty_like(us)
        ratio[~tiny] = num[~tiny] / den[~tiny] ** 2
        ratio[tiny] = 0.5
        out[small] = ratio
    ub = u[~small]
    e = np.expm1(2.0 * ub)
    out[~small] = (e - 2.0 * ub) / (e * e)
    return out


def _ell_L_log(w: WeightFunction, s: np.ndarray, log_s: np.ndarray) -> np.ndarray:
    if w is WeightFunction.J0:
        return np.zeros_like(s)
    if w is WeightFunction.JLog:
        return np.ones_like(s)
    _, q = _POLY[w]
    # s^2 log s vanishes as s -> 0 even when s underflows
    return 2.0 * q * s * s * _log_ratio(log_s)


def _ell_L_derivative_log(w: WeightFunction, s: np.ndarray, log_s: np.ndarray) -> np.ndarray:
    if w in (WeightFunction.J0, WeightFunction.JLog):
        return np.zeros_like(s)
    _, q = _POLY[w]
    return 2.0 * q * s * _dl_ratio(log_s)


def ell_L(w: WeightFunction, s):
    """L(s) = s J'(s)/J(s) log s on (0, 1].

    J0 gives 0 and J_log gives the constant 1; the polynomial entries give
    2q s^2 log s / (s^2 - 1), whose limit at s = 1 is q.
    """
    s_arr = np.atleast_1d(_as_array(s))
    with np.errstate(divide="ignore"):
        out = _ell_L_log(w, s_arr, np.log(s_arr))
    return _ret(out[0] if np.ndim(s) == 0 else out, np.ndim(s) == 0)


def ell_L_derivative(w: WeightFunction, s):
    """dL/ds on (0, 1]: 2q s (s^2 - 2 log s - 1)/(s^2 - 1)^2 for the polynomial entries."""
    s_arr = np.atleast_1d(_as_array(s))
    with np.errstate(divide="ignore"):
        out = _ell_L_derivative_log(w, s_arr, np.log(s_arr))
    return _ret(out[0] if np.ndim(s) == 0 else out, np.ndim(s) == 0)


@lru_cache(maxsize=None)
def beta(w: WeightFunction) -> float:
    """beta = -int_0^1 J(s) log s ds, exact."""
    if w is WeightFunction.J0:
        return 1.0
    if w is WeightFunction.JLog:
        return 2.0
    c, q = _POLY[w]
    # -int_0^1 s^(2j) log s ds = 1/(2j+1)^2
    return c * sum(
        special.comb(q, j, exact=True) * (-1) ** j / (2 * j + 1) ** 2 for j in range(q + 1)
    )


def phi(w: WeightFunction, s):
    """phi(s) = int_0^s J(t) dt."""
    s_arr = _as_array(s)
    if w is WeightFunction.J0:
        out = s_arr.copy()
    elif w is WeightFunction.JLog:
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(s_arr > 0, s_arr - s_arr * np.log(s_arr), 0.0)
    else:
        out = _poly(w).integ(lbnd=0.0)(s_arr)
    return _ret(out, s_arr.ndim == 0)


def kernel_from_weight(w: WeightFunction, s):
    """Kernel K(s) = phi(s) / (s beta) that turns the WLSE into a CDM estimator."""
    s_arr = _as_array(s)
    out = phi(w, s_arr) / (s_arr * beta(w))
    return _ret(out, s_arr.ndim == 0)


def power_moment(w: WeightFunction, p: float, a: float) -> float:
    """M(p, a) = int_0^1 J(s)^p s^a ds for p > 0, a > -1."""
    if w is WeightFunction.J0:
        return 1.0 / (a + 1.0)
    if w is WeightFunction.JLog:
        return float(np.exp(special.gammaln(p + 1.0) - (p + 1.0) * np.log1p(a)))
    c, q = _POLY[w]
    return float(c**p * 0.5 * np.exp(special.betaln(0.5 * (a + 1.0), q * p + 1.0)))


def power_moment_dlog(w: WeightFunction, p: float, a: float) -> float:
    """d/da log M(p, a)."""
    if w is WeightFunction.J0:
        return -1.0 / (a + 1.0)
    if w is WeightFunction.JLog:
        return -(p + 1.0) / (a + 1.0)
    _, q = _POLY[w]
    x = 0.5 * (a + 1.0)
    return float(0.5 * (special.digamma(x) - special.digamma(x + q * p + 1.0)))


def _scalar_terms(w: WeightFunction, s: float, log_s: float) -> tuple[float, float, float, float]:
    """(J, s J', L, L') at a single 0 < s < 1 using plain floats (fast path for quadrature)."""
    if w is WeightFunction.J0:
        return 1.0, 0.0, 0.0, 0.0
    if w is WeightFunction.JLog:
        return -log_s, -1.0, 1.0, 0.0
    c, q = _POLY[w]
    one_m = -math.expm1(2.0 * log_s)
    j = c * one_m**q
    sj1 = -2.0 * q * c * s * s * one_m ** (q - 1)
    u = log_s
    if abs(u) < _L_SERIES_THRESHOLD:
        lr = 0.5 * (1.0 - u + u * u / 3.0)
    else:
        lr = u / math.expm1(2.0 * u)
    t = 2.0 * u
    e = math.expm1(t)
    if u == 0.0:
        dr = 0.5
    elif abs(u) < _DL_SERIES_THRESHOLD:
        num, term = 0.0, t
        for m in range(2, 12):
            term *= t / m
            num += term
        dr = num / (e * e)
    else:
        dr = (e - t) / (e * e)
    return j, sj1, 2.0 * q * s * s * lr, 2.0 * q * s * dr
