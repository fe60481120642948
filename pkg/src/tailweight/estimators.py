"""Tail-index estimators built on the top k relative excesses of a sample.

All estimators consume only the log-ratios log(X_{n-i+1:n} / X_{n-k:n}),
i = 1..k, so they are invariant under rescaling and permutation of the data.

Example:
    >>> s = SortedSample.from_values([2.0, 4.0, 8.0, 16.0])
    >>> round(hill(s, 3).gamma_hat, 6)
    1.386294
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize

from .paretomodel import _integral_psi1_exact, _psi1_s
from .weights import WeightFunction, beta, j_value, kernel_from_weight, parse_weight

__all__ = [
    "SortedSample",
    "EstimatorConfig",
    "Estimate",
    "Method",
    "NoRootInBracket",
    "NonConvergence",
    "hill",
    "cdm_kernel",
    "wlse",
    "estimating_function",
    "wmdpd",
    "mdpd",
    "estimate",
]

SCAN_FACTOR = 1.5


class NoRootInBracket(RuntimeError):
    """The estimating function has no sign change inside the search bracket."""


class NonConvergence(RuntimeError):
    """The root refinement hit its iteration cap or missed the residual tolerance."""


class Method(enum.Enum):
    HILL = "hill"
    CDM = "cdm"
    WLSE = "wlse"
    WMDPD = "wmdpd"
    MDPD = "mdpd"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class SortedSample:
    """Ascending order statistics X_{1:n} <= ... <= X_{n:n} of a positive sample."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1:
            raise ValueError("sample must be one-dimensional")
        if v.size < 3:
            raise ValueError(f"sample needs at least 3 values, got {v.size}")
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise ValueError("sample values must be finite and > 0")
        if np.any(np.diff(v) < 0):
            raise ValueError("values must be sorted ascending; use SortedSample.from_values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_values(cls, values) -> "SortedSample":
        return cls(np.sort(np.asarray(values, dtype=float)))

    @property
    def n(self) -> int:
        return int(self.values.size)

    def check_k(self, k: int) -> None:
        if not (isinstance(k, (int, np.integer)) and 1 < k < self.n):
            raise ValueError(f"k must satisfy 1 < k < n = {self.n}, got {k}")

    def log_excesses(self, k: int) -> np.ndarray:
        """log(X_{n-i+1:n} / X_{n-k:n}) for i = 1..k (largest first)."""
        self.check_k(k)
        logs = np.log(self.values)
        return logs[self.n - k :][::-1] - logs[self.n - k - 1]

    def log_spacings(self, k: int) -> np.ndarray:
        """log(X_{n-i+1:n} / X_{n-i:n}) for i = 1..k."""
        self.check_k(k)
        logs = np.log(self.values)
        top = logs[self.n - k - 1 :]
        return np.diff(top)[::-1]


@dataclass(frozen=True)
class EstimatorConfig:
    k: int
    alpha: float
    weight: WeightFunction = WeightFunction.J0
    bracket: tuple[float, float] = (0.01, 10.0)
    tol: float = 1e-8
    max_iter: int = 200

    def __post_init__(self):
        object.__setattr__(self, "weight", parse_weight(self.weight))
        lo, hi = self.bracket
        if not self.k > 1:
            raise ValueError(f"k must be > 1, got {self.k}")
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if not (0 < lo < hi):
            raise ValueError(f"bracket must satisfy 0 < lo < hi, got {self.bracket}")
        if not self.tol > 0:
            raise ValueError("tol must be > 0")
        if not self.max_iter >= 1:
            raise ValueError("max_iter must be >= 1")


@dataclass(frozen=True)
class Estimate:
    gamma_hat: float
    method: Method
    k: int
    residual: float = 0.0
    iterations: int = 0
    bracket_used: tuple[float, float] = field(default=(math.nan, math.nan))
    converged: bool = True


def _rank_weights(w: WeightFunction, k: int) -> np.ndarray:
    return j_value(w, np.arange(1, k + 1) / (k + 1.0))


def hill(sample: SortedSample, k: int) -> Estimate:
    """Hill estimator: mean of the top-k log excesses."""
    return Estimate(float(np.sum(sample.log_excesses(k)) / k), Method.HILL, k)


def wlse(sample: SortedSample, k: int, w: WeightFunction | str) -> Estimate:
    """Weighted least squares estimator (beta k)^-1 sum_i J(i/(k+1)) log excess_i."""
    w = parse_weight(w)
    le = sample.log_excesses(k)
    # elementwise product then sum, so J0 reproduces hill bit for bit
    g = float(np.sum(_rank_weights(w, k) * le) / (beta(w) * k))
    return Estimate(g, Method.WLSE, k)


def cdm_kernel(sample: SortedSample, k: int, w: WeightFunction | str) -> Estimate:
    """Kernel estimator sum_i (i/k) K(i/(k+1)) log spacing_i with K induced by J.

    For J0 the kernel is identically 1 and this is Hill's estimator in spacing form.
    """
    w = parse_weight(w)
    i = np.arange(1, k + 1, dtype=float)
    kern = kernel_from_weight(w, i / (k + 1.0))
    g = float(np.dot(i / k * kern, sample.log_spacings(k)))
    return Estimate(g, Method.CDM, k)


def _pi_from_logs(gamma, alpha, w, log_exc, jw, k):
    log_s = -log_exc / gamma
    psi = _psi1_s(gamma, alpha, w, np.exp(log_s), log_s)
    emp = (1.0 + 1.0 / alpha) * np.dot(jw, psi) / k
    return _integral_psi1_exact(gamma, alpha, w) - emp


def estimating_function(sample: SortedSample, cfg: EstimatorConfig, gamma: float) -> float:
    """pi_k(gamma) = int Psi_{gamma,alpha+1} dx - (1 + 1/alpha) k^-1 sum_i J(i/(k+1)) Psi_{gamma,alpha}(x_i).

    Psi_{gamma,alpha} is the gamma-derivative of the weighted Pareto density to
    the power alpha and x_i are the relative excesses; the WMDPD estimate is a
    root in gamma.
    """
    if not cfg.alpha > 0:
        raise ValueError("estimating_function requires alpha > 0")
    if not gamma > 0:
        raise ValueError("gamma must be > 0")
    le = sample.log_excesses(cfg.k)
    jw = _rank_weights(cfg.weight, cfg.k)
    return float(_pi_from_logs(gamma, cfg.alpha, cfg.weight, le, jw, cfg.k))


def _scan_bracket(f, pilot, lo, hi):
    """Outward geometric scan from the pilot; returns (a, b, fa, fb) with a sign change."""
    f0 = f(pilot)
    if f0 == 0.0:
        return pilot, pilot, f0, f0
    down = [(pilot, f0)]
    up = [(pilot, f0)]
    found = {}
    done_down = pilot <= lo
    done_up = pilot >= hi
    while not (done_down and done_up) and not found:
        if not done_down:
            g = max(down[-1][0] / SCAN_FACTOR, lo)
            fg = f(g)
            if np.sign(fg) != np.sign(down[-1][1]):
                found["down"] = (g, down[-1][0], fg, down[-1][1])
            down.append((g, fg))
            done_down = g <= lo
        if not done_up:
            g = min(up[-1][0] * SCAN_FACTOR, hi)
            fg = f(g)
            if np.sign(fg) != np.sign(up[-1][1]):
                found["up"] = (up[-1][0], g, up[-1][1], fg)
            up.append((g, fg))
            done_up = g >= hi
    if not found:
        raise NoRootInBracket(f"no sign change of the estimating function in ({lo}, {hi})")
    if len(found) == 1:
        return next(iter(found.values()))

    def secant(br):
        a, b, fa, fb = br
        return a - fa * (b - a) / (fb - fa)

    return min(found.values(), key=lambda br: abs(secant(br) - pilot))


def wmdpd(sample: SortedSample, cfg: EstimatorConfig) -> Estimate:
    """Weighted minimum density power divergence estimate of gamma.

    Locates the root of the estimating function nearest the WLSE pilot by an
    outward geometric scan followed by Brent refinement.

    Raises:
        NoRootInBracket: no sign change inside ``cfg.bracket``.
        NonConvergence: Brent exceeded ``cfg.max_iter`` or the residual exceeds ``cfg.tol``.
    """
    if not cfg.alpha > 0:
        raise ValueError("wmdpd requires alpha > 0; alpha = 0 is the WLSE")
    k, w, alpha = cfg.k, cfg.weight, cfg.alpha
    le = sample.log_excesses(k)
    jw = _rank_weights(w, k)
    lo, hi = cfg.bracket
    pilot = float(np.sum(jw * le) / (beta(w) * k))
    pilot = min(max(pilot, lo), hi)

    def f(g):
        val = float(_pi_from_logs(g, alpha, w, le, jw, k))
        if not math.isfinite(val):
            raise NonConvergence(f"estimating function is not finite at gamma = {g!r}")
        return val

    a, b, fa, fb = _scan_bracket(f, pilot, lo, hi)
    if a == b:
        return Estimate(a, Method.WMDPD, k, fa, 0, (a, b), True)
    try:
        root, res = optimize.brentq(
            f, a, b, xtol=1e-14 * pilot, rtol=4 * np.finfo(float).eps,
            maxiter=cfg.max_iter, full_output=True, disp=False,
        )
    except ValueError as exc:
        raise NonConvergence(str(exc)) from exc
    if not res.converged:
        raise NonConvergence(f"Brent did not converge in {cfg.max_iter} iterations on ({a}, {b})")
    resid = f(root)
    if abs(resid) > cfg.tol:
        raise NonConvergence(f"residual {resid:.3g} exceeds tol {cfg.tol:g} at gamma = {root:.17g}")
    return Estimate(float(root), Method.WMDPD, k, resid, int(res.iterations), (a, b), True)


def mdpd(sample: SortedSample, k: int, alpha: float, **kwargs) -> Estimate:
    """Unweighted MDPD estimate: wmdpd with J0."""
    est = wmdpd(sample, EstimatorConfig(k=k, alpha=alpha, weight=WeightFunction.J0, **kwargs))
    return replace(est, method=Method.MDPD)


def estimate(sample: SortedSample, method: Method | str, cfg: EstimatorConfig) -> Estimate:
    """Dispatch on method name."""
    method = Method(str(method).lower())
    if method is Method.HILL:
        return hill(sample, cfg.k)
    if method is Method.WLSE:
        return wlse(sample, cfg.k, cfg.weight)
    if method is Method.CDM:
        return cdm_kernel(sample, cfg.k, cfg.weight)
    if method is Method.MDPD:
        return mdpd(sample, cfg.k, cfg.alpha, bracket=cfg.bracket, tol=cfg.tol, max_iter=cfg.max_iter)
    return wmdpd(sample, cfg)
