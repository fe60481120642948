"""Heavy-tailed simulation models and reproducible sampling.

Models: Burr(gamma, delta) with F(x) = 1 - (1 + x^(1/delta))^(-delta/gamma),
Frechet(gamma) with F(x) = exp(-x^(-1/gamma)), strict Pareto(gamma) with
F(x) = 1 - x^(-1/gamma) on x >= 1, and one-level mixtures
(1 - eps) F_base + eps F_contaminant.

Sampling inverts the survival function at a uniform V, so the extreme upper
tail keeps full relative precision. Every draw comes from a Philox
counter-based generator keyed by (base_seed, stream_id).
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import optimize

from .estimators import SortedSample

__all__ = [
    "Burr",
    "Frechet",
    "Pareto",
    "Mixture",
    "HeavyTailModel",
    "SeedSpec",
    "cdf",
    "sf",
    "quantile",
    "isf",
    "sample",
    "draw",
    "draw_mixture",
    "target_gamma",
    "parse_model",
    "format_model",
    "ideal_pareto_sample",
]

_MASK64 = (1 << 64) - 1


def _positive(name, v):
    if not (isinstance(v, numbers.Real) and math.isfinite(v) and v > 0):
        raise ValueError(f"{name} must be a finite number > 0, got {v!r}")


@dataclass(frozen=True)
class Burr:
    gamma: float
    delta: float

    def __post_init__(self):
        _positive("gamma", self.gamma)
        _positive("delta", self.delta)


@dataclass(frozen=True)
class Frechet:
    gamma: float

    def __post_init__(self):
        _positive("gamma", self.gamma)


@dataclass(frozen=True)
class Pareto:
    gamma: float

    def __post_init__(self):
        _positive("gamma", self.gamma)


@dataclass(frozen=True)
class Mixture:
    epsilon: float
    base: "Burr | Frechet | Pareto"
    contaminant: "Burr | Frechet | Pareto"

    def __post_init__(self):
        if not (0.0 < self.epsilon < 1.0):
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        for part in (self.base, self.contaminant):
            if isinstance(part, Mixture):
                raise ValueError("mixtures may not be nested")
            if not isinstance(part, (Burr, Frechet, Pareto)):
                raise TypeError(f"unsupported mixture component {part!r}")


HeavyTailModel = Union[Burr, Frechet, Pareto, Mixture]


@dataclass(frozen=True)
class SeedSpec:
    base_seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = ((self.base_seed & _MASK64) << 64) | (self.stream_id & _MASK64)
        return np.random.Generator(np.random.Philox(key=key))


def _log_expm1(u):
    """log(exp(u) - 1) for u > 0 without overflow."""
    u = np.asarray(u, dtype=float)
    big = u > 30.0
    safe = np.where(big, 1.0, u)
    return np.where(big, u + np.log1p(-np.exp(-np.where(big, u, 30.0))), np.log(np.expm1(safe)))


def _scalar_out(out, x):
    return float(out) if np.ndim(x) == 0 else out


def sf(model: HeavyTailModel, x):
    """Survival function 1 - F(x)."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        if isinstance(model, Mixture):
            out = (1.0 - model.epsilon) * sf(model.base, x) + model.epsilon * sf(model.contaminant, x)
        elif isinstance(model, Burr):
            xp = np.where(x > 0, x, 1.0)
            # (1 + x^(1/delta))^(-delta/gamma) in logs
            out = np.where(x > 0, np.exp(-(model.delta / model.gamma) * np.logaddexp(0.0, np.log(xp) / model.delta)), 1.0)
        elif isinstance(model, Frechet):
            xp = np.where(x > 0, x, 1.0)
            out = np.where(x > 0, -np.expm1(-(xp ** (-1.0 / model.gamma))), 1.0)
        elif isinstance(model, Pareto):
            xp = np.where(x >= 1, x, 1.0)
            out = np.where(x >= 1, xp ** (-1.0 / model.gamma), 1.0)
        else:
            raise TypeError(f"unknown model {model!r}")
    return _scalar_out(out, x)


def cdf(model: HeavyTailModel, x):
    """F(x); zero for x <= 0 (x < 1 for Pareto)."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        if isinstance(model, Mixture):
            out = (1.0 - model.epsilon) * cdf(model.base, x) + model.epsilon * cdf(model.contaminant, x)
        elif isinstance(model, Burr):
            xp = np.where(x > 0, x, 1.0)
            out = np.where(x > 0, -np.expm1(-(model.delta / model.gamma) * np.logaddexp(0.0, np.log(xp) / model.delta)), 0.0)
        elif isinstance(model, Frechet):
            xp = np.where(x > 0, x, 1.0)
            out = np.where(x > 0, np.exp(-(xp ** (-1.0 / model.gamma))), 0.0)
        elif isinstance(model, Pareto):
            xp = np.where(x >= 1, x, 1.0)
            out = np.where(x >= 1, -np.expm1(-np.log(xp) / model.gamma), 0.0)
        else:
            raise TypeError(f"unknown model {model!r}")
    return _scalar_out(out, x)


def isf(model: HeavyTailModel, v):
    """Inverse survival function: the x with sf(x) = v, 0 < v < 1."""
    v = np.asarray(v, dtype=float)
    if np.any((v <= 0) | (v >= 1)):
        raise ValueError("isf needs 0 < v < 1")
    if isinstance(model, Mixture):
        out = _mixture_invert(model, v, upper=True)
    elif isinstance(model, Burr):
        # ((v^(-gamma/delta)) - 1)^delta, in logs so tiny v does not overflow
        out = np.exp(model.delta * _log_expm1(-(model.gamma / model.delta) * np.log(v)))
    elif isinstance(model, Frechet):
        out = (-np.log1p(-v)) ** (-model.gamma)
    elif isinstance(model, Pareto):
        out = v ** (-model.gamma)
    else:
        raise TypeError(f"unknown model {model!r}")
    return _scalar_out(out, v)


def quantile(model: HeavyTailModel, p):
    """F^{<-}(p) for 0 < p < 1."""
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0) | (p >= 1)):
        raise ValueError("quantile needs 0 < p < 1")
    if isinstance(model, Mixture):
        out = _mixture_invert(model, p, upper=False)
    elif isinstance(model, Burr):
        out = np.exp(model.delta * _log_expm1(-(model.gamma / model.delta) * np.log1p(-p)))
    elif isinstance(model, Frechet):
        out = (-np.log(p)) ** (-model.gamma)
    elif isinstance(model, Pareto):
        out = np.exp(-model.gamma * np.log1p(-p))
    else:
        raise TypeError(f"unknown model {model!r}")
    return _scalar_out(out, p)


def _mixture_invert(model: Mixture, prob, upper: bool):
    # the mixture quantile lies between the component quantiles
    f = sf if upper else cdf
    inv = isf if upper else quantile
    flat = np.atleast_1d(prob).astype(float).ravel()
    res = np.empty_like(flat)
    for idx, pv in enumerate(flat):
        a, b = inv(model.base, pv), inv(model.contaminant, pv)
        lo, hi = min(a, b), max(a, b)
        if lo == hi:
            res[idx] = lo
        else:
            res[idx] = optimize.brentq(lambda x: f(model, x) - pv, lo, hi, xtol=1e-300, rtol=1e-13, maxiter=500)
    return res.reshape(np.shape(prob)) if np.ndim(prob) else float(res[0])


def draw(model: HeavyTailModel, n: int, rng: np.random.Generator) -> np.ndarray:
    """n unsorted draws by inverse transform of uniforms from ``rng``."""
    if isinstance(model, Mixture):
        return draw_mixture(model, n, rng)[0]
    return np.asarray(isf(model, _open_uniform(rng, n)), dtype=float)


def draw_mixture(model: Mixture, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Mixture draws and the boolean contaminant-branch indicator of each."""
    branch = rng.random(n) < model.epsilon
    v = _open_uniform(rng, n)
    out = np.empty(n)
    out[~branch] = isf(model.base, v[~branch])
    out[branch] = isf(model.contaminant, v[branch])
    return out, branch


def _open_uniform(rng, n):
    v = rng.random(n)
    # random() is on [0, 1); 0 maps to an infinite draw
    while np.any(v == 0.0):
        v[v == 0.0] = rng.random(int(np.sum(v == 0.0)))
    return v


def sample(model: HeavyTailModel, n: int, seed: SeedSpec) -> SortedSample:
    """n draws keyed by ``seed``, returned as order statistics."""
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    return SortedSample.from_values(draw(model, n, seed.generator()))


def target_gamma(model: HeavyTailModel) -> float:
    """Tail index estimators are scored against; the base component's for mixtures."""
    if isinstance(model, Mixture):
        return model.base.gamma
    return model.gamma


def _num(tok: str, what: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ValueError(f"bad {what} {tok!r} in model string") from None


def _parse_simple(tokens: list[str]):
    kind = tokens[0].lower()
    if kind == "burr":
        return Burr(_num(tokens[1], "gamma"), _num(tokens[2], "delta")), tokens[3:]
    if kind == "frechet":
        return Frechet(_num(tokens[1], "gamma")), tokens[2:]
    if kind == "pareto":
        return Pareto(_num(tokens[1], "gamma")), tokens[2:]
    raise ValueError(f"unknown model kind {tokens[0]!r}")


def parse_model(text: str) -> HeavyTailModel:
    """Parse 'burr:G:D', 'frechet:G', 'pareto:G' or 'mix:EPS:<base>:<contaminant>'."""
    tokens = text.strip().split(":")
    try:
        if tokens[0].lower() == "mix":
            eps = _num(tokens[1], "epsilon")
            base, rest = _parse_simple(tokens[2:])
            cont, rest = _parse_simple(rest)
            model = Mixture(eps, base, cont)
        else:
            model, rest = _parse_simple(tokens)
    except IndexError:
        raise ValueError(f"incomplete model string {text!r}") from None
    if rest:
        raise ValueError(f"trailing fields {':'.join(rest)!r} in model string {text!r}")
    return model


def format_model(model: HeavyTailModel) -> str:
    """Inverse of :func:`parse_model`."""
    if isinstance(model, Mixture):
        return f"mix:{model.epsilon!r}:{format_model(model.base)}:{format_model(model.contaminant)}"
    if isinstance(model, Burr):
        return f"burr:{model.gamma!r}:{model.delta!r}"
    if isinstance(model, Frechet):
        return f"frechet:{model.gamma!r}"
    return f"pareto:{model.gamma!r}"


def ideal_pareto_sample(gamma: float, n: int) -> SortedSample:
    """Exact Pareto quantile array X_{j:n} = (1 - j/(n+1))^(-gamma), j = 1..n.

    Its relative excesses are ((k+1)/i)^gamma for every k.
    """
    j = np.arange(1, n + 1, dtype=float)
    return SortedSample(np.exp(-gamma * np.log((n + 1.0 - j) / (n + 1.0))))
