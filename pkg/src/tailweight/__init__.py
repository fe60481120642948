"""Weighted minimum density power divergence estimation of the tail index."""

from .asymptotics import AsymptoticSpec, bias_b1, bias_b2, clt_variance, eta, sigma2
from .distributions import Burr, Frechet, Mixture, Pareto, SeedSpec, parse_model, sample, target_gamma
from .estimators import (
    Estimate,
    EstimatorConfig,
    Method,
    NoRootInBracket,
    NonConvergence,
    SortedSample,
    cdm_kernel,
    estimating_function,
    hill,
    mdpd,
    wlse,
    wmdpd,
)
from .paretomodel import ModelPoint, QuadratureError
from .weights import WeightFunction, beta, parse_weight

__all__ = [
    "AsymptoticSpec",
    "bias_b1",
    "bias_b2",
    "clt_variance",
    "eta",
    "sigma2",
    "Burr",
    "Frechet",
    "Mixture",
    "Pareto",
    "SeedSpec",
    "parse_model",
    "sample",
    "target_gamma",
    "Estimate",
    "EstimatorConfig",
    "Method",
    "NoRootInBracket",
    "NonConvergence",
    "SortedSample",
    "cdm_kernel",
    "estimating_function",
    "hill",
    "mdpd",
    "wlse",
    "wmdpd",
    "ModelPoint",
    "QuadratureError",
    "WeightFunction",
    "beta",
    "parse_weight",
]
