"""Replicated simulation of tail-index estimators.

Replication r draws its sample from the stream (base_seed, r), every
estimator cell (method, weight, alpha, k) is evaluated on it, and the
per-replication estimates are stored in a reps x cells array. Aggregation
walks that array in replication order, so reports are byte-identical for
any number of worker processes.
"""

from __future__ import annotations

import csv
import io
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .distributions import HeavyTailModel, Mixture, Burr, Frechet, SeedSpec, format_model, sample, target_gamma
from .estimators import (
    EstimatorConfig,
    Method,
    NoRootInBracket,
    NonConvergence,
    cdm_kernel,
    hill,
    wlse,
    wmdpd,
)
from .weights import WeightFunction, parse_weight

__all__ = [
    "Cell",
    "SimulationPlan",
    "SimulationReport",
    "ReportRow",
    "DegenerateCellError",
    "run",
    "abias_mse",
    "scenario",
    "worker_count",
    "middle_half",
    "FAILURE_LIMIT",
]

FAILURE_LIMIT = 0.5
CSV_COLUMNS = ("method", "weight", "alpha", "k", "mean", "abias", "mse", "failures")


class DegenerateCellError(RuntimeError):
    """More than half of the replications failed for some estimator cell."""


@dataclass(frozen=True)
class Cell:
    method: Method
    weight: WeightFunction | None
    alpha: float
    k: int

    @property
    def weight_label(self) -> str:
        return "-" if self.weight is None else str(self.weight)


@dataclass(frozen=True)
class SimulationPlan:
    model: HeavyTailModel
    n: int
    reps: int
    k_grid: tuple[int, ...]
    alphas: tuple[float, ...] = (0.1, 0.5, 1.0)
    weights: tuple[WeightFunction, ...] = (WeightFunction.J3,)
    methods: tuple[Method, ...] = (Method.WMDPD, Method.MDPD)
    base_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "k_grid", tuple(int(k) for k in self.k_grid))
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        object.__setattr__(self, "weights", tuple(parse_weight(w) for w in self.weights))
        object.__setattr__(self, "methods", tuple(Method(str(m).lower()) for m in self.methods))
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.n < 3:
            raise ValueError("n must be >= 3")
        if not self.k_grid:
            raise ValueError("k_grid is empty")
        if list(self.k_grid) != sorted(set(self.k_grid)):
            raise ValueError("k_grid must be strictly ascending")
        if not all(1 < k < self.n for k in self.k_grid):
            raise ValueError(f"every k must satisfy 1 < k < n = {self.n}")
        if not self.methods:
            raise ValueError("no methods given")
        needs_alpha = {Method.MDPD, Method.WMDPD} & set(self.methods)
        if needs_alpha and (not self.alphas or min(self.alphas) <= 0):
            raise ValueError("mdpd/wmdpd need a nonempty list of alphas > 0")
        needs_weight = {Method.WMDPD, Method.WLSE, Method.CDM} & set(self.methods)
        if needs_weight and not self.weights:
            raise ValueError("wlse/cdm/wmdpd need at least one weight")

    def cells(self) -> list[Cell]:
        out = []
        for m in self.methods:
            if m is Method.HILL:
                combos = [(None, 0.0)]
            elif m in (Method.WLSE, Method.CDM):
                combos = [(w, 0.0) for w in self.weights]
            elif m is Method.MDPD:
                combos = [(WeightFunction.J0, a) for a in self.alphas]
            else:
                combos = [(w, a) for w in self.weights for a in self.alphas]
            out.extend(Cell(m, w, a, k) for w, a in combos for k in self.k_grid)
        return out

    def to_dict(self) -> dict:
        return {
            "model": format_model(self.model),
            "n": self.n,
            "reps": self.reps,
            "k_grid": list(self.k_grid),
            "alphas": list(self.alphas),
            "weights": [str(w) for w in self.weights],
            "methods": [str(m) for m in self.methods],
            "base_seed": self.base_seed,
        }


@dataclass(frozen=True)
class ReportRow:
    method: str
    weight: str
    alpha: float
    k: int
    mean: float
    abias: float
    mse: float
    failures: int


@dataclass
class SimulationReport:
    plan: SimulationPlan
    cells: list[Cell]
    estimates: np.ndarray  # reps x cells, NaN marks a failed replication
    rows: list[ReportRow]
    metadata: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(CSV_COLUMNS)
        for r in self.rows:
            wr.writerow([r.method, r.weight, _fmt(r.alpha), r.k, _fmt(r.mean), _fmt(r.abias), _fmt(r.mse), r.failures])
        return buf.getvalue()

    def plot_data(self, aggregate: str = "mean") -> str:
        """Long-format table: one series per (method, weight, alpha), k on the x axis.

        ``aggregate='mean'`` reports the replication mean of the estimates,
        ``'single'`` the first replication's path.
        """
        if aggregate not in ("mean", "single"):
            raise ValueError("aggregate must be 'mean' or 'single'")
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(("series", "method", "weight", "alpha", "k", "statistic", "value"))
        for j, (c, r) in enumerate(zip(self.cells, self.rows)):
            series = f"{c.method}/{c.weight_label}/alpha={_fmt(c.alpha)}"
            est = r.mean if aggregate == "mean" else self.estimates[0, j]
            for stat, val in (("estimate", est), ("abias", r.abias), ("mse", r.mse)):
                wr.writerow([series, r.method, r.weight, _fmt(r.alpha), r.k, stat, _fmt(val)])
        return buf.getvalue()

    def row(self, method, weight, alpha, k) -> ReportRow:
        for r in self.rows:
            if r.method == str(method) and r.weight == str(weight) and r.alpha == alpha and r.k == k:
                return r
        raise KeyError((method, weight, alpha, k))


def _fmt(x: float) -> str:
    return "%.17g" % x


def abias_mse(estimates, target: float) -> tuple[float, float]:
    """Absolute bias |mean - target| and mean squared deviation from target."""
    est = np.asarray(estimates, dtype=float)
    if est.size == 0:
        raise ValueError("abias_mse needs at least one estimate")
    return float(abs(np.mean(est) - target)), float(np.mean((est - target) ** 2))


def scenario(tag: str, gamma: float, delta: float = 0.25, epsilon: float = 0.1) -> Mixture:
    """Contamination scenarios S1..S4 with the contaminant fixed to Burr(2, 0.5) or Frechet(2)."""
    tag = tag.upper()
    table = {
        "S1": (Burr(gamma, delta), Burr(2.0, 0.5)),
        "S2": (Frechet(gamma), Frechet(2.0)),
        "S3": (Frechet(gamma), Burr(2.0, 0.5)),
        "S4": (Burr(gamma, delta), Frechet(2.0)),
    }
    if tag not in table:
        raise ValueError(f"unknown scenario {tag!r}; expected S1..S4")
    base, cont = table[tag]
    return Mixture(epsilon, base, cont)


def worker_count(requested: int | None = None) -> int:
    """Worker processes: explicit request, else TAILWEIGHT_THREADS (0 or unset = CPU count)."""
    if requested is None:
        env = os.environ.get("TAILWEIGHT_THREADS", "0").strip() or "0"
        try:
            requested = int(env)
        except ValueError:
            raise ValueError(f"TAILWEIGHT_THREADS must be an integer, got {env!r}") from None
    if requested < 0:
        raise ValueError("worker count must be >= 0")
    return requested if requested > 0 else (os.cpu_count() or 1)


def _one_cell(s, c: Cell) -> float:
    try:
        if c.method is Method.HILL:
            return hill(s, c.k).gamma_hat
        if c.method is Method.WLSE:
            return wlse(s, c.k, c.weight).gamma_hat
        if c.method is Method.CDM:
            return cdm_kernel(s, c.k, c.weight).gamma_hat
        return wmdpd(s, EstimatorConfig(k=c.k, alpha=c.alpha, weight=c.weight)).gamma_hat
    except (NoRootInBracket, NonConvergence):
        return np.nan


def _replicate(args) -> tuple[int, np.ndarray]:
    plan, cells, r = args
    s = sample(plan.model, plan.n, SeedSpec(plan.base_seed, r))
    return r, np.array([_one_cell(s, c) for c in cells])


def run(plan: SimulationPlan, workers: int | None = None) -> SimulationReport:
    """Run every replication and aggregate ABIAS/MSE per cell.

    Raises:
        DegenerateCellError: some cell failed in more than half of the replications.
    """
    t0 = time.perf_counter()
    cells = plan.cells()
    est = np.empty((plan.reps, len(cells)))
    nw = min(worker_count(workers), plan.reps)
    jobs = [(plan, cells, r) for r in range(plan.reps)]
    if nw <= 1:
        results = map(_replicate, jobs)
        for r, row in results:
            est[r] = row
    else:
        with ProcessPoolExecutor(max_workers=nw) as ex:
            for r, row in ex.map(_replicate, jobs, chunksize=max(1, plan.reps // (4 * nw))):
                est[r] = row
    target = target_gamma(plan.model)
    rows = []
    for j, c in enumerate(cells):
        col = est[:, j]
        ok = col[~np.isnan(col)]
        fails = int(plan.reps - ok.size)
        if fails > FAILURE_LIMIT * plan.reps:
            raise DegenerateCellError(
                f"cell method={c.method} weight={c.weight_label} alpha={c.alpha:g} k={c.k}: "
                f"{fails}/{plan.reps} replications failed"
            )
        ab, mse = abias_mse(ok, target)
        rows.append(ReportRow(str(c.method), c.weight_label, c.alpha, c.k, float(np.mean(ok)), ab, mse, fails))
    meta = {"plan": plan.to_dict(), "target_gamma": target, "elapsed_s": time.perf_counter() - t0,
            "workers": nw, "seed": plan.base_seed}
    return SimulationReport(plan, cells, est, rows, meta)


def middle_half(report: SimulationReport, method: str, weight: str, alpha: float, stat: str = "mse") -> float:
    """Mean of ``stat`` over the middle half of the k-grid (indices len//4 .. 3 len//4)."""
    ks = report.plan.k_grid
    lo, hi = len(ks) // 4, (3 * len(ks)) // 4
    vals = [getattr(report.row(method, weight, alpha, k), stat) for k in ks[lo:hi]]
    return float(np.mean(vals))
