"""Command-line interface: estimate, simulate, asymptotics, weights, model.

Exit status is 0 on success, 1 on usage or input errors and 2 on numerical
failures (no root in bracket, non-convergence, quadrature failure,
degenerate simulation cell).
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import os
import sys
from importlib import metadata

import numpy as np

from .asymptotics import AsymptoticSpec, summary
from .distributions import format_model, parse_model
from .estimators import (
    EstimatorConfig,
    Method,
    NoRootInBracket,
    NonConvergence,
    SortedSample,
    estimate,
)
from .montecarlo import DegenerateCellError, SimulationPlan, run, scenario
from .paretomodel import ModelPoint, QuadratureError, ell_gamma, ell_gamma_J, psi1, psi_m
from .weights import (
    ell_L,
    ell_L_derivative,
    j_derivative,
    j_value,
    kernel_from_weight,
    parse_weight,
)

__all__ = ["main", "parse_and_dispatch", "read_sample", "UsageError", "build_parser"]

NUMERICAL_ERRORS = (NoRootInBracket, NonConvergence, QuadratureError, DegenerateCellError)


class UsageError(ValueError):
    """Invalid flag value or input file."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % x


def read_sample(path: str) -> SortedSample:
    """Read newline-separated positive decimals; '#' starts a comment."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    vals = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            v = float(text)
        except ValueError:
            raise UsageError(f"{path}:{lineno}: not a number: {text!r}") from None
        if not np.isfinite(v) or v <= 0:
            raise UsageError(f"{path}:{lineno}: value must be finite and > 0, got {text}")
        vals.append(v)
    if len(vals) < 3:
        raise UsageError(f"{path}: need at least 3 values, found {len(vals)}")
    return SortedSample.from_values(vals)


def parse_k_grid(text: str) -> list[int]:
    """'A:B:STEP' -> [A, A+STEP, ..., <= B] (inclusive)."""
    parts = text.split(":")
    try:
        a, b, step = (int(p) for p in parts)
    except ValueError:
        raise UsageError(f"--k-grid must look like A:B:STEP with integers, got {text!r}") from None
    if step <= 0 or b < a:
        raise UsageError(f"--k-grid needs STEP > 0 and A <= B, got {text!r}")
    return list(range(a, b + 1, step))


def _float_list(text: str, flag: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"{flag} must be a comma-separated list of numbers, got {text!r}") from None


def _weight(text: str):
    try:
        return parse_weight(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tailweight", description="Weighted tail-index estimation toolkit.")
    p.add_argument("--version", action="version", version=_version())
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("estimate", help="estimate the tail index of a data file")
    e.add_argument("--input", required=True, help="newline-separated positive values")
    kg = e.add_mutually_exclusive_group(required=True)
    kg.add_argument("--k", type=int, help="number of upper order statistics, 1 < k < n")
    kg.add_argument("--k-grid", help="inclusive range A:B:STEP of k values")
    e.add_argument("--alpha", type=float, default=0.5, help="DPD tuning parameter (mdpd/wmdpd)")
    e.add_argument("--weight", type=_weight, default="J0", help="JLog, J0, J1, J2, J3 or J4")
    e.add_argument("--method", choices=[m.value for m in Method], default="wmdpd")
    e.add_argument("--bracket", default="0.01,10", help="root search interval LO,HI")
    e.add_argument("--tol", type=float, default=1e-8)
    e.add_argument("--max-iter", type=int, default=200)
    e.add_argument("--out", help="CSV output path (default stdout)")

    s = sub.add_parser("simulate", help="Monte Carlo ABIAS/MSE study")
    src = s.add_mutually_exclusive_group()
    src.add_argument("--model", help="burr:G:D, frechet:G, pareto:G or mix:EPS:<base>:<contaminant>")
    src.add_argument("--scenario", choices=["S1", "S2", "S3", "S4"])
    src.add_argument("--manifest", help="re-run the simulation recorded in this manifest")
    s.add_argument("--gamma", type=float, help="base tail index for --scenario")
    s.add_argument("--delta", type=float, default=0.25, help="Burr delta for --scenario")
    s.add_argument("--eps", type=float, default=0.1, help="contamination fraction for --scenario")
    s.add_argument("--n", type=int, default=500)
    s.add_argument("--reps", type=int, default=200)
    s.add_argument("--k-grid", default=None, help="inclusive range A:B:STEP")
    s.add_argument("--alphas", default="0.1,0.5,1")
    s.add_argument("--weights", default="J3")
    s.add_argument("--methods", default="wmdpd,mdpd")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default="results.csv")
    s.add_argument("--manifest-out", help="manifest path (default manifest.json next to --out)")
    s.add_argument("--plotdata", help="also write long-format plot data to this CSV")
    s.add_argument("--aggregate", choices=["mean", "single"], default="mean")

    a = sub.add_parser("asymptotics", help="limiting constants as JSON")
    a.add_argument("--gamma0", type=float, required=True)
    a.add_argument("--alpha", type=float, required=True)
    a.add_argument("--weight", type=_weight, required=True)
    a.add_argument("--tau", type=float, default=-1.0)
    a.add_argument("--lambda", dest="lam", type=float, default=0.0)

    w = sub.add_parser("weights", help="tabulate a weight function")
    w.add_argument("--table", type=_weight, required=True)
    w.add_argument("--grid", type=int, default=99, help="number of interior points s = i/(N+1)")

    m = sub.add_parser("model", help="tabulate the weighted Pareto density and its derivatives")
    m.add_argument("--gamma", type=float, required=True)
    m.add_argument("--alpha", type=float, required=True)
    m.add_argument("--weight", type=_weight, required=True)
    m.add_argument("--grid", type=int, default=99)
    return p


def _write_csv(rows, header, out: str | None):
    fh = open(out, "w", newline="", encoding="utf-8") if out else sys.stdout
    try:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for r in rows:
            wr.writerow([_fmt(v) if not isinstance(v, str) else v for v in r])
    finally:
        if out:
            fh.close()


def _cmd_estimate(ns) -> int:
    sample = read_sample(ns.input)
    ks = [ns.k] if ns.k is not None else parse_k_grid(ns.k_grid)
    for k in ks:
        if not 1 < k < sample.n:
            flag = "--k" if ns.k is not None else "--k-grid"
            raise UsageError(f"{flag}: k = {k} violates 1 < k < n = {sample.n}")
    bracket = _float_list(ns.bracket, "--bracket")
    if len(bracket) != 2:
        raise UsageError(f"--bracket must be LO,HI, got {ns.bracket!r}")
    lo, hi = bracket
    method = Method(ns.method)
    if method in (Method.MDPD, Method.WMDPD) and not ns.alpha > 0:
        raise UsageError(f"--alpha must be > 0 for {method}, got {ns.alpha}")
    rows = []
    for k in ks:
        try:
            cfg = EstimatorConfig(k=k, alpha=ns.alpha, weight=ns.weight, bracket=(lo, hi), tol=ns.tol, max_iter=ns.max_iter)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        try:
            est = estimate(sample, method, cfg)
        except (NoRootInBracket, NonConvergence) as exc:
            raise type(exc)(f"k={k} method={method} alpha={ns.alpha:g} weight={ns.weight}: {exc}") from None
        uses_alpha = method in (Method.MDPD, Method.WMDPD)
        weight = "J0" if method is Method.MDPD else ("-" if method is Method.HILL else str(ns.weight))
        rows.append((k, str(method), ns.alpha if uses_alpha else 0.0, weight,
                     est.gamma_hat, est.converged, est.residual, est.iterations))
    _write_csv(rows, ("k", "method", "alpha", "weight", "gamma_hat", "converged", "residual", "iterations"), ns.out)
    return 0


def _resolve_simulation(ns) -> dict:
    if ns.manifest:
        try:
            with open(ns.manifest, encoding="utf-8") as fh:
                man = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"--manifest: cannot load {ns.manifest}: {exc}") from None
        if man.get("subcommand") != "simulate":
            raise UsageError("--manifest does not describe a simulate run")
        return dict(man["parameters"])
    if ns.scenario:
        if ns.gamma is None:
            raise UsageError("--scenario needs --gamma")
        model = scenario(ns.scenario, ns.gamma, ns.delta, ns.eps)
    elif ns.model:
        model = parse_model(ns.model)
    else:
        raise UsageError("one of --model, --scenario or --manifest is required")
    if ns.k_grid is None:
        raise UsageError("--k-grid is required")
    return {
        "model": format_model(model),
        "n": ns.n,
        "reps": ns.reps,
        "k_grid": parse_k_grid(ns.k_grid),
        "alphas": _float_list(ns.alphas, "--alphas"),
        "weights": [str(parse_weight(w)) for w in ns.weights.split(",") if w.strip()],
        "methods": [m.strip().lower() for m in ns.methods.split(",") if m.strip()],
        "seed": ns.seed,
        "aggregate": ns.aggregate,
    }


def _cmd_simulate(ns) -> int:
    try:
        params = _resolve_simulation(ns)
        plan = SimulationPlan(
            model=parse_model(params["model"]),
            n=int(params["n"]),
            reps=int(params["reps"]),
            k_grid=params["k_grid"],
            alphas=params["alphas"],
            weights=params["weights"],
            methods=params["methods"],
            base_seed=int(params["seed"]),
        )
    except UsageError:
        raise
    except (ValueError, KeyError) as exc:
        raise UsageError(f"simulate: {exc}") from None
    report = run(plan)
    with open(ns.out, "w", newline="", encoding="utf-8") as fh:
        fh.write(report.to_csv())
    if ns.plotdata:
        with open(ns.plotdata, "w", newline="", encoding="utf-8") as fh:
            fh.write(report.plot_data(params.get("aggregate", "mean")))
    manifest = {
        "subcommand": "simulate",
        "parameters": params,
        "seed": plan.base_seed,
        "version": _version(),
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "outputs": {"results": os.path.basename(ns.out), "plotdata": ns.plotdata and os.path.basename(ns.plotdata)},
    }
    man_path = ns.manifest_out or os.path.join(os.path.dirname(os.path.abspath(ns.out)), "manifest.json")
    with open(man_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return 0


def _cmd_asymptotics(ns) -> int:
    try:
        spec = AsymptoticSpec(ns.gamma0, ns.alpha, ns.weight, ns.tau, ns.lam)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    json.dump(summary(spec), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _grid(n: int, flag: str) -> np.ndarray:
    if n < 1:
        raise UsageError(f"{flag} must be >= 1, got {n}")
    return np.arange(1, n + 1) / (n + 1.0)


def _cmd_weights(ns) -> int:
    s = _grid(ns.grid, "--grid")
    w = ns.table
    cols = (s, j_value(w, s), j_derivative(w, s, 1), ell_L(w, s), ell_L_derivative(w, s), kernel_from_weight(w, s))
    _write_csv(zip(*cols), ("s", "J", "J1", "L", "L1", "K"), None)
    return 0


def _cmd_model(ns) -> int:
    try:
        p = ModelPoint(ns.gamma, ns.alpha, ns.weight)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not p.alpha > 0:
        raise UsageError("--alpha must be > 0")
    s = _grid(ns.grid, "--grid")
    x = s ** (-p.gamma)
    cols = (x, s, ell_gamma(p.gamma, x), ell_gamma_J(p, x), psi1(p, x), psi_m(p, x, 2), psi_m(p, x, 3))
    _write_csv(zip(*cols), ("x", "s", "ell", "ell_J", "psi1", "psi2", "psi3"), None)
    return 0


_COMMANDS = {
    "estimate": _cmd_estimate,
    "simulate": _cmd_simulate,
    "asymptotics": _cmd_asymptotics,
    "weights": _cmd_weights,
    "model": _cmd_model,
}


def parse_and_dispatch(argv: list[str] | None = None) -> int:
    """Run one subcommand; returns the process exit status."""
    try:
        ns = build_parser().parse_args(argv)
        return _COMMANDS[ns.command](ns)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(parse_and_dispatch())


if __name__ == "__main__":
    main()
