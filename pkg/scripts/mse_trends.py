"""Desk-scale ABIAS/MSE curves over k for the weighted and unweighted estimators.

Writes one results CSV and one long-format plot-data CSV per study and prints
the middle-half MSE comparison. Full-scale runs are a flag away
(``--reps 2000 --n 1000``).

    python3 scripts/mse_trends.py --outdir runs/trends
"""

from __future__ import annotations

import argparse
import json
import os
import time

from tailweight.distributions import Burr, format_model
from tailweight.montecarlo import SimulationPlan, middle_half, run, scenario


def studies(n: int, reps: int, seed: int):
    k_grid = tuple(range(20, 251, 10))
    yield "burr_alpha1", SimulationPlan(model=Burr(0.5, 0.25), n=n, reps=reps, k_grid=k_grid, alphas=(1.0,),
                                        weights=("J3",), methods=("wmdpd", "mdpd"), base_seed=seed), \
        (("wmdpd", "J3", 1.0), ("mdpd", "J0", 1.0))
    for tag in ("S1", "S2", "S3", "S4"):
        plan = SimulationPlan(model=scenario(tag, 0.6, 0.25, 0.1), n=n, reps=reps, k_grid=k_grid, alphas=(0.5,),
                              weights=("J3",), methods=("wmdpd", "wlse"), base_seed=seed)
        yield f"contaminated_{tag}", plan, (("wmdpd", "J3", 0.5), ("wlse", "J3", 0.0))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", default="runs/trends")
    ap.add_argument("--n", type=int, default=500)
    ap.add_argument("--reps", type=int, default=200)
    ap.add_argument("--seed", type=int, default=20240607)
    ap.add_argument("--workers", type=int, default=None, help="process count (default TAILWEIGHT_THREADS)")
    args = ap.parse_args()
    os.makedirs(args.outdir, exist_ok=True)
    summary = {}
    for name, plan, (a, b) in studies(args.n, args.reps, args.seed):
        t0 = time.perf_counter()
        rep = run(plan, workers=args.workers)
        with open(os.path.join(args.outdir, f"{name}.csv"), "w", newline="") as fh:
            fh.write(rep.to_csv())
        with open(os.path.join(args.outdir, f"{name}_plot.csv"), "w", newline="") as fh:
            fh.write(rep.plot_data("mean"))
        ma, mb = middle_half(rep, *a), middle_half(rep, *b)
        summary[name] = {"model": format_model(plan.model), a[0]: ma, b[0]: mb, "seconds": time.perf_counter() - t0}
        print(f"{name:18s} middle-half MSE  {a[0]}={ma:.5g}  {b[0]}={mb:.5g}  ({'lower' if ma < mb else 'higher'})")
    with open(os.path.join(args.outdir, "summary.json"), "w") as fh:
        json.dump({"plan": {"n": args.n, "reps": args.reps, "seed": args.seed}, "studies": summary}, fh, indent=2)


if __name__ == "__main__":
    main()
