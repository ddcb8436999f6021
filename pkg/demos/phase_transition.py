"""
Where does counting get hard?
=============================

Sweep the clause/variable ratio for plain random 3-CNF and for the cluster
variant, and watch the share of instances with at least 2^(n/1.6) models
drop. The cluster variant keeps many models for longer.
"""

import sys

from clustercnf.sweep import (
    SweepConfig, detect_peak, estimate_transition, export_csv, run_sweep,
)

n = int(sys.argv[1]) if len(sys.argv) > 1 else 20
per_point = 20

for method in ("random", "random+cluster"):
    cfg = SweepConfig(method, n, 3, 1.0, 3.5, 0.1, per_point, base_seed=1)
    records = run_sweep(cfg)

    print(f"\n{method}, n={n}")
    print(" ratio  above  median ms")
    for r in records:
        frac = r.fraction_above_threshold()
        bar = "#" * round(20 * frac)
        print(f"{r.ratio:6.1f}  {frac:5.2f}  {r.median_wall_time * 1e3:8.2f}  {bar}")

    print("transition ratio:", round(estimate_transition(records), 3))
    print("peak ratio:", detect_peak(records))
    export_csv(records, f"sweep_{method.replace('+', '_')}_{n}.csv")
