"""
Picking m for a benchmark
=========================

The hardest ratio is ~1.9 for random 3-CNF and ~2.3 once a cluster is
planted, so for a given n the recommended clause count is round(ratio * n).
"""

from clustercnf.sweep import predict_hard_m

print("   n  random  random+cluster")
for n in (30, 60, 90, 100, 120, 150):
    print(f"{n:4d}  {predict_hard_m('random', n):6d}  {predict_hard_m('random+cluster', n):14d}")
