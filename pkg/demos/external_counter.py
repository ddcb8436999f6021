"""
Driving an external model counter
=================================

Any counter that takes a DIMACS path and prints a count can be plugged in.
Here the "external" counter is this package's own CLI, so the answers must
match the in-process counts exactly.
"""

import sys

from clustercnf.count import count_dpll
from clustercnf.generate import GenSpec, generate
from clustercnf.runner import CounterCommand, run_many

cmd = CounterCommand((sys.executable, "-m", "clustercnf", "count", "--in", "{instance}"),
                     dialect="competition")

insts = [generate(GenSpec.uniform("balanced+cluster", 18, 40, 3, seed)).instance
         for seed in range(6)]
for inst, res in zip(insts, run_many(insts, cmd, budget=30.0)):
    print(f"{res.verdict:8s} external={res.count}  internal={count_dpll(inst).count}"
          f"  {res.wall_time * 1e3:.0f} ms")

# a budget that is far too small gives a timeout verdict, not an exception
hard = generate(GenSpec.uniform("random+cluster", 80, 200, 3, 0)).instance
print(run_many([hard], cmd, budget=0.05)[0].verdict)
