"""Exact model counting.

Two independent counters live here: :func:`count_exhaustive`, a brute-force
enumeration used as the reference oracle, and :func:`count_dpll`, a
branching counter with unit propagation, connected-component splitting and
a per-call component cache. Counts are Python ints throughout, so they are
exact for any number of variables.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cnf import CnfInstance

EXHAUSTIVE_MAX_VARS = 30

# how many search nodes between two clock reads when a deadline is set
_CLOCK_EVERY = 64


class CapacityError(ValueError):
    """The instance is too large for the requested counting method."""


@dataclass(frozen=True)
class CountStats:
    count: int
    decisions: int
    wall_time: float
    method: str


@dataclass(frozen=True)
class Timeout:
    """Returned instead of :class:`CountStats` when the budget runs out."""
    elapsed: float
    decisions: int = 0


class _Expired(Exception):
    pass


def count_exhaustive(inst: CnfInstance) -> int:
    """Count models by evaluating every one of the ``2**n`` assignments.

    Assignments are enumerated in blocks as bit patterns (bit ``i - 1`` of
    the block index is variable ``i``) and every clause is evaluated on the
    whole block at once.
    """
    n = inst.n
    if n > EXHAUSTIVE_MAX_VARS:
        raise CapacityError(
            f"exhaustive counting supports at most {EXHAUSTIVE_MAX_VARS} "
            f"variables, instance has {n}")
    total = 1 << n
    block = min(total, 1 << 18)
    count = 0
    for start in range(0, total, block):
        idx = np.arange(start, start + block, dtype=np.int64)
        ok = np.ones(block, dtype=bool)
        for clause in inst.clauses:
            sat = np.zeros(block, dtype=bool)
            for lit in clause:
                bit = ((idx >> (abs(lit) - 1)) & 1).astype(bool)
                sat |= bit if lit > 0 else ~bit
            ok &= sat
        count += int(np.count_nonzero(ok))
    return count


class _Search:
    """State of one counting run. Nothing here is shared between runs."""

    def __init__(self, deadline: Optional[float] = None, use_cache: bool = True):
        self.deadline = deadline
        self.decisions = 0
        self.nodes = 0
        self.cache: Optional[dict] = {} if use_cache else None

    def tick(self):
        self.nodes += 1
        if self.deadline is not None and self.nodes % _CLOCK_EVERY == 0:
            if time.perf_counter() > self.deadline:
                raise _Expired()

    def count_formula(self, clauses: list) -> int:
        """Models of ``clauses`` over exactly the variables they mention."""
        if not clauses:
            return 1
        result = 1
        for comp, nvars in _components(clauses):
            result *= self.count_component(comp, nvars)
            if result == 0:
                return 0
        return result

    def count_component(self, clauses: list, nvars: int) -> int:
        cache = self.cache
        if cache is not None:
            key = tuple(clauses)
            hit = cache.get(key)
            if hit is not None:
                return hit
        self.tick()
        var = _pick_branch_var(clauses)
        self.decisions += 1
        total = 0
        for lit in (var, -var):
            reduced = _propagate(clauses, (lit,))
            if reduced is None:
                continue
            rest, assigned = reduced
            sub = self.count_formula(rest)
            if sub:
                free = nvars - assigned - _nvars(rest)
                total += sub << free
        if cache is not None:
            cache[key] = total
        return total


def _nvars(clauses: list) -> int:
    seen = set()
    for c in clauses:
        for lit in c:
            seen.add(lit if lit > 0 else -lit)
    return len(seen)


def _components(clauses: list):
    """Split clauses into variable-disjoint groups, yielding (clauses, #vars).

    Groups come out in order of their first clause, and clauses keep their
    relative order inside a group, so cache keys are stable.
    """
    parent: dict[int, int] = {}

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for c in clauses:
        first = c[0] if c[0] > 0 else -c[0]
        if first not in parent:
            parent[first] = first
        r0 = find(first)
        for lit in c[1:]:
            v = lit if lit > 0 else -lit
            if v not in parent:
                parent[v] = r0
                continue
            r = find(v)
            if r != r0:
                parent[r] = r0
    roots = {v: find(v) for v in parent}
    if len(set(roots.values())) == 1:
        yield clauses, len(parent)
        return
    groups: dict[int, list] = {}
    sizes: dict[int, int] = {}
    for v, r in roots.items():
        sizes[r] = sizes.get(r, 0) + 1
    for c in clauses:
        v = c[0] if c[0] > 0 else -c[0]
        groups.setdefault(roots[v], []).append(c)
    for r, group in groups.items():
        yield group, sizes[r]


def _pick_branch_var(clauses: list) -> int:
    """Variable with the most occurrences; ties go to the lowest index."""
    occ: dict[int, int] = {}
    for c in clauses:
        for lit in c:
            v = lit if lit > 0 else -lit
            occ[v] = occ.get(v, 0) + 1
    best = max(occ.values())
    return min(v for v, k in occ.items() if k == best)


def _propagate(clauses: list, lits):
    """Set ``lits`` true and run unit propagation to fixpoint.

    Returns ``None`` on conflict, otherwise the residual clauses and the
    number of variables that received a value.
    """
    true = set(lits)
    if any(-x in true for x in true):
        return None
    pending = list(true)
    while pending:
        pending = []
        out = []
        for c in clauses:
            reduced = None
            for i, x in enumerate(c):
                if x in true:
                    break
                if -x in true:
                    if reduced is None:
                        reduced = list(c[:i])
                elif reduced is not None:
                    reduced.append(x)
            else:
                if reduced is None:
                    out.append(c)
                    continue
                if not reduced:
                    return None
                if len(reduced) == 1:
                    u = reduced[0]
                    if -u in true:
                        return None
                    if u not in true:
                        true.add(u)
                        pending.append(u)
                    continue
                out.append(tuple(reduced))
        clauses = out
    return clauses, len(true)


def _initial(inst: CnfInstance):
    """Propagate unit clauses of the input; returns None when refuted."""
    clauses = list(inst.clauses)
    units = [c[0] for c in clauses if len(c) == 1]
    if not units:
        return clauses, 0
    return _propagate(clauses, units)


def _run(inst: CnfInstance, search: _Search) -> int:
    start = _initial(inst)
    if start is None:
        return 0
    clauses, assigned = start
    sub = search.count_formula(clauses)
    if sub == 0:
        return 0
    return sub << (inst.n - assigned - _nvars(clauses))


def count_dpll(inst: CnfInstance, use_cache: bool = True) -> CountStats:
    """Exact count by branching search.

    Only count-preserving rules are applied: unit propagation, branching on
    both polarities, splitting into variable-disjoint components, and
    multiplying by two for every variable left unconstrained.
    """
    search = _Search(use_cache=use_cache)
    t0 = time.perf_counter()
    count = _run(inst, search)
    return CountStats(count, search.decisions, time.perf_counter() - t0, "dpll")


def count_with_timeout(inst: CnfInstance, budget: float, use_cache: bool = True):
    """Like :func:`count_dpll` but gives up after ``budget`` seconds.

    Returns :class:`CountStats` on success and :class:`Timeout` otherwise.
    The deadline belongs to this call only, so concurrent counts in other
    threads are unaffected.
    """
    if budget <= 0:
        raise ValueError(f"budget must be positive, got {budget}")
    t0 = time.perf_counter()
    search = _Search(deadline=t0 + budget, use_cache=use_cache)
    try:
        count = _run(inst, search)
    except _Expired:
        return Timeout(time.perf_counter() - t0, search.decisions)
    elapsed = time.perf_counter() - t0
    if elapsed > budget:
        return Timeout(elapsed, search.decisions)
    return CountStats(count, search.decisions, elapsed, "dpll")


def count(inst: CnfInstance, method: str = "dpll") -> int:
    if method == "exhaustive":
        return count_exhaustive(inst)
    if method == "dpll":
        return count_dpll(inst).count
    raise ValueError(f"unknown counting method {method!r}")
