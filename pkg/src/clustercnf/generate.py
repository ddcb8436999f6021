"""Seeded instance generators.

Every generator draws from a single PCG64 stream (numpy's
``Generator(PCG64(seed))``) and consumes it in a fixed order, so a given
seed always yields the same instance:

* random base: clauses are sampled in rounds. Each round visits the still
  missing clause positions grouped by ascending arity; for a group it first
  draws the variable sets, then the polarity bits. Positions are then
  accepted in index order unless they duplicate an earlier clause.
* balanced base: one coin per variable with an odd occurrence count (in
  variable order), one permutation of the literal pool, then repair swaps
  while dealing clauses.
* placement: one draw per violated clause, in clause order.
* cluster: base draws, then ``n`` bits for the central assignment, then the
  placement draws of the central and neighbour placements in order.
"""

from __future__ import annotations

import bisect
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .cnf import (
    Assignment, CnfInstance, ContractError, clause_key, hamming_neighbors,
    is_model,
)

METHODS = ("random", "balanced", "random+solution", "random+cluster",
           "balanced+cluster")
CLUSTER_METHODS = ("random+cluster", "balanced+cluster")

MAX_SEED = 2**64 - 1
REJECTION_FACTOR = 100
DEAL_ATTEMPTS = 100


class GenerationError(ValueError):
    """A generation request is infeasible or could not be completed."""


def make_rng(seed: int) -> np.random.Generator:
    if not 0 <= seed <= MAX_SEED:
        raise GenerationError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def derive_seed(base_seed: int, *path: int) -> int:
    """Hash ``(base_seed, *path)`` into an independent 64-bit seed."""
    ss = np.random.SeedSequence(entropy=base_seed, spawn_key=tuple(path))
    return int(ss.generate_state(1, np.uint64)[0])


def uniform_arities(m: int, k: int) -> tuple[int, ...]:
    return (k,) * m


@dataclass(frozen=True)
class GenSpec:
    method: str
    n: int
    arities: tuple[int, ...]
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise GenerationError(
                f"unknown method {self.method!r}; expected one of {METHODS}")
        object.__setattr__(self, "arities", tuple(int(k) for k in self.arities))
        check_arities(self.n, self.arities)
        if not 0 <= self.seed <= MAX_SEED:
            raise GenerationError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @classmethod
    def uniform(cls, method: str, n: int, m: int, k: int, seed: int = 0) -> GenSpec:
        return cls(method, n, uniform_arities(m, k), seed)

    @property
    def m(self) -> int:
        return len(self.arities)

    @property
    def base(self) -> str:
        return "balanced" if self.method.startswith("balanced") else "random"


@dataclass(frozen=True)
class ClusterCertificate:
    central: Assignment
    neighbors: tuple[Assignment, ...]

    @property
    def final(self) -> Assignment:
        """The last placed assignment; always a model of the instance."""
        return self.neighbors[-1]

    def survivors(self, inst: CnfInstance) -> int:
        """How many of the ``n + 1`` cluster assignments are still models."""
        return sum(is_model(inst, a) for a in (self.central, *self.neighbors))


def find_cluster_model(inst: CnfInstance, central: Assignment) -> Optional[Assignment]:
    """Bounded search: try ``central`` and its ``n`` Hamming-1 neighbours, in order.

    Costs at most ``n + 1`` model checks. Returns the first model found, or None.
    """
    for a in (central, *hamming_neighbors(central)):
        if is_model(inst, a):
            return a
    return None


@dataclass(frozen=True)
class Generated:
    spec: GenSpec
    instance: CnfInstance
    solution: Optional[Assignment] = None
    certificate: Optional[ClusterCertificate] = field(default=None)


def check_arities(n: int, arities: Sequence[int]) -> None:
    if n < 1:
        raise GenerationError(f"need at least one variable, got n={n}")
    if len(arities) < 1:
        raise GenerationError("need at least one clause, got m=0")
    for k in arities:
        if not 1 <= k <= n:
            raise GenerationError(f"clause arity {k} outside [1, {n}]")
    for k, cnt in Counter(arities).items():
        avail = math.comb(n, k) << k
        if cnt > avail:
            raise GenerationError(
                f"{cnt} distinct clauses of arity {k} requested but only "
                f"{avail} exist over {n} variables")


def _as_arities(arities: Union[int, Sequence[int]], m: Optional[int] = None):
    if isinstance(arities, (int, np.integer)):
        if m is None:
            raise GenerationError("a uniform arity needs the clause count m")
        return uniform_arities(m, int(arities))
    return tuple(int(k) for k in arities)


def random_assignment(n: int, rng: np.random.Generator) -> Assignment:
    if n < 1:
        raise ContractError(f"n must be >= 1, got {n}")
    # draw r in {1, 2}; r == 1 means True
    return tuple(bool(r == 1) for r in rng.integers(1, 3, size=n))


def _sample_var_sets(n: int, k: int, count: int, rng) -> np.ndarray:
    """``count`` uniform k-subsets of 1..n, each row sorted ascending."""
    if k * k <= n:
        # few collisions expected: redraw rows that repeat a variable
        rows = np.sort(rng.integers(1, n + 1, size=(count, k)), axis=1)
        bad = np.flatnonzero((np.diff(rows, axis=1) == 0).any(axis=1)) if k > 1 else []
        while len(bad):
            fresh = np.sort(rng.integers(1, n + 1, size=(len(bad), k)), axis=1)
            rows[bad] = fresh
            still = (np.diff(fresh, axis=1) == 0).any(axis=1)
            bad = bad[still]
        return rows
    # dense case: k smallest of n random keys per row, chunked to bound memory
    chunk = max(1, (1 << 20) // n)
    out = np.empty((count, k), dtype=np.int64)
    for lo in range(0, count, chunk):
        hi = min(count, lo + chunk)
        keys = rng.random((hi - lo, n))
        if k < n:
            idx = np.argpartition(keys, k - 1, axis=1)[:, :k]
        else:
            idx = np.broadcast_to(np.arange(n), (hi - lo, n))
        out[lo:hi] = np.sort(idx, axis=1) + 1
    return out


def generate_random(n: int, arities, seed: int, rng=None) -> CnfInstance:
    """Uniform random CNF with pairwise distinct clauses.

    Clause ``i`` gets ``arities[i]`` distinct variables chosen uniformly and
    an independent fair polarity per literal. A clause equal (as a literal
    set) to an earlier one is rejected and redrawn; more than ``100 * m``
    consecutive rejections abort with :class:`GenerationError`.
    """
    arities = _as_arities(arities)
    check_arities(n, arities)
    if rng is None:
        rng = make_rng(seed)
    m = len(arities)
    clauses: list = [None] * m
    seen: set = set()
    missing = list(range(m))
    streak = 0
    limit = REJECTION_FACTOR * m
    while missing:
        drawn = {}
        by_k: dict[int, list[int]] = {}
        for pos in missing:
            by_k.setdefault(arities[pos], []).append(pos)
        for k in sorted(by_k):
            positions = by_k[k]
            vars_ = _sample_var_sets(n, k, len(positions), rng)
            signs = rng.integers(0, 2, size=(len(positions), k))
            lits = np.where(signs == 1, vars_, -vars_).tolist()
            for pos, lit_row in zip(positions, lits):
                drawn[pos] = tuple(lit_row)
        still = []
        for pos in missing:
            c = drawn[pos]
            key = clause_key(c)
            if key in seen:
                streak += 1
                if streak > limit:
                    raise GenerationError(
                        f"gave up after {limit} consecutive duplicate clauses "
                        f"(n={n}, m={m}); the request is too close to saturation")
                still.append(pos)
                continue
            streak = 0
            seen.add(key)
            clauses[pos] = c
        missing = still
    return CnfInstance(n, tuple(clauses))


def _occurrence_pool(n: int, total: int, rng) -> list[int]:
    q, r = divmod(total, n)
    counts = [q + 1 if v <= r else q for v in range(1, n + 1)]
    odd = [v for v, c in zip(range(1, n + 1), counts) if c % 2]
    coins = dict(zip(odd, rng.integers(0, 2, size=len(odd)).tolist()))
    pool = []
    for v, c in zip(range(1, n + 1), counts):
        half = c // 2
        pool.extend([v] * half)
        pool.extend([-v] * half)
        if c % 2:
            pool.append(v if coins[v] else -v)
    return pool


def generate_balanced(n: int, arities, seed: int, rng=None) -> CnfInstance:
    """CNF where occurrence counts and polarities are as even as possible.

    With ``L = sum(arities)``, each variable occurs ``L // n`` or
    ``L // n + 1`` times (the extra occurrences go to the lowest indices),
    split evenly between the two polarities. The literal pool is shuffled
    and dealt into clauses in order; a clause that repeats a variable or an
    earlier clause is repaired by swapping one of its literals with a random
    literal elsewhere in the pool, up to 100 attempts per clause.
    """
    arities = _as_arities(arities)
    check_arities(n, arities)
    if rng is None:
        rng = make_rng(seed)
    m = len(arities)
    total = sum(arities)
    pool = [int(x) for x in rng.permutation(np.array(_occurrence_pool(n, total, rng)))]
    starts = [0]
    for k in arities:
        starts.append(starts[-1] + k)
    seen: dict[frozenset, int] = {}

    def defect(i):
        """Index into the pool of a literal to swap out, or None if clause i is fine."""
        lo, hi = starts[i], starts[i + 1]
        vars_seen = set()
        for p in range(lo, hi):
            v = abs(pool[p])
            if v in vars_seen:
                return p
            vars_seen.add(v)
        key = frozenset(pool[lo:hi])
        owner = seen.get(key)
        if owner is not None and owner != i:
            return lo + int(rng.integers(0, hi - lo))
        return None

    def valid_other(j, p, new_lit):
        """Would dealt clause j stay valid with pool[p] replaced by new_lit?"""
        lits = pool[starts[j]:starts[j + 1]]
        lits[p - starts[j]] = new_lit
        if len({abs(x) for x in lits}) != len(lits):
            return None
        key = frozenset(lits)
        if key in seen:
            return None
        return key

    for i in range(m):
        lo, hi = starts[i], starts[i + 1]
        for _ in range(DEAL_ATTEMPTS):
            p = defect(i)
            if p is None:
                break
            outside = total - (hi - lo)
            if outside == 0:
                continue
            t = int(rng.integers(0, outside))
            if t >= lo:
                t += hi - lo
            if t < lo:
                j = bisect.bisect_right(starts, t) - 1
                new_key = valid_other(j, t, pool[p])
                if new_key is None:
                    continue
                del seen[frozenset(pool[starts[j]:starts[j + 1]])]
                seen[new_key] = j
            pool[p], pool[t] = pool[t], pool[p]
        else:
            if defect(i) is not None:
                raise GenerationError(
                    f"could not deal clause {i + 1} of a balanced instance "
                    f"(n={n}, m={m}) within {DEAL_ATTEMPTS} attempts")
        seen[frozenset(pool[lo:hi])] = i
    return CnfInstance(n, tuple(tuple(pool[starts[i]:starts[i + 1]]) for i in range(m)))


def _violated(clause, s) -> bool:
    for lit in clause:
        if (lit > 0) == s[abs(lit) - 1]:
            return False
    return True


def place_solution(inst: CnfInstance, s: Sequence[bool], rng) -> CnfInstance:
    """Make ``s`` a model of ``inst``.

    Each clause falsified by ``s`` gets the literal at a uniformly drawn
    position negated; other clauses are left alone.
    """
    if len(s) != inst.n:
        raise ContractError(
            f"assignment has {len(s)} values, instance has {inst.n} variables")
    clauses = list(inst.clauses)
    changed = False
    for i, c in enumerate(clauses):
        if _violated(c, s):
            j = int(rng.integers(1, len(c) + 1))
            lits = list(c)
            lits[j - 1] = -lits[j - 1]
            clauses[i] = tuple(lits)
            changed = True
    return inst.with_clauses(clauses) if changed else inst


def _base(spec: GenSpec, rng) -> CnfInstance:
    if spec.base == "balanced":
        return generate_balanced(spec.n, spec.arities, spec.seed, rng=rng)
    return generate_random(spec.n, spec.arities, spec.seed, rng=rng)


def generate_cluster(spec: GenSpec) -> tuple[CnfInstance, ClusterCertificate]:
    """Base instance plus a planted cluster of ``n + 1`` solutions.

    The central assignment ``S`` is placed first, then each neighbour
    ``S`` with variable ``i`` flipped, for ``i = 1..n``. Later placements
    can break earlier ones; only the last neighbour is guaranteed to be a
    model of the result.

    The outcome is identical to calling :func:`place_solution` ``n + 1``
    times. Rather than rescanning all clauses per neighbour, the loop only
    visits clauses mentioning the flipped variable plus clauses currently
    falsified by ``S``: no other clause can be falsified by the neighbour.
    """
    if spec.method not in CLUSTER_METHODS:
        raise GenerationError(
            f"generate_cluster needs one of {CLUSTER_METHODS}, got {spec.method!r}")
    rng = make_rng(spec.seed)
    base = _base(spec, rng)
    n = spec.n
    central = random_assignment(n, rng)
    clauses = [list(c) for c in place_solution(base, central, rng).clauses]

    occurs: list[list[int]] = [[] for _ in range(n + 1)]
    for idx, c in enumerate(clauses):
        for lit in c:
            occurs[abs(lit)].append(idx)

    s = list(central)
    broken: set[int] = set()  # clauses falsified by the central assignment
    for v in range(1, n + 1):
        s[v - 1] = not s[v - 1]
        todo = sorted(broken.union(occurs[v])) if broken else occurs[v]
        for idx in todo:
            c = clauses[idx]
            if _violated(c, s):
                j = int(rng.integers(1, len(c) + 1))
                c[j - 1] = -c[j - 1]
                s[v - 1] = not s[v - 1]
                if _violated(c, s):
                    broken.add(idx)
                else:
                    broken.discard(idx)
                s[v - 1] = not s[v - 1]
        s[v - 1] = not s[v - 1]

    inst = CnfInstance(n, tuple(tuple(c) for c in clauses))
    cert = ClusterCertificate(central, tuple(hamming_neighbors(central)))
    return inst, cert


def generate_random_plus_solution(n: int, arities, seed: int):
    """Random instance with one planted solution; returns (instance, solution)."""
    arities = _as_arities(arities)
    rng = make_rng(seed)
    base = generate_random(n, arities, seed, rng=rng)
    s = random_assignment(n, rng)
    return place_solution(base, s, rng), s


def generate(spec: GenSpec) -> Generated:
    """Dispatch a :class:`GenSpec` to the matching generator."""
    if spec.method == "random":
        return Generated(spec, generate_random(spec.n, spec.arities, spec.seed))
    if spec.method == "balanced":
        return Generated(spec, generate_balanced(spec.n, spec.arities, spec.seed))
    if spec.method == "random+solution":
        inst, s = generate_random_plus_solution(spec.n, spec.arities, spec.seed)
        return Generated(spec, inst, solution=s)
    inst, cert = generate_cluster(spec)
    return Generated(spec, inst, certificate=cert)
