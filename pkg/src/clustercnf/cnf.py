"""Propositional data model: literals, clauses, instances and assignments.

Literals use the DIMACS convention: variable ``v`` (1-indexed) is the
integer ``v`` and its negation is ``-v``. A clause is a tuple of literals,
an instance is an immutable :class:`CnfInstance`, and an assignment is a
tuple of booleans whose position ``i - 1`` holds the value of variable ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

Literal = int
Clause = tuple[int, ...]
Assignment = tuple[bool, ...]


class ContractError(ValueError):
    """An argument violates the documented precondition of an operation."""


def var_of(lit: Literal) -> int:
    return lit if lit > 0 else -lit


def negate(lit: Literal) -> Literal:
    return -lit


def is_positive(lit: Literal) -> bool:
    return lit > 0


def make_literal(var: int, positive: bool = True) -> Literal:
    if var < 1:
        raise ContractError(f"variable index must be >= 1, got {var}")
    return var if positive else -var


def make_clause(literals: Iterable[Literal]) -> Clause:
    """Validate and freeze a clause.

    Literal order is kept as given since flipping is positional.
    """
    clause = tuple(int(lit) for lit in literals)
    if not clause:
        raise ContractError("empty clauses are not allowed")
    seen = set()
    for lit in clause:
        if lit == 0:
            raise ContractError("0 is not a literal")
        v = var_of(lit)
        if v in seen:
            raise ContractError(f"variable {v} appears twice in clause {clause}")
        seen.add(v)
    return clause


def clause_key(clause: Clause) -> frozenset[int]:
    """Order-insensitive identity of a clause, used for distinctness checks."""
    return frozenset(clause)


@dataclass(frozen=True)
class CnfInstance:
    n: int
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        if self.n < 0:
            raise ContractError(f"variable count must be >= 0, got {self.n}")
        clauses = tuple(make_clause(c) for c in self.clauses)
        for c in clauses:
            for lit in c:
                if var_of(lit) > self.n:
                    raise ContractError(
                        f"literal {lit} out of range for {self.n} variables")
        object.__setattr__(self, "clauses", clauses)

    @property
    def m(self) -> int:
        return len(self.clauses)

    @property
    def arities(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.clauses)

    def has_distinct_clauses(self) -> bool:
        return len({clause_key(c) for c in self.clauses}) == len(self.clauses)

    def with_clauses(self, clauses: Iterable[Clause]) -> CnfInstance:
        return CnfInstance(self.n, tuple(clauses))


def make_assignment(values: Iterable[bool]) -> Assignment:
    return tuple(bool(v) for v in values)


def eval_literal(lit: Literal, a: Sequence[bool]) -> bool:
    v = var_of(lit)
    if v < 1 or v > len(a):
        raise ContractError(
            f"literal {lit} out of range for assignment of length {len(a)}")
    return a[v - 1] if lit > 0 else not a[v - 1]


def eval_clause(clause: Clause, a: Sequence[bool]) -> bool:
    for lit in clause:
        if eval_literal(lit, a):
            return True
    return False


def is_model(inst: CnfInstance, a: Sequence[bool]) -> bool:
    if len(a) != inst.n:
        raise ContractError(
            f"assignment has {len(a)} values, instance has {inst.n} variables")
    for clause in inst.clauses:
        # inlined eval_clause; range already checked by the instance
        for lit in clause:
            if (lit > 0) == a[abs(lit) - 1]:
                break
        else:
            return False
    return True


def flip(a: Sequence[bool], var: int) -> Assignment:
    """Return a copy of ``a`` with variable ``var`` (1-indexed) negated."""
    if var < 1 or var > len(a):
        raise ContractError(f"variable {var} out of range for length {len(a)}")
    out = list(a)
    out[var - 1] = not out[var - 1]
    return tuple(out)


def hamming_neighbors(a: Sequence[bool]) -> list[Assignment]:
    """All assignments at Hamming distance one, ordered by flipped variable."""
    return [flip(a, v) for v in range(1, len(a) + 1)]
