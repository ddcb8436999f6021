"""DIMACS CNF reading and writing."""

from __future__ import annotations

from pathlib import Path
from typing import Union

from .cnf import CnfInstance, ContractError

MC_TAG = "c t mc"


class DimacsError(ValueError):
    """Malformed DIMACS input. ``line`` is 1-based, or None for end of file."""

    def __init__(self, message: str, line=None):
        self.line = line
        where = f"line {line}: " if line is not None else "end of input: "
        super().__init__(where + message)


class MissingHeaderError(DimacsError):
    pass


class DuplicateHeaderError(DimacsError):
    pass


class LiteralRangeError(DimacsError):
    pass


class ClauseCountError(DimacsError):
    pass


class UnterminatedClauseError(DimacsError):
    pass


def write_dimacs(inst: CnfInstance, include_mc_header: bool = False) -> bytes:
    lines = []
    if include_mc_header:
        lines.append(MC_TAG)
    lines.append(f"p cnf {inst.n} {inst.m}")
    for clause in inst.clauses:
        lines.append(" ".join(map(str, clause)) + " 0")
    return ("\n".join(lines) + "\n").encode("ascii")


def parse_dimacs(data: Union[bytes, str]) -> CnfInstance:
    """Parse DIMACS CNF text.

    Comment lines are skipped, clauses may span lines and whitespace is
    free-form. A ``%`` line (found at the end of some legacy benchmark
    files) ends the input.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    n = m = None
    header_line = None
    clauses = []
    current: list[int] = []
    current_start = None
    for lineno, raw in enumerate(data.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            if header_line is not None:
                raise DuplicateHeaderError(
                    f"second problem line (first on line {header_line})", lineno)
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"bad problem line {line!r}", lineno)
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"bad problem line {line!r}", lineno) from None
            if n < 0 or m < 0:
                raise DimacsError(f"negative size in problem line {line!r}", lineno)
            header_line = lineno
            continue
        if header_line is None:
            raise MissingHeaderError("clause data before the problem line", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"not an integer: {tok!r}", lineno) from None
            if lit == 0:
                if not current:
                    raise DimacsError("empty clause", lineno)
                if len(clauses) == m:
                    raise ClauseCountError(
                        f"more clauses than the {m} declared", lineno)
                clauses.append(current)
                current = []
                current_start = None
                continue
            if abs(lit) > n:
                raise LiteralRangeError(
                    f"literal {lit} out of range for {n} variables", lineno)
            if current_start is None:
                current_start = lineno
            current.append(lit)
    if header_line is None:
        raise MissingHeaderError("no problem line")
    if current:
        raise UnterminatedClauseError(
            "clause is missing its terminating 0", current_start)
    if len(clauses) != m:
        raise ClauseCountError(f"declared {m} clauses, found {len(clauses)}")
    try:
        return CnfInstance(n, tuple(tuple(c) for c in clauses))
    except ContractError as exc:
        raise DimacsError(str(exc)) from exc


def read_dimacs(path: Union[str, Path]) -> CnfInstance:
    return parse_dimacs(Path(path).read_bytes())


def save_dimacs(inst: CnfInstance, path: Union[str, Path],
                include_mc_header: bool = False) -> Path:
    path = Path(path)
    path.write_bytes(write_dimacs(inst, include_mc_header))
    return path
