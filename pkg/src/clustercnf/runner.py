"""Run external model counters on instances and collect their answers."""

from __future__ import annotations

import os
import re
import signal
import subprocess
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .cnf import CnfInstance
from .dimacs import write_dimacs

PLACEHOLDER = "{instance}"
DIALECTS = ("competition", "plain-integer", "log2-scientific")
TMPDIR_ENV = "CLUSTERCNF_TMPDIR"
KILL_GRACE = 1.0

SOLVED, TIMEOUT, PARSE_FAILURE, CRASH = "solved", "timeout", "parse-failure", "crash"

_EXACT_RE = re.compile(r"^\s*(?:c\s+s\s+exact\s+arb\s+int|s\s+mc)\s+(\d+)\s*$")
_INT_RE = re.compile(r"^\s*(\d+)\s*$")
_ESTIMATE_RE = re.compile(r"^\s*c\s+s\s+(log10|log2)-estimate\b")


class CountParseError(ValueError):
    pass


@dataclass(frozen=True)
class CounterCommand:
    """An external counter: ``argv`` holds exactly one ``{instance}`` slot."""
    argv: tuple[str, ...]
    dialect: str = "competition"

    def __post_init__(self):
        object.__setattr__(self, "argv", tuple(self.argv))
        if not self.argv:
            raise ValueError("empty counter command")
        slots = sum(arg.count(PLACEHOLDER) for arg in self.argv)
        if slots != 1:
            raise ValueError(
                f"command must contain exactly one {PLACEHOLDER} placeholder, found {slots}")
        if self.dialect not in DIALECTS:
            raise ValueError(f"unknown dialect {self.dialect!r}; expected one of {DIALECTS}")

    @classmethod
    def from_string(cls, template: str, dialect: str = "competition") -> CounterCommand:
        import shlex
        return cls(tuple(shlex.split(template)), dialect)

    def render(self, path: str) -> list[str]:
        return [arg.replace(PLACEHOLDER, path) for arg in self.argv]


@dataclass(frozen=True)
class RunResult:
    count: Optional[int]
    wall_time: float
    exit_status: Optional[int]
    verdict: str
    detail: str = ""
    instance_path: Optional[str] = None

    @property
    def solved(self) -> bool:
        return self.verdict == SOLVED


def parse_count(output: str, dialect: str) -> int:
    """Extract an exact model count from counter output.

    competition: last ``c s exact arb int N`` or ``s mc N`` line.
    plain-integer: last line that is a bare non-negative integer.
    log2-scientific: only an exact line as in the competition dialect is
    accepted; ``c s log10-estimate``/``log2-estimate`` lines are rejected
    because they are not exact.
    """
    lines = output.splitlines()
    if dialect == "plain-integer":
        pattern = _INT_RE
    elif dialect in ("competition", "log2-scientific"):
        pattern = _EXACT_RE
    else:
        raise ValueError(f"unknown dialect {dialect!r}")
    for line in reversed(lines):
        hit = pattern.match(line)
        if hit:
            return int(hit.group(1))
    if dialect == "log2-scientific" and any(_ESTIMATE_RE.match(x) for x in lines):
        raise CountParseError("counter reported an estimate, not an exact count")
    raise CountParseError(f"no count found in output ({dialect} dialect)")


def validate_count(reported: int, truth: int, rel_tol) -> bool:
    """``|reported - truth| <= rel_tol * truth`` in exact arithmetic."""
    tol = Fraction(str(rel_tol)) if isinstance(rel_tol, float) else Fraction(rel_tol)
    if not 0 <= tol < 1:
        raise ValueError(f"rel_tol must be in [0, 1), got {rel_tol}")
    return abs(reported - truth) * tol.denominator <= tol.numerator * truth


def _kill_group(proc: subprocess.Popen):
    try:
        os.killpg(proc.pid, signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        proc.kill()


def run_external(inst: CnfInstance, cmd: CounterCommand, budget: float) -> RunResult:
    """Write ``inst`` to a temporary file, run ``cmd`` on it and parse the count.

    The child runs in its own session and the whole process group is killed
    once ``budget`` seconds have passed. The temporary file is kept when the
    output could not be parsed, so the run can be inspected afterwards.
    """
    if budget <= 0:
        raise ValueError(f"budget must be positive, got {budget}")
    fd, path = tempfile.mkstemp(suffix=".cnf", prefix="clustercnf-",
                                dir=os.environ.get(TMPDIR_ENV))
    keep = False
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(write_dimacs(inst, include_mc_header=True))
        t0 = time.perf_counter()
        try:
            proc = subprocess.Popen(cmd.render(path), stdout=subprocess.PIPE,
                                    stderr=subprocess.PIPE, start_new_session=True)
        except OSError as exc:
            return RunResult(None, time.perf_counter() - t0, None, CRASH, str(exc))
        try:
            out, err = proc.communicate(timeout=budget)
        except subprocess.TimeoutExpired:
            _kill_group(proc)
            proc.communicate()
            return RunResult(None, time.perf_counter() - t0, proc.returncode, TIMEOUT)
        elapsed = time.perf_counter() - t0
        text = out.decode("utf-8", "replace")
        try:
            value = parse_count(text, cmd.dialect)
        except CountParseError as exc:
            if proc.returncode != 0:
                tail = err.decode("utf-8", "replace").strip()[-500:]
                return RunResult(None, elapsed, proc.returncode, CRASH, tail)
            keep = True
            return RunResult(None, elapsed, proc.returncode, PARSE_FAILURE,
                             str(exc), instance_path=path)
        # some counters signal satisfiability through a non-zero exit code
        return RunResult(value, elapsed, proc.returncode, SOLVED)
    finally:
        if not keep:
            try:
                os.unlink(path)
            except FileNotFoundError:
                pass


def run_many(instances: Sequence[CnfInstance], cmd: CounterCommand, budget: float,
             workers: int = 1) -> list[RunResult]:
    """Run ``cmd`` on every instance; results come back in input order."""
    if workers <= 1:
        return [run_external(inst, cmd, budget) for inst in instances]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda inst: run_external(inst, cmd, budget), instances))
