"""Constrainedness sweeps, threshold phase transitions and hardness prediction."""

from __future__ import annotations

import csv
import io
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence, Union

from .count import CountStats, count_with_timeout
from .dimacs import save_dimacs
from .generate import GenerationError, GenSpec, derive_seed, generate
from .runner import CounterCommand, run_external

DEFAULT_DIVISOR = 1.6
LOG2_SLACK = 1e-9

# clauses per variable at the observed difficulty peak, 3-CNF only
HARD_RATIO = {"random": Fraction("1.9"), "random+cluster": Fraction("2.3")}

CSV_COLUMNS = ("method", "n", "m", "ratio", "seed", "wall_time_ms", "count",
               "above_threshold")


class SweepError(ValueError):
    pass


def round_half_away(x) -> int:
    x = Fraction(x) if not isinstance(x, float) else Fraction(str(x))
    r = math.floor(abs(x) + Fraction(1, 2))
    return r if x >= 0 else -r


@dataclass(frozen=True)
class Threshold:
    """The model count ``2 ** (n / divisor)``, compared without rounding."""
    n: int
    divisor: float = DEFAULT_DIVISOR

    def __post_init__(self):
        if self.divisor <= 0:
            raise SweepError(f"divisor must be positive, got {self.divisor}")

    @property
    def _exact_eighths(self) -> bool:
        # n / 1.6 == 5n / 8, so count >= 2**(n/1.6) iff count**8 >= 2**(5n)
        return Fraction(str(self.divisor)) == Fraction(8, 5)

    def admits(self, count: int) -> bool:
        """True when ``count >= 2 ** (n / divisor)``."""
        if count <= 0:
            return False
        if self._exact_eighths:
            return count ** 8 >= 1 << (5 * self.n)
        return math.log2(count) >= self.n / self.divisor - LOG2_SLACK

    @property
    def value(self) -> int:
        """Smallest integer count that reaches the threshold."""
        if self._exact_eighths:
            target = 1 << (5 * self.n)
            root = math.isqrt(math.isqrt(math.isqrt(target)))
            return root if root ** 8 >= target else root + 1
        c = max(1, math.ceil(2 ** (self.n / self.divisor)))
        while c > 1 and self.admits(c - 1):
            c -= 1
        while not self.admits(c):
            c += 1
        return c


@dataclass(frozen=True)
class InstanceResult:
    seed: int
    wall_time: float
    count: Optional[int]  # None on timeout or counter failure
    verdict: str = "solved"

    @property
    def solved(self) -> bool:
        return self.count is not None


@dataclass
class SweepRecord:
    method: str
    n: int
    k: int
    ratio: float
    m: int
    results: list = field(default_factory=list)
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    @property
    def solved_fraction(self) -> float:
        if not self.results:
            return 0.0
        return sum(r.solved for r in self.results) / len(self.results)

    @property
    def timeout_fraction(self) -> float:
        if not self.results:
            return 0.0
        return 1.0 - self.solved_fraction

    @property
    def median_wall_time(self) -> Optional[float]:
        """Median over all instances; an unsolved one counts with its elapsed time."""
        if not self.results:
            return None
        return statistics.median(r.wall_time for r in self.results)

    def mean_log2_count(self) -> Optional[float]:
        """Mean of ``log2(count + 1)`` over solved instances.

        The shift by one keeps unsatisfiable instances (count 0) in the
        average instead of collapsing it to minus infinity.
        """
        counts = [r.count for r in self.results if r.solved]
        if not counts:
            return None
        return statistics.fmean(math.log2(c + 1) for c in counts)

    def geometric_mean_count(self) -> Optional[float]:
        """Geometric mean of ``count + 1`` over solved instances, minus one."""
        mean = self.mean_log2_count()
        if mean is None:
            return None
        return 2.0 ** mean - 1.0

    def fraction_above_threshold(self, divisor: float = DEFAULT_DIVISOR) -> Optional[float]:
        """Share of instances with at least ``2 ** (n / divisor)`` models.

        None when the point failed or any instance lacks an exact count.
        """
        if self.failed or not self.results or not all(r.solved for r in self.results):
            return None
        th = Threshold(self.n, divisor)
        return sum(th.admits(r.count) for r in self.results) / len(self.results)


@dataclass(frozen=True)
class SweepConfig:
    method: str
    n: int
    k: int = 3
    ratio_lo: float = 1.0
    ratio_hi: float = 5.0
    ratio_step: float = 0.1
    instances_per_point: int = 50
    counter: Union[str, CounterCommand] = "internal"
    budget: float = 60.0
    base_seed: int = 0
    workers: int = 1
    dump_dir: Optional[str] = None

    def __post_init__(self):
        if self.ratio_lo < 0:
            raise SweepError(f"ratio_lo must be >= 0, got {self.ratio_lo}")
        if self.ratio_step <= 0:
            raise SweepError(f"ratio_step must be > 0, got {self.ratio_step}")
        if self.ratio_hi < self.ratio_lo:
            raise SweepError("ratio_hi must not be below ratio_lo")
        if self.instances_per_point < 1:
            raise SweepError("instances_per_point must be >= 1")
        if self.budget <= 0:
            raise SweepError("budget must be positive")
        if self.counter != "internal" and not isinstance(self.counter, CounterCommand):
            raise SweepError("counter must be 'internal' or a CounterCommand")

    def ratios(self) -> list[float]:
        steps = int(round((self.ratio_hi - self.ratio_lo) / self.ratio_step))
        return [round(self.ratio_lo + i * self.ratio_step, 10) for i in range(steps + 1)]


def _measure(task):
    """Generate and count one instance. Runs in a worker process when parallel."""
    spec, counter, budget, dump_dir = task
    try:
        inst = generate(spec).instance
    except GenerationError as exc:
        return InstanceResult(spec.seed, 0.0, None, f"generation-failure: {exc}")
    if dump_dir is not None:
        save_dimacs(inst, Path(dump_dir) / instance_filename(spec), include_mc_header=True)
    if counter == "internal":
        out = count_with_timeout(inst, budget)
        if isinstance(out, CountStats):
            return InstanceResult(spec.seed, out.wall_time, out.count)
        return InstanceResult(spec.seed, out.elapsed, None, "timeout")
    res = run_external(inst, counter, budget)
    return InstanceResult(spec.seed, res.wall_time, res.count, res.verdict)


def instance_filename(spec: GenSpec) -> str:
    ks = set(spec.arities)
    k = f"k{ks.pop()}" if len(ks) == 1 else "kmix"
    return f"{spec.method}_{k}_{spec.n}_{spec.m}_s{spec.seed}.cnf"


def run_sweep(cfg: SweepConfig, progress=None) -> list[SweepRecord]:
    """Measure every ratio point of ``cfg``.

    Instance ``i`` at point ``p`` uses seed ``derive_seed(base_seed, p, i)``,
    so any single point can be re-run on its own. A point whose instances
    cannot be generated is recorded with ``error`` set and the sweep goes on.
    """
    records = []
    tasks = []
    for p, ratio in enumerate(cfg.ratios()):
        m = round_half_away(Fraction(str(ratio)) * cfg.n)
        rec = SweepRecord(cfg.method, cfg.n, cfg.k, ratio, m)
        records.append(rec)
        try:
            specs = [GenSpec.uniform(cfg.method, cfg.n, m, cfg.k,
                                     derive_seed(cfg.base_seed, p, i))
                     for i in range(cfg.instances_per_point)]
        except GenerationError as exc:
            rec.error = str(exc)
            continue
        tasks.extend((rec, (s, cfg.counter, cfg.budget, cfg.dump_dir)) for s in specs)
    if cfg.dump_dir is not None:
        Path(cfg.dump_dir).mkdir(parents=True, exist_ok=True)

    def collect(results):
        for (rec, _), res in zip(tasks, results):
            if res.verdict.startswith("generation-failure"):
                rec.error = res.verdict
            else:
                rec.results.append(res)
            if progress is not None:
                progress(rec, res)

    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            collect(pool.map(_measure, [t for _, t in tasks], chunksize=4))
    else:
        collect(map(_measure, (t for _, t in tasks)))
    for rec in records:
        if rec.failed:
            rec.results.clear()
    return records


def fraction_above_threshold(records: Sequence[SweepRecord],
                             divisor: float = DEFAULT_DIVISOR) -> list[Optional[float]]:
    return [r.fraction_above_threshold(divisor) for r in records]


def detect_peak(records: Sequence[SweepRecord]) -> float:
    """Ratio with the highest median wall time, lowest ratio on ties.

    Only points where at least half the instances were solved take part.
    """
    valid = [r for r in records if not r.failed and r.results and r.solved_fraction >= 0.5]
    if len(valid) < 3:
        raise SweepError(f"need at least 3 valid points to locate a peak, got {len(valid)}")
    best = max(r.median_wall_time for r in valid)
    return min(r.ratio for r in valid if r.median_wall_time == best)


def estimate_transition(records: Sequence[SweepRecord],
                        divisor: float = DEFAULT_DIVISOR) -> float:
    """Ratio where the above-threshold fraction first drops through 0.5.

    Points with an unknown fraction are skipped; between the two points that
    bracket the crossing the ratio is linearly interpolated.
    """
    pts = sorted((r.ratio, f) for r, f in
                 zip(records, fraction_above_threshold(records, divisor)) if f is not None)
    for (r0, f0), (r1, f1) in zip(pts, pts[1:]):
        if f0 == 0.5:
            return r0
        if f0 > 0.5 >= f1:
            return r0 + (f0 - 0.5) / (f0 - f1) * (r1 - r0)
    raise SweepError("no pair of points brackets a fraction of 0.5")


def predict_hard_m(method: str, n: int, k: int = 3) -> int:
    """Clause count expected to give the hardest instances for ``method``."""
    if method not in HARD_RATIO:
        raise SweepError(
            f"no prediction for method {method!r}; supported: {sorted(HARD_RATIO)}")
    if k != 3:
        raise SweepError("predictions exist only for k = 3; for larger arities "
                         "the peak location depends on the counter")
    if n < 1:
        raise SweepError(f"n must be >= 1, got {n}")
    return round_half_away(HARD_RATIO[method] * n)


def median_smooth(values: Sequence[float]) -> list[float]:
    """3-point running median; the end points are kept as they are."""
    vals = list(values)
    if len(vals) < 3:
        return vals
    return [vals[0]] + [statistics.median(vals[i - 1:i + 2])
                        for i in range(1, len(vals) - 1)] + [vals[-1]]


def records_to_csv(records: Sequence[SweepRecord], divisor: float = DEFAULT_DIVISOR) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rec in records:
        th = Threshold(rec.n, divisor)
        for res in rec.results:
            if res.solved:
                count, above = str(res.count), str(int(th.admits(res.count)))
            else:
                count, above = "TIMEOUT", ""
            w.writerow((rec.method, rec.n, rec.m, f"{rec.ratio:g}", res.seed,
                        f"{res.wall_time * 1000:.3f}", count, above))
    return buf.getvalue()


def export_csv(records: Sequence[SweepRecord], path, divisor: float = DEFAULT_DIVISOR) -> Path:
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(records_to_csv(records, divisor))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path
