"""Command-line front end: ``clustercnf {generate,count,run,sweep,predict}``.

Exit codes: 0 on success, 1 on a domain error (infeasible request,
unreadable file, unsupported prediction), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import re
import sys
from pathlib import Path

from .count import CapacityError, CountStats, count_dpll, count_exhaustive, count_with_timeout
from .dimacs import DimacsError, read_dimacs, save_dimacs
from .generate import METHODS, GenerationError, GenSpec, generate
from .runner import DIALECTS, CounterCommand, run_external
from .sweep import (
    SweepConfig, SweepError, detect_peak, estimate_transition, export_csv,
    instance_filename, predict_hard_m, run_sweep,
)

_DURATION_RE = re.compile(r"^\s*(\d+(?:\.\d*)?|\.\d+)\s*(ms|s|m|h)?\s*$")
_UNITS = {"ms": 1e-3, "s": 1.0, "m": 60.0, "h": 3600.0, None: 1.0}


class _UsageError(Exception):
    pass


def parse_duration(text: str) -> float:
    """``"250ms"``, ``"2s"``, ``"1.5"`` (seconds), ``"5m"``, ``"6h"`` -> seconds."""
    hit = _DURATION_RE.match(text)
    if not hit:
        raise argparse.ArgumentTypeError(f"bad duration {text!r}")
    value = float(hit.group(1)) * _UNITS[hit.group(2)]
    if value <= 0:
        raise argparse.ArgumentTypeError("duration must be positive")
    return value


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad arity list {text!r}") from None


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def cmd_generate(args) -> int:
    if args.arities is not None:
        if args.m is not None or args.k is not None:
            raise _UsageError("--arities cannot be combined with --m/--k")
        arities = args.arities
    else:
        if args.m is None or args.k is None:
            raise _UsageError("give either --m and --k, or --arities")
        arities = (args.k,) * args.m
    if args.count < 1:
        raise _UsageError("--count must be >= 1")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        spec = GenSpec(args.method, args.n, arities, args.seed + i)
        res = generate(spec)
        path = save_dimacs(res.instance, out / instance_filename(spec), args.mc_header)
        line = str(path)
        if res.certificate is not None:
            cert = res.certificate
            bits = "".join("1" if b else "0" for b in cert.central)
            digest = hashlib.sha256(bits.encode()).hexdigest()[:16]
            line += (f"  central=sha256:{digest}"
                     f"  cluster_models={cert.survivors(res.instance)}/{spec.n + 1}")
        print(line)
    return 0


def cmd_count(args) -> int:
    inst = read_dimacs(args.input)
    if args.method == "exhaustive":
        if args.timeout is not None:
            raise _UsageError("--timeout applies to the dpll method only")
        print(f"s mc {count_exhaustive(inst)}")
        return 0
    if args.timeout is None:
        print(f"s mc {count_dpll(inst).count}")
        return 0
    out = count_with_timeout(inst, args.timeout)
    print(f"s mc {out.count}" if isinstance(out, CountStats) else "TIMEOUT")
    return 0


def cmd_run(args) -> int:
    inst = read_dimacs(args.input)
    try:
        cmd = CounterCommand.from_string(args.cmd, args.dialect)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    res = run_external(inst, cmd, args.timeout)
    print(f"verdict {res.verdict}")
    if res.count is not None:
        print(f"s mc {res.count}")
    print(f"wall_time {res.wall_time:.6f}")
    if res.instance_path:
        print(f"kept {res.instance_path}")
    return 0


def cmd_sweep(args) -> int:
    counter = "internal"
    if args.counter_cmd:
        try:
            counter = CounterCommand.from_string(args.counter_cmd, args.dialect)
        except ValueError as exc:
            raise _UsageError(str(exc)) from None
    cfg = SweepConfig(args.method, args.n, args.k, args.lo, args.hi, args.step,
                      args.instances, counter, args.timeout, args.seed,
                      args.workers, args.dump_dir)
    records = run_sweep(cfg)
    export_csv(records, args.out, args.divisor)
    print(f"wrote {args.out}")
    for label, fn in (("peak ratio", lambda: detect_peak(records)),
                      ("transition ratio", lambda: estimate_transition(records, args.divisor))):
        try:
            print(f"{label}: {fn():.3f}")
        except SweepError as exc:
            print(f"{label}: n/a ({exc})")
    return 0


def cmd_predict(args) -> int:
    print(predict_hard_m(args.method, args.n))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="clustercnf", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write generated instances as DIMACS files")
    g.add_argument("--method", required=True, choices=METHODS)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--arities", type=_int_list, help="comma separated per-clause arities")
    g.add_argument("--seed", type=_seed, default=0)
    g.add_argument("--out", default=".", help="output directory")
    g.add_argument("--count", type=int, default=1, help="batch size; seeds increase by one")
    g.add_argument("--mc-header", action="store_true", help='emit the "c t mc" line')
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("count", help="count the models of a DIMACS file")
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--method", choices=("dpll", "exhaustive"), default="dpll")
    c.add_argument("--timeout", type=parse_duration)
    c.set_defaults(func=cmd_count)

    r = sub.add_parser("run", help="run an external counter on a DIMACS file")
    r.add_argument("--in", dest="input", required=True)
    r.add_argument("--cmd", required=True, help="command with an {instance} placeholder")
    r.add_argument("--dialect", choices=DIALECTS, default="competition")
    r.add_argument("--timeout", type=parse_duration, default=60.0)
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="constrainedness sweep written to CSV")
    s.add_argument("--method", required=True, choices=METHODS)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--lo", type=float, default=1.0)
    s.add_argument("--hi", type=float, default=5.0)
    s.add_argument("--step", type=float, default=0.1)
    s.add_argument("--instances", type=int, default=50)
    s.add_argument("--timeout", type=parse_duration, default=60.0)
    s.add_argument("--seed", type=_seed, default=0)
    s.add_argument("--divisor", type=float, default=1.6)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--dump-dir")
    s.add_argument("--counter-cmd", help="external counter command with {instance}")
    s.add_argument("--dialect", choices=DIALECTS, default="competition")
    s.add_argument("--out", required=True, help="CSV path")
    s.set_defaults(func=cmd_sweep)

    q = sub.add_parser("predict", help="clause count with the hardest 3-CNF instances")
    q.add_argument("--method", required=True)
    q.add_argument("--n", type=int, required=True)
    q.set_defaults(func=cmd_predict)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (GenerationError, DimacsError, SweepError, CapacityError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
