import os
import sys
import time

import pytest

from clustercnf.cnf import CnfInstance
from clustercnf.count import count_dpll
from clustercnf.generate import GenSpec, generate
from clustercnf.runner import (
    CRASH, PARSE_FAILURE, SOLVED, TIMEOUT, TMPDIR_ENV, CounterCommand,
    CountParseError, parse_count, run_external, run_many, validate_count,
)

PY = sys.executable
LOOPBACK = CounterCommand((PY, "-m", "clustercnf", "count", "--in", "{instance}"))


def script(code, dialect="competition"):
    return CounterCommand((PY, "-c", code, "{instance}"), dialect)


@pytest.fixture(autouse=True)
def private_tmpdir(tmp_path, monkeypatch):
    monkeypatch.setenv(TMPDIR_ENV, str(tmp_path))
    return tmp_path


@pytest.mark.parametrize("text, dialect, expected", [
    ("c s exact arb int 42\n", "competition", 42),
    ("c o noise\ns mc 7\nc s exact arb int 9\n", "competition", 9),
    ("s mc 123456789012345678901234567890\n", "competition", 123456789012345678901234567890),
    ("solving...\n17\n", "plain-integer", 17),
    ("1\n2\nthe end\n", "plain-integer", 2),
    ("c s log10-estimate 3.2\nc s exact arb int 5\n", "log2-scientific", 5),
])
def test_parse_count(text, dialect, expected):
    assert parse_count(text, dialect) == expected


@pytest.mark.parametrize("text, dialect", [
    ("nothing here\n", "competition"),
    ("-3\n", "plain-integer"),
    ("c s log10-estimate 3.2\n", "log2-scientific"),
    ("42\n", "competition"),
])
def test_parse_count_failures(text, dialect):
    with pytest.raises(CountParseError):
        parse_count(text, dialect)


@pytest.mark.parametrize("reported, truth, tol, ok", [
    (100, 100, 0.01, True),
    (101, 100, 0.01, True),
    (102, 100, 0.01, False),
    (99, 100, 0.01, True),
    (20, 100, 0.8, True),
    (19, 100, 0.8, False),
    (0, 0, 0.5, True),
    (1, 0, 0.5, False),
    (10**40 + 10**37, 10**40, 0.001, True),
])
def test_validate_count(reported, truth, tol, ok):
    assert validate_count(reported, truth, tol) is ok


def test_validate_count_range():
    with pytest.raises(ValueError):
        validate_count(1, 1, 1.0)


def test_command_placeholder_rules():
    with pytest.raises(ValueError):
        CounterCommand(("counter", "file.cnf"))
    with pytest.raises(ValueError):
        CounterCommand(("counter", "{instance}", "{instance}"))
    with pytest.raises(ValueError):
        CounterCommand(("counter", "{instance}"), dialect="xml")
    cmd = CounterCommand.from_string("counter --file={instance} -q", "plain-integer")
    assert cmd.render("/x.cnf") == ["counter", "--file=/x.cnf", "-q"]


def test_loopback_matches_internal(private_tmpdir):
    inst = generate(GenSpec.uniform("random+cluster", 18, 40, 3, 5)).instance
    res = run_external(inst, LOOPBACK, 60)
    assert res.verdict == SOLVED and res.exit_status == 0
    assert res.count == count_dpll(inst).count
    assert res.wall_time > 0
    assert list(private_tmpdir.iterdir()) == []


def test_instance_file_has_mc_header():
    code = ("import sys; d=open(sys.argv[1]).read(); "
            "print('s mc 1' if d.startswith('c t mc\\np cnf 2 1\\n') else 'bad')")
    res = run_external(CnfInstance(2, ((1, -2),)), script(code), 30)
    assert res.verdict == SOLVED and res.count == 1


def test_timeout_kills_process_group():
    cmd = CounterCommand(("sh", "-c", "sleep 30 & sleep 30; echo 1", "sh", "{instance}"),
                         "plain-integer")
    budget = 0.3
    t0 = time.perf_counter()
    res = run_external(CnfInstance(1, ()), cmd, budget)
    assert res.verdict == TIMEOUT and res.count is None
    assert res.wall_time <= budget + 1.0
    assert time.perf_counter() - t0 <= budget + 1.0


def test_tiny_budget_times_out():
    inst = generate(GenSpec.uniform("random", 20, 40, 3, 0)).instance
    res = run_external(inst, LOOPBACK, 0.001)
    assert res.verdict == TIMEOUT


def test_spawn_failure_is_a_crash():
    res = run_external(CnfInstance(1, ()), CounterCommand(("/no/such/counter", "{instance}")), 5)
    assert res.verdict == CRASH and res.count is None


def test_nonzero_exit_without_count_is_a_crash():
    res = run_external(CnfInstance(1, ()), script("import sys; sys.exit(3)"), 5)
    assert res.verdict == CRASH and res.exit_status == 3


def test_parse_failure_keeps_instance(private_tmpdir):
    res = run_external(CnfInstance(1, ((1,),)), script("print('no idea')"), 5)
    assert res.verdict == PARSE_FAILURE and res.exit_status == 0
    assert res.instance_path and os.path.exists(res.instance_path)
    assert open(res.instance_path).read() == "c t mc\np cnf 1 1\n1 0\n"


def test_nonzero_exit_with_count_is_solved():
    res = run_external(CnfInstance(1, ()), script("print('s mc 2'); raise SystemExit(10)"), 5)
    assert res.verdict == SOLVED and res.count == 2 and res.exit_status == 10


def test_run_many_keeps_order():
    insts = [CnfInstance(n, ()) for n in (1, 2, 3, 4)]
    results = run_many(insts, LOOPBACK, 60, workers=3)
    assert [r.count for r in results] == [2, 4, 8, 16]
