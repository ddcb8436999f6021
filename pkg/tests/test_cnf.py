import itertools

import pytest
from hypothesis import given, strategies as st

from clustercnf.cnf import (
    CnfInstance, ContractError, eval_clause, eval_literal, hamming_neighbors,
    is_model, make_clause, make_literal, negate,
)

T, F = True, False


def test_eval_literal_examples():
    assert eval_literal(1, (T,)) is True
    assert eval_literal(-1, (T,)) is False
    assert eval_literal(-2, (T, F)) is True


def test_eval_literal_out_of_range():
    with pytest.raises(ContractError):
        eval_literal(3, (T, F))


@pytest.mark.parametrize("clause, a, expected", [
    ((1, -2), (T, T), True),
    ((1, 2), (F, F), False),
    ((-1, 2, 3), (T, F, F), False),
])
def test_eval_clause_examples(clause, a, expected):
    assert eval_clause(clause, a) is expected


def test_is_model_examples():
    empty = CnfInstance(3, ())
    for a in itertools.product((F, T), repeat=3):
        assert is_model(empty, a)
    contra = CnfInstance(1, ((1,), (-1,)))
    assert not is_model(contra, (T,))
    assert not is_model(contra, (F,))


def test_is_model_length_mismatch():
    with pytest.raises(ContractError):
        is_model(CnfInstance(2, ((1, 2),)), (T,))


def test_hamming_neighbors_examples():
    assert hamming_neighbors((T,)) == [(F,)]
    assert hamming_neighbors((T, F)) == [(F, F), (T, T)]


def test_clause_validation():
    with pytest.raises(ContractError):
        make_clause(())
    with pytest.raises(ContractError):
        make_clause((1, -1))
    with pytest.raises(ContractError):
        make_clause((1, 0))
    with pytest.raises(ContractError):
        CnfInstance(2, ((1, 3),))
    with pytest.raises(ContractError):
        make_literal(0)
    assert make_literal(4, False) == -4


def test_instance_properties():
    inst = CnfInstance(3, ((1, -2), (2, 3, -1), (-2, 1)))
    assert inst.m == 3
    assert inst.arities == (2, 3, 2)
    # same literal set in a different order counts as the same clause
    assert not inst.has_distinct_clauses()


literals = st.integers(1, 12).flatmap(lambda v: st.sampled_from((v, -v)))


@given(literals)
def test_double_negation(lit):
    assert negate(negate(lit)) == lit
    assert abs(negate(lit)) == abs(lit)


@st.composite
def instances(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(0, 10))
    clauses = []
    for _ in range(m):
        vs = draw(st.lists(st.integers(1, n), min_size=1, max_size=min(n, 4), unique=True))
        clauses.append(tuple(v if draw(st.booleans()) else -v for v in vs))
    return CnfInstance(n, tuple(clauses))


@given(instances())
def test_is_model_matches_clausewise_evaluation(inst):
    for a in itertools.product((F, T), repeat=inst.n):
        assert is_model(inst, a) == all(eval_clause(c, a) for c in inst.clauses)


@given(st.lists(st.booleans(), min_size=1, max_size=12))
def test_neighbors_are_distinct_and_at_distance_one(a):
    a = tuple(a)
    nbrs = hamming_neighbors(a)
    assert len(nbrs) == len(a)
    assert len(set(nbrs)) == len(a)
    for i, b in enumerate(nbrs):
        diff = [j for j in range(len(a)) if a[j] != b[j]]
        assert diff == [i]


@given(st.lists(st.booleans(), min_size=4, max_size=4),
       st.lists(st.sampled_from((1, -1, 2, -2, 3, -3)), min_size=1, max_size=3,
                unique_by=abs),
       st.sampled_from((4, -4)))
def test_eval_clause_is_monotone(a, clause, extra):
    a, clause = tuple(a), tuple(clause)
    if eval_clause(clause, a):
        assert eval_clause(clause + (extra,), a)
    if eval_literal(extra, a):
        assert eval_clause(clause + (extra,), a)
