import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from symfun.errors import DomainError
from symfun.funckernel import FunctionSpec, evaluate, separate

from oracles import brute_classes, brute_rows


@pytest.mark.parametrize(
    "spec, total, expected",
    [
        (FunctionSpec.threshold(2), 3, 1),
        (FunctionSpec.interval(2, 3), 4, 0),
        (FunctionSpec.threshold(0), 0, 1),
        (FunctionSpec.threshold(2), 1, 0),
        (FunctionSpec.interval(2, 3), 2, 1),
        (FunctionSpec.general([0, 1, 0, 1]), 3, 1),
    ],
)
def test_evaluate(spec, total, expected):
    assert evaluate(spec, total) == expected
    assert spec(total) == expected


def test_general_table_out_of_range():
    with pytest.raises(DomainError):
        evaluate(FunctionSpec.general([0, 1]), 2)


def test_interval_requires_ordered_endpoints():
    with pytest.raises(DomainError):
        FunctionSpec.interval(3, 2)


def test_negative_threshold_rejected():
    with pytest.raises(DomainError):
        FunctionSpec.threshold(-1)


@pytest.mark.parametrize(
    "text",
    ['{"kind":"threshold","theta":2}', '{"kind":"interval","a":2,"b":3}',
     '{"kind":"general","table":[0,1,1,0]}'],
)
def test_json_round_trip(text):
    spec = FunctionSpec.from_json(text)
    assert FunctionSpec.from_json(spec.to_json()) == spec
    assert json.loads(spec.to_json()) == json.loads(text)


def test_unknown_kind():
    with pytest.raises(DomainError):
        FunctionSpec.from_json('{"kind":"median"}')


def test_separate_threshold_case_a():
    part = separate(FunctionSpec.threshold(2), 4, 4)
    assert part.classes == ((0,), (1,), (2, 3, 4))
    assert part.a1_class == 2 and part.a0_class is None
    assert part.size == 3
    assert part.ambiguous == (0, 1)


def test_separate_constant_zero():
    part = separate(FunctionSpec.threshold(5), 2, 2)
    assert part.classes == ((0, 1, 2),)
    assert part.a0_class == 0 and part.a1_class is None
    assert part.ambiguous == ()


def test_separate_parity():
    parity = FunctionSpec.general([s % 2 for s in range(7)])
    part = separate(parity, 3, 3)
    assert list(part.classes) == brute_classes(parity, 3, 3) == [(0, 2), (1, 3)]
    assert part.a0_class is None and part.a1_class is None


def test_separate_short_general_table():
    with pytest.raises(DomainError):
        separate(FunctionSpec.general([0, 1, 0]), 2, 2)


@pytest.mark.parametrize("m1, m2", [(2, 2), (3, 5), (4, 4), (4, 8)])
def test_effective_alphabet_sizes(m1, m2):
    for theta in range(1, m1 + m2 + 1):
        size = separate(FunctionSpec.threshold(theta), m1, m2).size
        if theta <= m1 <= m2:
            assert size == theta + 1
        elif m1 <= m2 < theta:
            assert size == m1 + m2 - theta + 2


boolean_tables = st.integers(0, 8).flatmap(
    lambda m1: st.integers(0, 8).flatmap(
        lambda m2: st.tuples(
            st.just(m1), st.just(m2),
            st.lists(st.integers(0, 1), min_size=m1 + m2 + 1, max_size=m1 + m2 + 1),
        )
    )
)


@given(boolean_tables)
def test_separation_is_the_coarsest_row_partition(case):
    m1, m2, table = case
    spec = FunctionSpec.general(table)
    part = separate(spec, m1, m2)
    rows = brute_rows(spec, m1, m2)
    members = sorted(x for c in part.classes for x in c)
    assert members == list(range(m1 + 1))
    for c in part.classes:
        assert len({rows[x] for x in c}) == 1
    # merging any two classes would mix distinct rows
    reps = [rows[c[0]] for c in part.classes]
    assert len(set(reps)) == len(reps)
    assert [c[0] for c in part.classes] == sorted(c[0] for c in part.classes)
    for idx, row in enumerate(part.rows):
        if idx == part.a0_class:
            assert set(row) == {0}
        elif idx == part.a1_class:
            assert set(row) == {1}
        else:
            assert set(row) == {0, 1}


@given(st.integers(0, 12), st.integers(0, 30))
def test_evaluate_is_deterministic(theta, total):
    spec = FunctionSpec.threshold(theta)
    assert evaluate(spec, total) == evaluate(spec, total) == int(total >= theta)
