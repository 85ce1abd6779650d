import math

import pytest

from pickseq.core import DomainError, ResourceCapExceeded
from pickseq.sequences import (
    PickingSequence,
    agent_pick_indices,
    count_all,
    count_balanced,
    enumerate_all,
    format_sequence,
    in_rb_class,
    is_recursively_balanced,
    make_balanced_alternation,
    make_last_first,
    make_round_robin,
    normalize_labels,
    parse_sequence,
    rounds,
)


def seq(text, n=None):
    return parse_sequence(text, n)


@pytest.mark.parametrize(
    "text,n,expected",
    [("1,2,3|3,1", 3, True), ("1,2,2,3,3,3,3", 3, False), ("1,2,3", 3, True), ("2,1,1,2", 2, True)],
)
def test_recursively_balanced(text, n, expected):
    assert is_recursively_balanced(seq(text, n)) is expected


def test_rounds():
    assert rounds(make_round_robin(3, 7)) == [(1, 2, 3), (1, 2, 3), (1,)]
    assert rounds(seq("1,2,3|3,1")) == [(1, 2, 3), (3, 1)]
    assert rounds(make_round_robin(3, 3)) == [(1, 2, 3)]


def test_agent_pick_indices():
    idx = agent_pick_indices(make_round_robin(3, 7), 3)
    assert idx.indices == (3, 6) and idx.sentinel == 8 and idx.t(3) == 8
    idx = agent_pick_indices(seq("1,2,3|3,1"), 2)
    assert idx.indices == (2,) and idx.sentinel == 6


@pytest.mark.parametrize(
    "maker,n,m,picks",
    [
        (make_round_robin, 3, 7, (1, 2, 3, 1, 2, 3, 1)),
        (make_round_robin, 3, 5, (1, 2, 3, 1, 2)),
        (make_balanced_alternation, 3, 7, (1, 2, 3, 3, 2, 1, 1)),
        (make_balanced_alternation, 2, 4, (1, 2, 2, 1)),
        (make_last_first, 3, 7, (1, 2, 3, 3, 2, 1, 3)),
        (make_last_first, 2, 5, (1, 2, 2, 1, 2)),
    ],
)
def test_constructors(maker, n, m, picks):
    assert maker(n, m).picks == picks


@pytest.mark.parametrize("maker", [make_round_robin, make_balanced_alternation, make_last_first])
def test_constructors_in_class(maker):
    for n in range(2, 5):
        for m in range(n, 13):
            assert in_rb_class(maker(n, m))
    with pytest.raises(DomainError):
        maker(3, 2)


def test_enumerate_examples():
    assert len(list(enumerate_all(3, 7, restrict_balanced=True))) == 18
    assert [s.picks for s in enumerate_all(2, 3, restrict_balanced=True)] == [(1, 2, 1), (1, 2, 2)]
    assert len(list(enumerate_all(2, 2))) == 1


@pytest.mark.parametrize("n", [2, 3, 4])
def test_enumeration_counts(n):
    for m in range(n, 10):
        rb = list(enumerate_all(n, m, restrict_balanced=True))
        assert len(rb) == count_balanced(n, m) == len(set(rb))
        assert all(in_rb_class(s) for s in rb)
        if count_all(n, m) <= 5000:
            every = list(enumerate_all(n, m))
            assert len(every) == n ** (m - n)
            assert {s for s in every if is_recursively_balanced(s)} == set(rb)


def test_closed_form_count():
    f, s = divmod(11, 4)
    assert count_balanced(4, 11) == math.factorial(4) ** (f - 1) * math.perm(4, s)
    assert count_balanced(3, 6) == 6


def test_balanced_rounds_and_positions():
    for s in enumerate_all(4, 10, restrict_balanced=True):
        for block in rounds(s)[: 10 // 4]:
            assert sorted(block) == [1, 2, 3, 4]
        for agent in range(1, 5):
            idx = agent_pick_indices(s, agent)
            assert all(t <= r * 4 for r, t in enumerate(idx.indices, start=1))


def test_enumeration_cap():
    with pytest.raises(ResourceCapExceeded):
        list(enumerate_all(3, 12, cap=100))


def test_enumeration_cap_env(monkeypatch):
    monkeypatch.setenv("PICKSEQ_ENUM_CAP", "5")
    with pytest.raises(ResourceCapExceeded):
        next(enumerate_all(3, 7, restrict_balanced=True))


def test_parse_and_format():
    s = seq(" 1, 2 ,3 | 3,1 ")
    assert s.n == 3 and s.picks == (1, 2, 3, 3, 1)
    assert format_sequence(s) == "1,2,3|3,1"
    assert str(make_round_robin(2, 3)) == "1,2|1"
    assert seq("1,2,1").n == 2
    assert s[4] == 3
    for bad in ["", "1,a", "1;2"]:
        with pytest.raises(DomainError):
            seq(bad)
    with pytest.raises(DomainError):
        PickingSequence((1, 4), 3)


def test_prefix_flag():
    assert not PickingSequence((2, 1), 2).has_standard_prefix
    assert make_round_robin(2, 2).has_standard_prefix


def test_normalize_labels():
    s, mapping = normalize_labels(PickingSequence((3, 1, 2, 2, 3), 3))
    assert s.picks == (1, 2, 3, 3, 1)
    assert mapping == {3: 1, 1: 2, 2: 3}
    assert in_rb_class(s)
