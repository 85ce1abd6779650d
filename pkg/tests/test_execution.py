
import pytest
from hypothesis import given, settings, strategies as st

from pickseq.adversary import gen_ew_zero
from pickseq.core import Allocation, DomainError, Instance
from pickseq.execution import (
    egalitarian_welfare,
    ew,
    execute,
    is_ef1,
    pick_dominance_violations,
    round_goods,
    welfare_ratio,
)
from pickseq.sequences import enumerate_all, make_round_robin, parse_sequence


def test_four_goods_round_robin(four_goods):
    alloc = execute(four_goods, make_round_robin(2, 4))
    assert alloc.bundles == (frozenset({1, 3}), frozenset({2, 4}))
    assert egalitarian_welfare(four_goods, alloc).egalitarian == 9


def test_four_goods_alternation(four_goods):
    alloc = execute(four_goods, parse_sequence("1,2,2,1"))
    assert alloc.bundles == (frozenset({1, 4}), frozenset({2, 3}))
    report = egalitarian_welfare(four_goods, alloc)
    assert report.egalitarian == 8 and report.per_agent_utility == (8, 10)


def test_pick_log(four_goods):
    alloc = execute(four_goods, parse_sequence("1,2,2,1"))
    assert alloc.pick_log == ((1, 1, 1), (2, 2, 2), (3, 2, 3), (4, 1, 4))


def test_one_good_each():
    inst = Instance([[3, 1, 0], [0, 5, 1], [0, 0, 2]])
    alloc = execute(inst, make_round_robin(3, 3))
    assert alloc.bundles == (frozenset({1}), frozenset({2}), frozenset({3}))


def test_mismatch():
    with pytest.raises(DomainError):
        execute(Instance([[1, 1], [1, 1]]), make_round_robin(2, 3))


def test_ew_zero_example():
    g = gen_ew_zero(2, 2)
    assert ew(g.instance, g.sequence) == 0
    assert welfare_ratio(g.instance, g.sequence, g.sequence) == 1


def test_ef1_violation_witness():
    inst = Instance([[1, 1], [1, 1]])
    alloc = Allocation((frozenset({1, 2}), frozenset()))
    assert is_ef1(inst, alloc) == (False, (2, 1))
    assert not is_ef1(inst, alloc)


def test_ef1_single_goods():
    inst = Instance([[5, 1], [5, 1]])
    assert is_ef1(inst, execute(inst, make_round_robin(2, 2)))


def test_round_goods_and_dummy():
    inst = Instance([[3, 2, 1], [3, 2, 1]])
    assert round_goods(inst, make_round_robin(2, 3)) == [[1, 3], [2, None]]
    # the same sequence compared with itself never violates dominance at stride 1
    assert pick_dominance_violations(inst, make_round_robin(2, 3), make_round_robin(2, 3), 1) == []
    bad = pick_dominance_violations(inst, parse_sequence("1,2,2"), make_round_robin(2, 3), 1)
    assert bad == [(1, 2)]


matrices = st.integers(2, 3).flatmap(
    lambda n: st.integers(n, 6).flatmap(
        lambda m: st.lists(
            st.lists(st.fractions(0, 10, max_denominator=6), min_size=m, max_size=m),
            min_size=n,
            max_size=n,
        )
    )
)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_balanced_sequences_give_ef1(matrix):
    inst = Instance(matrix)
    for s in enumerate_all(inst.n, inst.m, restrict_balanced=True):
        alloc = execute(inst, s)
        assert is_ef1(inst, alloc)
        assert alloc.is_partition_of(inst.m)
        # each pick takes the favourite remaining good
        taken = set()
        for _, a, g in alloc.pick_log:
            rest = [h for h in range(1, inst.m + 1) if h not in taken]
            assert all(h == g or inst.prefers(a, g, h) for h in rest)
            taken.add(g)


@settings(max_examples=40, deadline=None)
@given(matrices)
def test_identical_rows_round_robin_is_worst(matrix):
    row = matrix[0]
    inst = Instance([row] * len(matrix))
    base = ew(inst, make_round_robin(inst.n, inst.m))
    for s in enumerate_all(inst.n, inst.m, restrict_balanced=True):
        assert ew(inst, s) >= base


def test_non_identical_rows_break_round_robin_worst(four_goods):
    assert ew(four_goods, parse_sequence("1,2,2,1")) < ew(four_goods, make_round_robin(2, 4))


def test_execute_is_deterministic(four_goods):
    s = parse_sequence("1,2,2,1")
    assert execute(four_goods, s) == execute(four_goods, s)
