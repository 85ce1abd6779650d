import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from pickseq.core import (
    INFINITY,
    Allocation,
    DomainError,
    Instance,
    bundle_utility,
    default_preferences,
    format_rational,
    ratio,
    to_rational,
    validate_instance,
)


def test_bundle_utility(four_goods, irregular_instance):
    assert bundle_utility(four_goods, 1, {1, 3}) == 13
    assert bundle_utility(four_goods, 2, set()) == 0
    assert bundle_utility(irregular_instance, 2, {2, 3}) == 2


@pytest.mark.parametrize("agent,good", [(0, 1), (3, 1), (1, 0), (1, 5)])
def test_bundle_utility_rejects_bad_indices(four_goods, agent, good):
    with pytest.raises(DomainError):
        bundle_utility(four_goods, agent, {good})


@pytest.mark.parametrize(
    "row,order",
    [
        ((6, 0, 0, 0, 0), (1, 2, 3, 4, 5)),
        ((2, 1, 1, 1, 1), (1, 2, 3, 4, 5)),
        ((0, 5, 5), (2, 3, 1)),
    ],
)
def test_default_preferences(row, order):
    assert default_preferences([row]) == (order,)


def test_ratio_convention():
    assert ratio(Fraction(0), Fraction(0)) == 1
    assert ratio(Fraction(3), Fraction(0)) == INFINITY
    assert ratio(Fraction(1), Fraction(3)) == Fraction(1, 3)
    assert INFINITY > Fraction(10**9)


def test_to_rational():
    assert to_rational("3/6") == Fraction(1, 2)
    assert to_rational(4) == 4
    with pytest.raises(TypeError):
        to_rational(0.5)
    with pytest.raises(TypeError):
        to_rational(True)


def test_validate_ok(four_goods):
    assert validate_instance(four_goods) == []


def test_validate_inconsistent_order():
    inst = Instance([[2, 1], [1, 1]], preferences=[[2, 1], [1, 2]])
    problems = validate_instance(inst)
    assert len(problems) == 1 and "inconsistent order" in problems[0]


def test_validate_m_less_than_n():
    inst = Instance([[1, 1], [1, 1], [1, 1]])
    assert any("m < n" in p for p in validate_instance(inst))


def test_validate_non_permutation():
    inst = Instance([[1, 1], [1, 1]], preferences=[[1, 1], [1, 2]])
    assert any("permutation" in p for p in validate_instance(inst))


def test_constructor_rejects_negative_and_ragged():
    with pytest.raises(DomainError):
        Instance([[1, -1], [0, 0]])
    with pytest.raises(DomainError):
        Instance([[1, 1], [0]])


def test_json_round_trip():
    inst = Instance([[Fraction(1, 3), 2, 0], ["5/7", 0, 1]])
    text = inst.to_json()
    assert json.loads(text)["utilities"][0][0] == "1/3"
    back = Instance.from_json("# a comment line\n" + text)
    assert back == inst


def test_from_dict_shape_check():
    with pytest.raises(DomainError):
        Instance.from_dict({"n": 3, "m": 2, "utilities": [[1, 2], [3, 4]]})


def test_allocation_round_trip():
    alloc = Allocation((frozenset({1, 3}), frozenset({2})), ((1, 1, 1), (2, 2, 2), (3, 1, 3)))
    assert Allocation.from_json(alloc.to_json()) == alloc
    assert alloc.is_partition_of(3)
    assert not alloc.is_partition_of(4)
    assert alloc.owner() == {1: 1, 3: 1, 2: 2}


def test_format_rational():
    assert format_rational(Fraction(4, 2)) == 2
    assert format_rational(Fraction(2, 4)) == "1/2"
    assert format_rational(INFINITY) == "inf"


rows = st.lists(st.integers(0, 9), min_size=3, max_size=6)


@given(st.lists(rows, min_size=2, max_size=3).filter(lambda r: len({len(x) for x in r}) == 1))
def test_default_orders_always_validate(matrix):
    inst = Instance(matrix)
    problems = validate_instance(inst)
    assert all("m < n" in p for p in problems)


@given(rows, st.sets(st.integers(1, 3)), st.sets(st.integers(1, 3)))
def test_bundle_utility_monotone(row, s, t):
    inst = Instance([row, row])
    assert bundle_utility(inst, 1, s) <= bundle_utility(inst, 1, s | t)


@given(st.lists(st.fractions(min_value=0, max_value=20, max_denominator=50), min_size=2, max_size=5))
def test_rationals_round_trip(vals):
    inst = Instance([vals, vals[::-1]])
    assert Instance.from_json(inst.to_json()).utilities == inst.utilities
