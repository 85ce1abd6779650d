from fractions import Fraction

import pytest

from pickseq.adversary import (
    GENERATORS,
    Provenance,
    gen_ef1_counterexample,
    gen_ew_zero,
    gen_mms_agent,
    gen_mms_I1,
    gen_mms_I2,
    gen_price_all,
    gen_price_rb,
    unbalanced_prefix,
)
from pickseq.core import DomainError, validate_instance
from pickseq.execution import egalitarian_welfare, execute, ew, is_ef1
from pickseq.mms import guarantee_alpha, is_irregular, mms_exact
from pickseq.sequences import enumerate_all, in_rb_class, make_round_robin, parse_sequence

PRICE_CASES = [(n, m) for n in (2, 3, 4) for m in range(n + 1, 2 * n + 4)]


def test_ew_zero():
    for n, m in [(2, 2), (3, 4), (4, 9)]:
        g = gen_ew_zero(n, m)
        assert g.measure() == 0 and g.holds()
        assert ew(g.instance, g.witness) > 0


@pytest.mark.parametrize("n,m", PRICE_CASES)
def test_price_all_exact(n, m):
    for seq in enumerate_all(n, m, restrict_balanced=True):
        g = gen_price_all(n, m, seq)
        assert validate_instance(g.instance) == []
        assert g.measure() == min(m - n + 1, n) == g.expected_ratio_or_welfare
        assert g.witness.picks[:n] == tuple(range(1, n + 1))


@pytest.mark.parametrize("n,m", PRICE_CASES + [(4, 12)])
def test_price_rb(n, m):
    for seq in enumerate_all(n, m, restrict_balanced=True):
        g = gen_price_rb(n, m, seq)
        assert validate_instance(g.instance) == []
        assert in_rb_class(g.witness)
        if m <= 2 * n - 1:
            assert g.provenance is Provenance.PRICE_RB_SMALL and g.measure() == 2
        else:
            assert g.provenance is Provenance.PRICE_RB_LARGE
            assert g.measure() >= min(-(-m // n), n.bit_length())
            assert g.extra["epsilon"] == Fraction(1, 2 * (2 * n - 1) * m)
        assert g.holds()


@pytest.mark.parametrize("name", ["price_all", "price_rb"])
def test_price_generators_need_extra_goods(name):
    with pytest.raises(DomainError):
        GENERATORS[name](3, 3, make_round_robin(3, 3))


def test_mms_agent_example():
    g = gen_mms_agent(3, 5, parse_sequence("1,2,3|3,1"), 2)
    assert g.measure() == Fraction(1, 2)
    assert g.extra["mms"] == mms_exact(g.instance, 2).value == 2


@pytest.mark.parametrize("n,m", [(2, 3), (2, 6), (3, 5), (3, 7), (4, 6), (4, 10)])
def test_mms_agent_tight(n, m):
    for seq in enumerate_all(n, m, restrict_balanced=True):
        agent = n - 1 if is_irregular(seq) else n
        g = gen_mms_agent(n, m, seq, agent)
        assert g.measure() == guarantee_alpha(seq)
        assert g.extra["mms"] == mms_exact(g.instance, agent).value


@pytest.mark.parametrize("n,m", [(2, 5), (3, 7), (3, 8), (4, 10)])
def test_I1_I2(n, m):
    for seq in enumerate_all(n, m, restrict_balanced=True):
        one, two = gen_mms_I1(n, m, seq), gen_mms_I2(n, m, seq)
        assert one.holds() and two.holds()
    assert gen_mms_I1(3, 7).measure() == Fraction(1, 2)
    assert gen_mms_I2(3, 7).measure() == Fraction(2, 5)


@pytest.mark.parametrize(
    "text,n,length,pair",
    [("1,1", 2, 2, (2, 1)), ("1,2,1,1", 2, 4, (2, 1)), ("1,2,2,3,3,3,3", 3, 3, (3, 2))],
)
def test_ef1_counterexample(text, n, length, pair):
    seq = parse_sequence(text, n)
    g = gen_ef1_counterexample(seq)
    assert g.holds()
    assert (g.target_agent, g.extra["envied"]) == pair
    assert g.extra["prefix_length"] == length
    res = is_ef1(g.instance, execute(g.instance, seq))
    assert not res.holds


def test_ef1_counterexample_rejects_balanced():
    with pytest.raises(DomainError):
        gen_ef1_counterexample(make_round_robin(3, 7))


def test_unbalanced_prefix():
    assert unbalanced_prefix(parse_sequence("1,2,2,3,3,3,3", 3)) == (3, 3, 2)
    assert unbalanced_prefix(parse_sequence("2,2", 2)) == (2, 1, 2)


def test_round_robin_welfare_on_price_instance():
    g = gen_price_all(2, 3)
    assert egalitarian_welfare(g.instance, execute(g.instance, g.sequence)).egalitarian == Fraction(1, 2)
