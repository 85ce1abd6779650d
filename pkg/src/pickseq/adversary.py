"""Hand-built worst-case instances for the welfare and MMS bounds.

Every generator returns a :class:`GeneratedInstance` that records which
sequence it targets, the quantity it pins down and how that quantity relates
to the recorded value (``==``, ``>=`` or ``<=``).  :meth:`GeneratedInstance.measure`
recomputes the quantity from scratch so callers can confirm the claim.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from .core import DomainError, Instance, bundle_utility, ratio
from .execution import ef1_pair_holds, ew, execute
from .mms import agent_ub_tightness, mms_exact
from .sequences import (
    PickingSequence,
    agent_pick_indices,
    in_rb_class,
    is_recursively_balanced,
    make_round_robin,
    rounds,
)


class Provenance(str, enum.Enum):
    EW_ZERO = "ew_zero"
    PRICE_ALL_SMALL = "price_all_small"
    PRICE_ALL_LARGE = "price_all_large"
    PRICE_RB_SMALL = "price_rb_small"
    PRICE_RB_LARGE = "price_rb_large"
    MMS_AGENT = "mms_agent"
    MMS_I1 = "mms_i1"
    MMS_I2 = "mms_i2"
    EF1_COUNTEREXAMPLE = "ef1_counterexample"


_WELFARE = {Provenance.EW_ZERO}
_PRICE = {
    Provenance.PRICE_ALL_SMALL,
    Provenance.PRICE_ALL_LARGE,
    Provenance.PRICE_RB_SMALL,
    Provenance.PRICE_RB_LARGE,
}
_MMS = {Provenance.MMS_AGENT, Provenance.MMS_I1, Provenance.MMS_I2}


@dataclass(frozen=True)
class GeneratedInstance:
    instance: Instance
    target_agent: int
    expected_ratio_or_welfare: Fraction
    provenance: Provenance
    sequence: PickingSequence
    witness: PickingSequence | None = None
    relation: str = "=="
    extra: dict = field(default_factory=dict)

    def measure(self):
        """Recompute the quantity this instance was built to pin down.

        * welfare generators: EW of ``sequence``
        * price generators: EW(witness) / EW(sequence)
        * MMS generators: target agent's utility over her maximin share
        * EF1 counterexample: the envious agent's utility
        """
        inst, seq = self.instance, self.sequence
        if self.provenance in _WELFARE:
            return ew(inst, seq)
        if self.provenance in _PRICE:
            return ratio(ew(inst, self.witness), ew(inst, seq))
        alloc = execute(inst, seq)
        got = bundle_utility(inst, self.target_agent, alloc.bundle(self.target_agent))
        if self.provenance in _MMS:
            return ratio(got, mms_exact(inst, self.target_agent).value)
        return got

    def holds(self) -> bool:
        got = self.measure()
        want = self.expected_ratio_or_welfare
        if self.relation == "==":
            ok = got == want
        elif self.relation == ">=":
            ok = got >= want
        else:
            ok = got <= want
        if self.provenance is Provenance.EW_ZERO and ok:
            ok = ew(self.instance, self.witness) == self.extra["witness_welfare"]
        if self.provenance is Provenance.EF1_COUNTEREXAMPLE and ok:
            alloc = execute(self.instance, self.sequence)
            ok = not ef1_pair_holds(self.instance, alloc, self.target_agent, self.extra["envied"])
        return ok


def _zeros(n: int, m: int) -> list[list[Fraction]]:
    return [[Fraction(0)] * m for _ in range(n)]


def _require_class(seq: PickingSequence):
    if not in_rb_class(seq):
        raise DomainError("sequence must be recursively balanced with prefix 1..n")


def gen_ew_zero(n: int, m: int, seq: PickingSequence | None = None) -> GeneratedInstance:
    """Instance where ``seq`` leaves agent 2 with nothing of value while
    swapping the first two turns gives every agent something."""
    seq = seq or make_round_robin(n, m)
    _require_class(seq)
    u = _zeros(n, m)
    u[0][0], u[0][1] = Fraction(2), Fraction(1)
    u[1][0] = Fraction(3)
    for i in range(3, n + 1):
        u[i - 1][i - 1] = Fraction(3)
    swapped = (seq.picks[1], seq.picks[0]) + seq.picks[2:]
    return GeneratedInstance(
        Instance(u),
        target_agent=2,
        expected_ratio_or_welfare=Fraction(0),
        provenance=Provenance.EW_ZERO,
        sequence=seq,
        witness=PickingSequence(swapped, n),
        extra={"witness_welfare": Fraction(1)},
    )


def _agent_missing_from_round_two(seq: PickingSequence) -> int:
    second = rounds(seq)[1]
    return min(a for a in range(1, seq.n + 1) if a not in second)


def gen_price_all(n: int, m: int, seq: PickingSequence | None = None) -> GeneratedInstance:
    """Instance plus a witness (1..n, k, ..., k) beating ``seq`` by a factor of
    min(m - n + 1, n) in egalitarian welfare."""
    seq = seq or make_round_robin(n, m)
    _require_class(seq)
    if m < n + 1:
        raise DomainError("needs m >= n + 1")
    u = _zeros(n, m)
    if m <= 2 * n - 1:
        k = _agent_missing_from_round_two(seq)
        liked = [k] + list(range(n + 1, m + 1))
        value, prov, expected = Fraction(1, m - n + 1), Provenance.PRICE_ALL_SMALL, m - n + 1
    else:
        k = seq.picks[2 * n - 1]
        liked = [k] + list(range(n + 1, 2 * n))
        value, prov, expected = Fraction(1, n), Provenance.PRICE_ALL_LARGE, n
    for g in liked:
        u[k - 1][g - 1] = value
    for i in range(1, n + 1):
        if i != k:
            u[i - 1][i - 1] = Fraction(1)
    witness = PickingSequence(tuple(range(1, n + 1)) + (k,) * (m - n), n)
    return GeneratedInstance(
        Instance(u), k, Fraction(expected), prov, seq, witness, "==", {"k": k}
    )


def gen_price_rb(n: int, m: int, seq: PickingSequence | None = None) -> GeneratedInstance:
    """Instance plus a balanced witness beating ``seq`` in egalitarian welfare.

    With an incomplete second round the factor is exactly 2.  Otherwise the
    witness replays the second round of ``seq`` backwards in every later round
    and the factor is at least min(ceil(m/n), floor(log2 n) + 1).
    """
    seq = seq or make_round_robin(n, m)
    _require_class(seq)
    if m < n + 1:
        raise DomainError("needs m >= n + 1")
    u = _zeros(n, m)
    if m <= 2 * n - 1:
        k = _agent_missing_from_round_two(seq)
        u[k - 1] = [Fraction(1, m)] * m
        for i in range(1, n + 1):
            if i != k:
                u[i - 1][i - 1] = Fraction(1)
        second = [a for a in rounds(seq)[1] if a != k]
        tail = (k,) + tuple(second[: m - n - 1])
        witness = PickingSequence(tuple(range(1, n + 1)) + tail, n)
        return GeneratedInstance(
            Instance(u), k, Fraction(2), Provenance.PRICE_RB_SMALL, seq, witness, "==", {"k": k}
        )

    order = seq.picks[n : 2 * n]  # i_1, ..., i_n
    eps = Fraction(1, 2 * (2 * n - 1) * m)
    last = order[-1]
    for j in range(1, 2 * n):
        u[last - 1][j - 1] = Fraction(1, 2 * n - 1)
    for k, agent in enumerate(order[:-1], start=1):
        liked = list(range(n + 1, n + k + 1)) + list(range(2 * n, m + 1))
        for g in liked:
            u[agent - 1][g - 1] = eps
        u[agent - 1][agent - 1] = 1 - len(liked) * eps
    reversed_round = tuple(reversed(order))
    tail = []
    while len(tail) < m - n:
        tail.extend(reversed_round)
    witness = PickingSequence(tuple(range(1, n + 1)) + tuple(tail[: m - n]), n)
    bound = min(-(-m // n), n.bit_length())
    return GeneratedInstance(
        Instance(u),
        last,
        Fraction(bound),
        Provenance.PRICE_RB_LARGE,
        seq,
        witness,
        ">=",
        {"epsilon": eps, "second_round": order},
    )


def gen_mms_agent(n: int, m: int, seq: PickingSequence, agent: int) -> GeneratedInstance:
    """Instance where ``agent`` gets exactly the per-agent upper bound
    (s-1) / floor((t_s - i)/(n+1-i)) of her maximin share."""
    _require_class(seq)
    if seq.n != n or seq.m != m:
        raise DomainError("sequence does not match n, m")
    i = agent
    idx = agent_pick_indices(seq, i)
    value, s = agent_ub_tightness(n, m, i, idx)
    u = _zeros(n, m)
    for j in range(1, i):
        u[i - 1][j - 1] = Fraction(m)
    for j in range(i, idx.t(s)):
        u[i - 1][j - 1] = Fraction(1)
    for k in range(1, n + 1):
        if k != i:
            u[k - 1][k - 1] = Fraction(1)
    share = (idx.t(s) - i) // (n + 1 - i)
    return GeneratedInstance(
        Instance(u), i, value, Provenance.MMS_AGENT, seq, None, "==", {"s": s, "mms": Fraction(share)}
    )


def _mms_agent_n_instance(n: int, m: int, last_liked: int) -> Instance:
    u = _zeros(n, m)
    for i in range(1, n):
        u[i - 1][i - 1] = Fraction(m)
        u[n - 1][i - 1] = Fraction(m)
    for j in range(n, last_liked + 1):
        u[n - 1][j - 1] = Fraction(1)
    return Instance(u)


def gen_mms_I1(n: int, m: int, seq: PickingSequence | None = None) -> GeneratedInstance:
    """Agent n values the goods n..floor(m/n)*n at 1; she gets exactly
    floor(m/n) / (floor(m/n)*n - n + 1) of her share under any balanced sequence."""
    seq = seq or make_round_robin(n, m)
    _require_class(seq)
    f = m // n
    return GeneratedInstance(
        _mms_agent_n_instance(n, m, f * n),
        n,
        Fraction(f, f * n - n + 1),
        Provenance.MMS_I1,
        seq,
        extra={"mms": Fraction(f * n - n + 1)},
    )


def gen_mms_I2(n: int, m: int, seq: PickingSequence | None = None) -> GeneratedInstance:
    """Agent n values the goods n..m at 1; she gets at most
    ceil(m/n) / (m - n + 1) of her share under any balanced sequence."""
    seq = seq or make_round_robin(n, m)
    _require_class(seq)
    return GeneratedInstance(
        _mms_agent_n_instance(n, m, m),
        n,
        Fraction(-(-m // n), m - n + 1),
        Provenance.MMS_I2,
        seq,
        relation="<=",
        extra={"mms": Fraction(m - n + 1)},
    )


def unbalanced_prefix(seq: PickingSequence) -> tuple[int, int, int]:
    """Shortest prefix length where some agent is two picks ahead of another.

    Returns ``(length, behind, ahead)``; ``behind`` is the lowest-index agent
    with the fewest picks in that prefix.
    """
    counts = [0] * (seq.n + 1)
    for t, a in enumerate(seq.picks, start=1):
        counts[a] += 1
        low = min(counts[1:])
        if counts[a] - low >= 2:
            behind = counts.index(low, 1)
            return t, behind, a
    raise DomainError("sequence is recursively balanced")


def gen_ef1_counterexample(seq: PickingSequence) -> GeneratedInstance:
    """Instance on which a non-balanced ``seq`` produces an EF1 violation.

    The two agents of the first unbalanced prefix value exactly the goods
    taken in that prefix; everyone else values every good.  Ties go to lower
    indices, so goods leave in index order.
    """
    if is_recursively_balanced(seq):
        raise DomainError("sequence is recursively balanced; EF1 always holds")
    n, m = seq.n, seq.m
    length, i, j = unbalanced_prefix(seq)
    u = [[Fraction(1)] * m for _ in range(n)]
    for agent in (i, j):
        u[agent - 1] = [Fraction(1) if g <= length else Fraction(0) for g in range(1, m + 1)]
    envier_utility = Fraction(sum(1 for t in range(length) if seq.picks[t] == i))
    return GeneratedInstance(
        Instance(u),
        i,
        envier_utility,
        Provenance.EF1_COUNTEREXAMPLE,
        seq,
        extra={"envied": j, "prefix_length": length},
    )


GENERATORS = {
    "ew_zero": gen_ew_zero,
    "price_all": gen_price_all,
    "price_rb": gen_price_rb,
    "mms_agent": gen_mms_agent,
    "mms_i1": gen_mms_I1,
    "mms_i2": gen_mms_I2,
    "ef1_counterexample": gen_ef1_counterexample,
}
