"""Running picking sequences and measuring the resulting allocations."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .core import Allocation, DomainError, Instance, bundle_utility, ratio
from .sequences import PickingSequence


def run_picks(preferences: Sequence[Sequence[int]], picks: Sequence[int], m: int) -> list[int]:
    """Low-level sincere picking: the good taken at each turn.

    ``preferences`` are 1-indexed goods per agent; ``picks`` 1-indexed agents.
    Each agent keeps a cursor into her own order, so a full run is O(n*m).
    """
    taken = [False] * (m + 1)
    cursor = [0] * (len(preferences) + 1)
    out = []
    for a in picks:
        order = preferences[a - 1]
        c = cursor[a]
        while taken[order[c]]:
            c += 1
        g = order[c]
        cursor[a] = c + 1
        taken[g] = True
        out.append(g)
    return out


def _check_compatible(inst: Instance, seq: PickingSequence):
    if seq.n != inst.n or seq.m != inst.m:
        raise DomainError(
            f"sequence is for n={seq.n}, m={seq.m} but instance has n={inst.n}, m={inst.m}"
        )


def execute(inst: Instance, seq: PickingSequence) -> Allocation:
    """Allocation produced when each agent picks her favourite remaining good."""
    _check_compatible(inst, seq)
    goods = run_picks(inst.preferences, seq.picks, inst.m)
    bundles = [set() for _ in range(inst.n)]
    log = []
    for turn, (a, g) in enumerate(zip(seq.picks, goods), start=1):
        bundles[a - 1].add(g)
        log.append((turn, a, g))
    return Allocation(tuple(frozenset(b) for b in bundles), tuple(log))


@dataclass(frozen=True)
class WelfareReport:
    per_agent_utility: tuple[Fraction, ...]
    egalitarian: Fraction


def egalitarian_welfare(inst: Instance, alloc: Allocation) -> WelfareReport:
    if not alloc.is_partition_of(inst.m) or alloc.n != inst.n:
        raise DomainError("allocation does not partition the goods among the agents")
    utils = tuple(bundle_utility(inst, i, alloc.bundle(i)) for i in range(1, inst.n + 1))
    return WelfareReport(utils, min(utils))


def ew(inst: Instance, seq: PickingSequence) -> Fraction:
    """Egalitarian welfare of the allocation produced by ``seq``."""
    return egalitarian_welfare(inst, execute(inst, seq)).egalitarian


class EF1Check(NamedTuple):
    holds: bool
    witness: tuple[int, int] | None = None  # (envious agent, envied agent)

    def __bool__(self):
        return self.holds


def is_ef1(inst: Instance, alloc: Allocation) -> EF1Check:
    """Check envy-freeness up to one good for every ordered pair.

    On failure the first violating pair ``(i, j)`` in lexicographic order is
    returned: agent i still envies j after removing any single good of A_j.
    """
    n = inst.n
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j and not ef1_pair_holds(inst, alloc, i, j):
                return EF1Check(False, (i, j))
    return EF1Check(True, None)


def ef1_pair_holds(inst: Instance, alloc: Allocation, i: int, j: int) -> bool:
    """Agent i's envy towards j vanishes after dropping i's favourite good of A_j."""
    other = alloc.bundle(j)
    if not other:
        return True
    row = inst.utilities[i - 1]
    own = sum((row[g - 1] for g in alloc.bundle(i)), Fraction(0))
    vals = [row[g - 1] for g in other]
    return own >= sum(vals, Fraction(0)) - max(vals)


def welfare_ratio(inst: Instance, seq_num: PickingSequence, seq_den: PickingSequence):
    """EW(seq_num) / EW(seq_den), with 0/0 = 1 and x/0 = infinity."""
    return ratio(ew(inst, seq_num), ew(inst, seq_den))


def round_goods(inst: Instance, seq: PickingSequence) -> list[list[int | None]]:
    """Good taken by each agent in each round of ``seq`` (None if no pick).

    Rounds are blocks of n consecutive turns; the result is indexed
    ``[agent - 1][round - 1]``.
    """
    _check_compatible(inst, seq)
    n = inst.n
    n_rounds = -(-inst.m // n)
    table: list[list[int | None]] = [[None] * n_rounds for _ in range(n)]
    goods = run_picks(inst.preferences, seq.picks, inst.m)
    for t, (a, g) in enumerate(zip(seq.picks, goods)):
        table[a - 1][t // n] = g
    return table


def weakly_prefers(inst: Instance, agent: int, g: int | None, h: int | None) -> bool:
    """``g`` is at least as good as ``h`` for ``agent``; None is a dummy good
    ranked below every real good."""
    if h is None:
        return True
    if g is None:
        return False
    return g == h or inst.prefers(agent, g, h)


def pick_dominance_violations(
    inst: Instance, seq: PickingSequence, other: PickingSequence, stride: int
) -> list[tuple[int, int]]:
    """Pairs (agent, s) where the round-s good under ``seq`` is worse than the
    round-((s-1)*stride+1) good under ``other``.

    Rounds past the end of a sequence hold the dummy good.
    """
    mine = round_goods(inst, seq)
    theirs = round_goods(inst, other)
    bad = []
    for agent in range(1, inst.n + 1):
        for s in range(1, len(mine[agent - 1]) + 1):
            r = (s - 1) * stride + 1
            row = theirs[agent - 1]
            h = row[r - 1] if r <= len(row) else None
            if not weakly_prefers(inst, agent, mine[agent - 1][s - 1], h):
                bad.append((agent, s))
    return bad
