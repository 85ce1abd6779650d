"""Maximin shares and the MMS guarantees of balanced picking sequences."""
from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from fractions import Fraction

from .core import DomainError, Instance, ResourceCapExceeded, bundle_utility, format_rational, ratio
from .execution import execute
from .sequences import (
    AgentPickIndices,
    PickingSequence,
    agent_pick_indices,
    format_sequence,
    in_rb_class,
    is_recursively_balanced,
    rounds,
)

#: Default node budget for one MMS search.  Override with PICKSEQ_MMS_NODE_CAP.
DEFAULT_MMS_NODE_CAP = 5 * 10**6


@dataclass(frozen=True)
class MmsResult:
    agent: int
    value: Fraction
    witness_partition: tuple[frozenset[int], ...]

    def to_dict(self) -> dict:
        return {
            "agent": self.agent,
            "value": format_rational(self.value),
            "witness_partition": [sorted(b) for b in self.witness_partition],
        }


def _scaled_row(inst: Instance, agent: int) -> tuple[list[int], int]:
    row = inst.utilities[agent - 1]
    scale = math.lcm(*(u.denominator for u in row))
    return [int(u * scale) for u in row], scale


def mms_upper_bound(inst: Instance, agent: int) -> Fraction:
    """Cheap upper bound on the maximin share.

    With values sorted decreasingly, bundles k..n of any partition miss at
    least k-1 of the top goods, so the share is at most the tail average.
    """
    vals = sorted(inst.utilities[agent - 1], reverse=True)
    n = inst.n
    tail = sum(vals, Fraction(0))
    best = tail / n
    for k in range(1, n):
        tail -= vals[k - 1]
        best = min(best, tail / (n - k))
    return best


def _search(vals: list[int], n: int, node_cap: int) -> tuple[int, list[int]]:
    """Branch and bound over bundle assignments of positive integer values
    sorted decreasingly.  Returns the maximin value and an assignment."""
    k_max = len(vals)
    if k_max < n:
        return 0, [0] * k_max
    rem = [0] * (k_max + 1)
    for k in range(k_max - 1, -1, -1):
        rem[k] = rem[k + 1] + vals[k]
    upper = rem[0] // n
    for k in range(1, min(n, k_max)):
        upper = min(upper, rem[k] // (n - k))

    # greedy incumbent: give each good to the currently poorest bundle
    sums = [0] * n
    best_assign = []
    for v in vals:
        j = min(range(n), key=sums.__getitem__)
        sums[j] += v
        best_assign.append(j)
    best = min(sums)
    if best >= upper:
        return best, best_assign

    bundles = [0] * n
    assign = [0] * k_max
    nodes = 0

    def dfs(k: int):
        nonlocal best, best_assign, nodes
        nodes += 1
        if nodes > node_cap:
            raise ResourceCapExceeded(f"MMS search exceeded {node_cap} nodes")
        if k == k_max:
            low = min(bundles)
            if low > best:
                best, best_assign = low, assign[:]
            return
        target = best + 1
        deficit = 0
        for b in bundles:
            if b < target:
                deficit += target - b
        if deficit > rem[k]:
            return
        v = vals[k]
        tried = set()
        for j in sorted(range(n), key=bundles.__getitem__):
            b = bundles[j]
            if b in tried:
                continue
            tried.add(b)
            bundles[j] = b + v
            assign[k] = j
            dfs(k + 1)
            bundles[j] = b
            if best >= upper:
                return

    dfs(0)
    return best, best_assign


def mms_exact(inst: Instance, agent: int, node_cap: int | None = None) -> MmsResult:
    """Exact maximin share of ``agent`` with a witness partition.

    Goods are assigned in decreasing value; bundles holding equal sums are
    interchangeable and only one of them is tried.  A branch is cut when the
    value still unassigned cannot lift every bundle above the incumbent.
    """
    if not 1 <= agent <= inst.n:
        raise DomainError(f"agent {agent} outside 1..{inst.n}")
    if inst.m < inst.n:
        raise DomainError("maximin share needs m >= n")
    node_cap = int(os.environ.get("PICKSEQ_MMS_NODE_CAP", DEFAULT_MMS_NODE_CAP)) if node_cap is None else node_cap
    ints, scale = _scaled_row(inst, agent)
    order = sorted(range(inst.m), key=lambda g: -ints[g])
    positive = [g for g in order if ints[g] > 0]
    value, assign = _search([ints[g] for g in positive], inst.n, node_cap)
    parts = [set() for _ in range(inst.n)]
    for g, j in zip(positive, assign):
        parts[j].add(g + 1)
    for g in order[len(positive):]:
        parts[0].add(g + 1)
    return MmsResult(agent, Fraction(value, scale), tuple(frozenset(p) for p in parts))


def mms_brute_force(inst: Instance, agent: int) -> MmsResult:
    """Maximin share by trying all n**m bundle assignments (test oracle)."""
    row = inst.utilities[agent - 1]
    n, m = inst.n, inst.m
    best, best_assign = None, None
    for assign in itertools.product(range(n), repeat=m):
        sums = [Fraction(0)] * n
        for g, j in enumerate(assign):
            sums[j] += row[g]
        low = min(sums)
        if best is None or low > best:
            best, best_assign = low, assign
    parts = [frozenset(g + 1 for g in range(m) if best_assign[g] == j) for j in range(n)]
    return MmsResult(agent, best, tuple(parts))


def mms_ratio_profile(inst: Instance, seq: PickingSequence) -> tuple:
    """Each agent's realized utility divided by her maximin share."""
    alloc = execute(inst, seq)
    return tuple(
        ratio(bundle_utility(inst, i, alloc.bundle(i)), mms_exact(inst, i).value)
        for i in range(1, inst.n + 1)
    )


# -- per-agent guarantee formulas ------------------------------------------

def agent_lb_general(n: int, m: int, agent: int, indices: AgentPickIndices) -> Fraction:
    """Guarantee depending on the agent's own pick positions:
    min over r of (r-1)(n+1-i) / (t_r - i), r ranging over 2..R+1."""
    i = agent
    return min(
        Fraction((r - 1) * (n + 1 - i), indices.t(r) - i) for r in range(2, indices.R + 2)
    )


def agent_ub_tightness(n: int, m: int, agent: int, indices: AgentPickIndices) -> tuple[Fraction, int]:
    """Smallest (r-1) / floor((t_r - i)/(n+1-i)) and the first r attaining it."""
    i = agent
    best, best_r = None, None
    for r in range(2, indices.R + 2):
        val = Fraction(r - 1, (indices.t(r) - i) // (n + 1 - i))
        if best is None or val < best:
            best, best_r = val, r
    return best, best_r


def agent_lb_large_m(n: int, agent: int) -> Fraction:
    return Fraction(n + 1 - agent, 2 * n - agent)


def agent_lb_small_m(n: int, m: int, agent: int) -> Fraction:
    return Fraction(1, (m + 1 - agent) // (n + 1 - agent))


# -- sequence-level classification -----------------------------------------

@dataclass(frozen=True)
class GuaranteeConstants:
    alpha_max: Fraction
    alpha_min: Fraction
    L: int


def constants(n: int, m: int) -> GuaranteeConstants:
    if n < 2 or m < n:
        raise DomainError(f"need n >= 2 and m >= n (got n={n}, m={m})")
    f, c = m // n, -(-m // n)
    alpha_max = min(Fraction(f, f * n - n + 1), Fraction(c, m - n + 1))
    alpha_min = max(Fraction(1, n), Fraction(1, m - n + 1))
    return GuaranteeConstants(alpha_max, alpha_min, n.bit_length())


def _require_class(seq: PickingSequence):
    if not in_rb_class(seq):
        raise DomainError(f"{format_sequence(seq)} is not recursively balanced with prefix 1..n")


def is_irregular(seq: PickingSequence) -> bool:
    """Incomplete even-length second round without agent n-1, with agent n in
    its first half."""
    _require_class(seq)
    n, m = seq.n, seq.m
    blocks = rounds(seq)
    if len(blocks) < 2:
        return False
    second = blocks[1]
    if len(second) % 2 or n - 1 in second:
        return False
    result = n in second[: (m - n) // 2]
    if result:
        assert n + 2 <= m <= 2 * n - 1
    return result


def regular_alpha(seq: PickingSequence) -> Fraction:
    """min over r of (r-1)/(t_r - n) from agent n's pick positions."""
    _require_class(seq)
    n = seq.n
    idx = agent_pick_indices(seq, n)
    return min(Fraction(r - 1, idx.t(r) - n) for r in range(2, idx.R + 2))


def guarantee_alpha(seq: PickingSequence) -> Fraction:
    """Fraction of her maximin share every agent is guaranteed under ``seq``."""
    if is_irregular(seq):
        return Fraction(2, seq.m - seq.n + 2)
    return regular_alpha(seq)


def is_best(seq: PickingSequence) -> bool:
    if is_irregular(seq):
        return False
    n, m = seq.n, seq.m
    alpha_max = constants(n, m).alpha_max
    idx = agent_pick_indices(seq, n)
    for r in range(2, -(-m // n) + 1):
        if idx.R < r or idx.t(r) > n + (r - 1) / alpha_max:
            return False
    return True


def is_worst(seq: PickingSequence) -> bool:
    _require_class(seq)
    n, m = seq.n, seq.m
    if m <= 2 * n - 1:
        return seq.picks.count(n) == 1
    for block in rounds(seq)[1:]:
        if len(block) >= n - 1 and n not in block[: n - 1]:
            return True
    return False


def two_agent_class(seq: PickingSequence) -> Fraction:
    """Guarantee for two agents: the agent-2-leads class or the rest."""
    if seq.n != 2:
        raise DomainError("two_agent_class needs n = 2")
    if seq.m < 3:
        raise DomainError("two_agent_class needs m >= 3")
    _require_class(seq)
    if all(block[0] == 2 for block in rounds(seq)[1:]):
        return 1 / (2 - Fraction(1, seq.m // 2))
    return Fraction(1, 2)


@dataclass(frozen=True)
class SequenceReport:
    sequence: PickingSequence
    recursively_balanced: bool
    in_class: bool
    regular: bool | None = None
    alpha: Fraction | None = None
    regular_formula_alpha: Fraction | None = None
    is_best: bool | None = None
    is_worst: bool | None = None

    def verdict(self) -> str:
        if not self.in_class:
            rb = "recursively balanced" if self.recursively_balanced else "not recursively balanced"
            return f"{format_sequence(self.sequence)}: {rb}, outside the prefixed class"
        kind = "regular" if self.regular else "irregular"
        tag = "best" if self.is_best else ""
        if self.is_worst:
            tag = "best+worst" if self.is_best else "worst"
        return (
            f"{format_sequence(self.sequence)}: {kind}, alpha {format_rational(self.alpha)}"
            + (f", {tag}" if tag else ", intermediate")
        )

    def to_dict(self) -> dict:
        def fmt(x):
            return None if x is None else format_rational(x)

        return {
            "sequence": format_sequence(self.sequence),
            "n": self.sequence.n,
            "m": self.sequence.m,
            "recursively_balanced": self.recursively_balanced,
            "in_class": self.in_class,
            "regular": self.regular,
            "alpha": fmt(self.alpha),
            "regular_formula_alpha": fmt(self.regular_formula_alpha),
            "is_best": self.is_best,
            "is_worst": self.is_worst,
        }


def classify(seq: PickingSequence) -> SequenceReport:
    rb = is_recursively_balanced(seq)
    if not in_rb_class(seq):
        return SequenceReport(seq, rb, False)
    irregular = is_irregular(seq)
    return SequenceReport(
        seq,
        True,
        True,
        regular=not irregular,
        alpha=guarantee_alpha(seq),
        regular_formula_alpha=regular_alpha(seq),
        is_best=is_best(seq),
        is_worst=is_worst(seq),
    )
