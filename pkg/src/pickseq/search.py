"""Search primitives shared by the verification harness.

Nothing here knows about theorems.  The module offers

* utility grids and the picking orders they induce,
* the set of allocations a sequence can produce once one agent's order is
  fixed and every other agent ranges over a family of orders,
* branch and bound for the best egalitarian welfare over a sequence space,
* a seeded sampler of small rational instances.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .core import Instance, ResourceCapExceeded, default_preferences
from .execution import run_picks
from .sequences import PickingSequence, enum_cap


def grid_rows(values: Sequence[Fraction], m: int) -> Iterable[tuple[Fraction, ...]]:
    return itertools.product(values, repeat=m)


def order_of(row: Sequence) -> tuple[int, ...]:
    """Picking order of one utility row under lower-index tie-breaking."""
    return default_preferences([row])[0]


def rows_by_order(values: Sequence[Fraction], m: int) -> dict[tuple[int, ...], list[tuple]]:
    """Group every row of the grid by the picking order it induces."""
    groups: dict[tuple[int, ...], list[tuple]] = {}
    for row in grid_rows(values, m):
        groups.setdefault(order_of(row), []).append(row)
    return groups


def _top(order: tuple[int, ...], taken: int) -> int:
    for g in order:
        if not taken >> g & 1:
            return g
    raise AssertionError("no good left")


def reachable_allocations(
    picks: Sequence[int],
    n: int,
    m: int,
    fixed_agent: int,
    fixed_order: tuple[int, ...],
    orders: Sequence[tuple[int, ...]],
) -> dict[tuple[int, ...], tuple[int, ...]]:
    """Owner vectors (owner of good g at index g-1) reachable when
    ``fixed_agent`` uses ``fixed_order`` and every other agent independently
    uses any order from ``orders``.

    Each owner vector maps to one profile producing it: the index into
    ``orders`` used by every agent, -1 for the fixed agent.

    Orders are not expanded one profile at a time.  Each other agent carries
    the set of orders still consistent with her earlier picks; at her turn the
    set is split by which good it would take.  The result equals running the
    sequence over every profile and collecting the allocations.
    """
    cand: list = [None] * (n + 1)
    all_ids = tuple(range(len(orders)))
    for a in range(1, n + 1):
        if a != fixed_agent:
            cand[a] = all_ids
    owner = [0] * (m + 1)
    out: dict[tuple[int, ...], tuple[int, ...]] = {}
    T = len(picks)

    def dfs(t: int, taken: int):
        if t == T:
            key = tuple(owner[1:])
            if key not in out:
                out[key] = tuple(-1 if c is None else c[0] for c in cand[1:])
            return
        a = picks[t]
        if a == fixed_agent:
            g = _top(fixed_order, taken)
            owner[g] = a
            dfs(t + 1, taken | 1 << g)
            return
        groups: dict[int, list[int]] = {}
        for o in cand[a]:
            groups.setdefault(_top(orders[o], taken), []).append(o)
        saved = cand[a]
        for g, ids in groups.items():
            cand[a] = ids
            owner[g] = a
            dfs(t + 1, taken | 1 << g)
        cand[a] = saved

    dfs(0, 0)
    return out


# -- best egalitarian welfare over a sequence space ------------------------

def scaled_matrix(inst: Instance) -> tuple[list[list[int]], int]:
    """Utilities multiplied by a common denominator."""
    scale = math.lcm(*(u.denominator for row in inst.utilities for u in row))
    return [[int(u * scale) for u in row] for row in inst.utilities], scale


def max_egalitarian(
    inst: Instance,
    balanced: bool,
    floor: int = -1,
    node_cap: int | None = None,
    stop_above: bool = False,
) -> tuple[int, tuple[int, ...] | None, int]:
    """Branch and bound for the largest egalitarian welfare over sequences
    prefixed by (1..n), either all of them or only the balanced ones.

    Works on the integer-scaled matrix; returns ``(value, picks, scale)`` where
    ``value`` is scaled.  Only welfare strictly above ``floor`` is searched
    for; when nothing beats it ``picks`` is None.  With ``stop_above`` the
    search returns at the first sequence beating ``floor``.
    """
    U, scale = scaled_matrix(inst)
    n, m = inst.n, inst.m
    prefs = [[g - 1 for g in order] for order in inst.preferences]
    node_cap = enum_cap() if node_cap is None else node_cap

    taken = [False] * m
    cursor = [0] * n
    util = [0] * n
    avail = [sum(row) for row in U]
    picks = list(range(1, n + 1))
    best = [floor, None]
    nodes = 0

    def take(a: int) -> tuple[int, int]:
        order = prefs[a]
        c = cursor[a]
        while taken[order[c]]:
            c += 1
        g = order[c]
        old = cursor[a]
        cursor[a] = c + 1
        taken[g] = True
        util[a] += U[a][g]
        for k in range(n):
            avail[k] -= U[k][g]
        return g, old

    def untake(a: int, g: int, old: int):
        taken[g] = False
        cursor[a] = old
        util[a] -= U[a][g]
        for k in range(n):
            avail[k] += U[k][g]

    for a in range(n):
        take(a)

    def dfs(t: int, used: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > node_cap:
            raise ResourceCapExceeded(f"welfare search exceeded {node_cap} nodes")
        if t == m:
            low = min(util)
            if low > best[0]:
                best[0], best[1] = low, tuple(picks)
                return stop_above
            return False
        if min(u + v for u, v in zip(util, avail)) <= best[0]:
            return False
        if balanced:
            if used == (1 << n) - 1:
                used = 0
            choices = [a for a in range(n) if not used >> a & 1]
        else:
            choices = list(range(n))
        choices.sort(key=util.__getitem__)
        for a in choices:
            g, old = take(a)
            picks.append(a + 1)
            done = dfs(t + 1, used | 1 << a)
            picks.pop()
            untake(a, g, old)
            if done:
                return True
        return False

    dfs(n, (1 << n) - 1)
    return best[0], best[1], scale


def scaled_ew(inst: Instance, seq: PickingSequence, scale: int) -> int:
    goods = run_picks(inst.preferences, seq.picks, inst.m)
    util = [0] * inst.n
    for a, g in zip(seq.picks, goods):
        util[a - 1] += inst.utilities[a - 1][g - 1] * scale
    return int(min(util))


# -- sampling ---------------------------------------------------------------

#: Utilities drawn as p/q with 0 <= p <= 12 and 1 <= q <= 4.
SAMPLE_NUMERATORS = 13
SAMPLE_DENOMINATORS = 4


def sample_instance(rng: np.random.Generator, n: int, m: int) -> Instance:
    p = rng.integers(0, SAMPLE_NUMERATORS, size=(n, m))
    q = rng.integers(1, SAMPLE_DENOMINATORS + 1, size=(n, m))
    return Instance([[Fraction(int(a), int(b)) for a, b in zip(pr, qr)] for pr, qr in zip(p, q)])


def sample_balanced(rng: np.random.Generator, n: int, m: int) -> PickingSequence:
    picks = list(range(1, n + 1))
    while len(picks) < m:
        block = [int(a) + 1 for a in rng.permutation(n)]
        picks.extend(block[: m - len(picks)])
    return PickingSequence(tuple(picks), n)


def sample_sequence(rng: np.random.Generator, n: int, m: int) -> PickingSequence:
    """Uniform over all n**m agent strings (no prefix constraint)."""
    return PickingSequence(tuple(int(a) + 1 for a in rng.integers(0, n, size=m)), n)


def rng_for(seed: int, *key: int) -> np.random.Generator:
    """Independent stream for one job, derived from the master seed and an
    integer key; any job can be replayed alone."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))
