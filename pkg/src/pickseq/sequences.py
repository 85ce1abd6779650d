"""Picking sequences: representation, rounds, constructors and enumeration."""
from __future__ import annotations

import itertools
import math
import os
import re
from dataclasses import dataclass
from typing import Iterator

from .core import DomainError, ResourceCapExceeded

#: Default guard on exhaustive enumeration.  Override with PICKSEQ_ENUM_CAP.
DEFAULT_ENUM_CAP = 10**7


def enum_cap() -> int:
    return int(os.environ.get("PICKSEQ_ENUM_CAP", DEFAULT_ENUM_CAP))


@dataclass(frozen=True)
class PickingSequence:
    """Agent order of length m over agents 1..n.

    Sequences that do not start with (1, ..., n) are allowed; check
    :attr:`has_standard_prefix` before treating one as a member of the
    standard classes.
    """

    picks: tuple[int, ...]
    n: int

    def __post_init__(self):
        picks = tuple(int(a) for a in self.picks)
        object.__setattr__(self, "picks", picks)
        if self.n < 1:
            raise DomainError("need at least one agent")
        bad = [a for a in picks if not 1 <= a <= self.n]
        if bad:
            raise DomainError(f"agents {bad} outside 1..{self.n}")

    @property
    def m(self) -> int:
        return len(self.picks)

    @property
    def has_standard_prefix(self) -> bool:
        return self.m >= self.n and self.picks[: self.n] == tuple(range(1, self.n + 1))

    def __len__(self):
        return len(self.picks)

    def __iter__(self):
        return iter(self.picks)

    def __getitem__(self, turn: int) -> int:
        """Agent at 1-indexed ``turn``."""
        if not 1 <= turn <= self.m:
            raise IndexError(turn)
        return self.picks[turn - 1]

    def __str__(self):
        return format_sequence(self)

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "PickingSequence":
        return parse_sequence(text, n)


@dataclass(frozen=True)
class AgentPickIndices:
    """Turn indices t_1 < ... < t_R of one agent, with sentinel m + 1."""

    agent: int
    indices: tuple[int, ...]
    sentinel: int

    @property
    def R(self) -> int:
        return len(self.indices)

    def t(self, r: int) -> int:
        """Index of the r-th pick, 1-indexed; r = R + 1 gives the sentinel."""
        if r == self.R + 1:
            return self.sentinel
        return self.indices[r - 1]


def parse_sequence(text: str, n: int | None = None) -> PickingSequence:
    """Parse ``"1,2,3|3,1"``; whitespace is ignored.

    Without an explicit ``n`` the length of the first ``|``-delimited block is
    used, or the largest agent label when there are no separators.
    """
    compact = re.sub(r"\s+", "", text)
    if not compact or not re.fullmatch(r"[\d,|]+", compact):
        raise DomainError(f"malformed sequence {text!r}")
    blocks = compact.split("|")
    picks = []
    for block in blocks:
        items = [s for s in block.split(",") if s != ""]
        picks.extend(int(s) for s in items)
    if not picks:
        raise DomainError(f"empty sequence {text!r}")
    if n is None:
        if len(blocks) > 1:
            n = len([s for s in blocks[0].split(",") if s])
        else:
            n = max(picks)
        n = max(n, max(picks))
    return PickingSequence(tuple(picks), n)


def format_sequence(seq: PickingSequence) -> str:
    return "|".join(",".join(map(str, block)) for block in rounds(seq))


def rounds(seq: PickingSequence) -> list[tuple[int, ...]]:
    """Split into consecutive blocks of n turns; the last may be shorter."""
    n = seq.n
    return [seq.picks[k : k + n] for k in range(0, seq.m, n)]


def is_recursively_balanced(seq: PickingSequence) -> bool:
    """Every prefix keeps all pairwise pick counts within one of each other."""
    counts = [0] * (seq.n + 1)
    low, n_low = 0, seq.n  # current minimum count and how many agents sit at it
    for a in seq.picks:
        if counts[a] != low:
            return False
        counts[a] += 1
        n_low -= 1
        if n_low == 0:
            low += 1
            n_low = seq.n
    return True


def in_rb_class(seq: PickingSequence) -> bool:
    """Membership in the recursively balanced sequences with prefix (1..n)."""
    return seq.has_standard_prefix and is_recursively_balanced(seq)


def agent_pick_indices(seq: PickingSequence, agent: int) -> AgentPickIndices:
    if not 1 <= agent <= seq.n:
        raise DomainError(f"agent {agent} outside 1..{seq.n}")
    idx = tuple(t for t, a in enumerate(seq.picks, start=1) if a == agent)
    return AgentPickIndices(agent, idx, seq.m + 1)


def _check_nm(n: int, m: int):
    if n < 2 or m < n:
        raise DomainError(f"need n >= 2 and m >= n (got n={n}, m={m})")


def make_round_robin(n: int, m: int) -> PickingSequence:
    _check_nm(n, m)
    return PickingSequence(tuple(t % n + 1 for t in range(m)), n)


def make_balanced_alternation(n: int, m: int) -> PickingSequence:
    """Ascending in odd rounds, descending in even rounds."""
    _check_nm(n, m)
    up = list(range(1, n + 1))
    picks = []
    r = 0
    while len(picks) < m:
        picks.extend(up if r % 2 == 0 else up[::-1])
        r += 1
    return PickingSequence(tuple(picks[:m]), n)


def make_last_first(n: int, m: int) -> PickingSequence:
    """First round ascending, every later round descending (agent n leads)."""
    _check_nm(n, m)
    down = list(range(n, 0, -1))
    picks = list(range(1, n + 1))
    while len(picks) < m:
        picks.extend(down)
    return PickingSequence(tuple(picks[:m]), n)


def count_all(n: int, m: int) -> int:
    """Number of sequences of length m prefixed by (1..n)."""
    return n ** (m - n)


def count_balanced(n: int, m: int) -> int:
    """Number of recursively balanced sequences prefixed by (1..n)."""
    f, s = divmod(m, n)
    return math.factorial(n) ** (f - 1) * math.perm(n, s)


def enumerate_all(
    n: int, m: int, restrict_balanced: bool = False, cap: int | None = None
) -> Iterator[PickingSequence]:
    """Yield every sequence with prefix (1..n), optionally only balanced ones.

    Order is lexicographic round by round.  Raises
    :class:`ResourceCapExceeded` up front when the count exceeds ``cap``.
    """
    _check_nm(n, m)
    cap = enum_cap() if cap is None else cap
    total = count_balanced(n, m) if restrict_balanced else count_all(n, m)
    if total > cap:
        raise ResourceCapExceeded(f"{total} sequences exceed the cap of {cap}")
    prefix = tuple(range(1, n + 1))
    agents = range(1, n + 1)
    if restrict_balanced:
        f, s = divmod(m, n)
        factors = [list(itertools.permutations(agents)) for _ in range(f - 1)]
        if s:
            factors.append(list(itertools.permutations(agents, s)))
        for parts in itertools.product(*factors):
            yield PickingSequence(prefix + tuple(itertools.chain.from_iterable(parts)), n)
    else:
        for tail in itertools.product(agents, repeat=m - n):
            yield PickingSequence(prefix + tail, n)


def normalize_labels(seq: PickingSequence) -> tuple[PickingSequence, dict[int, int]]:
    """Relabel agents by their order of appearance in the first n turns.

    Returns the relabelled sequence and the map old label -> new label.
    """
    first = seq.picks[: seq.n]
    if len(set(first)) != seq.n:
        raise DomainError("every agent must appear in the first n turns")
    mapping = {old: new for new, old in enumerate(first, start=1)}
    return PickingSequence(tuple(mapping[a] for a in seq.picks), seq.n), mapping
