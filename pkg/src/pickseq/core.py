"""Instances, allocations and the exact-ratio convention.

Agents and goods are 1-indexed everywhere in the public API.  Utilities are
stored as :class:`fractions.Fraction` and never touch floating point.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

Rational = Fraction

#: Value returned by :func:`ratio` when the denominator is zero and the
#: numerator is positive.  Compares above every Fraction.
INFINITY = math.inf


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


class ResourceCapExceeded(RuntimeError):
    """Raised when an exhaustive search would exceed its configured cap."""


def to_rational(value) -> Fraction:
    """Parse ``int``, ``Fraction`` or a ``"p/q"`` string into a Fraction.

    Floats are rejected so that no rounding can sneak into an instance.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not utilities")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_rational(value: Fraction | float) -> int | str:
    """Serialize a rational as a bare int when integral, else ``"p/q"``."""
    if value == INFINITY:
        return "inf"
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    return f"{value.numerator}/{value.denominator}"


def ratio(a: Fraction, b: Fraction) -> Fraction | float:
    """``a / b`` with 0/0 read as 1 and a/0 (a > 0) read as infinity."""
    if b == 0:
        return Fraction(1) if a == 0 else INFINITY
    return Fraction(a) / Fraction(b)


def default_preferences(utilities: Sequence[Sequence]) -> tuple[tuple[int, ...], ...]:
    """Order goods by decreasing utility, breaking ties towards lower indices."""
    prefs = []
    for row in utilities:
        m = len(row)
        prefs.append(tuple(sorted(range(1, m + 1), key=lambda g: (-row[g - 1], g))))
    return tuple(prefs)


@dataclass(frozen=True)
class Instance:
    """Additive utilities plus each agent's picking order.

    ``utilities[i-1][g-1]`` is agent i's value for good g and
    ``preferences[i-1]`` lists the goods from most to least preferred.
    Construction only checks shapes and signs; use :func:`validate_instance`
    for the full set of invariants.
    """

    utilities: tuple[tuple[Fraction, ...], ...]
    preferences: tuple[tuple[int, ...], ...] = field(default=None)

    def __post_init__(self):
        rows = tuple(tuple(to_rational(u) for u in row) for row in self.utilities)
        if not rows:
            raise DomainError("an instance needs at least one agent")
        m = len(rows[0])
        if any(len(row) != m for row in rows):
            raise DomainError("utility matrix is ragged")
        if any(u < 0 for row in rows for u in row):
            raise DomainError("utilities must be nonnegative")
        object.__setattr__(self, "utilities", rows)
        if self.preferences is None:
            prefs = default_preferences(rows)
        else:
            prefs = tuple(tuple(int(g) for g in order) for order in self.preferences)
            if len(prefs) != len(rows):
                raise DomainError("need one preference order per agent")
        object.__setattr__(self, "preferences", prefs)

    @property
    def n(self) -> int:
        return len(self.utilities)

    @property
    def m(self) -> int:
        return len(self.utilities[0])

    @cached_property
    def rank(self) -> tuple[dict[int, int], ...]:
        """Position of each good in each agent's order (0 = favourite)."""
        return tuple({g: pos for pos, g in enumerate(order)} for order in self.preferences)

    def utility(self, agent: int, good: int) -> Fraction:
        _check_agent(self, agent)
        _check_good(self, good)
        return self.utilities[agent - 1][good - 1]

    def prefers(self, agent: int, g: int, h: int) -> bool:
        """True when ``agent`` would pick good ``g`` before good ``h``."""
        rank = self.rank[agent - 1]
        return rank[g] < rank[h]

    def is_identical(self) -> bool:
        return all(row == self.utilities[0] for row in self.utilities)

    # -- serialization -------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "utilities": [[format_rational(u) for u in row] for row in self.utilities],
            "preferences": [list(order) for order in self.preferences],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Instance":
        utilities = data["utilities"]
        n = data.get("n", len(utilities))
        m = data.get("m", len(utilities[0]) if utilities else 0)
        if len(utilities) != n or any(len(row) != m for row in utilities):
            raise DomainError(f"utility matrix does not have shape {n}x{m}")
        return cls(utilities, data.get("preferences"))

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "Instance":
        body = "\n".join(
            line for line in text.splitlines() if not line.lstrip().startswith("#")
        )
        return cls.from_dict(json.loads(body))


@dataclass(frozen=True)
class Allocation:
    """Bundles per agent (1-indexed goods) plus the ordered pick log.

    ``pick_log`` holds ``(turn, agent, good)`` triples, turns numbered from 1.
    """

    bundles: tuple[frozenset[int], ...]
    pick_log: tuple[tuple[int, int, int], ...] = ()

    @property
    def n(self) -> int:
        return len(self.bundles)

    def bundle(self, agent: int) -> frozenset[int]:
        return self.bundles[agent - 1]

    def owner(self) -> dict[int, int]:
        return {g: i for i, bundle in enumerate(self.bundles, start=1) for g in bundle}

    def is_partition_of(self, m: int) -> bool:
        seen = [g for bundle in self.bundles for g in bundle]
        return len(seen) == m and set(seen) == set(range(1, m + 1))

    def to_dict(self) -> dict:
        return {
            "bundles": [sorted(b) for b in self.bundles],
            "pick_log": [list(entry) for entry in self.pick_log],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Allocation":
        return cls(
            tuple(frozenset(b) for b in data["bundles"]),
            tuple(tuple(entry) for entry in data.get("pick_log", ())),
        )

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "Allocation":
        return cls.from_dict(json.loads(text))


def _check_agent(inst: Instance, agent: int):
    if not 1 <= agent <= inst.n:
        raise DomainError(f"agent {agent} outside 1..{inst.n}")


def _check_good(inst: Instance, good: int):
    if not 1 <= good <= inst.m:
        raise DomainError(f"good {good} outside 1..{inst.m}")


def bundle_utility(inst: Instance, agent: int, bundle: Iterable[int]) -> Fraction:
    """Exact additive value of ``bundle`` for ``agent``."""
    _check_agent(inst, agent)
    row = inst.utilities[agent - 1]
    total = Fraction(0)
    for g in bundle:
        _check_good(inst, g)
        total += row[g - 1]
    return total


def validate_instance(inst: Instance) -> list[str]:
    """Return a list of broken invariants; an empty list means valid."""
    problems = []
    n, m = inst.n, inst.m
    if n < 2:
        problems.append(f"n < 2 (n={n})")
    if m < n:
        problems.append(f"m < n (n={n}, m={m})")
    goods = set(range(1, m + 1))
    for i, (row, order) in enumerate(zip(inst.utilities, inst.preferences), start=1):
        if len(order) != m or set(order) != goods:
            problems.append(f"agent {i}: preference order is not a permutation of 1..{m}")
            continue
        for a, b in zip(order, order[1:]):
            # adjacent check suffices: a consistent order is sorted by utility
            if row[a - 1] < row[b - 1]:
                problems.append(
                    f"agent {i}: inconsistent order (g{a} before g{b} but u(g{a}) < u(g{b}))"
                )
                break
    return problems
