"""Ground types for object reallocation instances.

Agents and houses are dense integer indices internally (0..n-1); display
names live on the :class:`Instance` and only matter at the I/O boundary.
Everything is immutable after construction, so values can be shared freely
across concurrent workers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence


class ReallotError(Exception):
    """Base class for errors raised by this package."""


class ParseError(ReallotError):
    """Malformed instance or allocation text."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class BudgetError(ReallotError):
    """A scan would exceed its budget, or an instance is too large for a
    brute-force guard."""


MIN_AGENTS = 3
BRUTE_FORCE_MAX_AGENTS = 8


@dataclass(frozen=True)
class LinearOrder:
    """A strict total order over houses.

    ``position[h]`` is the rank of house ``h``, rank 0 being the leftmost
    house. ``by_rank`` is the cached inverse (rank -> house).
    """

    position: tuple[int, ...]
    by_rank: tuple[int, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        pos = tuple(self.position)
        object.__setattr__(self, "position", pos)
        n = len(pos)
        if sorted(pos) != list(range(n)):
            raise ValueError("position must be a bijection onto 0..n-1")
        by_rank = [0] * n
        for house, rank in enumerate(pos):
            by_rank[rank] = house
        object.__setattr__(self, "by_rank", tuple(by_rank))

    @classmethod
    def identity(cls, n: int) -> LinearOrder:
        """The order h0 < h1 < ... < h(n-1)."""
        return cls(tuple(range(n)))

    @classmethod
    def from_left_to_right(cls, houses: Sequence[int]) -> LinearOrder:
        """Build from the sequence of house indices listed left to right."""
        position = [-1] * len(houses)
        for rank, house in enumerate(houses):
            position[house] = rank
        return cls(tuple(position))

    @property
    def n(self) -> int:
        return len(self.position)

    def _check(self, h: int):
        if not 0 <= h < len(self.position):
            raise ValueError(f"unknown house index: {h}")

    def before(self, h: int, g: int) -> bool:
        """Strict order: h is left of g."""
        self._check(h)
        self._check(g)
        return self.position[h] < self.position[g]

    def weakly_before(self, h: int, g: int) -> bool:
        self._check(h)
        self._check(g)
        return self.position[h] <= self.position[g]

    def reversed(self) -> LinearOrder:
        n = len(self.position)
        return LinearOrder(tuple(n - 1 - p for p in self.position))


@dataclass(frozen=True)
class Preference:
    """A strict ranking of all houses, best first.

    ``rank_of`` is the cached inverse of ``ranking``: a smaller rank means
    more preferred. Comparisons are O(1) through ``rank_of``, which is what
    every checker in this package leans on.
    """

    ranking: tuple[int, ...]
    rank_of: tuple[int, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        ranking = tuple(self.ranking)
        object.__setattr__(self, "ranking", ranking)
        m = len(ranking)
        if m < 1 or sorted(ranking) != list(range(m)):
            raise ValueError("ranking must be a permutation of 0..m-1")
        rank_of = [0] * m
        for rank, house in enumerate(ranking):
            rank_of[house] = rank
        object.__setattr__(self, "rank_of", tuple(rank_of))

    @property
    def m(self) -> int:
        return len(self.ranking)

    @property
    def peak(self) -> int:
        """Most preferred house."""
        return self.ranking[0]

    @property
    def dip(self) -> int:
        """Least preferred house."""
        return self.ranking[-1]

    def _check(self, h: int):
        if not 0 <= h < len(self.ranking):
            raise ValueError(f"unknown house index: {h}")

    def prefers(self, h: int, g: int) -> bool:
        """True iff h is strictly preferred to g."""
        self._check(h)
        self._check(g)
        return self.rank_of[h] < self.rank_of[g]

    def weakly_prefers(self, h: int, g: int) -> bool:
        """True iff h is preferred to g or h equals g."""
        self._check(h)
        self._check(g)
        return h == g or self.rank_of[h] < self.rank_of[g]

    def reversed(self) -> Preference:
        """The ranking flipped worst-to-best."""
        return Preference(tuple(reversed(self.ranking)))


@dataclass(frozen=True)
class Instance:
    """n agents, n houses, an endowment bijection, and the prior order.

    Instances with fewer than three agents are rejected outright; nothing
    in this package is meaningful below that size.
    """

    agents: tuple[str, ...]
    houses: tuple[str, ...]
    endowment: tuple[int, ...]
    order: LinearOrder

    def __post_init__(self):
        agents = tuple(self.agents)
        houses = tuple(self.houses)
        endowment = tuple(self.endowment)
        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "houses", houses)
        object.__setattr__(self, "endowment", endowment)
        n = len(agents)
        if n < MIN_AGENTS:
            raise ValueError(f"need at least {MIN_AGENTS} agents, got {n}")
        if len(houses) != n:
            raise ValueError("must have exactly as many houses as agents")
        if len(set(agents)) != n or len(set(houses)) != n:
            raise ValueError("agent and house names must be unique")
        if sorted(endowment) != list(range(n)):
            raise ValueError("endowment must be a bijection agents -> houses")
        if self.order.n != n:
            raise ValueError("order must cover exactly the houses")

    @classmethod
    def default(cls, n: int, order: LinearOrder | None = None) -> Instance:
        """Agents a1..an, houses h1..hn, identity endowment and order."""
        return cls(
            agents=tuple(f"a{i + 1}" for i in range(n)),
            houses=tuple(f"h{i + 1}" for i in range(n)),
            endowment=tuple(range(n)),
            order=order if order is not None else LinearOrder.identity(n),
        )

    @property
    def n(self) -> int:
        return len(self.agents)

    def agent_index(self, name: str) -> int:
        try:
            return self.agents.index(name)
        except ValueError:
            raise ValueError(f"unknown agent name: {name}") from None

    def house_index(self, name: str) -> int:
        try:
            return self.houses.index(name)
        except ValueError:
            raise ValueError(f"unknown house name: {name}") from None


@dataclass(frozen=True)
class Profile:
    """One preference per agent over the instance's houses."""

    instance: Instance
    prefs: tuple[Preference, ...]

    def __post_init__(self):
        prefs = tuple(self.prefs)
        object.__setattr__(self, "prefs", prefs)
        n = self.instance.n
        if len(prefs) != n:
            raise ValueError("need exactly one preference per agent")
        for p in prefs:
            if p.m != n:
                raise ValueError("every preference must range over all houses")

    @property
    def n(self) -> int:
        return self.instance.n

    @property
    def order(self) -> LinearOrder:
        return self.instance.order

    def pref(self, agent: int) -> Preference:
        return self.prefs[agent]

    def with_pref(self, agent: int, pref: Preference) -> Profile:
        """A copy of this profile with one agent's preference replaced."""
        prefs = list(self.prefs)
        prefs[agent] = pref
        return Profile(self.instance, tuple(prefs))


@dataclass(frozen=True)
class Allocation:
    """A bijection agents -> houses, stored as ``assign[agent] = house``."""

    assign: tuple[int, ...]

    def __post_init__(self):
        assign = tuple(self.assign)
        object.__setattr__(self, "assign", assign)
        if sorted(assign) != list(range(len(assign))):
            raise ValueError("assignment must be a bijection agents -> houses")

    @property
    def n(self) -> int:
        return len(self.assign)

    def house_of(self, agent: int) -> int:
        return self.assign[agent]

    def agent_of(self, house: int) -> int:
        return self.assign.index(house)


def enumerate_allocations(instance: Instance) -> Iterator[Allocation]:
    """All n! allocations, lexicographic on the assigned-house sequence."""
    for perm in itertools.permutations(range(instance.n)):
        yield Allocation(perm)
