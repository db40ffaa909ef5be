"""Efficiency checkers: blocking pairs, improving trade cycles, and the
brute-force domination oracle.

The two production checkers ride on the envy digraph (edge a -> b when a
strictly prefers b's assigned house): a 2-cycle is exactly a blocking
pair, and any cycle is exactly an efficiency-improving trade. The
brute-force oracle stays a literal scan of all allocations so the two
routes remain independent of each other.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import (
    BRUTE_FORCE_MAX_AGENTS,
    Allocation,
    BudgetError,
    Profile,
)


@dataclass(frozen=True)
class EnvyGraph:
    """Boolean adjacency of the envy relation at one allocation."""

    adjacency: tuple[tuple[bool, ...], ...]

    @classmethod
    def from_assignment(cls, profile: Profile, mu: Allocation) -> EnvyGraph:
        ranks = [p.rank_of for p in profile.prefs]
        n = profile.n
        assign = mu.assign
        rows = []
        for a in range(n):
            ra = ranks[a]
            own = ra[assign[a]]
            rows.append(tuple(b != a and ra[assign[b]] < own for b in range(n)))
        return cls(tuple(rows))

    @property
    def n(self) -> int:
        return len(self.adjacency)

    def has_edge(self, a: int, b: int) -> bool:
        return self.adjacency[a][b]

    def successors(self, a: int) -> tuple[int, ...]:
        return tuple(b for b, e in enumerate(self.adjacency[a]) if e)

    def two_cycles(self) -> list[tuple[int, int]]:
        adj = self.adjacency
        n = len(adj)
        return [(a, b) for a in range(n) for b in range(a + 1, n) if adj[a][b] and adj[b][a]]


@dataclass(frozen=True)
class ImprovingCycle:
    """Agents (a1..ak), each ai taking the house mu assigns to a(i+1)."""

    agents: tuple[int, ...]

    def __post_init__(self):
        agents = tuple(self.agents)
        object.__setattr__(self, "agents", agents)
        if len(agents) < 2:
            raise ValueError("a trade cycle needs at least two agents")
        if len(set(agents)) != len(agents):
            raise ValueError("repeated agent in cycle")

    @property
    def k(self) -> int:
        return len(self.agents)


def _blocking_pair_raw(ranks: Sequence[Sequence[int]], alloc: Sequence[int]) -> tuple[int, int] | None:
    n = len(alloc)
    for a in range(n):
        ra = ranks[a]
        ha = alloc[a]
        own = ra[ha]
        for b in range(a + 1, n):
            hb = alloc[b]
            if ra[hb] < own and ranks[b][ha] < ranks[b][hb]:
                return a, b
    return None


def _succ_raw(ranks: Sequence[Sequence[int]], alloc: Sequence[int]) -> list[list[int]]:
    n = len(alloc)
    succ = []
    for a in range(n):
        ra = ranks[a]
        own = ra[alloc[a]]
        succ.append([b for b in range(n) if b != a and ra[alloc[b]] < own])
    return succ


def _first_cycle(succ: Sequence[Sequence[int]]) -> list[int] | None:
    # Iterative DFS, starts and neighbors in ascending agent order; the
    # first back edge to an on-stack node closes the reported cycle.
    n = len(succ)
    state = [0] * n  # 0 new, 1 on stack, 2 done
    for start in range(n):
        if state[start]:
            continue
        state[start] = 1
        stack = [(start, iter(succ[start]))]
        path = [start]
        while stack:
            _node, it = stack[-1]
            pushed = False
            for nxt in it:
                if state[nxt] == 0:
                    state[nxt] = 1
                    stack.append((nxt, iter(succ[nxt])))
                    path.append(nxt)
                    pushed = True
                    break
                if state[nxt] == 1:
                    return path[path.index(nxt) :]
            if not pushed:
                done, _ = stack.pop()
                state[done] = 2
                path.pop()
    return None


def _shortest_cycle(succ: Sequence[Sequence[int]]) -> list[int] | None:
    n = len(succ)
    succ_sets = [set(s) for s in succ]
    for a in range(n):
        for b in succ[a]:
            if a in succ_sets[b]:
                return [a, b]
    best: list[int] | None = None
    for s in range(n):
        dist = [-1] * n
        parent = [-1] * n
        dist[s] = 0
        queue = deque([s])
        closing = -1
        while queue and closing < 0:
            x = queue.popleft()
            for y in succ[x]:
                if y == s:
                    closing = x
                    break
                if dist[y] < 0:
                    dist[y] = dist[x] + 1
                    parent[y] = x
                    queue.append(y)
        if closing < 0:
            continue
        back = []
        node = closing
        while node != s:
            back.append(node)
            node = parent[node]
        cycle = [s] + back[::-1]
        if best is None or len(cycle) < len(best):
            best = cycle
    return best


def find_blocking_pair(profile: Profile, mu: Allocation) -> tuple[int, int] | None:
    """The lexicographically least pair of agents who both strictly prefer
    each other's assigned house, or None (mu is then pair-efficient)."""
    if mu.n != profile.n:
        raise ValueError("allocation size does not match the profile")
    ranks = [p.rank_of for p in profile.prefs]
    return _blocking_pair_raw(ranks, mu.assign)


def find_improving_cycle(
    profile: Profile, mu: Allocation, *, shortest: bool = False
) -> ImprovingCycle | None:
    """A cycle of the envy digraph, or None (mu is then Pareto-efficient).

    Default mode reports the first cycle met by depth-first search from
    the least agent; ``shortest=True`` scans 2-cycles first and then does
    a breadth-first search per node, so blocking pairs surface whenever
    one exists.
    """
    if mu.n != profile.n:
        raise ValueError("allocation size does not match the profile")
    ranks = [p.rank_of for p in profile.prefs]
    succ = _succ_raw(ranks, mu.assign)
    cycle = _shortest_cycle(succ) if shortest else _first_cycle(succ)
    return None if cycle is None else ImprovingCycle(tuple(cycle))


def pareto_dominates(profile: Profile, nu: Allocation, mu: Allocation) -> bool:
    """True iff nu makes every agent weakly better off than mu and at
    least one agent strictly better off.

    >>> from reallot.core import Instance, Preference, Profile, Allocation
    >>> inst = Instance.default(3)
    >>> prof = Profile(inst, (Preference((1, 2, 0)), Preference((2, 0, 1)),
    ...                       Preference((0, 1, 2))))
    >>> pareto_dominates(prof, Allocation((1, 2, 0)), Allocation((2, 0, 1)))
    True
    """
    if nu.n != profile.n or mu.n != profile.n:
        raise ValueError("allocation size does not match the profile")
    strict = False
    for a, pref in enumerate(profile.prefs):
        rn = pref.rank_of[nu.assign[a]]
        rm = pref.rank_of[mu.assign[a]]
        if rn > rm:
            return False
        if rn < rm:
            strict = True
    return strict


def brute_force_dominator(profile: Profile, mu: Allocation) -> Allocation | None:
    """First allocation in canonical order that Pareto-dominates mu.

    Independent of the cycle machinery on purpose: a literal scan of all
    n! allocations against the definition. Guarded to small instances.
    """
    n = profile.n
    if n > BRUTE_FORCE_MAX_AGENTS:
        raise BudgetError(f"brute force is guarded to n <= {BRUTE_FORCE_MAX_AGENTS}, got {n}")
    if mu.n != n:
        raise ValueError("allocation size does not match the profile")
    ranks = [p.rank_of for p in profile.prefs]
    own = [ranks[a][mu.assign[a]] for a in range(n)]
    for perm in itertools.permutations(range(n)):
        strict = False
        ok = True
        for a in range(n):
            r = ranks[a][perm[a]]
            if r > own[a]:
                ok = False
                break
            if r < own[a]:
                strict = True
        if ok and strict:
            return Allocation(perm)
    return None


def apply_cycle(mu: Allocation, cycle: ImprovingCycle | Iterable[int]) -> Allocation:
    """Trade along the cycle: each listed agent takes the house mu gave to
    the next listed agent; everyone else keeps theirs."""
    agents = tuple(cycle.agents if isinstance(cycle, ImprovingCycle) else cycle)
    k = len(agents)
    if k < 2:
        raise ValueError("a trade cycle needs at least two agents")
    if len(set(agents)) != k:
        raise ValueError("repeated agent in cycle")
    assign = list(mu.assign)
    n = len(assign)
    for a in agents:
        if not 0 <= a < n:
            raise ValueError(f"unknown agent index: {a}")
    for i, a in enumerate(agents):
        assign[a] = mu.assign[agents[(i + 1) % k]]
    return Allocation(tuple(assign))


def count_efficient(profile: Profile) -> tuple[int, int]:
    """(pair-efficient count, Pareto-efficient count) over all n!
    allocations. Guarded to small instances."""
    n = profile.n
    if n > BRUTE_FORCE_MAX_AGENTS:
        raise BudgetError(f"counting is guarded to n <= {BRUTE_FORCE_MAX_AGENTS}, got {n}")
    ranks = [p.rank_of for p in profile.prefs]
    pair_count = 0
    pareto_count = 0
    for perm in itertools.permutations(range(n)):
        if _blocking_pair_raw(ranks, perm) is not None:
            continue
        pair_count += 1
        if _first_cycle(_succ_raw(ranks, perm)) is None:
            pareto_count += 1
    return pair_count, pareto_count
