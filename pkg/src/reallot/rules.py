"""Allocation rules and rule-level property harnesses.

The top-trading-cycles rule is the workhorse: every round, each remaining
agent points at the owner of their best remaining house, every cycle of
pointers trades simultaneously and leaves. The harnesses sweep domains
for manipulation opportunities and for the pair/Pareto behavior of TTC on
all-single-dipped profiles.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from .core import Allocation, BudgetError, Instance, Preference, Profile
from .domains import DomainSpec, sample_profile
from .efficiency import find_blocking_pair, find_improving_cycle
from .equivalence import Scope, _resolve_budget, _trial_seeds


@dataclass(frozen=True)
class Rule:
    """A named total function from profiles to allocations."""

    name: str
    apply: Callable[[Profile], Allocation]

    def __call__(self, profile: Profile) -> Allocation:
        return self.apply(profile)


def ttc(profile: Profile) -> Allocation:
    """Top trading cycles from the instance's endowment."""
    n = profile.n
    endow = profile.instance.endowment
    owner = [-1] * n  # house -> owning agent, among the remaining
    for agent, house in enumerate(endow):
        owner[house] = agent
    ranks = [p.ranking for p in profile.prefs]
    pointer = [0] * n  # per-agent cursor into their ranking
    active = [True] * n
    house_left = [True] * n
    assigned = [-1] * n
    remaining = n
    while remaining:
        target = [-1] * n
        best = [-1] * n
        for a in range(n):
            if not active[a]:
                continue
            r = ranks[a]
            i = pointer[a]
            while not house_left[r[i]]:
                i += 1
            pointer[a] = i
            best[a] = r[i]
            target[a] = owner[r[i]]
        # Every pointer cycle trades at once; disjointness makes the
        # round order irrelevant.
        color = [0] * n
        cycles: list[list[int]] = []
        for a in range(n):
            if not active[a] or color[a]:
                continue
            path = []
            x = a
            while color[x] == 0:
                color[x] = 1
                path.append(x)
                x = target[x]
            if color[x] == 1:
                cycles.append(path[path.index(x) :])
            for y in path:
                color[y] = 2
        for cycle in cycles:
            for agent in cycle:
                assigned[agent] = best[agent]
            for agent in cycle:
                active[agent] = False
                house_left[best[agent]] = False
                remaining -= 1
    return Allocation(tuple(assigned))


TTC = Rule("ttc", ttc)


def serial_dictatorship(priority: Sequence[int] | None = None) -> Rule:
    """Agents pick their best remaining house in priority order."""

    def run(profile: Profile) -> Allocation:
        n = profile.n
        order = tuple(priority) if priority is not None else tuple(range(n))
        taken = [False] * n
        assigned = [-1] * n
        for agent in order:
            for house in profile.prefs[agent].ranking:
                if not taken[house]:
                    assigned[agent] = house
                    taken[house] = True
                    break
        return Allocation(tuple(assigned))

    return Rule("serial-dictatorship", run)


def worst_house_dictatorship() -> Rule:
    """Agents receive their worst remaining reported house in index order.

    Deliberately manipulable (report your ranking reversed and this hands
    you your true favorite); used as a positive control for the
    strategy-proofness harness.
    """

    def run(profile: Profile) -> Allocation:
        n = profile.n
        taken = [False] * n
        assigned = [-1] * n
        for agent in range(n):
            for house in reversed(profile.prefs[agent].ranking):
                if not taken[house]:
                    assigned[agent] = house
                    taken[house] = True
                    break
        return Allocation(tuple(assigned))

    return Rule("worst-house-dictatorship", run)


def is_individually_rational(profile: Profile, mu: Allocation) -> bool:
    """True iff no agent ends up strictly below their endowment."""
    endow = profile.instance.endowment
    for a, pref in enumerate(profile.prefs):
        if pref.rank_of[mu.assign[a]] > pref.rank_of[endow[a]]:
            return False
    return True


@dataclass(frozen=True)
class Manipulation:
    """One profitable misreport found by the harness."""

    profile: Profile
    agent: int
    misreport: Preference
    truthful_house: int
    misreport_house: int


@dataclass(frozen=True)
class StrategyProofnessReport:
    rule_name: str
    profiles_checked: int
    cases_checked: int
    violations: tuple[Manipulation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def _profiles_in_scope(
    spec: DomainSpec, instance: Instance, scope: Scope
) -> Iterator[Profile]:
    if scope.kind == "exhaustive":
        lists = [spec.admissible(instance.order, a) for a in range(instance.n)]
        for prefs in itertools.product(*lists):
            yield Profile(instance, prefs)
    else:
        for seed in _trial_seeds(scope.seed, scope.trials or 0):
            yield sample_profile(spec, instance, seed)


def check_strategy_proofness(
    rule: Rule,
    spec: DomainSpec,
    n: int,
    scope: Scope,
    *,
    budget: int | None = None,
) -> StrategyProofnessReport:
    """Sweep (profile, agent, misreport) triples for profitable lies.

    Misreports range over the lying agent's own admissible set, so the
    scan stays inside the declared domain. Empty violations means no
    manipulation was found in scope.
    """
    if spec.union_mode:
        raise ValueError("misreport scans need per-agent preference sets")
    instance = Instance.default(n)
    budget = _resolve_budget(budget)
    sizes = [len(spec.admissible(instance.order, a)) for a in range(n)]
    per_profile = sum(s - 1 for s in sizes)
    if scope.kind == "exhaustive":
        cases = math.prod(sizes) * per_profile
    else:
        cases = (scope.trials or 0) * per_profile
    if cases > budget:
        raise BudgetError(f"misreport sweep needs {cases} cases, budget is {budget}")

    cache: dict[tuple[Preference, ...], Allocation] = {}

    def outcome(profile: Profile) -> Allocation:
        key = profile.prefs
        hit = cache.get(key)
        if hit is None:
            hit = rule(profile)
            cache[key] = hit
        return hit

    profiles = 0
    checked = 0
    violations: list[Manipulation] = []
    for profile in _profiles_in_scope(spec, instance, scope):
        profiles += 1
        truthful = outcome(profile)
        for agent in range(n):
            true_pref = profile.prefs[agent]
            for lie in spec.admissible(instance.order, agent):
                if lie == true_pref:
                    continue
                checked += 1
                lied = outcome(profile.with_pref(agent, lie))
                if true_pref.prefers(lied.assign[agent], truthful.assign[agent]):
                    violations.append(
                        Manipulation(
                            profile,
                            agent,
                            lie,
                            truthful.assign[agent],
                            lied.assign[agent],
                        )
                    )
    return StrategyProofnessReport(rule.name, profiles, checked, tuple(violations))


@dataclass(frozen=True)
class CorollaryReport:
    """TTC outputs checked for pair- and Pareto-efficiency on all-SD
    profiles."""

    profiles_checked: int
    failures: tuple[tuple[Profile, Allocation, str], ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def check_corollary_sd(
    n: int, scope: Scope, *, budget: int | None = None
) -> CorollaryReport:
    """On every all-single-dipped profile in scope, TTC's output must have
    no blocking pair and no improving cycle."""
    spec = DomainSpec.all_single_dipped(n)
    instance = Instance.default(n)
    budget = _resolve_budget(budget)
    if scope.kind == "exhaustive":
        count = spec.space_size(instance.order)
    else:
        count = scope.trials or 0
    if count > budget:
        raise BudgetError(f"corollary sweep needs {count} profiles, budget is {budget}")
    profiles = 0
    failures: list[tuple[Profile, Allocation, str]] = []
    for profile in _profiles_in_scope(spec, instance, scope):
        profiles += 1
        mu = ttc(profile)
        if find_blocking_pair(profile, mu) is not None:
            failures.append((profile, mu, "blocking pair"))
        elif find_improving_cycle(profile, mu) is not None:
            failures.append((profile, mu, "improving cycle"))
    return CorollaryReport(profiles, tuple(failures))
