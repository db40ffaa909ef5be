"""Machinery tying pair-efficiency to Pareto-efficiency on structured
domains.

Given a dominated allocation, the witness labels the strictly improving
agents b1..bm by the order position of their current houses and colors
each red (house moves rightward) or blue (leftward). On an all-SP profile
some adjacent red/blue pair envies each other; on an all-SD profile the
two extremes b1 and bm do. The extractors materialize those pairs and
re-verify both strict comparisons on every call.

The verifier sweeps whole domains, checking that every pair-efficient
allocation is Pareto-efficient, and reports any gap with a fully
validated witness built from the brute-force oracle.
"""

from __future__ import annotations

import functools
import itertools
import math
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .core import Allocation, BudgetError, Instance, Profile
from .domains import (
    SINGLE_DIPPED,
    SINGLE_PEAKED,
    DomainSpec,
    is_single_dipped,
    is_single_peaked,
    monotone_decreasing,
    monotone_increasing,
    sample_profile,
)
from .efficiency import (
    _blocking_pair_raw,
    _first_cycle,
    _succ_raw,
    apply_cycle,
    brute_force_dominator,
    find_blocking_pair,
    pareto_dominates,
)

RED = "red"
BLUE = "blue"

DEFAULT_BUDGET = 100_000_000
BUDGET_ENV_VAR = "REALLOT_BUDGET"


def _resolve_budget(budget: int | None) -> int:
    if budget is not None:
        return budget
    return int(os.environ.get(BUDGET_ENV_VAR, DEFAULT_BUDGET))


@dataclass(frozen=True)
class ImprovementWitness:
    """A dominating allocation plus the labeled, colored trade set.

    ``labels`` lists the strictly improving agents sorted by the order
    position of their mu-houses; ``colors[i]`` is red when labels[i]'s
    house moves rightward from mu to nu, blue when leftward.
    """

    nu: Allocation
    tilde_a: frozenset[int]
    labels: tuple[int, ...]
    colors: tuple[str, ...]

    def __post_init__(self):
        if len(self.labels) != len(set(self.labels)):
            raise ValueError("labels must be distinct agents")
        if frozenset(self.labels) != self.tilde_a:
            raise ValueError("labels must enumerate the improving set")
        if len(self.colors) != len(self.labels):
            raise ValueError("one color per labeled agent")
        for c in self.colors:
            if c not in (RED, BLUE):
                raise ValueError(f"unknown color: {c}")

    @property
    def m(self) -> int:
        return len(self.labels)

    def color_of(self, agent: int) -> str:
        return self.colors[self.labels.index(agent)]


def build_witness(profile: Profile, mu: Allocation, nu: Allocation) -> ImprovementWitness:
    """Label and color the agents nu strictly improves over mu.

    Checks, not assumes: nu must dominate mu, the non-improving agents
    must keep their houses, and mu and nu must shuffle the same houses
    within the improving set.
    """
    if not pareto_dominates(profile, nu, mu):
        raise ValueError("nu does not Pareto-dominate mu at this profile")
    pos = profile.order.position
    tilde = [
        a
        for a, pref in enumerate(profile.prefs)
        if pref.rank_of[nu.assign[a]] < pref.rank_of[mu.assign[a]]
    ]
    tilde_set = frozenset(tilde)
    for a in range(profile.n):
        if a not in tilde_set and mu.assign[a] != nu.assign[a]:
            raise ValueError("a non-improving agent changed houses")
    mu_houses = {mu.assign[a] for a in tilde}
    nu_houses = {nu.assign[a] for a in tilde}
    if mu_houses != nu_houses:
        raise ValueError("improving agents must trade houses among themselves")
    labels = tuple(sorted(tilde, key=lambda a: pos[mu.assign[a]]))
    colors = []
    for b in labels:
        if mu.assign[b] == nu.assign[b]:
            raise ValueError("an improving agent kept their house")
        colors.append(RED if pos[mu.assign[b]] < pos[nu.assign[b]] else BLUE)
    return ImprovementWitness(nu, tilde_set, labels, tuple(colors))


def _require_witness(profile: Profile, mu: Allocation, witness: ImprovementWitness):
    # In-place revalidation of every witness invariant against (mu, nu);
    # equivalent to rebuilding, without the object churn.
    nu = witness.nu
    if not pareto_dominates(profile, nu, mu):
        raise ValueError("witness nu does not Pareto-dominate mu")
    pos = profile.order.position
    tilde = [
        a
        for a, pref in enumerate(profile.prefs)
        if pref.rank_of[nu.assign[a]] < pref.rank_of[mu.assign[a]]
    ]
    if sorted(tilde, key=lambda a: pos[mu.assign[a]]) != list(witness.labels):
        raise ValueError("witness labels do not match this profile and allocation")
    for i, b in enumerate(witness.labels):
        expected = RED if pos[mu.assign[b]] < pos[nu.assign[b]] else BLUE
        if mu.assign[b] == nu.assign[b] or witness.colors[i] != expected:
            raise ValueError("witness colors do not match this profile and allocation")
    for a in range(profile.n):
        if a not in witness.tilde_a and mu.assign[a] != nu.assign[a]:
            raise ValueError("witness breaks outside the improving set")
    if {mu.assign[a] for a in tilde} != {nu.assign[a] for a in tilde}:
        raise ValueError("witness trade set is not closed under the two allocations")


@functools.lru_cache(maxsize=8192)
def _family_ok(profile: Profile, kind: str) -> bool:
    check = is_single_peaked if kind == SINGLE_PEAKED else is_single_dipped
    return all(check(p, profile.order) for p in profile.prefs)


def extract_blocking_pair_sp(
    profile: Profile, mu: Allocation, witness: ImprovementWitness
) -> tuple[int, int]:
    """The least adjacent red/blue label pair; both agents strictly prefer
    each other's mu-house. Only valid on all-SP profiles."""
    if not _family_ok(profile, SINGLE_PEAKED):
        bad = next(
            a
            for a, p in enumerate(profile.prefs)
            if not is_single_peaked(p, profile.order)
        )
        raise ValueError(f"agent {bad} is not single-peaked under this order")
    _require_witness(profile, mu, witness)
    labels, colors = witness.labels, witness.colors
    for i in range(len(labels) - 1):
        if colors[i] == RED and colors[i + 1] == BLUE:
            low, high = labels[i], labels[i + 1]
            break
    else:
        raise RuntimeError("no adjacent red/blue pair; witness coloring is broken")
    if not (
        profile.prefs[low].prefers(mu.assign[high], mu.assign[low])
        and profile.prefs[high].prefers(mu.assign[low], mu.assign[high])
    ):
        raise RuntimeError("extracted pair is not mutually envious")
    return low, high


def extract_blocking_pair_sd(
    profile: Profile, mu: Allocation, witness: ImprovementWitness
) -> tuple[int, int]:
    """The extreme label pair (b1, bm); both agents strictly prefer each
    other's mu-house. Only valid on all-SD profiles."""
    if not _family_ok(profile, SINGLE_DIPPED):
        bad = next(
            a
            for a, p in enumerate(profile.prefs)
            if not is_single_dipped(p, profile.order)
        )
        raise ValueError(f"agent {bad} is not single-dipped under this order")
    _require_witness(profile, mu, witness)
    low, high = witness.labels[0], witness.labels[-1]
    if not (
        profile.prefs[low].prefers(mu.assign[high], mu.assign[low])
        and profile.prefs[high].prefers(mu.assign[low], mu.assign[high])
    ):
        raise RuntimeError("extracted pair is not mutually envious")
    return low, high


@dataclass(frozen=True)
class Scope:
    """How much of a domain to sweep: everything, or sampled profiles."""

    kind: str
    seed: int | None = None
    trials: int | None = None

    def __post_init__(self):
        if self.kind not in ("exhaustive", "randomized"):
            raise ValueError(f"unknown scope kind: {self.kind}")
        if self.kind == "randomized" and (self.seed is None or not self.trials):
            raise ValueError("randomized scope needs a seed and a trial count")

    @classmethod
    def exhaustive(cls) -> Scope:
        return cls("exhaustive")

    @classmethod
    def randomized(cls, seed: int, trials: int) -> Scope:
        return cls("randomized", seed=seed, trials=trials)

    def describe(self) -> str:
        if self.kind == "exhaustive":
            return "exhaustive"
        return f"randomized(seed={self.seed}, trials={self.trials})"


@dataclass(frozen=True)
class Violation:
    """A pair-efficient allocation that another allocation dominates."""

    profile: Profile
    mu: Allocation
    witness: ImprovementWitness


@dataclass(frozen=True)
class EquivalenceReport:
    domain: DomainSpec
    scope: Scope
    profiles_checked: int
    allocations_checked: int
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def _scan_profile_for_gaps(profile: Profile) -> tuple[int, list[Violation]]:
    """Scan all allocations of one profile for the pair-efficient yet
    dominated ones; the dominating partner comes from the brute-force
    oracle, independent of the cycle checker that spotted the gap."""
    ranks = [p.rank_of for p in profile.prefs]
    n = profile.n
    allocations = 0
    found: list[Violation] = []
    for perm in itertools.permutations(range(n)):
        allocations += 1
        if _blocking_pair_raw(ranks, perm) is not None:
            continue
        if _first_cycle(_succ_raw(ranks, perm)) is None:
            continue
        mu = Allocation(perm)
        nu = brute_force_dominator(profile, mu)
        if nu is None:
            raise RuntimeError("cycle checker and brute-force oracle disagree")
        witness = build_witness(profile, mu, nu)
        if find_blocking_pair(profile, mu) is not None:
            raise RuntimeError("violation candidate is not pair-efficient")
        found.append(Violation(profile, mu, witness))
    return allocations, found


def _definitional_spot_check(profile: Profile):
    # Pair-inefficiency implies Pareto-inefficiency by definition: swapping
    # the blocking pair's houses dominates. Asserted once per run on the
    # first profile in scope that has any blocking pair at all.
    ranks = [p.rank_of for p in profile.prefs]
    for perm in itertools.permutations(range(profile.n)):
        pair = _blocking_pair_raw(ranks, perm)
        if pair is None:
            continue
        mu = Allocation(perm)
        swapped = apply_cycle(mu, pair)
        if not pareto_dominates(profile, swapped, mu):
            raise RuntimeError("blocking-pair swap failed to dominate")
        return


def _cartesian_lists(spec: DomainSpec, instance: Instance):
    return [spec.admissible(instance.order, a) for a in range(instance.n)]


def _union_lists(spec: DomainSpec, instance: Instance, phase: str):
    kind_spec = DomainSpec((phase,) * instance.n)
    return _cartesian_lists(kind_spec, instance)


def _scan_cartesian_task(args) -> tuple[int, int, list[Violation]]:
    spec, n, first_idx = args
    instance = Instance.default(n)
    lists = _cartesian_lists(spec, instance)
    first = lists[0][first_idx]
    profiles = 0
    allocations = 0
    violations: list[Violation] = []
    for rest in itertools.product(*lists[1:]):
        profile = Profile(instance, (first, *rest))
        profiles += 1
        scanned, found = _scan_profile_for_gaps(profile)
        allocations += scanned
        violations.extend(found)
    return profiles, allocations, violations


def _scan_union_task(args) -> tuple[int, int, list[Violation]]:
    spec, n, phase, first_idx = args
    instance = Instance.default(n)
    lists = _union_lists(spec, instance, phase)
    first = lists[0][first_idx]
    monotone = {monotone_increasing(instance.order), monotone_decreasing(instance.order)}
    profiles = 0
    allocations = 0
    violations: list[Violation] = []
    for rest in itertools.product(*lists[1:]):
        prefs = (first, *rest)
        if phase == SINGLE_DIPPED and all(p in monotone for p in prefs):
            continue  # already covered by the all-SP phase
        profile = Profile(instance, prefs)
        profiles += 1
        scanned, found = _scan_profile_for_gaps(profile)
        allocations += scanned
        violations.extend(found)
    return profiles, allocations, violations


def _scan_random_task(args) -> tuple[int, int, list[Violation]]:
    spec, n, seeds = args
    instance = Instance.default(n)
    profiles = 0
    allocations = 0
    violations: list[Violation] = []
    for seed in seeds:
        profile = sample_profile(spec, instance, seed)
        profiles += 1
        scanned, found = _scan_profile_for_gaps(profile)
        allocations += scanned
        violations.extend(found)
    return profiles, allocations, violations


def _run_tasks(task_fn, tasks, jobs: int):
    if jobs <= 1 or len(tasks) <= 1:
        return [task_fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(task_fn, tasks))


def _violation_key(v: Violation):
    return (tuple(p.ranking for p in v.profile.prefs), v.mu.assign)


def verify_equivalence(
    spec: DomainSpec,
    n: int,
    scope: Scope,
    *,
    budget: int | None = None,
    jobs: int = 1,
) -> EquivalenceReport:
    """Sweep a domain checking pair-efficiency implies Pareto-efficiency.

    The reverse implication is definitional and spot-checked once per run.
    Allocations that already fail pair-efficiency are pruned (the
    implication is vacuous there). Worker count never changes the report:
    partitions are merged in canonical order and violations re-sorted.
    """
    if n > 8:
        raise BudgetError("domain sweeps are guarded to n <= 8")
    instance = Instance.default(n)
    budget = _resolve_budget(budget)
    fact = math.factorial(n)

    if scope.kind == "exhaustive":
        checks = spec.space_size(instance.order) * fact
        if checks > budget:
            raise BudgetError(f"exhaustive sweep needs {checks} checks, budget is {budget}")
        if spec.union_mode:
            sp_first = len(_union_lists(spec, instance, SINGLE_PEAKED)[0])
            sd_first = len(_union_lists(spec, instance, SINGLE_DIPPED)[0])
            tasks = [(spec, n, SINGLE_PEAKED, i) for i in range(sp_first)] + [
                (spec, n, SINGLE_DIPPED, i) for i in range(sd_first)
            ]
            task_fn = _scan_union_task
            first_profile = Profile(
                instance, (_union_lists(spec, instance, SINGLE_PEAKED)[0][0],) * n
            )
        else:
            lists = _cartesian_lists(spec, instance)
            tasks = [(spec, n, i) for i in range(len(lists[0]))]
            task_fn = _scan_cartesian_task
            first_profile = Profile(instance, tuple(lst[0] for lst in lists))
    else:
        trials = scope.trials or 0
        checks = trials * fact
        if checks > budget:
            raise BudgetError(f"randomized sweep needs {checks} checks, budget is {budget}")
        master = _trial_seeds(scope.seed, trials)
        chunk = max(1, math.ceil(trials / max(jobs, 1) / 4))
        tasks = [
            (spec, n, master[i : i + chunk]) for i in range(0, trials, chunk)
        ]
        task_fn = _scan_random_task
        first_profile = sample_profile(spec, instance, master[0]) if trials else None

    if first_profile is not None:
        _definitional_spot_check(first_profile)

    results = _run_tasks(task_fn, tasks, jobs)
    profiles = sum(r[0] for r in results)
    allocations = sum(r[1] for r in results)
    merged: list[Violation] = []
    seen = set()
    for _, _, found in results:
        for v in found:
            key = _violation_key(v)
            if key not in seen:
                seen.add(key)
                merged.append(v)
    merged.sort(key=_violation_key)
    return EquivalenceReport(spec, scope, profiles, allocations, tuple(merged))


def _trial_seeds(seed: int | None, trials: int) -> list[int]:
    master = random.Random(seed)
    return [master.getrandbits(64) for _ in range(trials)]


def find_gap_witness(
    spec: DomainSpec,
    n: int,
    seed: int | None = None,
    *,
    trials: int = 10_000,
    budget: int | None = None,
) -> tuple[Profile, Allocation, Allocation] | None:
    """First (profile, mu, nu) with mu pair-efficient but dominated by nu,
    or None. Sweeps exhaustively when the space fits the budget, else
    samples ``trials`` profiles from the given seed."""
    instance = Instance.default(n)
    budget = _resolve_budget(budget)
    fact = math.factorial(n)

    def profiles():
        if spec.space_size(instance.order) * fact <= budget:
            if spec.union_mode:
                for phase in (SINGLE_PEAKED, SINGLE_DIPPED):
                    lists = _union_lists(spec, instance, phase)
                    monotone = {
                        monotone_increasing(instance.order),
                        monotone_decreasing(instance.order),
                    }
                    for prefs in itertools.product(*lists):
                        if phase == SINGLE_DIPPED and all(p in monotone for p in prefs):
                            continue
                        yield Profile(instance, prefs)
            else:
                lists = _cartesian_lists(spec, instance)
                for prefs in itertools.product(*lists):
                    yield Profile(instance, prefs)
        else:
            for s in _trial_seeds(seed, trials):
                yield sample_profile(spec, instance, s)

    for profile in profiles():
        ranks = [p.rank_of for p in profile.prefs]
        for perm in itertools.permutations(range(n)):
            if _blocking_pair_raw(ranks, perm) is not None:
                continue
            if _first_cycle(_succ_raw(ranks, perm)) is None:
                continue
            mu = Allocation(perm)
            nu = brute_force_dominator(profile, mu)
            if nu is None:
                raise RuntimeError("cycle checker and brute-force oracle disagree")
            if find_blocking_pair(profile, mu) is not None or not pareto_dominates(
                profile, nu, mu
            ):
                raise RuntimeError("gap candidate failed re-validation")
            return profile, mu, nu
    return None


def validate_extraction_claims(profile: Profile, kind: str) -> tuple[int, int]:
    """Run the pair extractor over every dominated allocation of a profile.

    For each dominated mu, a dominating nu is materialized by trading
    along an improving cycle, the witness is built, the extractor picks
    its pair, and both strict comparisons are re-verified with direct
    preference lookups. Returns (dominated, validated); anything short of
    equality raises.
    """
    if kind not in (SINGLE_PEAKED, SINGLE_DIPPED):
        raise ValueError("kind must be 'sp' or 'sd'")
    extract = extract_blocking_pair_sp if kind == SINGLE_PEAKED else extract_blocking_pair_sd
    check = is_single_peaked if kind == SINGLE_PEAKED else is_single_dipped
    for a, pref in enumerate(profile.prefs):
        if not check(pref, profile.order):
            raise ValueError(f"agent {a} is outside the {kind} family")
    n = profile.n
    ranks = [p.rank_of for p in profile.prefs]
    dominated = 0
    validated = 0
    for perm in itertools.permutations(range(n)):
        cycle = _first_cycle(_succ_raw(ranks, perm))
        if cycle is None:
            continue
        dominated += 1
        mu = Allocation(perm)
        nu = apply_cycle(mu, cycle)
        witness = build_witness(profile, mu, nu)
        low, high = extract(profile, mu, witness)
        if profile.prefs[low].prefers(mu.assign[high], mu.assign[low]) and profile.prefs[
            high
        ].prefers(mu.assign[low], mu.assign[high]):
            validated += 1
        else:
            raise RuntimeError("extracted pair failed direct verification")
    return dominated, validated
