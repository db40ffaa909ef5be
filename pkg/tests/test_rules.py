import itertools

import pytest

from reallot.core import Allocation, BudgetError, Instance, Preference, Profile
from reallot.domains import DomainSpec
from reallot.efficiency import find_blocking_pair, find_improving_cycle
from reallot.equivalence import Scope
from reallot.rules import (
    Rule,
    check_corollary_sd,
    is_individually_rational,
    serial_dictatorship,
    check_strategy_proofness,
    ttc,
    worst_house_dictatorship,
)

from conftest import profile_from


def all_profiles(n):
    inst = Instance.default(n)
    rankings = list(itertools.permutations(range(n)))
    for combo in itertools.product(rankings, repeat=n):
        yield Profile(inst, tuple(Preference(r) for r in combo))


def test_ttc_resolves_the_gap_example(gap_example):
    profile, _, nu = gap_example
    assert ttc(profile) == nu


def test_ttc_with_self_loops_keeps_endowments():
    profile = profile_from("h1 h2 h3", "h2 h1 h3", "h3 h1 h2")
    assert ttc(profile) == Allocation((0, 1, 2))


def test_ttc_multi_round():
    # a1 and a3 trade in round one; a4 keeps h4 next; a2 is left with h2.
    profile = profile_from("h3 h2 h1 h4", "h1 h4 h2 h3", "h1 h3 h2 h4", "h3 h4 h1 h2")
    assert ttc(profile) == Allocation((2, 1, 0, 3))


def test_ttc_executes_disjoint_cycles_together():
    profile = profile_from("h2 h1 h3 h4", "h1 h2 h3 h4", "h4 h3 h1 h2", "h3 h4 h1 h2")
    assert ttc(profile) == Allocation((1, 0, 3, 2))


def test_ttc_output_is_efficient_and_rational_exhaustively_n3():
    for profile in all_profiles(3):
        mu = ttc(profile)
        assert is_individually_rational(profile, mu)
        assert find_blocking_pair(profile, mu) is None
        assert find_improving_cycle(profile, mu) is None


def test_individual_rationality_matches_direct_loop(gap_example):
    profile, mu, _ = gap_example
    assert is_individually_rational(profile, mu)
    assert is_individually_rational(profile, Allocation((0, 1, 2)))
    for p in all_profiles(3):
        for assign in itertools.permutations(range(3)):
            mu = Allocation(assign)
            direct = all(
                p.prefs[a].weakly_prefers(mu.assign[a], p.instance.endowment[a])
                for a in range(3)
            )
            assert is_individually_rational(p, mu) == direct


def test_ttc_is_strategy_proof_exhaustively_n3():
    report = check_strategy_proofness(
        Rule("ttc", ttc), DomainSpec.unrestricted(3), 3, Scope.exhaustive()
    )
    assert report.ok
    assert report.profiles_checked == 216
    assert report.cases_checked == 216 * 3 * 5


def test_constant_rule_is_trivially_honest():
    rule = Rule("identity", lambda profile: Allocation(tuple(range(profile.n))))
    report = check_strategy_proofness(
        rule, DomainSpec.unrestricted(3), 3, Scope.exhaustive()
    )
    assert report.ok


def test_serial_dictatorship_is_strategy_proof_even_reversed():
    rule = serial_dictatorship(priority=(2, 1, 0))
    report = check_strategy_proofness(
        rule, DomainSpec.unrestricted(3), 3, Scope.exhaustive()
    )
    assert report.ok


def test_worst_house_dictatorship_is_manipulable():
    rule = worst_house_dictatorship()
    report = check_strategy_proofness(
        rule, DomainSpec.unrestricted(3), 3, Scope.exhaustive()
    )
    assert not report.ok
    v = report.violations[0]
    # Re-verify the flagged lie by direct comparison.
    truthful = rule(v.profile)
    lied = rule(v.profile.with_pref(v.agent, v.misreport))
    true_pref = v.profile.prefs[v.agent]
    assert true_pref.prefers(lied.assign[v.agent], truthful.assign[v.agent])
    assert v.truthful_house == truthful.assign[v.agent]
    assert v.misreport_house == lied.assign[v.agent]


def test_strategy_proofness_randomized_scope():
    report = check_strategy_proofness(
        Rule("ttc", ttc),
        DomainSpec.all_single_peaked(4),
        4,
        Scope.randomized(seed=3, trials=50),
    )
    assert report.ok
    assert report.profiles_checked == 50


def test_strategy_proofness_guards():
    with pytest.raises(ValueError):
        check_strategy_proofness(
            Rule("ttc", ttc), DomainSpec.union(3), 3, Scope.exhaustive()
        )
    with pytest.raises(BudgetError):
        check_strategy_proofness(
            Rule("ttc", ttc), DomainSpec.unrestricted(3), 3, Scope.exhaustive(), budget=10
        )


def test_corollary_holds_exhaustively_n3():
    report = check_corollary_sd(3, Scope.exhaustive())
    assert report.ok
    assert report.profiles_checked == 64


def test_corollary_holds_on_samples_n5():
    report = check_corollary_sd(5, Scope.randomized(seed=11, trials=200))
    assert report.ok
    assert report.profiles_checked == 200


def test_corollary_budget():
    with pytest.raises(BudgetError):
        check_corollary_sd(4, Scope.exhaustive(), budget=100)
