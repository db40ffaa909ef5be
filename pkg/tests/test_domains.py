import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from reallot.core import Instance, LinearOrder, Preference, Profile
from reallot.domains import (
    DomainSpec,
    enumerate_all_preferences,
    enumerate_single_dipped,
    enumerate_single_peaked,
    is_single_dipped,
    is_single_peaked,
    monotone_decreasing,
    monotone_increasing,
    sample_profile,
    single_dipped_violation,
    single_peaked_violation,
)

from conftest import pref


IDENTITY3 = LinearOrder.identity(3)


def orders(max_m: int):
    return st.integers(2, max_m).flatmap(
        lambda m: st.tuples(
            st.permutations(list(range(m))), st.permutations(list(range(m)))
        )
    )


def test_single_peaked_recognition_basics():
    assert is_single_peaked(pref("h1 h2 h3"), IDENTITY3)
    assert not is_single_peaked(pref("h3 h1 h2"), IDENTITY3)
    w = single_peaked_violation(pref("h3 h1 h2"), IDENTITY3)
    assert (w.pivot, w.middle, w.far, w.side) == (2, 1, 0, "left")
    assert w.holds_for(pref("h3 h1 h2"), IDENTITY3)
    assert single_peaked_violation(pref("h2 h1 h3"), IDENTITY3) is None


def test_single_dipped_recognition_basics():
    assert is_single_dipped(pref("h3 h1 h2"), IDENTITY3)  # dip h2
    assert not is_single_dipped(pref("h2 h3 h1"), IDENTITY3)  # dip h1
    w = single_dipped_violation(pref("h2 h3 h1"), IDENTITY3)
    assert (w.pivot, w.middle, w.far, w.side) == (0, 1, 2, "right")
    assert w.holds_for(pref("h2 h3 h1"), IDENTITY3)


def test_family_membership_counts_for_three_houses():
    sp = [p.ranking for p in enumerate_single_peaked(IDENTITY3)]
    assert sp == [(0, 1, 2), (1, 0, 2), (1, 2, 0), (2, 1, 0)]
    sd = [p.ranking for p in enumerate_single_dipped(IDENTITY3)]
    assert sd == [(0, 1, 2), (0, 2, 1), (2, 0, 1), (2, 1, 0)]
    # Same counts by filtering all rankings with the recognizers.
    assert sum(is_single_peaked(p, IDENTITY3) for p in enumerate_all_preferences(3)) == 4
    assert sum(is_single_dipped(p, IDENTITY3) for p in enumerate_all_preferences(3)) == 4


@pytest.mark.parametrize("m", range(1, 11))
def test_family_sizes_are_powers_of_two(m):
    order = LinearOrder.identity(m)
    sp = list(enumerate_single_peaked(order))
    sd = list(enumerate_single_dipped(order))
    assert len(sp) == len(set(sp)) == 2 ** max(m - 1, 0)
    assert len(sd) == len(set(sd)) == 2 ** max(m - 1, 0)


@pytest.mark.parametrize("m", range(2, 6))
def test_enumeration_matches_definitional_filter(m):
    order = LinearOrder.from_left_to_right(tuple(reversed(range(m))))
    by_filter = {
        p.ranking for p in enumerate_all_preferences(m) if is_single_peaked(p, order)
    }
    assert {p.ranking for p in enumerate_single_peaked(order)} == by_filter
    by_filter_sd = {
        p.ranking for p in enumerate_all_preferences(m) if is_single_dipped(p, order)
    }
    assert {p.ranking for p in enumerate_single_dipped(order)} == by_filter_sd


@pytest.mark.parametrize("m", range(3, 7))
def test_family_overlap_is_the_two_monotone_rankings(m):
    order = LinearOrder.identity(m)
    both = set(enumerate_single_peaked(order)) & set(enumerate_single_dipped(order))
    assert both == {monotone_increasing(order), monotone_decreasing(order)}


def test_enumerate_all_counts():
    assert sum(1 for _ in enumerate_all_preferences(4)) == math.factorial(4)
    with pytest.raises(ValueError):
        next(enumerate_all_preferences(0))


@given(orders(6))
def test_membership_duality_under_ranking_reversal(data):
    ranking, left_to_right = data
    p = Preference(tuple(ranking))
    order = LinearOrder.from_left_to_right(tuple(left_to_right))
    assert is_single_peaked(p, order) == is_single_dipped(p.reversed(), order)


@given(orders(6))
def test_membership_survives_order_reversal(data):
    ranking, left_to_right = data
    p = Preference(tuple(ranking))
    order = LinearOrder.from_left_to_right(tuple(left_to_right))
    assert is_single_peaked(p, order) == is_single_peaked(p, order.reversed())
    assert is_single_dipped(p, order) == is_single_dipped(p, order.reversed())


@given(orders(6))
def test_violations_certify_non_membership(data):
    ranking, left_to_right = data
    p = Preference(tuple(ranking))
    order = LinearOrder.from_left_to_right(tuple(left_to_right))
    wp = single_peaked_violation(p, order)
    assert (wp is None) == is_single_peaked(p, order)
    if wp is not None:
        assert wp.holds_for(p, order)
    wd = single_dipped_violation(p, order)
    assert (wd is None) == is_single_dipped(p, order)
    if wd is not None:
        assert wd.holds_for(p, order)


def test_domain_spec_parsing_and_description():
    assert DomainSpec.parse("sp", 3) == DomainSpec.all_single_peaked(3)
    assert DomainSpec.parse("union", 4) == DomainSpec.union(4)
    mixed = DomainSpec.parse("sp,sd,sp", 3)
    assert mixed.per_agent == ("sp", "sd", "sp")
    assert mixed.describe() == "spec sp,sd,sp"
    assert DomainSpec.all_single_dipped(3).describe() == "sd"
    with pytest.raises(ValueError):
        DomainSpec.parse("sp,sd", 3)
    with pytest.raises(ValueError):
        DomainSpec.parse("weird", 3)
    with pytest.raises(ValueError):
        DomainSpec((),)
    with pytest.raises(ValueError):
        DomainSpec((pref("h1 h2 h3"), "sp"))  # raw Preference is not an entry list
    with pytest.raises(ValueError):
        DomainSpec((("sp",), ()))  # empty explicit list


def test_space_sizes():
    order = LinearOrder.identity(3)
    assert DomainSpec.all_single_peaked(3).space_size(order) == 64
    assert DomainSpec.unrestricted(3).space_size(order) == 216
    assert DomainSpec.union(3).space_size(order) == 2 * 64 - 8
    explicit = DomainSpec((("sp"), "sd", (pref("h1 h2 h3"),)))
    assert explicit.space_size(order) == 4 * 4 * 1


def test_sampling_is_deterministic_and_in_domain():
    inst = Instance.default(3)
    spec = DomainSpec.all_single_peaked(3)
    a = sample_profile(spec, inst, seed=99)
    b = sample_profile(spec, inst, seed=99)
    assert a == b
    assert all(is_single_peaked(p, inst.order) for p in a.prefs)
    c = sample_profile(spec, inst, seed=100)
    assert isinstance(c, Profile)

    sd = sample_profile(DomainSpec.all_single_dipped(3), inst, seed=5)
    assert all(is_single_dipped(p, inst.order) for p in sd.prefs)

    explicit = DomainSpec(((pref("h2 h1 h3"),), "sp", "all"))
    drawn = sample_profile(explicit, inst, seed=1)
    assert drawn.prefs[0] == pref("h2 h1 h3")


def test_union_sampling_lands_in_one_half():
    inst = Instance.default(3)
    spec = DomainSpec.union(3)
    kinds = set()
    for seed in range(40):
        profile = sample_profile(spec, inst, seed)
        all_sp = all(is_single_peaked(p, inst.order) for p in profile.prefs)
        all_sd = all(is_single_dipped(p, inst.order) for p in profile.prefs)
        assert all_sp or all_sd
        kinds.add("sp" if all_sp else "sd")
    assert kinds == {"sp", "sd"}  # the coin actually flips


def test_unrestricted_sampling_is_uniform():
    # Chi-square against exact uniformity over the 216 profiles at n=3;
    # statistic stays within five sigma of the df mean.
    inst = Instance.default(3)
    spec = DomainSpec.unrestricted(3)
    draws = 100_000
    counts: dict = {}
    for seed in range(draws):
        profile = sample_profile(spec, inst, seed)
        key = tuple(p.ranking for p in profile.prefs)
        counts[key] = counts.get(key, 0) + 1
    cells = 216
    expected = draws / cells
    stat = sum((counts.get(k, 0) - expected) ** 2 / expected for k in set(counts))
    assert len(counts) == cells
    df = cells - 1
    assert stat < df + 5 * math.sqrt(2 * df)


def test_admissible_sets_reject_union_mode():
    spec = DomainSpec.union(3)
    with pytest.raises(ValueError):
        spec.admissible(IDENTITY3, 0)
    assert spec.contains(
        Profile(Instance.default(3), (pref("h1 h2 h3"),) * 3)
    )


def test_contains_checks_each_agent(gap_example):
    profile, _, _ = gap_example
    assert DomainSpec.parse("sp,sd,sp", 3).contains(profile)
    assert not DomainSpec.all_single_peaked(3).contains(profile)
    assert not DomainSpec.all_single_dipped(3).contains(profile)
    assert DomainSpec.unrestricted(3).contains(profile)
