import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from reallot.core import (
    Allocation,
    Instance,
    LinearOrder,
    Preference,
    Profile,
    enumerate_allocations,
)

from conftest import pref


def brute_peak(p: Preference) -> int:
    # Independent oracle: scan all pairwise comparisons.
    return next(h for h in range(p.m) if all(p.prefers(h, g) for g in range(p.m) if g != h))


def brute_dip(p: Preference) -> int:
    return next(h for h in range(p.m) if all(p.prefers(g, h) for g in range(p.m) if g != h))


def test_peak_and_dip_on_named_rankings():
    p = pref("h2 h3 h1")
    assert p.peak == 1  # h2
    assert p.dip == 0  # h1
    q = pref("h1 h2 h3")
    assert q.peak == 0
    assert q.dip == 2


def test_peak_dip_match_pairwise_scan_on_random_rankings():
    rng = random.Random(11)
    for _ in range(50):
        p = Preference(tuple(rng.sample(range(6), 6)))
        assert p.peak == brute_peak(p)
        assert p.dip == brute_dip(p)


def test_prefers_basics():
    p = pref("h3 h1 h2")
    assert p.prefers(2, 1)  # h3 over h2
    assert not p.prefers(1, 2)
    for h in range(3):
        assert p.weakly_prefers(h, h)
    with pytest.raises(ValueError):
        p.prefers(0, 3)
    with pytest.raises(ValueError):
        p.weakly_prefers(-1, 0)


def test_prefers_is_strict_total_order_exhaustively():
    # Asymmetry, totality, transitivity over every preference for m <= 5.
    for m in (3, 4, 5):
        for ranking in itertools.permutations(range(m)):
            p = Preference(ranking)
            for h in range(m):
                assert not p.prefers(h, h)
                for g in range(m):
                    if h != g:
                        assert p.prefers(h, g) != p.prefers(g, h)
            for h, g, k in itertools.permutations(range(m), 3):
                if p.prefers(h, g) and p.prefers(g, k):
                    assert p.prefers(h, k)


@given(st.permutations(list(range(6))))
def test_rank_of_is_inverse_of_ranking(ranking):
    p = Preference(tuple(ranking))
    for r, h in enumerate(p.ranking):
        assert p.rank_of[h] == r


@given(st.permutations(list(range(5))))
def test_peak_is_dip_of_reversed(ranking):
    p = Preference(tuple(ranking))
    assert p.peak == p.reversed().dip
    assert p.dip == p.reversed().peak


def test_preference_rejects_non_permutations():
    with pytest.raises(ValueError):
        Preference((0, 0, 1))
    with pytest.raises(ValueError):
        Preference((0, 1, 3))
    with pytest.raises(ValueError):
        Preference(())


def test_linear_order_round_trip_and_comparisons():
    order = LinearOrder.from_left_to_right((2, 0, 1))  # h3 < h1 < h2
    assert order.position == (1, 2, 0)
    assert order.by_rank == (2, 0, 1)
    assert order.before(2, 0) and order.before(0, 1)
    assert not order.before(1, 2)
    assert order.weakly_before(1, 1)
    assert order.reversed().by_rank == (1, 0, 2)
    with pytest.raises(ValueError):
        LinearOrder((0, 0, 2))
    with pytest.raises(ValueError):
        order.before(0, 5)


def test_instance_validation():
    with pytest.raises(ValueError):
        Instance.default(2)
    with pytest.raises(ValueError):
        Instance(("a1", "a2", "a1"), ("h1", "h2", "h3"), (0, 1, 2), LinearOrder.identity(3))
    with pytest.raises(ValueError):
        Instance(("a1", "a2", "a3"), ("h1", "h2", "h3"), (0, 0, 2), LinearOrder.identity(3))
    inst = Instance.default(3)
    assert inst.agent_index("a2") == 1
    assert inst.house_index("h3") == 2
    with pytest.raises(ValueError):
        inst.house_index("h9")


def test_profile_validation_and_replacement():
    inst = Instance.default(3)
    prefs = (pref("h1 h2 h3"),) * 3
    profile = Profile(inst, prefs)
    swapped = profile.with_pref(1, pref("h3 h2 h1"))
    assert swapped.prefs[1] == pref("h3 h2 h1")
    assert profile.prefs[1] == pref("h1 h2 h3")  # original untouched
    with pytest.raises(ValueError):
        Profile(inst, prefs[:2])
    with pytest.raises(ValueError):
        Profile(inst, (Preference((0, 1)),) * 3)


def test_allocation_validation():
    with pytest.raises(ValueError):
        Allocation((0, 0, 2))
    mu = Allocation((2, 0, 1))
    assert mu.house_of(0) == 2
    assert mu.agent_of(2) == 0


def test_enumerate_allocations_counts_and_order():
    assert sum(1 for _ in enumerate_allocations(Instance.default(3))) == 6
    assert sum(1 for _ in enumerate_allocations(Instance.default(4))) == 24
    seen = [a.assign for a in enumerate_allocations(Instance.default(5))]
    assert len(set(seen)) == 120
    assert seen == sorted(seen)  # lexicographic on the assigned sequence
