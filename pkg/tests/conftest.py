"""Shared fixtures: the 3-agent mixed-domain gap instance and builders."""

import pytest

from reallot.core import Allocation, Instance, LinearOrder, Preference, Profile


def pref(text: str) -> Preference:
    """Build a preference from 'h2 h3 h1' style text (default names)."""
    return Preference(tuple(int(tok[1:]) - 1 for tok in text.split()))


def profile_from(*rows: str, order: LinearOrder | None = None) -> Profile:
    prefs = tuple(pref(row) for row in rows)
    inst = Instance.default(len(prefs), order)
    return Profile(inst, prefs)


@pytest.fixture
def gap_example():
    """The 3-agent instance where a pair-efficient allocation is dominated:
    one single-dipped agent between two single-peaked ones."""
    profile = profile_from("h2 h3 h1", "h3 h1 h2", "h1 h2 h3")
    mu = Allocation((2, 0, 1))
    nu = Allocation((1, 2, 0))
    return profile, mu, nu
