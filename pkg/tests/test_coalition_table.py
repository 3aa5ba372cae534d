"""Vectorized coalition-weight tables against the reference oracle."""

import random

import pytest

import oracle
from liquidpower import InstanceTooLargeForEnumeration, SELF
from liquidpower.coalition_table import (
    TABLE_LIMIT,
    all_swing_counts_fast,
    banzhaf_fast,
    chain_masks_of,
    coalition_weight_table,
    swing_counts_fast,
)
from liquidpower.exact import swing_size_counts
from support import eight_voter_election, random_election


def test_chain_masks_on_fixture():
    election = eight_voter_election()
    masks = chain_masks_of(election.profile.choices)
    # voter 0 delegates through 2; voter 4 through 5 -> 6 -> 7
    assert masks[0] == (1 << 0) | (1 << 2)
    assert masks[2] == 1 << 2
    assert masks[4] == (1 << 4) | (1 << 5) | (1 << 6) | (1 << 7)


def test_weight_table_matches_oracle():
    rng = random.Random(20_401)
    for _ in range(25):
        election = random_election(rng, n_min=2, n_max=7)
        gamma = coalition_weight_table(election.profile.choices, election.weights)
        for mask in range(1 << election.n):
            members = {v for v in range(election.n) if mask >> v & 1}
            assert gamma[mask] == oracle.coalition_weight(
                election.profile.choices, election.weights, members
            )


def test_swing_counts_match_exact_route():
    rng = random.Random(20_402)
    for _ in range(40):
        election = random_election(rng, n_min=2, n_max=8)
        voter = rng.randrange(election.n)
        fast = swing_counts_fast(
            election.profile.choices, election.weights, election.quota, voter
        )
        assert fast == list(swing_size_counts(election, voter))


def test_all_voters_share_one_table():
    election = eight_voter_election()
    per_voter = all_swing_counts_fast(
        election.profile.choices, election.weights, election.quota
    )
    assert len(per_voter) == 8
    assert sum(per_voter[7]) == 64  # half of the 2^7 coalitions
    assert sum(per_voter[4]) == 0  # distant voter never swings


def test_banzhaf_fast_on_fixture():
    from fractions import Fraction

    election = eight_voter_election()
    choices, w, q = election.profile.choices, election.weights, election.quota
    assert banzhaf_fast(choices, w, q, 7) == Fraction(1, 2)
    assert banzhaf_fast(choices, w, q, 5) == Fraction(1, 16)


def test_table_size_guard():
    n = TABLE_LIMIT + 1
    with pytest.raises(InstanceTooLargeForEnumeration):
        coalition_weight_table((SELF,) * n, (1,) * n)
