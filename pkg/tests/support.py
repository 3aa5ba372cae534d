"""Shared fixtures and random-instance generators for the tests."""

import random

from liquidpower.core import (
    SELF,
    DelegationProfile,
    LiquidElection,
    SocialNetwork,
    validate,
)


def eight_voter_election() -> LiquidElection:
    """Two delegation trees over eight unit-weight voters, quota 3.

    Tree one: voters 0 and 1 delegate to 2, who votes personally (3 ballots).
    Tree two: 3 and 5 delegate to 6, 4 delegates to 5, 6 delegates to 7, who
    votes personally (5 ballots).  The network carries a handful of extra
    arcs beyond the ones in use.
    """
    delegation_arcs = [(0, 2), (1, 2), (3, 6), (4, 5), (5, 6), (6, 7)]
    extra_arcs = [(5, 4), (6, 3), (1, 6), (2, 7), (2, 1), (0, 3)]
    network = SocialNetwork.from_arcs(8, delegation_arcs + extra_arcs)
    profile = DelegationProfile((2, 2, SELF, 6, 5, 6, 7, SELF))
    return validate(network, (1,) * 8, profile, 3)


def three_voter_line_election(delegate_third: bool) -> LiquidElection:
    """Three unit-weight voters, quota 2; voter 1 delegates to voter 0.

    With ``delegate_third`` the last voter delegates to voter 1 (lengthening
    the chain); otherwise it votes personally.
    """
    network = SocialNetwork.from_arcs(3, [(1, 0), (2, 1)])
    profile = DelegationProfile((SELF, 0, 1 if delegate_third else SELF))
    return validate(network, (1, 1, 1), profile, 2)


def random_network(rng: random.Random, n: int, arc_prob: float = 0.5) -> SocialNetwork:
    arcs = [
        (i, j)
        for i in range(n)
        for j in range(n)
        if i != j and rng.random() < arc_prob
    ]
    return SocialNetwork.from_arcs(n, arcs)


def random_profile(
    rng: random.Random, network: SocialNetwork, delegate_prob: float = 0.6
) -> DelegationProfile:
    """Random acyclic profile along the network's arcs.

    Voters may only delegate to predecessors in a random permutation, which
    rules out cycles while reaching every forest shape.
    """
    n = network.n
    order = list(range(n))
    rng.shuffle(order)
    rank = {v: i for i, v in enumerate(order)}
    choices = [SELF] * n
    for v in range(n):
        candidates = [u for u in network.out_neighbors[v] if rank[u] < rank[v]]
        if candidates and rng.random() < delegate_prob:
            choices[v] = rng.choice(candidates)
    return DelegationProfile(tuple(choices))


def random_election(
    rng: random.Random,
    n_min: int = 2,
    n_max: int = 10,
    w_max: int = 4,
    arc_prob: float = 0.5,
    delegate_prob: float = 0.6,
    complete: bool = False,
) -> LiquidElection:
    n = rng.randint(n_min, n_max)
    network = (
        SocialNetwork.complete(n) if complete else random_network(rng, n, arc_prob)
    )
    weights = tuple(rng.randint(1, w_max) for _ in range(n))
    profile = random_profile(rng, network, delegate_prob)
    total = sum(weights)
    # bias toward majority quotas but cover the whole legal band
    lo = total // 2 + 1 if rng.random() < 0.7 else 1
    quota = rng.randint(min(lo, total), total)
    return validate(network, weights, profile, quota)


def random_composable_pair(rng: random.Random, joint_max: int = 10, w_max: int = 3):
    """Two elections sharing voters on which they agree, plus the pairing.

    The shared voters of the first election are a delegation-closed set (any
    shared delegator's target is shared too); the second election replicates
    their weights and delegation pattern and adds fresh voters around them.
    Returns ``(e1, e2, shared)`` with ``shared`` mapping part-one ids to
    part-two ids.
    """
    n1 = rng.randint(2, max(2, joint_max - 2))
    e1 = random_election(rng, n_min=n1, n_max=n1, w_max=w_max)
    # delegation-closed shared set: seed voters plus everyone their ballots pass through
    seeds = rng.sample(range(n1), rng.randint(1, min(2, n1)))
    shared1: set[int] = set()
    for s in seeds:
        shared1.update(e1.forest.chain[s])
    shared1_list = sorted(shared1)
    r = len(shared1_list)
    n2 = min(joint_max - n1 + r, r + rng.randint(1, 3))
    n2 = max(n2, r)
    to_two = {v: i for i, v in enumerate(shared1_list)}  # shared go first in e2

    choices2: list = [SELF] * n2
    for v in shared1_list:
        c = e1.profile.choices[v]
        choices2[to_two[v]] = SELF if c is SELF else to_two[c]
    fresh = list(range(r, n2))
    rng.shuffle(fresh)
    rank = {v: i for i, v in enumerate(fresh)}
    for v in fresh:
        pool = [u for u in range(n2) if u < r or (u in rank and rank[u] < rank[v])]
        if pool and rng.random() < 0.6:
            choices2[v] = rng.choice([u for u in pool if u != v])
    weights2 = tuple(
        e1.weights[shared1_list[i]] if i < r else rng.randint(1, w_max)
        for i in range(n2)
    )
    arcs2 = {(v, c) for v, c in enumerate(choices2) if c is not SELF}
    for _ in range(n2):
        a, b = rng.randrange(n2), rng.randrange(n2)
        if a != b:
            arcs2.add((a, b))
    total2 = sum(weights2)
    quota2 = rng.randint(total2 // 2 + 1, total2)
    e2 = validate(
        SocialNetwork.from_arcs(n2, arcs2),
        weights2,
        DelegationProfile(tuple(choices2)),
        quota2,
    )
    return e1, e2, to_two
