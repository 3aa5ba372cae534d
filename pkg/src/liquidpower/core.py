"""Core data model: social networks, delegation profiles, forests, elections.

Voters are identified by 0-based integers internally.  The JSON interchange
format (see :func:`election_from_json`) is 1-based, matching the way instances
are usually written down by hand.

A delegation profile maps every voter either to ``SELF`` (the voter casts their
own ballot) or to another voter along an arc of the social network.  Profiles
must be acyclic; the transitive closure of an acyclic profile is a forest of
in-trees whose roots are the *gurus* — the voters who actually vote, each
wielding the accumulated weight of their whole subtree.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Final, Iterable, Mapping, Sequence

from .errors import (
    ArcNotInNetwork,
    CycleInDelegations,
    NonPositiveWeight,
    QuotaOutOfRange,
)

#: Sentinel delegation choice meaning "vote yourself".
SELF: Final = None

Choice = int | None


@dataclass(frozen=True)
class SocialNetwork:
    """A directed graph over voters; arcs are the permitted delegations.

    ``out_neighbors[i]`` lists the voters that voter ``i`` may delegate to,
    sorted ascending, duplicate-free, never containing ``i`` itself.
    """

    out_neighbors: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.out_neighbors)
        for i, row in enumerate(self.out_neighbors):
            seen = set()
            for j in row:
                if not (0 <= j < n) or j == i or j in seen:
                    raise ValueError(f"malformed out-neighbor list for voter {i}: {row}")
                seen.add(j)

    @property
    def n(self) -> int:
        return len(self.out_neighbors)

    def has_arc(self, source: int, target: int) -> bool:
        return target in self.out_neighbors[source]

    def arcs(self) -> Iterable[tuple[int, int]]:
        for i, row in enumerate(self.out_neighbors):
            for j in row:
                yield (i, j)

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[tuple[int, int]]) -> "SocialNetwork":
        rows: list[set[int]] = [set() for _ in range(n)]
        for source, target in arcs:
            if not (0 <= source < n and 0 <= target < n):
                raise ValueError(f"arc ({source}, {target}) out of range for n={n}")
            rows[source].add(target)
        return cls(tuple(tuple(sorted(row)) for row in rows))

    @classmethod
    def complete(cls, n: int) -> "SocialNetwork":
        return cls(tuple(tuple(j for j in range(n) if j != i) for i in range(n)))


@dataclass(frozen=True)
class DelegationProfile:
    """One delegation choice per voter: ``SELF`` or the id delegated to."""

    choices: tuple[Choice, ...]

    @property
    def n(self) -> int:
        return len(self.choices)

    def is_self_voter(self, voter: int) -> bool:
        return self.choices[voter] is SELF

    def with_choice(self, voter: int, choice: Choice) -> "DelegationProfile":
        updated = list(self.choices)
        updated[voter] = choice
        return DelegationProfile(tuple(updated))

    def changed_voters(self, other: "DelegationProfile") -> tuple[int, ...]:
        """Voters whose choice differs between ``self`` and ``other``."""
        if self.n != other.n:
            raise ValueError("profiles have different sizes")
        return tuple(i for i in range(self.n) if self.choices[i] != other.choices[i])

    def sort_key(self) -> tuple[int, ...]:
        """Deterministic total order on profiles (SELF encoded as own id)."""
        return tuple(i if c is SELF else c for i, c in enumerate(self.choices))

    @classmethod
    def all_self(cls, n: int) -> "DelegationProfile":
        return cls((SELF,) * n)


def find_delegation_cycle(choices: Sequence[Choice]) -> list[int] | None:
    """Return one delegation cycle as a list of voter ids, or None if acyclic."""
    state = [0] * len(choices)  # 0 unvisited, 1 on current walk, 2 done
    for start in range(len(choices)):
        if state[start]:
            continue
        walk = []
        v = start
        while v is not SELF and state[v] == 0:
            state[v] = 1
            walk.append(v)
            v = choices[v]
        if v is not SELF and state[v] == 1:
            # closed a cycle inside the current walk
            cycle_start = walk.index(v)
            for u in walk:
                state[u] = 2
            return walk[cycle_start:]
        for u in walk:
            state[u] = 2
    return None


@dataclass(frozen=True)
class DelegationForest:
    """The in-forest induced by an acyclic delegation profile.

    For each voter ``i``:

    * ``guru[i]`` — the root of ``i``'s tree (the voter who casts ``i``'s vote);
    * ``chain[i]`` — the delegation path from ``i`` up to ``guru[i]``,
      inclusive at both ends, so ``chain[i][0] == i``;
    * ``subtree[i]`` — all voters whose chain passes through ``i`` (including
      ``i``), sorted ascending;
    * ``subtree_size[i]`` / ``subtree_weight[i]`` — size and total weight of
      that subtree;
    * ``acc_weight[i]`` — ``subtree_weight[i]`` if ``i`` is a guru, else 0
      (delegating voters wield no weight of their own);
    * ``delegators[i]`` — direct delegators of ``i``, sorted ascending.

    ``gurus`` lists the roots in ascending order.
    """

    guru: tuple[int, ...]
    chain: tuple[tuple[int, ...], ...]
    subtree: tuple[tuple[int, ...], ...]
    subtree_size: tuple[int, ...]
    subtree_weight: tuple[int, ...]
    acc_weight: tuple[int, ...]
    delegators: tuple[tuple[int, ...], ...]
    gurus: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.guru)

    def proxies_of(self, voter: int) -> tuple[int, ...]:
        """The voters ``voter``'s ballot passes through: chain minus the voter."""
        return self.chain[voter][1:]

    @cached_property
    def chain_mask(self) -> tuple[int, ...]:
        """Bitmask of each voter's chain; ``chain_mask[i] & C == chain_mask[i]``
        tests whether voter ``i`` is active in coalition mask ``C``."""
        masks = []
        for ch in self.chain:
            m = 0
            for v in ch:
                m |= 1 << v
            masks.append(m)
        return tuple(masks)


def build_forest(profile: DelegationProfile, weights: Sequence[int]) -> DelegationForest:
    """Resolve an acyclic profile into its delegation forest.

    Raises :class:`CycleInDelegations` if the profile is cyclic.
    """
    n = profile.n
    choices = profile.choices
    cycle = find_delegation_cycle(choices)
    if cycle is not None:
        raise CycleInDelegations(cycle)

    chain: list[tuple[int, ...] | None] = [None] * n

    def chain_of(v: int) -> tuple[int, ...]:
        # iterative with memoization; path lengths can reach n
        stack = []
        u = v
        while chain[u] is None:
            stack.append(u)
            if choices[u] is SELF:
                chain[u] = (u,)
                break
            u = choices[u]
        for w in reversed(stack):
            if chain[w] is None:
                chain[w] = (w,) + chain[choices[w]]
        return chain[v]

    for v in range(n):
        chain_of(v)

    guru = tuple(chain[v][-1] for v in range(n))
    subtree_members: list[list[int]] = [[] for _ in range(n)]
    for v in range(n):
        for anc in chain[v]:
            subtree_members[anc].append(v)
    subtree = tuple(tuple(sorted(members)) for members in subtree_members)
    subtree_size = tuple(len(s) for s in subtree)
    subtree_weight = tuple(sum(weights[m] for m in s) for s in subtree)
    acc_weight = tuple(
        subtree_weight[v] if guru[v] == v else 0 for v in range(n)
    )
    delegators_raw: list[list[int]] = [[] for _ in range(n)]
    for v in range(n):
        if choices[v] is not SELF:
            delegators_raw[choices[v]].append(v)
    delegators = tuple(tuple(sorted(d)) for d in delegators_raw)
    gurus = tuple(v for v in range(n) if guru[v] == v)
    return DelegationForest(
        guru=guru,
        chain=tuple(chain),  # type: ignore[arg-type]
        subtree=subtree,
        subtree_size=subtree_size,
        subtree_weight=subtree_weight,
        acc_weight=acc_weight,
        delegators=delegators,
        gurus=gurus,
    )


@dataclass(frozen=True)
class PartialElection:
    """An election without a quota: network, positive weights, acyclic profile."""

    network: SocialNetwork
    weights: tuple[int, ...]
    profile: DelegationProfile

    @property
    def n(self) -> int:
        return self.network.n

    @property
    def total_weight(self) -> int:
        return sum(self.weights)

    @cached_property
    def forest(self) -> DelegationForest:
        return build_forest(self.profile, self.weights)

    def with_profile(self, profile: DelegationProfile, *, check_arcs: bool = True):
        """Same election under a different delegation profile (revalidated)."""
        return validate(
            self.network,
            self.weights,
            profile,
            getattr(self, "quota", None),
            check_arcs=check_arcs,
        )


@dataclass(frozen=True)
class LiquidElection(PartialElection):
    """A weighted election with an integer quota in ``[1, total]``.

    A coalition wins when the weight of its *active* members reaches the
    quota; a member is active when its entire delegation chain lies inside
    the coalition.
    """

    quota: int

    def value_of(self, coalition_mask: int) -> int:
        """Characteristic value of the coalition given as a bitmask."""
        return 1 if self.coalition_weight_of_mask(coalition_mask) >= self.quota else 0

    def coalition_weight_of_mask(self, coalition_mask: int) -> int:
        chain_mask = self.forest.chain_mask
        weights = self.weights
        total = 0
        m = coalition_mask
        while m:
            low = m & -m
            v = low.bit_length() - 1
            if chain_mask[v] & coalition_mask == chain_mask[v]:
                total += weights[v]
            m ^= low
        return total

    @property
    def n_voters(self) -> int:
        return self.n


def validate(
    network: SocialNetwork,
    weights: Sequence[int],
    profile: DelegationProfile,
    quota: int | None = None,
    *,
    check_arcs: bool = True,
) -> LiquidElection | PartialElection:
    """Validate the pieces of an election and assemble it.

    Checks, in order: weight positivity, every delegation follows a network
    arc, acyclicity, and (when a quota is given) ``1 <= quota <= total``.
    Returns a :class:`LiquidElection` when ``quota`` is given, otherwise a
    :class:`PartialElection`.
    """
    n = network.n
    if len(weights) != n or profile.n != n:
        raise ValueError(
            f"size mismatch: network has {n} voters, "
            f"{len(weights)} weights, profile of size {profile.n}"
        )
    for i, w in enumerate(weights):
        if not isinstance(w, int) or isinstance(w, bool) or w <= 0:
            raise NonPositiveWeight(f"voter {i} has weight {w!r}; weights must be positive integers")
    if check_arcs:
        for i, c in enumerate(profile.choices):
            if c is not SELF and not network.has_arc(i, c):
                raise ArcNotInNetwork(i, c)
    cycle = find_delegation_cycle(profile.choices)
    if cycle is not None:
        raise CycleInDelegations(cycle)
    if quota is None:
        return PartialElection(network, tuple(weights), profile)
    total = sum(weights)
    if not isinstance(quota, int) or isinstance(quota, bool) or not 1 <= quota <= total:
        raise QuotaOutOfRange(f"quota {quota!r} outside [1, {total}]")
    return LiquidElection(network, tuple(weights), profile, quota)


def apply_changes(
    profile: DelegationProfile,
    changes: Mapping[int, Choice],
    network: SocialNetwork | None = None,
) -> tuple[DelegationProfile, int]:
    """Apply a set of delegation changes and count how many actually differ.

    When a network is given, every redirected delegation must follow one of
    its arcs.  The resulting profile must be acyclic.  Returns the new
    profile and the number of voters whose choice really changed.
    """
    updated = list(profile.choices)
    for voter, choice in changes.items():
        if not (0 <= voter < profile.n):
            raise ValueError(f"voter {voter} out of range")
        if choice is not SELF:
            if not (0 <= choice < profile.n):
                raise ValueError(f"delegation target {choice} out of range")
            if network is not None and not network.has_arc(voter, choice):
                raise ArcNotInNetwork(voter, choice)
        updated[voter] = choice
    new_profile = DelegationProfile(tuple(updated))
    cycle = find_delegation_cycle(new_profile.choices)
    if cycle is not None:
        raise CycleInDelegations(cycle)
    return new_profile, len(profile.changed_voters(new_profile))


# --------------------------------------------------------------------------
# JSON interchange (1-based voter ids)
# --------------------------------------------------------------------------
#
# {
#   "n": 8,
#   "weights": [1, 1, 1, 1, 1, 1, 1, 1],
#   "arcs": [[1, 3], [2, 3], ...],         # [from, to]
#   "delegations": {"1": 3, "3": 3, ...},   # voter -> target; own id = SELF
#   "quota": 3                              # optional
# }
#
# Omitted voters in "delegations" vote themselves.


def election_from_json(doc: str | bytes | dict) -> LiquidElection | PartialElection:
    """Parse and validate an election from its JSON document (or parsed dict)."""
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    if not isinstance(doc, dict):
        raise ValueError("instance document must be a JSON object")
    try:
        n = doc["n"]
        weights = doc["weights"]
        arcs = doc["arcs"]
        delegations = doc.get("delegations", {})
        quota = doc.get("quota")
    except KeyError as exc:
        raise ValueError(f"instance document missing field {exc}") from None
    if not isinstance(n, int) or n <= 0:
        raise ValueError(f"'n' must be a positive integer, got {n!r}")
    if not isinstance(weights, list) or len(weights) != n:
        raise ValueError("'weights' must be a list of length n")
    network = SocialNetwork.from_arcs(
        n, [(a - 1, b - 1) for a, b in (tuple(arc) for arc in arcs)]
    )
    choices: list[Choice] = [SELF] * n
    for key, target in delegations.items():
        voter = int(key)
        if not (1 <= voter <= n) or not isinstance(target, int) or not (1 <= target <= n):
            raise ValueError(f"bad delegation entry {key!r}: {target!r}")
        choices[voter - 1] = SELF if target == voter else target - 1
    return validate(network, tuple(weights), DelegationProfile(tuple(choices)), quota)


def election_to_json(election: PartialElection) -> dict:
    """Serialize an election back to the (1-based) instance document."""
    doc: dict = {
        "n": election.n,
        "weights": list(election.weights),
        "arcs": [[a + 1, b + 1] for a, b in election.network.arcs()],
        "delegations": profile_to_json(election.profile),
    }
    quota = getattr(election, "quota", None)
    if quota is not None:
        doc["quota"] = quota
    return doc


def profile_to_json(profile: DelegationProfile) -> dict[str, int]:
    """1-based mapping form of a profile; self-voters map to their own id."""
    return {
        str(i + 1): (i + 1 if c is SELF else c + 1)
        for i, c in enumerate(profile.choices)
    }


def instance_digest(election: PartialElection) -> str:
    """Stable sha256 digest of the canonical instance document."""
    doc = election_to_json(election)
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()
