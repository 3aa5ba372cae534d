"""Game semantics on top of elections: coalitions, swings, composition.

A coalition is a subset of voters, held as a bitmask.  The characteristic
value of a coalition counts only *active* members — voters whose entire
delegation chain lies inside the coalition — and compares their total weight
against the quota.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Protocol, runtime_checkable

from .core import SELF, LiquidElection
from .errors import IncompatibleOverlap, MemberAlreadyInCoalition

COALITION_CAPACITY = 64


@dataclass(frozen=True)
class Coalition:
    """A subset of an ``n``-voter ground set, stored as a bitmask."""

    n: int
    mask: int

    def __post_init__(self):
        if self.n > COALITION_CAPACITY:
            raise ValueError(f"coalitions support at most {COALITION_CAPACITY} voters")
        if self.mask < 0 or self.mask >> self.n:
            raise ValueError(f"mask {self.mask:#x} out of range for n={self.n}")

    @classmethod
    def from_members(cls, n: int, members: Iterable[int]) -> "Coalition":
        mask = 0
        for v in members:
            if not (0 <= v < n):
                raise ValueError(f"member {v} out of range for n={n}")
            mask |= 1 << v
        return cls(n, mask)

    @classmethod
    def empty(cls, n: int) -> "Coalition":
        return cls(n, 0)

    @classmethod
    def full(cls, n: int) -> "Coalition":
        return cls(n, (1 << n) - 1)

    def members(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.n) if self.mask >> v & 1)

    def __contains__(self, voter: int) -> bool:
        return 0 <= voter < self.n and bool(self.mask >> voter & 1)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def with_member(self, voter: int) -> "Coalition":
        return Coalition(self.n, self.mask | 1 << voter)

    def without_member(self, voter: int) -> "Coalition":
        return Coalition(self.n, self.mask & ~(1 << voter))


@runtime_checkable
class EvaluableGame(Protocol):
    """Anything with voters and a 0/1 characteristic function over masks."""

    @property
    def n_voters(self) -> int: ...

    def value_of(self, coalition_mask: int) -> int: ...


def active_agents(election: LiquidElection, coalition: Coalition) -> Coalition:
    """Members of the coalition whose whole delegation chain it contains."""
    chain_mask = election.forest.chain_mask
    mask = 0
    for v in coalition.members():
        if chain_mask[v] & coalition.mask == chain_mask[v]:
            mask |= 1 << v
    return Coalition(coalition.n, mask)


def coalition_weight(election: LiquidElection, coalition: Coalition) -> int:
    """Total weight of the coalition's active members."""
    return election.coalition_weight_of_mask(coalition.mask)


def char_value(election: LiquidElection, coalition: Coalition) -> int:
    """1 if the coalition wins (active weight reaches the quota), else 0."""
    return election.value_of(coalition.mask)


def is_swing(election: LiquidElection, voter: int, coalition: Coalition) -> bool:
    """Does adding ``voter`` flip the coalition from losing to winning?

    The voter must not already belong to the coalition.
    """
    if voter in coalition:
        raise MemberAlreadyInCoalition(f"voter {voter} is already in the coalition")
    return (
        election.value_of(coalition.mask) == 0
        and election.value_of(coalition.mask | 1 << voter) == 1
    )


def is_distant(election: LiquidElection, voter: int) -> bool:
    """True when the voter's proxies alone already win, making the voter a dummy.

    If the coalition of the voter's proper chain (everyone the ballot passes
    through, excluding the voter) already reaches the quota, no coalition is
    ever swung by the voter.
    """
    proxies = election.forest.proxies_of(voter)
    mask = 0
    for u in proxies:
        mask |= 1 << u
    return election.coalition_weight_of_mask(mask) >= election.quota


# --------------------------------------------------------------------------
# Composition of two elections over a shared sub-electorate
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ComposedGame:
    """Conjunction or disjunction of two elections glued on shared voters.

    The joint ground set keeps part one's voters ``0..n1-1`` and appends the
    non-shared voters of part two in ascending id order.  A joint coalition
    wins the conjunction when its restriction to each part wins that part's
    election, and the disjunction when either restriction wins.
    """

    mode: str  # "and" | "or"
    part_one: LiquidElection
    part_two: LiquidElection
    shared: tuple[tuple[int, int], ...]  # (id in part one, id in part two)
    joint_of_two: tuple[int, ...]  # part-two id -> joint id

    @property
    def n_voters(self) -> int:
        return self.part_one.n + self.part_two.n - len(self.shared)

    def part_masks(self, joint_mask: int) -> tuple[int, int]:
        one_mask = joint_mask & (1 << self.part_one.n) - 1
        two_mask = 0
        for j, joint in enumerate(self.joint_of_two):
            if joint_mask >> joint & 1:
                two_mask |= 1 << j
        return one_mask, two_mask

    def value_of(self, coalition_mask: int) -> int:
        one_mask, two_mask = self.part_masks(coalition_mask)
        a = self.part_one.value_of(one_mask)
        b = self.part_two.value_of(two_mask)
        if self.mode == "and":
            return a & b
        return a | b

    def joint_id_of_one(self, voter: int) -> int:
        return voter

    def joint_id_of_two(self, voter: int) -> int:
        return self.joint_of_two[voter]


def compose(
    part_one: LiquidElection,
    part_two: LiquidElection,
    mode: str,
    shared: Mapping[int, int] | Iterable[tuple[int, int]],
) -> ComposedGame:
    """Glue two elections along shared voters, as a conjunction or disjunction.

    ``shared`` maps ids in part one to ids in part two.  Shared voters must
    carry equal weights and make matching delegation choices: either both
    vote themselves, or both delegate — and then the two targets must again
    be the same shared voter.  Anything else raises
    :class:`IncompatibleOverlap`.
    """
    if mode not in ("and", "or"):
        raise ValueError(f"mode must be 'and' or 'or', got {mode!r}")
    pairs = tuple(sorted(shared.items())) if isinstance(shared, Mapping) else tuple(sorted(shared))
    one_to_two = dict(pairs)
    if len(one_to_two) != len(pairs):
        raise IncompatibleOverlap("a part-one voter is shared twice")
    if len(set(one_to_two.values())) != len(pairs):
        raise IncompatibleOverlap("a part-two voter is shared twice")
    for i, j in pairs:
        if not (0 <= i < part_one.n and 0 <= j < part_two.n):
            raise IncompatibleOverlap(f"shared pair ({i}, {j}) out of range")
        if part_one.weights[i] != part_two.weights[j]:
            raise IncompatibleOverlap(
                f"shared voter ({i}, {j}) has weights "
                f"{part_one.weights[i]} != {part_two.weights[j]}"
            )
        c1 = part_one.profile.choices[i]
        c2 = part_two.profile.choices[j]
        if (c1 is SELF) != (c2 is SELF):
            raise IncompatibleOverlap(f"shared voter ({i}, {j}) disagrees on delegating")
        if c1 is not SELF:
            if c1 not in one_to_two or one_to_two[c1] != c2:
                raise IncompatibleOverlap(
                    f"shared voter ({i}, {j}) delegates outside the shared set "
                    f"or to mismatched targets"
                )

    two_to_one = {j: i for i, j in pairs}
    joint_of_two = []
    next_id = part_one.n
    for j in range(part_two.n):
        if j in two_to_one:
            joint_of_two.append(two_to_one[j])
        else:
            joint_of_two.append(next_id)
            next_id += 1
    game = ComposedGame(
        mode=mode,
        part_one=part_one,
        part_two=part_two,
        shared=pairs,
        joint_of_two=tuple(joint_of_two),
    )
    if game.n_voters > COALITION_CAPACITY:
        raise ValueError(f"composed game exceeds {COALITION_CAPACITY} voters")
    return game
