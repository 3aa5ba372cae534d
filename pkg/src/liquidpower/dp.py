"""Pseudo-polynomial power computation via counting tables over a forest order.

The enumeration in :mod:`liquidpower.exact` is exponential in the number of
voters.  This module instead counts swing coalitions with a dynamic program
over a carefully chosen voter ordering, in time polynomial in the number of
voters and the total weight.

Ordering.  Every tree of the delegation forest is laid out in post-order
(children visited in ascending id), so each voter's subtree occupies the
contiguous block of positions ending at the voter's own position.  Trees not
containing the queried voter come first (ascending root id); the queried
voter's tree comes last.

Tables.  ``F[j][w][s]`` counts the subsets of the first ``j`` voters in that
order that have size ``s`` and *settled weight* ``w`` — the total weight of
members whose delegation chain, up to the root of the already-completed
subtree containing them, lies inside the subset.  Once a prefix covers whole
trees, settled weight coincides with the election's active-member weight.
Closing voter ``u`` (block size ``t``) either leaves ``u`` out — every member
of ``u``'s subtree is then unsettled, so any ``x`` of the ``t-1`` proper
members may pad the subset, in ``C(t-1, x)`` ways — or puts ``u`` in, adding
``u``'s weight on top of the prefix that ends just below ``u``::

    F[j][w][s] = sum_x C(t-1, x) * F[j-t][w][s-x]  +  F[j-1][w-w_u][s-1]

A guru's swing coalitions then split into a part outside its tree (weight
below the quota) and a part inside it (the guru present and settling enough
weight to close the gap); a delegating voter reduces to the guru case on the
sub-election that removes the voters its ballot passes through, with the
quota lowered by their weight (already-spoken-for weight) and coalition sizes
shifted by the number of removed voters.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import SELF, DelegationForest, DelegationProfile, LiquidElection, build_forest
from .exact import IndexReport, MeasureKind, shapley_from_counts


@dataclass(frozen=True)
class SwingCounts:
    """Number of swung coalitions of each size for one voter."""

    per_size: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.per_size)


@dataclass(frozen=True)
class DfsOrdering:
    """Forest layout used by the tables.

    ``sequence[p]`` is the voter at (0-based) position ``p``; ``position`` is
    its inverse.  ``block_size[p]`` is the size of that voter's subtree,
    which occupies positions ``p - block_size[p] + 1 .. p``.  Positions from
    ``boundary`` on hold the tree containing the queried voter.
    """

    sequence: tuple[int, ...]
    position: tuple[int, ...]
    block_size: tuple[int, ...]
    boundary: int


def _postorder(forest: DelegationForest, root: int) -> list[int]:
    children = forest.delegators
    out = []
    stack = [root]
    while stack:
        u = stack.pop()
        out.append(u)
        stack.extend(children[u])  # ascending push -> descending visit
    out.reverse()
    return out


def dfs_order(forest: DelegationForest, voter: int) -> DfsOrdering:
    """Layout with the tree containing ``voter`` last (other trees by root id)."""
    home = forest.guru[voter]
    seq: list[int] = []
    for root in forest.gurus:
        if root != home:
            seq.extend(_postorder(forest, root))
    boundary = len(seq)
    seq.extend(_postorder(forest, home))
    position = [0] * forest.n
    for p, v in enumerate(seq):
        position[v] = p
    block_size = tuple(forest.subtree_size[v] for v in seq)
    return DfsOrdering(
        sequence=tuple(seq),
        position=tuple(position),
        block_size=block_size,
        boundary=boundary,
    )


_BINOM_ROWS: list[list[int]] = [[1]]


def binomial_row(k: int) -> list[int]:
    """Row ``k`` of Pascal's triangle (cached)."""
    while len(_BINOM_ROWS) <= k:
        prev = _BINOM_ROWS[-1]
        _BINOM_ROWS.append(
            [1] + [prev[i] + prev[i + 1] for i in range(len(prev) - 1)] + [1]
        )
    return _BINOM_ROWS[k]


def fill_table(
    weights_seq: list[int],
    block_sizes: list[int],
    weight_cap: int | None = None,
) -> list[list[list[int]]]:
    """All rows ``F[0..m]`` of the counting table described in the module docs.

    ``F[j][w][s]`` is indexed by prefix length, settled weight and subset
    size.  Entries with settled weight above ``weight_cap`` are dropped —
    sound as long as callers only read weights up to the cap, since weight
    only accumulates along the recurrence.  With no cap the table is complete
    and each row ``j`` sums to ``2**j``.
    """
    m = len(weights_seq)
    total = sum(weights_seq)
    cap = total if weight_cap is None else min(weight_cap, total)
    row0 = [[0] * (m + 1) for _ in range(cap + 1)]
    row0[0][0] = 1
    rows = [row0]
    prefix_weight = 0
    for j in range(1, m + 1):
        w_u = weights_seq[j - 1]
        t = block_sizes[j - 1]
        prefix_weight += w_u
        src_skip = rows[j - t]
        src_take = rows[j - 1]
        new = [[0] * (m + 1) for _ in range(cap + 1)]
        w_hi = min(cap, prefix_weight)
        s_hi = j
        if t == 1:
            for w in range(w_hi + 1):
                dst = new[w]
                src = src_skip[w]
                dst[: s_hi + 1] = src[: s_hi + 1]
                if w >= w_u:
                    src_w = src_take[w - w_u]
                    for s in range(1, s_hi + 1):
                        f = src_w[s - 1]
                        if f:
                            dst[s] += f
        else:
            brow = binomial_row(t - 1)
            for w in range(w_hi + 1):
                dst = new[w]
                src = src_skip[w]
                for s in range(s_hi + 1):
                    acc = 0
                    for x in range(min(t - 1, s) + 1):
                        f = src[s - x]
                        if f:
                            acc += brow[x] * f
                    if acc:
                        dst[s] = acc
                if w >= w_u:
                    src_w = src_take[w - w_u]
                    for s in range(1, s_hi + 1):
                        f = src_w[s - 1]
                        if f:
                            dst[s] += f
        rows.append(new)
    return rows


def _fill_weight_table(
    weights_seq: list[int],
    block_sizes: list[int],
    weight_cap: int | None = None,
) -> list[list[int]]:
    """Weight-only variant: ``G[j][w]`` sums ``F[j][w][.]`` over sizes.

    The pad choices collapse into a factor ``2**(t-1)``.
    """
    m = len(weights_seq)
    total = sum(weights_seq)
    cap = total if weight_cap is None else min(weight_cap, total)
    row0 = [0] * (cap + 1)
    row0[0] = 1
    rows = [row0]
    prefix_weight = 0
    for j in range(1, m + 1):
        w_u = weights_seq[j - 1]
        t = block_sizes[j - 1]
        prefix_weight += w_u
        src_skip = rows[j - t]
        src_take = rows[j - 1]
        pad = 1 << t - 1
        w_hi = min(cap, prefix_weight)
        new = [0] * (cap + 1)
        for w in range(w_hi + 1):
            acc = pad * src_skip[w] if src_skip[w] else 0
            if w >= w_u and src_take[w - w_u]:
                acc += src_take[w - w_u]
            new[w] = acc
        rows.append(new)
    return rows


# --------------------------------------------------------------------------
# Swing-coalition counting
# --------------------------------------------------------------------------


def _guru_swing_per_size(
    profile: DelegationProfile,
    weights: tuple[int, ...],
    quota: int,
    target: int,
) -> list[int]:
    """Per-size swing counts for a root voter of the given (sub-)profile."""
    n = profile.n
    forest = build_forest(profile, weights)
    assert forest.guru[target] == target
    order = dfs_order(forest, target)
    b = order.boundary
    outside = list(order.sequence[:b])
    tree = list(order.sequence[b:])
    w_out = [weights[v] for v in outside]
    w_tree = [weights[v] for v in tree]
    blocks_out = list(order.block_size[:b])
    blocks_tree = list(order.block_size[b:])

    out_rows = fill_table(w_out, blocks_out, weight_cap=quota - 1)
    tree_rows = fill_table(w_tree, blocks_tree)
    top_out = out_rows[-1]
    top_tree = tree_rows[-1]
    m_out, m_tree = len(outside), len(tree)
    tree_weight = sum(w_tree)

    # suffix[w][s] = number of tree subsets of size s settling weight >= w
    suffix = [[0] * (m_tree + 1) for _ in range(tree_weight + 2)]
    for w in range(tree_weight, -1, -1):
        above = suffix[w + 1]
        here = top_tree[w]
        suffix[w] = [above[s] + here[s] for s in range(m_tree + 1)]

    per_size = [0] * n
    w_out_hi = min(len(top_out) - 1, quota - 1)
    for w in range(w_out_hi + 1):
        row_out = top_out[w]
        need = max(quota - w, 1)
        if need > tree_weight:
            continue
        row_tree = suffix[need]
        for k in range(m_out + 1):
            c_out = row_out[k]
            if not c_out:
                continue
            for s_in in range(1, m_tree + 1):
                c_in = row_tree[s_in]
                if c_in:
                    per_size[k + s_in - 1] += c_out * c_in
    return per_size


def _guru_total_swings(
    profile: DelegationProfile,
    weights: tuple[int, ...],
    quota: int,
    target: int,
) -> int:
    """Total swing count for a root voter, via the weight-only tables."""
    forest = build_forest(profile, weights)
    assert forest.guru[target] == target
    order = dfs_order(forest, target)
    b = order.boundary
    outside = list(order.sequence[:b])
    tree = list(order.sequence[b:])
    w_out = [weights[v] for v in outside]
    w_tree = [weights[v] for v in tree]

    top_out = _fill_weight_table(w_out, list(order.block_size[:b]), weight_cap=quota - 1)[-1]
    top_tree = _fill_weight_table(w_tree, list(order.block_size[b:]))[-1]
    tree_weight = sum(w_tree)

    suffix = [0] * (tree_weight + 2)
    for w in range(tree_weight, -1, -1):
        suffix[w] = suffix[w + 1] + top_tree[w]

    total = 0
    for w in range(min(len(top_out) - 1, quota - 1) + 1):
        if top_out[w]:
            need = max(quota - w, 1)
            if need <= tree_weight:
                total += top_out[w] * suffix[need]
    return total


def _restrict_past_proxies(
    election: LiquidElection, voter: int
) -> tuple[DelegationProfile, tuple[int, ...], int, int, int] | None:
    """Remove the voters ``voter``'s ballot passes through.

    Returns ``(profile, weights, reduced_quota, new_target_id, removed_count)``
    for the sub-election on the remaining voters, or ``None`` when the removed
    voters' weight already covers the quota (the voter is then a dummy).
    Voters who delegated to a removed voter become roots.
    """
    forest = election.forest
    removed = set(forest.chain[voter][1:])
    reduced_quota = election.quota - sum(election.weights[v] for v in removed)
    if reduced_quota <= 0:
        return None
    kept = [v for v in range(election.n) if v not in removed]
    index = {v: i for i, v in enumerate(kept)}
    choices = []
    for v in kept:
        c = election.profile.choices[v]
        if c is SELF or c in removed:
            choices.append(SELF)
        else:
            choices.append(index[c])
    profile = DelegationProfile(tuple(choices))
    weights = tuple(election.weights[v] for v in kept)
    return profile, weights, reduced_quota, index[voter], len(removed)


def swing_counts_guru(election: LiquidElection, voter: int) -> SwingCounts:
    """Per-size swing counts for a voter that casts its own ballot."""
    if election.forest.guru[voter] != voter:
        raise ValueError(f"voter {voter} delegates; use swing_counts_delegator")
    per_size = _guru_swing_per_size(
        election.profile, election.weights, election.quota, voter
    )
    per_size += [0] * (election.n - len(per_size))
    return SwingCounts(tuple(per_size[: election.n]))


def swing_counts_delegator(election: LiquidElection, voter: int) -> SwingCounts:
    """Per-size swing counts for a delegating voter.

    Works on the sub-election without the voters the ballot passes through;
    every swing coalition there extends uniquely to one of the full election
    by adding those voters back, shifting coalition sizes accordingly.
    """
    n = election.n
    if election.forest.guru[voter] == voter:
        raise ValueError(f"voter {voter} is a root; use swing_counts_guru")
    restricted = _restrict_past_proxies(election, voter)
    if restricted is None:
        return SwingCounts((0,) * n)
    profile, weights, reduced_quota, new_target, shift = restricted
    reduced = _guru_swing_per_size(profile, weights, reduced_quota, new_target)
    per_size = [0] * n
    for s, c in enumerate(reduced):
        if c:
            per_size[s + shift] = c
    return SwingCounts(tuple(per_size))


def swing_counts_dp(election: LiquidElection, voter: int) -> SwingCounts:
    """Per-size swing counts for any voter, via the counting tables."""
    if election.forest.guru[voter] == voter:
        return swing_counts_guru(election, voter)
    return swing_counts_delegator(election, voter)


def banzhaf_dp(election: LiquidElection, voter: int) -> Fraction:
    """Penetration power of a voter, computed by the weight-only tables."""
    forest = election.forest
    if forest.guru[voter] == voter:
        total = _guru_total_swings(
            election.profile, election.weights, election.quota, voter
        )
    else:
        restricted = _restrict_past_proxies(election, voter)
        if restricted is None:
            return Fraction(0)
        profile, weights, reduced_quota, new_target, _ = restricted
        total = _guru_total_swings(profile, weights, reduced_quota, new_target)
    return Fraction(total, 1 << election.n - 1)


def shapley_dp(election: LiquidElection, voter: int) -> Fraction:
    """Pivotal-order power of a voter, computed by the counting tables."""
    counts = swing_counts_dp(election, voter)
    return shapley_from_counts(list(counts.per_size), election.n)


def all_indices_dp(election: LiquidElection, kind: MeasureKind) -> IndexReport:
    """Power values of every voter under one measure, via the tables."""
    kind = MeasureKind(kind)
    if kind is MeasureKind.BANZHAF:
        values = tuple(banzhaf_dp(election, v) for v in range(election.n))
    else:
        values = tuple(shapley_dp(election, v) for v in range(election.n))
    return IndexReport(kind=kind, values=values)
