"""Maximizing the weight a voter casts: exact and parameterized solvers.

A voter casts ballots only as a root of its delegation tree, so every solver
here looks for a profile — within a budget of delegation changes — in which
the target votes personally and the weight of its tree reaches a threshold.
Four routes cover different parameter regimes:

* ``wmaxp_exact`` — exhaustive over the change neighborhood (small n).
* ``solve_full_support`` — threshold equals the total weight, so the tree
  must span everyone; reduces to a cheapest spanning arborescence.
* ``solve_xp_reqbar`` — parameterized by the weight *excluded* from the
  tree; enumerates light exclusion sets and solves full support on the rest.
* ``solve_fpt_colorcoding`` — Monte-Carlo color coding, parameterized by the
  weight still *missing*; answers "yes" only on a verified witness.
* ``vbamw`` — approximation that may overspend the budget by a (1 + eps)
  factor while keeping a provable fraction of the optimum weight.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, exp, log

import numpy as np

from .bribery import (
    ENUMERATION_VOTER_LIMIT,
    NEIGHBORHOOD_CAP,
    enumerate_neighborhood,
    neighborhood_size,
)
from .core import SELF, DelegationProfile, LiquidElection, build_forest
from .errors import (
    InstanceTooLargeForEnumeration,
    NoSpanningArborescence,
    ParameterTooLarge,
)

XP_EXCLUSION_LIMIT = 6
FPT_REQUIREMENT_LIMIT = 8
EXCLUSION_SET_CAP = 200_000
TRIM_FALLBACK_LIMIT = 12


@dataclass(frozen=True)
class WeightMaxProblem:
    """Reach ``tau`` ballots behind ``target`` with at most ``budget`` changes."""

    election: LiquidElection
    target: int
    budget: int
    tau: int

    def __post_init__(self):
        if self.tau < 1:
            raise ValueError("threshold must be at least 1")
        if self.budget < 0:
            raise ValueError("budget must be non-negative")
        if not 0 <= self.target < self.election.n:
            raise ValueError(f"target {self.target} out of range")

    @property
    def is_follower(self) -> bool:
        return self.election.profile.choices[self.target] is not SELF

    @property
    def k_eff(self) -> int:
        """Changes left after making the target vote personally."""
        return self.budget - (1 if self.is_follower else 0)

    @property
    def base_support(self) -> int:
        """Weight already delegated (transitively) to the target."""
        return self.election.forest.subtree_weight[self.target]

    @property
    def req(self) -> int:
        """Weight still missing from the threshold."""
        return self.tau - self.base_support

    @property
    def req_bar(self) -> int:
        """Weight allowed to stay outside the target's tree."""
        return self.election.total_weight - self.tau


@dataclass(frozen=True)
class WeightMaxOutcome:
    decision: bool
    profile: DelegationProfile | None
    support: int
    changes: int


@dataclass(frozen=True)
class CostedDigraph:
    """Delegation possibilities, parent to child, priced by change count.

    An arc (p, c) with cost 0 keeps voter c's current delegation to p; cost 1
    means c must be redirected.  Every vertex has at most one zero-cost
    in-arc, so zero-cost cycles cannot occur.
    """

    n: int
    out: tuple[tuple[tuple[int, int], ...], ...]

    def arcs(self):
        for parent, row in enumerate(self.out):
            for child, cost in row:
                yield parent, child, cost


def build_cost_graph(election: LiquidElection) -> CostedDigraph:
    choices = election.profile.choices
    adj: list[list[tuple[int, int]]] = [[] for _ in range(election.n)]
    for child in range(election.n):
        for parent in election.network.out_neighbors[child]:
            adj[parent].append((child, 0 if choices[child] == parent else 1))
    return CostedDigraph(election.n, tuple(tuple(sorted(row)) for row in adj))


def _current_support_no(problem: WeightMaxProblem) -> WeightMaxOutcome:
    current = problem.election.forest.acc_weight[problem.target]
    return WeightMaxOutcome(False, None, current, 0)


def _rebuild(problem: WeightMaxProblem, choices) -> tuple[DelegationProfile, int, int]:
    """Validate a candidate profile; return it with support and change count."""
    profile = DelegationProfile(tuple(choices))
    rebuilt = problem.election.with_profile(profile)
    support = rebuilt.forest.subtree_weight[problem.target]
    changes = len(problem.election.profile.changed_voters(profile))
    return profile, support, changes


# --- exhaustive ------------------------------------------------------------


def wmaxp_exact(problem: WeightMaxProblem) -> WeightMaxOutcome:
    """Best reachable support by brute force over the change neighborhood.

    Maximizes the weight the target casts; ties prefer fewer changes, then
    the lexicographically smallest profile.
    """
    election = problem.election
    if election.n > ENUMERATION_VOTER_LIMIT:
        raise InstanceTooLargeForEnumeration(
            f"{election.n} voters exceed the enumeration limit of {ENUMERATION_VOTER_LIMIT}"
        )
    if neighborhood_size(election, problem.budget) > NEIGHBORHOOD_CAP:
        raise InstanceTooLargeForEnumeration(
            f"change neighborhood exceeds the cap of {NEIGHBORHOOD_CAP}"
        )
    base = election.profile
    best_support = -1
    best_changes = 0
    best_profile = base
    for profile in enumerate_neighborhood(election, problem.budget):
        forest = build_forest(profile, election.weights)
        support = forest.acc_weight[problem.target]
        if support < best_support:
            continue
        changes = len(base.changed_voters(profile))
        if (
            support > best_support
            or changes < best_changes
            or (
                changes == best_changes
                and profile.sort_key() < best_profile.sort_key()
            )
        ):
            best_support = support
            best_changes = changes
            best_profile = profile
    decision = best_support >= problem.tau
    return WeightMaxOutcome(
        decision,
        best_profile if decision else None,
        best_support,
        best_changes if decision else 0,
    )


# --- full support via maximum branching ------------------------------------


def min_cost_root_arborescence(
    nodes, root, arcs
) -> tuple[dict[int, int], int] | None:
    """Cheapest parent assignment giving every node a path from ``root``.

    ``arcs`` holds ``(parent, child, cost)`` triples; parallel arcs are fine
    and arcs into the root are ignored.  Returns ``({child: parent}, total
    cost)`` or None when some node cannot be reached.  Classic cycle
    contraction: give every node its cheapest in-arc; if that closes a
    cycle, shrink it to one super node under reduced costs and repeat,
    re-expanding on the way back.  Each chosen arc carries its original
    endpoint pair through the contractions as an opaque tag.
    """
    node_set = set(nodes)
    work = [
        (u, v, w, (u, v))
        for u, v, w in arcs
        if u != v and v != root and u in node_set and v in node_set
    ]
    free_id = max(node_set, default=root) + 1

    def solve(members: set, work: list, free_id: int):
        best_in: dict = {}
        for u, v, w, tag in work:
            cur = best_in.get(v)
            if cur is None or w < cur[0]:
                best_in[v] = (w, u, tag)
        for v in members:
            if v != root and v not in best_in:
                return None

        # walk parent pointers; a node revisited within one walk closes a cycle
        state = dict.fromkeys(members, 0)
        state[root] = 2
        cycle = None
        for start in members:
            if state[start]:
                continue
            trail = []
            u = start
            while state[u] == 0:
                state[u] = 1
                trail.append(u)
                u = best_in[u][1]
            if state[u] == 1:
                cycle = [u]
                v = best_in[u][1]
                while v != u:
                    cycle.append(v)
                    v = best_in[v][1]
            for v in trail:
                state[v] = 2
            if cycle:
                break

        if cycle is None:
            chosen = best_in.values()
            return [t for _, _, t in chosen], sum(w for w, _, _ in chosen)

        shrunk_away = set(cycle)
        inside_cost = sum(best_in[v][0] for v in cycle)
        super_id = free_id
        reduced = []
        for u, v, w, tag in work:
            if v in shrunk_away and u not in shrunk_away:
                # entering arcs pay the difference to the in-arc they evict
                reduced.append(
                    (u, super_id, w - best_in[v][0], ("enter", super_id, tag, v))
                )
            elif u in shrunk_away and v not in shrunk_away:
                reduced.append((super_id, v, w, tag))
            elif u not in shrunk_away and v not in shrunk_away:
                reduced.append((u, v, w, tag))
        sub = solve((members - shrunk_away) | {super_id}, reduced, free_id + 1)
        if sub is None:
            return None
        sub_tags, sub_cost = sub
        tags = []
        entered = None
        for t in sub_tags:
            if len(t) == 4 and t[0] == "enter" and t[1] == super_id:
                entered = t
            else:
                tags.append(t)
        _enter, _sid, entry_tag, entry_node = entered
        tags.append(entry_tag)
        for v in cycle:
            if v != entry_node:
                tags.append(best_in[v][2])
        return tags, sub_cost + inside_cost

    result = solve(node_set, work, free_id)
    if result is None:
        return None
    tags, total = result
    return {v: u for u, v in tags}, total


def _spanning_parents(
    n_nodes: int, root: int, arcs, k_eff: int
) -> tuple[dict[int, int], int] | None:
    """Parent map of a spanning tree toward ``root`` changing at most
    ``k_eff`` delegations, or None.

    Arc costs are 1 for a changed delegation and 0 for a kept one, so the
    cheapest spanning arborescence changes the fewest delegations.
    """
    result = min_cost_root_arborescence(range(n_nodes), root, arcs)
    if result is None:
        return None
    parents, changes = result
    if changes > k_eff:
        return None
    return parents, changes


def solve_full_support(problem: WeightMaxProblem) -> WeightMaxOutcome:
    """Decide whether every ballot can reach the target within budget.

    Only callable when the threshold equals the total weight, i.e. nothing
    may stay outside the target's tree.
    """
    if problem.req_bar != 0:
        raise ValueError(
            "full-support solving needs the threshold to equal the total weight"
        )
    if problem.k_eff < 0:
        return _current_support_no(problem)
    election = problem.election
    cost = build_cost_graph(election)
    result = _spanning_parents(
        election.n, problem.target, cost.arcs(), problem.k_eff
    )
    if result is None:
        return _current_support_no(problem)
    parents, _ = result
    choices: list = [SELF] * election.n
    for child, parent in parents.items():
        choices[child] = parent
    profile, support, changes = _rebuild(problem, choices)
    return WeightMaxOutcome(True, profile, support, changes)


# --- XP in the excluded weight ----------------------------------------------


def solve_xp_reqbar(problem: WeightMaxProblem) -> WeightMaxOutcome:
    """Enumerate light exclusion sets; solve full support on the rest.

    A witness tree missing weight ``req_bar`` at most leaves out a set X of
    voters with w(X) <= req_bar.  For each candidate X (lightest first) the
    remaining voters must form a spanning tree into the target; voters whose
    current proxy is excluded lose their zero-cost arc, so change counting
    stays exact.  Excluded voters keep their original delegations, which can
    never close a cycle with the rebuilt tree.
    """
    if problem.req_bar < 0:
        return _current_support_no(problem)
    if problem.req_bar > XP_EXCLUSION_LIMIT:
        raise ParameterTooLarge(
            f"excludable weight {problem.req_bar} exceeds the limit of {XP_EXCLUSION_LIMIT}"
        )
    if problem.k_eff < 0:
        return _current_support_no(problem)
    election = problem.election
    n = election.n
    weights = election.weights
    base_choices = election.profile.choices
    others = [v for v in range(n) if v != problem.target]

    subsets: list[tuple[int, int, tuple[int, ...]]] = []

    def grow(start: int, picked: list[int], weight: int):
        subsets.append((weight, len(picked), tuple(picked)))
        if len(subsets) > EXCLUSION_SET_CAP:
            raise InstanceTooLargeForEnumeration(
                f"more than {EXCLUSION_SET_CAP} exclusion sets to enumerate"
            )
        for j in range(start, len(others)):
            v = others[j]
            if weight + weights[v] <= problem.req_bar:
                picked.append(v)
                grow(j + 1, picked, weight + weights[v])
                picked.pop()

    grow(0, [], 0)
    subsets.sort()

    for _, _, excluded in subsets:
        out = set(excluded)
        kept = [v for v in range(n) if v not in out]
        index = {v: i for i, v in enumerate(kept)}
        arcs = []
        for child in kept:
            if child == problem.target:
                continue
            current = base_choices[child]
            if current is not SELF and current in out:
                current = SELF
            for parent in election.network.out_neighbors[child]:
                if parent in out:
                    continue
                arcs.append(
                    (index[parent], index[child], 0 if current == parent else 1)
                )
        result = _spanning_parents(
            len(kept), index[problem.target], arcs, problem.k_eff
        )
        if result is None:
            continue
        parents, _ = result
        choices = list(base_choices)
        choices[problem.target] = SELF
        for child_i, parent_i in parents.items():
            choices[kept[child_i]] = kept[parent_i]
        profile, support, changes = _rebuild(problem, choices)
        return WeightMaxOutcome(True, profile, support, changes)
    return _current_support_no(problem)


# --- FPT in the missing weight (Monte-Carlo color coding) -------------------

_SPLIT_CACHE: dict[int, list[list[tuple[int, int]]]] = {}


def _splits(r: int) -> list[list[tuple[int, int]]]:
    """Per color set: its ordered partitions into two nonempty halves."""
    table = _SPLIT_CACHE.get(r)
    if table is None:
        table = [[] for _ in range(1 << r)]
        for mask in range(1 << r):
            sub = (mask - 1) & mask
            while sub:
                if sub != mask:
                    table[mask].append((mask ^ sub, sub))
                sub = (sub - 1) & mask
        _SPLIT_CACHE[r] = table
    return table


def _collapsed_graph(problem: WeightMaxProblem):
    """Shrink the target's tree to one super vertex.

    No voter outside the tree currently delegates into it (it would be a
    member), so every arc from an outsider to a tree member costs one change;
    one representative member per outsider is kept for witness translation.
    Tree members never profit from delegating outward, so the super vertex
    gets no in-arcs.
    """
    election = problem.election
    forest = election.forest
    choices = election.profile.choices
    tree = set(forest.subtree[problem.target])
    outside = [v for v in range(election.n) if v not in tree]
    index = {v: i for i, v in enumerate(outside)}
    super_idx = len(outside)
    vertex_weights = [election.weights[v] for v in outside]
    vertex_weights.append(problem.base_support)
    arcs: list[tuple[int, int, int]] = []
    representative: dict[int, int] = {}
    for child in outside:
        into_tree = [
            m for m in election.network.out_neighbors[child] if m in tree
        ]
        if into_tree:
            representative[index[child]] = min(into_tree)
            arcs.append((super_idx, index[child], 1))
        for parent in election.network.out_neighbors[child]:
            if parent in tree:
                continue
            arcs.append(
                (index[parent], index[child], 0 if choices[child] == parent else 1)
            )
    return outside, super_idx, vertex_weights, arcs, representative


def _colorful_witness_arcs(
    n_vertices, wts, arcs, colors, r, cost_cap, goal
) -> list[tuple[int, int, int]] | None:
    """Re-run one coloring with backpointers; return the winning tree's arcs."""
    best: dict[tuple[int, int, int], tuple[int, tuple | None]] = {}
    for v in range(n_vertices):
        best[(v, 1 << colors[v], 0)] = (wts[v], None)
    splits = _splits(r)
    masks = sorted(range(1 << r), key=lambda m: m.bit_count())
    for mask in masks:
        if mask.bit_count() < 2:
            continue
        for own, sub in splits[mask]:
            for parent, child, cost in arcs:
                for c1 in range(cost_cap + 1):
                    left = best.get((parent, own, c1))
                    if left is None:
                        continue
                    for c2 in range(cost_cap + 1 - c1 - cost):
                        right = best.get((child, sub, c2))
                        if right is None:
                            continue
                        total = left[0] + right[0]
                        key = (parent, mask, c1 + c2 + cost)
                        cur = best.get(key)
                        if cur is None or total > cur[0]:
                            best[key] = (
                                total,
                                (own, c1, sub, c2, parent, child, cost),
                            )
    root = n_vertices - 1
    hit = None
    for (v, mask, c), (weight, _) in best.items():
        if v == root and weight >= goal:
            hit = (v, mask, c)
            break
    if hit is None:
        return None

    collected: list[tuple[int, int, int]] = []

    def collect(state):
        _, pointer = best[state]
        if pointer is None:
            return
        own, c1, sub, c2, parent, child, cost = pointer
        collected.append((parent, child, cost))
        collect((parent, own, c1))
        collect((child, sub, c2))

    collect(hit)
    return collected


def solve_fpt_colorcoding(
    problem: WeightMaxProblem,
    *,
    delta: float = 0.01,
    seed: int = 0,
) -> WeightMaxOutcome:
    """Randomized search for a small set of outsiders covering the deficit.

    Any inclusion-minimal witness adds at most ``req`` outside voters (each
    weighs at least one), so random colorings with req+1 colors make some
    witness colorful with probability at least e^-(req+1); repeating
    ceil(e^(req+1) * ln(1/delta)) times bounds the miss probability by
    ``delta``.  Answers "yes" only after re-validating an extracted witness,
    so false positives cannot occur; "no" may be wrong with probability at
    most ``delta``.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie strictly between 0 and 1")
    if problem.req_bar < 0 or problem.k_eff < 0:
        return _current_support_no(problem)
    if problem.req > FPT_REQUIREMENT_LIMIT:
        raise ParameterTooLarge(
            f"missing weight {problem.req} exceeds the limit of {FPT_REQUIREMENT_LIMIT}"
        )
    election = problem.election
    if problem.req <= 0:
        choices = list(election.profile.choices)
        choices[problem.target] = SELF
        profile, support, changes = _rebuild(problem, choices)
        return WeightMaxOutcome(True, profile, support, changes)
    if problem.k_eff == 0:
        return _current_support_no(problem)

    # sound refusals: weight that can never reach the target, and the most
    # any k_eff redirections could add (each brings at most one current
    # subtree from outside the tree)
    backward: list[list[int]] = [[] for _ in range(election.n)]
    for child in range(election.n):
        for parent in election.network.out_neighbors[child]:
            backward[parent].append(child)
    seen = {problem.target}
    queue = deque([problem.target])
    while queue:
        v = queue.popleft()
        for u in backward[v]:
            if u not in seen:
                seen.add(u)
                queue.append(u)
    if sum(election.weights[v] for v in seen) < problem.tau:
        return _current_support_no(problem)
    forest = election.forest
    tree = set(forest.subtree[problem.target])
    outside_weights = sorted(
        (forest.subtree_weight[v] for v in range(election.n) if v not in tree),
        reverse=True,
    )
    if problem.base_support + sum(outside_weights[: problem.k_eff]) < problem.tau:
        return _current_support_no(problem)

    outside, super_idx, wts, arcs, representative = _collapsed_graph(problem)
    if not outside or not arcs:
        return _current_support_no(problem)
    n_vertices = super_idx + 1
    r = problem.req + 1
    cost_cap = min(problem.k_eff, problem.req)
    rounds = ceil(exp(r) * log(1.0 / delta))
    rng = random.Random(seed)
    splits = _splits(r)
    masks = sorted(range(1 << r), key=lambda m: m.bit_count())
    neg = -(1 << 40)
    # antidiagonals of the (cost, cost) grid, for the budgeted tree merge
    diagonals = [
        (
            np.array([c1 for c1 in range(s + 1) if c1 <= cost_cap and s - c1 <= cost_cap]),
            np.array([s - c1 for c1 in range(s + 1) if c1 <= cost_cap and s - c1 <= cost_cap]),
        )
        for s in range(cost_cap + 1)
    ]

    done = 0
    while done < rounds:
        batch = min(128, rounds - done)
        colorings = [
            [rng.randrange(r) for _ in range(n_vertices)] for _ in range(batch)
        ]
        table = np.full((batch, n_vertices, 1 << r, cost_cap + 1), neg, dtype=np.int64)
        rows = np.arange(batch)
        for v in range(n_vertices):
            table[rows, v, [1 << colorings[b][v] for b in range(batch)], 0] = wts[v]
        for mask in masks:
            if mask.bit_count() < 2:
                continue
            for own, sub in splits[mask]:
                for parent, child, cost in arcs:
                    left = table[:, parent, own, :]
                    right = table[:, child, sub, :]
                    if left.max() < 0 or right.max() < 0:
                        continue
                    grid = left[:, :, None] + right[:, None, :]
                    for total in range(cost, cost_cap + 1):
                        c1_idx, c2_idx = diagonals[total - cost]
                        cand = grid[:, c1_idx, c2_idx].max(axis=1)
                        np.maximum(
                            table[:, parent, mask, total],
                            cand,
                            out=table[:, parent, mask, total],
                        )
        hits = table[:, super_idx, :, :].reshape(batch, -1).max(axis=1)
        for b in range(batch):
            if hits[b] < problem.tau:
                continue
            tree_arcs = _colorful_witness_arcs(
                n_vertices, wts, arcs, colorings[b], r, cost_cap, problem.tau
            )
            if tree_arcs is None:
                continue
            choices = list(election.profile.choices)
            choices[problem.target] = SELF
            for parent, child, _ in tree_arcs:
                if parent == super_idx:
                    choices[outside[child]] = representative[child]
                else:
                    choices[outside[child]] = outside[parent]
            profile, support, changes = _rebuild(problem, choices)
            if support >= problem.tau and changes <= problem.budget:
                return WeightMaxOutcome(True, profile, support, changes)
        done += batch
    return _current_support_no(problem)


# --- budget-relaxed approximation -------------------------------------------


def _zero_one_distances(cost: CostedDigraph, source: int) -> list[int | None]:
    dist: list[int | None] = [None] * cost.n
    dist[source] = 0
    queue: deque[int] = deque([source])
    while queue:
        v = queue.popleft()
        for child, price in cost.out[v]:
            cand = dist[v] + price
            if dist[child] is None or cand < dist[child]:
                dist[child] = cand
                if price:
                    queue.append(child)
                else:
                    queue.appendleft(child)
    return dist


def _subtree_stats(root, children, arc_cost, prize):
    """Prize and cost of each subtree of an arborescence (arc into the root
    of a subtree included in its cost)."""
    p_total: dict[int, int] = {}
    c_total: dict[int, int] = {}
    order = []
    stack = [root]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(children.get(v, ()))
    for v in reversed(order):
        p_total[v] = prize[v] + sum(p_total[c] for c in children.get(v, ()))
        c_total[v] = arc_cost.get(v, 0) + sum(c_total[c] for c in children.get(v, ()))
    return p_total, c_total


def _parent_closed_subsets(root, children):
    """All vertex sets of an arborescence that contain the root and every
    chosen vertex's parent."""
    subsets = [frozenset([root])]
    frontier = [(frozenset([root]), tuple(children.get(root, ())))]
    while frontier:
        base, options = frontier.pop()
        for i, v in enumerate(options):
            grown = base | {v}
            rest = options[i + 1 :] + tuple(children.get(v, ()))
            subsets.append(grown)
            frontier.append((grown, rest))
    return subsets


def vbamw(problem: WeightMaxProblem, epsilon) -> WeightMaxOutcome:
    """Weight-vs-budget approximation with a relaxed change budget.

    Builds the cheapest tree spanning every voter connectable to the target
    within the remaining budget B; if that tree already costs at most
    (1+eps)B it is returned whole, guaranteeing at least the optimum weight.
    Otherwise low-value subtrees are peeled off until the cost lands in
    [eps*B/2, (1+eps)B], preserving a weight of at least (eps^2*B/(8n))
    times the optimum.  Total changes never exceed (1+eps) times the budget.
    """
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    if problem.k_eff < 0:
        return _current_support_no(problem)
    election = problem.election
    n = election.n
    base_choices = election.profile.choices

    def finish(kept_parents: dict[int, int]) -> WeightMaxOutcome:
        choices = list(base_choices)
        choices[problem.target] = SELF
        for child, parent in kept_parents.items():
            choices[child] = parent
        profile, support, changes = _rebuild(problem, choices)
        return WeightMaxOutcome(support >= problem.tau, profile, support, changes)

    budget = problem.k_eff
    if budget == 0:
        return finish({})
    cost = build_cost_graph(election)
    dist = _zero_one_distances(cost, problem.target)
    reachable = {
        v for v in range(n) if dist[v] is not None and dist[v] <= budget
    }
    if len(reachable) == 1:  # nobody can attach within the budget
        return finish({})
    inside = [
        (parent, child, price)
        for parent, child, price in cost.arcs()
        if parent in reachable and child in reachable
    ]
    result = min_cost_root_arborescence(reachable, problem.target, inside)
    if result is None:  # the BFS construction prevents this
        raise NoSpanningArborescence("no tree spans the budget-reachable voters")
    parent_of, _total = result
    price_of = {(parent, child): price for parent, child, price in inside}
    arc_cost = {
        child: price_of[parent, child] for child, parent in parent_of.items()
    }
    children: dict[int, list[int]] = {}
    for child, parent in parent_of.items():
        children.setdefault(parent, []).append(child)
    prize = {v: election.weights[v] for v in reachable}
    total_prize = sum(prize.values())
    total_cost = sum(arc_cost.values())
    ceiling = (1 + eps) * budget
    if total_cost <= ceiling:
        return finish(parent_of)

    # trim: peel off the subtree with the worst weight-per-change ratio while
    # the remaining cost stays above eps*B/2
    floor = eps * Fraction(budget) / 2
    ratio_start = Fraction(total_prize, total_cost)
    members = set(reachable)
    while total_cost > ceiling:
        p_total, c_total = _subtree_stats(
            problem.target, children, arc_cost, prize
        )
        candidate = None
        candidate_ratio = None
        for v in sorted(members):
            if v == problem.target or c_total[v] < 1:
                continue
            if total_cost - c_total[v] < floor:
                continue
            ratio = Fraction(p_total[v], c_total[v])
            if candidate_ratio is None or ratio < candidate_ratio:
                candidate = v
                candidate_ratio = ratio
        if candidate is None:
            break
        drop = set()
        stack = [candidate]
        while stack:
            u = stack.pop()
            drop.add(u)
            stack.extend(children.get(u, ()))
        members -= drop
        children[parent_of[candidate]].remove(candidate)
        for u in drop:
            children.pop(u, None)
            parent_of.pop(u, None)
            arc_cost.pop(u, None)
        total_prize -= sum(prize[u] for u in drop)
        total_cost = sum(arc_cost.values())

    contract_ok = (
        floor <= total_cost <= ceiling
        and Fraction(total_prize, total_cost) >= eps * ratio_start / 4
    )
    if not contract_ok:
        # exhaustive fallback over the tree's own subtrees; the existence
        # argument for the peel guarantees a subtree in the cost window
        if len(reachable) > TRIM_FALLBACK_LIMIT:
            raise AssertionError("trim contract violated on a large tree")
        full_parent = {c: p for p, c in arborescence.edges()}
        full_children: dict[int, list[int]] = {}
        for child, parent in full_parent.items():
            full_children.setdefault(parent, []).append(child)
        full_cost = {c: d["weight"] for _, c, d in arborescence.edges(data=True)}
        best_set = None
        best_ratio = None
        for subset in _parent_closed_subsets(problem.target, full_children):
            c = sum(full_cost[v] for v in subset if v != problem.target)
            if not floor <= c <= ceiling or c == 0:
                continue
            p = sum(prize[v] for v in subset)
            ratio = Fraction(p, c)
            if best_ratio is None or ratio > best_ratio:
                best_set = subset
                best_ratio = ratio
        if best_set is None:
            raise AssertionError("no subtree lands in the trim cost window")
        members = set(best_set)
        parent_of = {v: full_parent[v] for v in members if v != problem.target}

    return finish({c: p for c, p in parent_of.items() if c in members})
