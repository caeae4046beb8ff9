"""Reply graphs and acyclicity analysis.

The central object is the reply graph of a game under a policy: one node
per action profile, one edge per allowed single-voter move. On top of it:

* ``is_fip`` - is the graph acyclic (every improvement path is finite)?
* ``is_weak_fip`` - can every node reach a sink (some path converges,
  under a favourable scheduler)?
* ``is_restricted_fip`` - can a scheduler fix, per (state, voter), ONE of
  the voter's allowed actions so that the restricted graph is acyclic?
* ``from_state`` - the same three questions relative to a start state;
* ``longest_convergence_path`` - worst-case path length of acyclic graphs;
* ``classify_game`` / ``classify_game_form`` - bundled reports, the form
  variant quantifying over preference profiles (and sampled utilities);
* ``conjecture_scan`` - randomized search for counterexamples on families
  whose status is open.

Results carry certificates: a concrete edge cycle when acyclicity fails, a
selection map when a restriction exists, an exhaustion record when none
does. Everything here is pure: inputs are immutable, nothing is cached in
module state, and iteration orders are fixed, so identical inputs give
identical reports (and calls are safe to run concurrently).
"""

from __future__ import annotations

import itertools
import os
import random
from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Optional, Sequence

from .core import (
    ConfigurationError,
    Game,
    GameSpecError,
    LimitError,
    PluralityForm,
    PreferenceOrder,
    Profile,
    TieBreak,
    UnsupportedOperationError,
    UtilityVector,
    default_names,
    format_candidate_set,
    format_profile,
    random_consistent_utilities,
)
from .comparators import ComparatorMode, OutcomeComparator, SetComparison
from .dynamics import (
    ReplyKind,
    ReplyPolicy,
    classify_step,
    format_trace,
)

DEFAULT_NODE_LIMIT = 1_000_000
_NODE_LIMIT_ENV = "IVOTE_NODE_LIMIT"


def default_node_limit() -> int:
    """The node budget for graph construction; override via IVOTE_NODE_LIMIT."""
    raw = os.environ.get(_NODE_LIMIT_ENV)
    if raw is None:
        return DEFAULT_NODE_LIMIT
    try:
        value = int(raw)
        if value < 1:
            raise ValueError
    except ValueError:
        raise ConfigurationError(f"{_NODE_LIMIT_ENV} must be a positive integer: {raw!r}")
    return value


@dataclass(frozen=True)
class Edge:
    """A single-voter move: at node ``src``, ``voter`` switches to ``action``."""

    src: int
    voter: int
    action: int
    dst: int


class BetterReplyGraph:
    """The reply graph of a game under a policy.

    Nodes are action profiles (in the lexicographic order of per-voter
    action positions), edges the allowed moves, grouped per node and per
    (node, voter) slot. Immutable once built.
    """

    __slots__ = ("game", "policy", "profiles", "outcomes", "edges", "out_edges", "_index")

    def __init__(self, game, policy, profiles, outcomes, edges, out_edges):
        self.game = game
        self.policy = policy
        self.profiles = profiles
        self.outcomes = outcomes
        self.edges = edges
        self.out_edges = out_edges
        self._index = {p: i for i, p in enumerate(profiles)}

    @property
    def num_nodes(self) -> int:
        return len(self.profiles)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def node_of(self, profile: Profile) -> int:
        try:
            return self._index[tuple(profile)]
        except KeyError:
            self.game.form.validate_profile(tuple(profile))
            raise

    def profile_of(self, node: int) -> Profile:
        return self.profiles[node]

    def slot_edges(self, node: int, voter: int) -> tuple:
        return tuple(
            eid for eid in self.out_edges[node] if self.edges[eid].voter == voter
        )

    def successors(self, node: int):
        return tuple(self.edges[eid].dst for eid in self.out_edges[node])


def build_graph(
    game: Game,
    policy: ReplyPolicy,
    node_limit: Optional[int] = None,
) -> BetterReplyGraph:
    """Materialize the reply graph; raises LimitError beyond ``node_limit``
    (the environment default when None)."""
    if node_limit is None:
        node_limit = default_node_limit()
    form = game.form
    n = game.n
    acts = [form.actions(v) for v in range(n)]
    sizes = [len(row) for row in acts]
    total = prod(sizes)
    if total > node_limit:
        raise LimitError(
            f"state space has {total} profiles, above the limit of {node_limit}"
        )
    profiles = tuple(itertools.product(*acts))
    outcomes = tuple(form.outcome(p) for p in profiles)
    comp = OutcomeComparator(game, policy.comparator)
    # stride of voter v: how far one step in their action list moves the index
    strides = [1] * n
    for v in range(n - 2, -1, -1):
        strides[v] = strides[v + 1] * sizes[v + 1]
    pos_of = [{a: k for k, a in enumerate(row)} for row in acts]
    kind = policy.kind
    SB = SetComparison.STRICTLY_BETTER
    edges = []
    out_edges = [[] for _ in range(total)]
    for i, p in enumerate(profiles):
        out_i = outcomes[i]
        for v in range(n):
            stride = strides[v]
            base = i - pos_of[v][p[v]] * stride
            improving = []
            for k, a in enumerate(acts[v]):
                if a == p[v]:
                    continue
                j = base + k * stride
                if comp.compare(v, outcomes[j], out_i) is SB:
                    improving.append((a, j))
            if not improving:
                continue
            if kind is not ReplyKind.BETTER:
                if kind is ReplyKind.DIRECT:
                    improving = [
                        (a, j)
                        for a, j in improving
                        if (c := form.action_candidate(v, a)) is not None
                        and c in outcomes[j]
                    ]
                else:  # BEST or DIRECT_BEST: outcome-maximal better replies
                    improving = [
                        (a, j)
                        for a, j in improving
                        if not any(
                            jj != j
                            and comp.compare(v, outcomes[jj], outcomes[j]) is SB
                            for _, jj in improving
                        )
                    ]
                    if kind is ReplyKind.DIRECT_BEST:
                        direct = [
                            (a, j)
                            for a, j in improving
                            if (c := form.action_candidate(v, a)) is not None
                            and c in outcomes[j]
                        ]
                        improving = (
                            [
                                min(
                                    direct,
                                    key=lambda aj: form.action_candidate(v, aj[0]),
                                )
                            ]
                            if direct
                            else []
                        )
            for a, j in improving:
                eid = len(edges)
                edges.append(Edge(i, v, a, j))
                out_edges[i].append(eid)
    return BetterReplyGraph(
        game, policy, profiles, outcomes, tuple(edges), tuple(map(tuple, out_edges))
    )


def sinks(graph: BetterReplyGraph) -> tuple:
    """Node ids with no outgoing edge, ascending."""
    return tuple(i for i in range(graph.num_nodes) if not graph.out_edges[i])


def nash_equilibria(
    game: Game,
    comparator: Optional[ComparatorMode] = None,
    node_limit: Optional[int] = None,
) -> tuple:
    """Profiles at which no voter has any better reply."""
    from .dynamics import default_comparator

    mode = comparator if comparator is not None else default_comparator(game)
    graph = build_graph(game, ReplyPolicy(ReplyKind.BETTER, mode), node_limit)
    return tuple(graph.profiles[i] for i in sinks(graph))


# ---------------------------------------------------------------------------
# acyclicity


@dataclass(frozen=True)
class FipResult:
    """Acyclicity verdict; ``cycle`` is a closed edge walk when it fails."""

    holds: bool
    cycle: Optional[tuple] = None


def _kahn_remaining(num_nodes: int, out_edges, edges, alive=None):
    """Nodes left after peeling indegree-0 nodes; empty iff acyclic on
    ``alive`` (all nodes when None)."""
    if alive is None:
        indeg = [0] * num_nodes
        for eids in out_edges:
            for eid in eids:
                indeg[edges[eid].dst] += 1
        queue = [i for i in range(num_nodes) if indeg[i] == 0]
        remaining = num_nodes
    else:
        indeg = {}
        for i in alive:
            for eid in out_edges[i]:
                dst = edges[eid].dst
                if dst in alive:
                    indeg[dst] = indeg.get(dst, 0) + 1
        queue = [i for i in alive if indeg.get(i, 0) == 0]
        remaining = len(alive)
    while queue:
        i = queue.pop()
        remaining -= 1
        for eid in out_edges[i]:
            dst = edges[eid].dst
            if alive is not None and dst not in alive:
                continue
            indeg[dst] -= 1
            if indeg[dst] == 0:
                queue.append(dst)
    if remaining == 0:
        return frozenset()
    if alive is None:
        return frozenset(i for i in range(num_nodes) if indeg[i] > 0)
    return frozenset(i for i in alive if indeg.get(i, 0) > 0)


def _cyclic_core(graph: BetterReplyGraph, core_nodes) -> frozenset:
    """Drop nodes downstream of every cycle (the source peel keeps anything
    reachable from a cycle, sinks included) so that each surviving node has
    a successor inside the set."""
    core = set(core_nodes)
    outdeg = {}
    preds = {}
    for i in core:
        outdeg[i] = 0
        for eid in graph.out_edges[i]:
            dst = graph.edges[eid].dst
            if dst in core:
                outdeg[i] += 1
                preds.setdefault(dst, []).append(i)
    queue = [i for i in core if outdeg[i] == 0]
    removed = set()
    while queue:
        i = queue.pop()
        removed.add(i)
        for src in preds.get(i, ()):
            outdeg[src] -= 1
            if outdeg[src] == 0:
                queue.append(src)
    return frozenset(core - removed)


def _extract_cycle(graph: BetterReplyGraph, core_nodes) -> tuple:
    """Walk inside the cyclic core until a node repeats; return that loop."""
    core_nodes = _cyclic_core(graph, core_nodes)
    start = min(core_nodes)
    path = [start]
    path_edges = []
    seen = {start: 0}
    node = start
    while True:
        eid = next(
            e for e in graph.out_edges[node] if graph.edges[e].dst in core_nodes
        )
        node = graph.edges[eid].dst
        path_edges.append(eid)
        if node in seen:
            k = seen[node]
            return tuple(graph.edges[e] for e in path_edges[k:])
        seen[node] = len(path)
        path.append(node)


def is_fip(graph: BetterReplyGraph, alive=None) -> FipResult:
    """Whether every improvement path (within ``alive``, if given) is finite."""
    core = _kahn_remaining(graph.num_nodes, graph.out_edges, graph.edges, alive)
    if not core:
        return FipResult(True)
    return FipResult(False, _extract_cycle(graph, core))


@dataclass(frozen=True)
class WeakFipResult:
    """Reach-a-sink verdict.

    When it holds, ``route[node]`` is an edge id stepping toward a sink
    (None at sinks), a memoryless scheduler witnessing convergence. When it
    fails, ``unreachable`` lists the nodes from which no sink is reachable.
    """

    holds: bool
    route: Optional[tuple] = None
    unreachable: tuple = ()


def is_weak_fip(graph: BetterReplyGraph, alive=None) -> WeakFipResult:
    nodes = range(graph.num_nodes) if alive is None else alive
    node_set = None if alive is None else frozenset(alive)
    incoming = {}
    sink_nodes = []
    for i in nodes:
        outs = [
            eid
            for eid in graph.out_edges[i]
            if node_set is None or graph.edges[eid].dst in node_set
        ]
        if not outs:
            sink_nodes.append(i)
        for eid in outs:
            incoming.setdefault(graph.edges[eid].dst, []).append(eid)
    route = {i: None for i in sink_nodes}
    frontier = list(sink_nodes)
    while frontier:
        nxt = []
        for i in frontier:
            for eid in incoming.get(i, ()):
                src = graph.edges[eid].src
                if src not in route:
                    route[src] = eid
                    nxt.append(src)
        frontier = nxt
    total = graph.num_nodes if alive is None else len(node_set)
    if len(route) == total:
        if alive is None:
            return WeakFipResult(True, tuple(route[i] for i in range(graph.num_nodes)))
        return WeakFipResult(True, None)
    bad = tuple(sorted(i for i in nodes if i not in route))
    return WeakFipResult(False, None, bad)


# restricted acyclicity ------------------------------------------------------


@dataclass(frozen=True)
class RestrictedFipResult:
    """Existence of a per-(state, voter) action restriction with no cycles.

    ``selection`` maps (node, voter) slots to the chosen edge id when the
    answer is yes. Otherwise ``forced_cycle`` is a cycle of forced moves
    (slots with a single allowed action, hence contained in EVERY
    restriction), or ``exhausted`` reports that the full choice space was
    searched; ``branches`` counts the assignments tried.
    """

    holds: bool
    selection: Optional[dict] = None
    forced_cycle: Optional[tuple] = None
    exhausted: bool = False
    branches: int = 0

    def certificate(self) -> str:
        if self.holds:
            k = len(self.selection) if self.selection else 0
            return f"restriction over {k} slots with an acyclic move graph"
        if self.forced_cycle is not None:
            states = len(self.forced_cycle)
            return (
                f"forced cycle of length {states}: every restriction keeps it "
                f"(each of its moves is the only allowed action of its slot)"
            )
        return (
            f"exhausted the restriction space ({self.branches} partial "
            f"assignments tried), every choice leaves a cycle"
        )


def _scc_partition(num_nodes: int, successors) -> list:
    """Strongly connected components, iterative Tarjan, deterministic order."""
    index = [0] * num_nodes
    low = [0] * num_nodes
    on_stack = [False] * num_nodes
    visited = [False] * num_nodes
    stack = []
    comps = []
    counter = 1
    for root in range(num_nodes):
        if visited[root]:
            continue
        work = [(root, 0)]
        while work:
            node, pi = work[-1]
            if pi == 0:
                visited[node] = True
                index[node] = low[node] = counter
                counter += 1
                stack.append(node)
                on_stack[node] = True
            recurse = False
            succ = successors(node)
            for k in range(pi, len(succ)):
                nxt = succ[k]
                if not visited[nxt]:
                    work[-1] = (node, k + 1)
                    work.append((nxt, 0))
                    recurse = True
                    break
                if on_stack[nxt]:
                    low[node] = min(low[node], index[nxt])
            if recurse:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == node:
                        break
                comps.append(frozenset(comp))
    return comps


def is_restricted_fip(
    graph: BetterReplyGraph, branch_budget: int = 500_000
) -> RestrictedFipResult:
    """Search for a cycle-free restriction of the reply graph.

    Fast paths: an acyclic graph restricts trivially; a cycle of forced
    moves refutes immediately. Otherwise each strongly connected component
    is searched independently - a slot either picks an edge inside the
    component or escapes it, and only in-component picks can close a cycle.
    """
    slots = {}
    for eid, e in enumerate(graph.edges):
        slots.setdefault((e.src, e.voter), []).append(eid)

    def default_selection():
        return {key: eids[0] for key, eids in slots.items()}

    if is_fip(graph).holds:
        return RestrictedFipResult(True, default_selection())
    # forced moves are in every restriction; a cycle among them is final
    forced = [eids[0] for eids in slots.values() if len(eids) == 1]
    forced_out = [[] for _ in range(graph.num_nodes)]
    for eid in forced:
        forced_out[graph.edges[eid].src].append(eid)
    core = _kahn_remaining(graph.num_nodes, forced_out, graph.edges)
    if core:
        sub = BetterReplyGraph(
            graph.game,
            graph.policy,
            graph.profiles,
            graph.outcomes,
            graph.edges,
            tuple(map(tuple, forced_out)),
        )
        return RestrictedFipResult(
            False, forced_cycle=_extract_cycle(sub, core), branches=0
        )

    comps = [
        c for c in _scc_partition(graph.num_nodes, graph.successors) if len(c) > 1
    ]
    selection = default_selection()
    branches = 0

    for comp in comps:
        # slots of this component that can move inside it
        comp_slots = []
        for (node, voter), eids in sorted(slots.items()):
            if node not in comp:
                continue
            inside = [e for e in eids if graph.edges[e].dst in comp]
            if not inside:
                continue
            escape = next(
                (e for e in eids if graph.edges[e].dst not in comp), None
            )
            choices = ([] if escape is None else [escape]) + inside
            comp_slots.append(((node, voter), escape is not None, choices))
        # fewest options first keeps the search tree narrow
        comp_slots.sort(key=lambda item: (len(item[2]), item[0]))
        chosen_out = {node: [] for node in comp}

        def closes_cycle(src, dst):
            # would dst -> ... -> src exist through already-chosen edges?
            if dst == src:
                return True
            seen = {dst}
            stack = [dst]
            while stack:
                node = stack.pop()
                for eid in chosen_out[node]:
                    nxt = graph.edges[eid].dst
                    if nxt == src:
                        return True
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
            return False

        def solve(k):
            nonlocal branches
            if k == len(comp_slots):
                return True
            (node, voter), has_escape, choices = comp_slots[k]
            for eid in choices:
                branches += 1
                if branches > branch_budget:
                    raise LimitError(
                        f"restriction search exceeded {branch_budget} branches"
                    )
                dst = graph.edges[eid].dst
                inside = dst in comp
                if inside and closes_cycle(node, dst):
                    continue
                if inside:
                    chosen_out[node].append(eid)
                ok = solve(k + 1)
                if inside:
                    chosen_out[node].pop()
                if ok:
                    selection[(node, voter)] = eid
                    return True
            return False

        if not solve(0):
            return RestrictedFipResult(False, exhausted=True, branches=branches)

    return RestrictedFipResult(True, selection, branches=branches)


# ---------------------------------------------------------------------------
# path-length and per-start analysis


def _longest_from(graph: BetterReplyGraph, alive=None) -> list:
    """Longest path length (in steps) from every node; needs acyclicity."""
    node_set = None if alive is None else frozenset(alive)
    length = {}

    def nodes():
        return range(graph.num_nodes) if node_set is None else node_set

    # iterative DFS with memo; graphs are acyclic here so this terminates
    for root in nodes():
        if root in length:
            continue
        stack = [root]
        while stack:
            node = stack[-1]
            if node in length:
                stack.pop()
                continue
            pending = []
            best = 0
            done = True
            for eid in graph.out_edges[node]:
                dst = graph.edges[eid].dst
                if node_set is not None and dst not in node_set:
                    continue
                if dst not in length:
                    pending.append(dst)
                    done = False
                else:
                    best = max(best, 1 + length[dst])
            if done:
                length[node] = best
                stack.pop()
            else:
                stack.extend(pending)
    return length


def longest_convergence_path(graph: BetterReplyGraph) -> int:
    """Length of the longest improvement path; errors on cyclic graphs."""
    verdict = is_fip(graph)
    if not verdict.holds:
        raise UnsupportedOperationError(
            "longest path is undefined on a cyclic reply graph"
        )
    length = _longest_from(graph)
    return max(length.values(), default=0)


def longest_path_from(graph: BetterReplyGraph, node: int) -> int:
    reachable = _forward_closure(graph, node)
    if not is_fip(graph, reachable).holds:
        raise UnsupportedOperationError(
            "longest path is undefined on a cyclic reachable set"
        )
    return _longest_from(graph, reachable)[node]


def _forward_closure(graph: BetterReplyGraph, node: int) -> frozenset:
    seen = {node}
    stack = [node]
    while stack:
        i = stack.pop()
        for eid in graph.out_edges[i]:
            dst = graph.edges[eid].dst
            if dst not in seen:
                seen.add(dst)
                stack.append(dst)
    return frozenset(seen)


@dataclass(frozen=True)
class FromStateResult:
    """FIP / weak-FIP / restricted-FIP relative to one start state."""

    start: Profile
    reachable: int
    has_ne: bool
    fip: bool
    cycle: Optional[tuple]
    weak_fip: bool
    restricted_fip: Optional[bool]
    longest: Optional[int]


def _restricted_from(graph: BetterReplyGraph, start: int, branch_budget: int) -> bool:
    """Is there a restriction whose every play from ``start`` terminates?

    Unlike the global question, slots are only constrained once they become
    reachable under the partial restriction, so choices are made lazily
    along the exploration frontier.
    """
    slots_of = [
        tuple(
            sorted(
                {e.voter for e in (graph.edges[eid] for eid in graph.out_edges[i])}
            )
        )
        for i in range(graph.num_nodes)
    ]
    chosen = {}
    chosen_out = {}
    branches = 0

    def reaches(src, dst):
        if src == dst:
            return True
        seen = {src}
        stack = [src]
        while stack:
            node = stack.pop()
            for eid in chosen_out.get(node, ()):
                nxt = graph.edges[eid].dst
                if nxt == dst:
                    return True
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return False

    def pending_slot():
        # a reachable (node, voter) slot without a decision yet
        seen = {start}
        stack = [start]
        while stack:
            node = stack.pop()
            for voter in slots_of[node]:
                if (node, voter) not in chosen:
                    return node, voter
            for eid in chosen_out.get(node, ()):
                dst = graph.edges[eid].dst
                if dst not in seen:
                    seen.add(dst)
                    stack.append(dst)
        return None

    def solve():
        nonlocal branches
        slot = pending_slot()
        if slot is None:
            return True
        node, voter = slot
        for eid in graph.slot_edges(node, voter):
            branches += 1
            if branches > branch_budget:
                raise LimitError(
                    f"restriction search exceeded {branch_budget} branches"
                )
            dst = graph.edges[eid].dst
            if reaches(dst, node):
                continue  # closing this edge would complete a cycle
            chosen[slot] = eid
            chosen_out.setdefault(node, []).append(eid)
            if solve():
                return True
            chosen_out[node].pop()
            del chosen[slot]
        return False

    return solve()


def from_state(
    graph: BetterReplyGraph,
    start: Profile,
    compute_restricted: bool = True,
    branch_budget: int = 500_000,
) -> FromStateResult:
    """Acyclicity of play starting at ``start`` only."""
    node = graph.node_of(tuple(start))
    reachable = _forward_closure(graph, node)
    sub_sinks = [i for i in reachable if not graph.out_edges[i]]
    fip_verdict = is_fip(graph, reachable)
    weak = is_weak_fip(graph, reachable).holds
    if fip_verdict.holds:
        restricted = True
        longest = _longest_from(graph, reachable)[node]
    else:
        longest = None
        restricted = (
            _restricted_from(graph, node, branch_budget)
            if compute_restricted
            else None
        )
    return FromStateResult(
        start=tuple(start),
        reachable=len(reachable),
        has_ne=bool(sub_sinks),
        fip=fip_verdict.holds,
        cycle=fip_verdict.cycle,
        weak_fip=weak,
        restricted_fip=restricted,
        longest=longest,
    )


# ---------------------------------------------------------------------------
# bundled classification


def hierarchy_holds(
    has_ne: bool, fip: bool, weak_fip: bool, restricted_fip: Optional[bool]
) -> bool:
    """fip => restricted-fip => weak-fip => an equilibrium exists."""
    if fip and restricted_fip is False:
        return False
    if restricted_fip and not weak_fip:
        return False
    if weak_fip and not has_ne:
        return False
    return True


@dataclass(frozen=True)
class GameReport:
    """Full classification of one game under one policy."""

    game: Game
    policy: ReplyPolicy
    graph: BetterReplyGraph
    num_nodes: int
    num_edges: int
    equilibria: tuple
    has_ne: bool
    fip: FipResult
    weak_fip: WeakFipResult
    restricted_fip: RestrictedFipResult
    longest: Optional[int]
    from_starts: tuple
    hierarchy_ok: bool


def classify_game(
    game: Game,
    policy: ReplyPolicy,
    starts: Sequence[Profile] = (),
    node_limit: Optional[int] = None,
    branch_budget: int = 500_000,
) -> GameReport:
    graph = build_graph(game, policy, node_limit)
    sink_ids = sinks(graph)
    fip_verdict = is_fip(graph)
    weak = is_weak_fip(graph)
    restricted = is_restricted_fip(graph, branch_budget)
    longest = None
    if fip_verdict.holds:
        longest = max(_longest_from(graph).values(), default=0)
    reports = tuple(
        from_state(graph, tuple(s), branch_budget=branch_budget) for s in starts
    )
    return GameReport(
        game=game,
        policy=policy,
        graph=graph,
        num_nodes=graph.num_nodes,
        num_edges=graph.num_edges,
        equilibria=tuple(graph.profiles[i] for i in sink_ids),
        has_ne=bool(sink_ids),
        fip=fip_verdict,
        weak_fip=weak,
        restricted_fip=restricted,
        longest=longest,
        from_starts=reports,
        hierarchy_ok=hierarchy_holds(
            bool(sink_ids), fip_verdict.holds, weak.holds, restricted.holds
        ),
    )


@dataclass(frozen=True)
class FormProperty:
    """A universally quantified property of a form with a counterexample."""

    holds: bool
    prefs: Optional[tuple] = None
    utilities: Optional[tuple] = None
    witness: str = ""


@dataclass(frozen=True)
class FormReport:
    form: object
    policy: ReplyPolicy
    scope: str
    games_checked: int
    has_ne: FormProperty
    fip: FormProperty
    weak_fip: FormProperty
    restricted_fip: FormProperty




def classify_game_form(
    form,
    policy: ReplyPolicy,
    sample: Optional[int] = None,
    utility_samples: int = 5,
    seed: int = 0,
    node_limit: Optional[int] = None,
    branch_budget: int = 500_000,
) -> FormReport:
    """Quantify has-NE / FIP / weak-FIP / restricted-FIP over all preference
    profiles of a form (or ``sample`` random ones).

    Comparators that need utilities get ``utility_samples`` random consistent
    utility vectors per preference profile; each sampled game must satisfy
    the property for it to count as holding.
    """
    rng = random.Random(seed)
    m, n = form.m, form.n
    if sample is None:
        # materializing all m! orders is fine here: exhaustive mode is for
        # small m anyway
        orders = [PreferenceOrder(p) for p in itertools.permutations(range(m))]
        pref_iter = itertools.product(orders, repeat=n)
        scope = f"exhaustive over {len(orders) ** n} preference profiles"
    else:
        pref_iter = (
            tuple(PreferenceOrder(rng.sample(range(m), m)) for _ in range(n))
            for _ in range(sample)
        )
        scope = f"{sample} sampled preference profiles (seed {seed})"
    needs_utilities = policy.comparator is ComparatorMode.EXPECTED_UTILITY
    sample_utilities = random_consistent_utilities

    state = {
        "has_ne": FormProperty(True),
        "fip": FormProperty(True),
        "weak_fip": FormProperty(True),
        "restricted_fip": FormProperty(True),
    }
    games_checked = 0

    def note(prop, prefs, utilities, witness):
        if state[prop].holds:
            state[prop] = FormProperty(
                False,
                tuple(p.ranking for p in prefs),
                tuple(u.values for u in utilities) if utilities else None,
                witness,
            )

    for prefs in pref_iter:
        variants = (
            [sample_utilities(prefs, rng) for _ in range(utility_samples)]
            if needs_utilities
            else [None]
        )
        for utilities in variants:
            game = Game(form, prefs, utilities)
            graph = build_graph(game, policy, node_limit)
            games_checked += 1
            sink_ids = sinks(graph)
            if not sink_ids:
                note("has_ne", prefs, utilities, "no equilibrium profile")
            fip_verdict = is_fip(graph)
            if not fip_verdict.holds:
                cyc = ", ".join(
                    format_profile(form, graph.profiles[e.src])
                    for e in fip_verdict.cycle
                )
                note("fip", prefs, utilities, f"cycle through {cyc}")
                weak = is_weak_fip(graph)
                if not weak.holds:
                    bad = format_profile(form, graph.profiles[weak.unreachable[0]])
                    note("weak_fip", prefs, utilities, f"no path to a sink from {bad}")
                if state["restricted_fip"].holds:
                    restricted = is_restricted_fip(graph, branch_budget)
                    if not restricted.holds:
                        note(
                            "restricted_fip",
                            prefs,
                            utilities,
                            restricted.certificate(),
                        )
        if not any(p.holds for p in state.values()):
            break

    return FormReport(
        form=form,
        policy=policy,
        scope=scope,
        games_checked=games_checked,
        has_ne=state["has_ne"],
        fip=state["fip"],
        weak_fip=state["weak_fip"],
        restricted_fip=state["restricted_fip"],
    )


# ---------------------------------------------------------------------------
# direct-move over-approximation


def direct_closure(form, start: Profile, node_limit: Optional[int] = None) -> tuple:
    """All profiles reachable from ``start`` by repeatedly letting any voter
    re-vote onto a candidate that wins after the change.

    Preference-free over-approximation of direct-reply reachability: every
    direct reply of every game on this form is such a move, so any property
    holding on this closure holds on all direct-reply paths of all games.
    """
    if node_limit is None:
        node_limit = default_node_limit()
    start = tuple(start)
    form.validate_profile(start)
    seen = {start}
    stack = [start]
    out = []
    while stack:
        p = stack.pop()
        out.append(p)
        for v in range(form.n):
            for a in form.actions(v):
                if a == p[v]:
                    continue
                c = form.action_candidate(v, a)
                if c is None:
                    continue
                q = p[:v] + (a,) + p[v + 1 :]
                if q in seen:
                    continue
                if c in form.outcome(q):
                    if len(seen) >= node_limit:
                        raise LimitError(
                            f"direct closure exceeded {node_limit} profiles"
                        )
                    seen.add(q)
                    stack.append(q)
    return tuple(sorted(out))


# ---------------------------------------------------------------------------
# randomized scanning


@dataclass(frozen=True)
class ScanParams:
    """Sampling ranges for random weighted games."""

    max_candidates: int = 4
    max_voters: int = 5
    weight_bound: int = 5
    score_bound: int = 3
    min_voters: int = 2
    min_candidates: int = 2


@dataclass(frozen=True)
class ScanViolation:
    game: Game
    witness: str


@dataclass(frozen=True)
class ScanReport:
    params: ScanParams
    trials: int
    seed: int
    policy: ReplyPolicy
    prop: str
    checked: int
    violations: tuple


def random_weighted_game(params: ScanParams, rng: random.Random) -> Game:
    m = rng.randint(params.min_candidates, params.max_candidates)
    n = rng.randint(params.min_voters, params.max_voters)
    names = default_names(m)
    weights = tuple(rng.randint(1, params.weight_bound) for _ in range(n))
    scores = tuple(rng.randint(0, params.score_bound) for _ in range(m))
    form = PluralityForm(names, weights, scores, TieBreak.LEXICOGRAPHIC)
    prefs = tuple(
        PreferenceOrder(rng.sample(range(m), m)) for _ in range(n)
    )
    return Game(form, prefs)


def conjecture_scan(
    params: ScanParams,
    trials: int,
    seed: int = 0,
    prop: str = "weak_fip",
    policy: Optional[ReplyPolicy] = None,
    node_limit: Optional[int] = None,
    max_violations: int = 10,
) -> ScanReport:
    """Random search for counterexamples on weighted plurality games.

    ``prop`` is one of has_ne / fip / weak_fip / restricted_fip, checked on
    the reply graph of each sampled game. A violation report is evidence,
    never a theorem; an empty one even less so.
    """
    if prop not in ("has_ne", "fip", "weak_fip", "restricted_fip"):
        raise ConfigurationError(f"unknown property {prop!r}")
    if policy is None:
        policy = ReplyPolicy(ReplyKind.DIRECT, ComparatorMode.LEX_SINGLETON)
    rng = random.Random(seed)
    violations = []
    checked = 0
    for _ in range(trials):
        game = random_weighted_game(params, rng)
        graph = build_graph(game, policy, node_limit)
        checked += 1
        witness = None
        if prop == "has_ne":
            if not sinks(graph):
                witness = "no equilibrium profile"
        elif prop == "fip":
            verdict = is_fip(graph)
            if not verdict.holds:
                witness = "cycle through " + ", ".join(
                    format_profile(game.form, graph.profiles[e.src])
                    for e in verdict.cycle
                )
        elif prop == "weak_fip":
            verdict = is_weak_fip(graph)
            if not verdict.holds:
                witness = "no path to a sink from " + format_profile(
                    game.form, graph.profiles[verdict.unreachable[0]]
                )
        else:
            verdict = is_restricted_fip(graph)
            if not verdict.holds:
                witness = verdict.certificate()
        if witness is not None and len(violations) < max_violations:
            violations.append(ScanViolation(game, witness))
    return ScanReport(
        params=params,
        trials=trials,
        seed=seed,
        policy=policy,
        prop=prop,
        checked=checked,
        violations=tuple(violations),
    )


# ---------------------------------------------------------------------------
# rendering


def _yesno(flag: bool) -> str:
    return "yes" if flag else "no"


def render_game_report(report: GameReport, max_listed: int = 24) -> str:
    form = report.game.form
    lines = [
        "classification report",
        f"form: {form!r}",
        f"policy: {report.policy.describe()}",
        f"states: {report.num_nodes}",
        f"moves: {report.num_edges}",
        f"equilibria: {len(report.equilibria)}",
    ]
    for p in report.equilibria[:max_listed]:
        lines.append(f"  {format_profile(form, p)}")
    if len(report.equilibria) > max_listed:
        lines.append(f"  ... {len(report.equilibria) - max_listed} more")
    lines.append(f"has_ne: {_yesno(report.has_ne)}")
    lines.append(f"fip: {_yesno(report.fip.holds)}")
    if report.fip.cycle:
        lines.append(f"  cycle length {len(report.fip.cycle)}:")
        for rec in _cycle_records(report.graph, report.fip.cycle):
            lines.append("  " + rec)
    if report.longest is not None:
        lines.append(f"longest_path: {report.longest}")
    lines.append(f"weak_fip: {_yesno(report.weak_fip.holds)}")
    if not report.weak_fip.holds:
        bad = report.weak_fip.unreachable[0]
        lines.append(
            f"  no sink reachable from {format_profile(form, report.graph.profiles[bad])}"
        )
    lines.append(f"restricted_fip: {_yesno(report.restricted_fip.holds)}")
    lines.append(f"  {report.restricted_fip.certificate()}")
    for fs in report.from_starts:
        lines.append(f"from {format_profile(form, fs.start)}:")
        lines.append(f"  reachable: {fs.reachable}")
        lines.append(f"  has_ne: {_yesno(fs.has_ne)}")
        lines.append(f"  fip: {_yesno(fs.fip)}")
        lines.append(f"  weak_fip: {_yesno(fs.weak_fip)}")
        if fs.restricted_fip is not None:
            lines.append(f"  restricted_fip: {_yesno(fs.restricted_fip)}")
        if fs.longest is not None:
            lines.append(f"  longest_path: {fs.longest}")
    lines.append(f"hierarchy_ok: {_yesno(report.hierarchy_ok)}")
    return "\n".join(lines)


def _cycle_records(graph: BetterReplyGraph, cycle) -> list:
    form = graph.game.form
    out = []
    for t, e in enumerate(cycle, 1):
        rec = classify_step(
            form,
            graph.profiles[e.src],
            graph.profiles[e.dst],
            graph.outcomes[e.src],
            graph.outcomes[e.dst],
            e.voter,
            step=t,
        )
        out.extend(format_trace(form, [rec]))
    return out


def render_form_report(report: FormReport) -> str:
    lines = [
        "form classification report",
        f"form: {report.form!r}",
        f"policy: {report.policy.describe()}",
        f"scope: {report.scope}",
        f"games checked: {report.games_checked}",
    ]
    for name in ("has_ne", "fip", "weak_fip", "restricted_fip"):
        prop: FormProperty = getattr(report, name)
        lines.append(f"{name}: {_yesno(prop.holds)}")
        if not prop.holds:
            lines.append(f"  preferences: {prop.prefs}")
            if prop.utilities:
                lines.append(f"  utilities: {prop.utilities}")
            lines.append(f"  witness: {prop.witness}")
    return "\n".join(lines)


def render_scan_report(report: ScanReport) -> str:
    lines = [
        "conjecture scan",
        f"property: {report.prop}",
        f"policy: {report.policy.describe()}",
        f"trials: {report.trials} (seed {report.seed})",
        f"games checked: {report.checked}",
        f"violations: {len(report.violations)}",
    ]
    for v in report.violations:
        form = v.game.form
        lines.append(
            f"  m={form.m} n={form.n} weights={form.weights} "
            f"scores={form.initial_scores}"
        )
        lines.append(f"  prefs={tuple(p.ranking for p in v.game.prefs)}")
        lines.append(f"  {v.witness}")
    if not report.violations:
        lines.append("no counterexample found (not a proof)")
    return "\n".join(lines)
