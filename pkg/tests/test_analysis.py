"""Reply graphs, acyclicity classes, reports, and scans."""

from math import prod

import pytest

from ivote import (
    BetterReplyGraph,
    ComparatorMode,
    ConfigurationError,
    Game,
    GameParams,
    GameSpecError,
    LimitError,
    PluralityForm,
    PreferenceOrder,
    ReplyKind,
    ReplyPolicy,
    ScanParams,
    TabularForm,
    TieBreak,
    UnsupportedOperationError,
    build_graph,
    catalog_entry,
    classify_game,
    classify_game_form,
    conjecture_scan,
    default_node_limit,
    default_policy,
    direct_closure,
    from_state,
    hierarchy_holds,
    improvement_set,
    is_fip,
    is_restricted_fip,
    is_weak_fip,
    longest_convergence_path,
    nash_equilibria,
    random_game,
    render_form_report,
    render_game_report,
    render_scan_report,
    restricted_action_defining_plurality,
    sinks,
    truthful_profile,
)
from ivote.analysis import longest_path_from
from ivote.dynamics import run_path, SchedulerSpec, RoundRobin

BETTER_LEX = ReplyPolicy(ReplyKind.BETTER, ComparatorMode.LEX_SINGLETON)
BEST_LEX = ReplyPolicy(ReplyKind.BEST, ComparatorMode.LEX_SINGLETON)
DIRECT_LEX = ReplyPolicy(ReplyKind.DIRECT, ComparatorMode.LEX_SINGLETON)
DIRECT_BEST_LEX = ReplyPolicy(ReplyKind.DIRECT_BEST, ComparatorMode.LEX_SINGLETON)
BETTER_SD = ReplyPolicy(ReplyKind.BETTER, ComparatorMode.STOCHASTIC_DOMINANCE)


def fork_game():
    form = PluralityForm(("a", "b", "c"), (1, 1), (0, 2, 1))
    return Game(form, (PreferenceOrder((1, 0, 2)), PreferenceOrder((2, 1, 0))))


def ring_game():
    """A closed 4-cycle of single better replies plus an equilibrium that
    only the states outside the cycle can reach."""
    names = ("a", "b", "c")
    labels = (("p0", "p1", "p2"), ("q0", "q1", "q2"))
    table = {
        (0, 0): {1},
        (1, 0): {0},
        (1, 1): {1},
        (0, 1): {0},
        (2, 0): {2},
        (2, 1): {2},
        (0, 2): {2},
        (1, 2): {2},
        (2, 2): {0},
    }
    form = TabularForm(names, labels, table)
    return Game(form, (PreferenceOrder((0, 1, 2)), PreferenceOrder((1, 0, 2))))


RING_CYCLE = {(0, 0), (1, 0), (1, 1), (0, 1)}


def walk_route(graph, route, start):
    """Follow a weak-FIP route witness to its sink; asserts well-formedness."""
    node = start
    hops = 0
    while route[node] is not None:
        edge = graph.edges[route[node]]
        assert edge.src == node
        node = edge.dst
        hops += 1
        assert hops <= graph.num_nodes
    assert graph.out_edges[node] == ()
    return node


def selection_subgraph(graph, selection):
    out = [[] for _ in range(graph.num_nodes)]
    for (node, voter), eid in selection.items():
        assert eid in graph.slot_edges(node, voter)
        out[node].append(eid)
    return BetterReplyGraph(
        graph.game,
        graph.policy,
        graph.profiles,
        graph.outcomes,
        graph.edges,
        tuple(map(tuple, out)),
    )


# ---------------------------------------------------------------------------
# graph construction


def test_graph_edges_match_improvement_sets():
    sd_game = catalog_entry("random_tie_better_cycle").game
    cases = [
        (fork_game(), BETTER_LEX),
        (fork_game(), BEST_LEX),
        (fork_game(), DIRECT_LEX),
        (fork_game(), DIRECT_BEST_LEX),
        (sd_game, BETTER_SD),
        (sd_game, ReplyPolicy(ReplyKind.DIRECT_BEST, ComparatorMode.STOCHASTIC_DOMINANCE)),
    ]
    for game, policy in cases:
        graph = build_graph(game, policy)
        form = game.form
        assert graph.num_nodes == prod(len(form.actions(v)) for v in range(game.n))
        for node in range(graph.num_nodes):
            p = graph.profile_of(node)
            assert graph.node_of(p) == node
            assert graph.outcomes[node] == form.outcome(p)
            for v in range(game.n):
                want = improvement_set(game, p, v, policy)
                eids = graph.slot_edges(node, v)
                assert tuple(graph.edges[e].action for e in eids) == want
                for e in (graph.edges[e] for e in eids):
                    assert graph.profile_of(e.dst) == p[:v] + (e.action,) + p[v + 1 :]


def test_node_of_rejects_malformed_profiles():
    form = restricted_action_defining_plurality()
    prefs = tuple(PreferenceOrder((0, 1, 2, 3)) for _ in range(3))
    graph = build_graph(Game(form, prefs), BETTER_LEX)
    assert graph.num_nodes == 2 * 2 * 3
    assert graph.profile_of(graph.node_of((2, 1, 0))) == (2, 1, 0)
    with pytest.raises(GameSpecError):
        graph.node_of((0, 0, 0))  # voter 1 cannot vote a
    with pytest.raises(GameSpecError):
        graph.node_of((2, 1))


def test_node_limit_is_enforced():
    game = fork_game()
    with pytest.raises(LimitError):
        build_graph(game, BETTER_LEX, node_limit=8)
    graph = build_graph(game, BETTER_LEX, node_limit=9)
    assert graph.num_nodes == 9


def test_node_limit_environment_override(monkeypatch):
    monkeypatch.delenv("IVOTE_NODE_LIMIT", raising=False)
    assert default_node_limit() == 1_000_000
    monkeypatch.setenv("IVOTE_NODE_LIMIT", "8")
    assert default_node_limit() == 8
    with pytest.raises(LimitError):
        build_graph(fork_game(), BETTER_LEX)
    for bad in ("0", "-3", "many"):
        monkeypatch.setenv("IVOTE_NODE_LIMIT", bad)
        with pytest.raises(ConfigurationError):
            default_node_limit()


def test_sinks_are_exactly_the_equilibria():
    game = fork_game()
    graph = build_graph(game, BETTER_LEX)
    sink_profiles = {graph.profile_of(i) for i in sinks(graph)}
    assert sink_profiles == {(0, 1), (0, 2), (1, 0), (1, 1), (1, 2)}
    assert set(nash_equilibria(game)) == sink_profiles
    for node in range(graph.num_nodes):
        p = graph.profile_of(node)
        movers = [v for v in range(2) if improvement_set(game, p, v, BETTER_LEX)]
        assert bool(movers) == (p not in sink_profiles)


# ---------------------------------------------------------------------------
# acyclicity verdicts


def test_is_fip_returns_closed_improving_cycle():
    entry = catalog_entry("lex_best_cycle")
    graph = build_graph(entry.game, BEST_LEX)
    verdict = is_fip(graph)
    assert not verdict.holds
    cycle = verdict.cycle
    assert len(cycle) >= 2
    for e, nxt in zip(cycle, cycle[1:] + cycle[:1]):
        assert e.dst == nxt.src
        eid = graph.slot_edges(e.src, e.voter)
        assert any(graph.edges[i] == e for i in eid)


def test_is_fip_holds_on_dag():
    graph = build_graph(fork_game(), BETTER_LEX)
    verdict = is_fip(graph)
    assert verdict.holds and verdict.cycle is None


def test_weak_fip_route_reaches_sinks():
    graph = build_graph(catalog_entry("lex_best_cycle").game, BEST_LEX)
    verdict = is_weak_fip(graph)
    assert verdict.holds
    for node in range(graph.num_nodes):
        walk_route(graph, verdict.route, node)


def test_weak_fip_fails_on_closed_ring():
    game = ring_game()
    graph = build_graph(game, BETTER_LEX)
    assert not is_fip(graph).holds
    verdict = is_weak_fip(graph)
    assert not verdict.holds
    assert {graph.profile_of(i) for i in verdict.unreachable} == RING_CYCLE
    # the equilibrium exists, it is just out of reach from the ring
    assert set(nash_equilibria(game)) == {(2, 2)}


def test_restricted_fip_trivial_on_dag():
    graph = build_graph(fork_game(), BETTER_LEX)
    verdict = is_restricted_fip(graph)
    assert verdict.holds
    slots = {(e.src, e.voter) for e in graph.edges}
    assert set(verdict.selection) == slots
    assert is_fip(selection_subgraph(graph, verdict.selection)).holds


def test_restricted_fip_finds_selection_through_search():
    graph = build_graph(catalog_entry("lex_best_cycle").game, BEST_LEX)
    assert not is_fip(graph).holds
    verdict = is_restricted_fip(graph)
    assert verdict.holds
    assert is_fip(selection_subgraph(graph, verdict.selection)).holds
    assert "acyclic move graph" in verdict.certificate()


def test_restricted_fip_forced_cycle():
    graph = build_graph(ring_game(), BETTER_LEX)
    verdict = is_restricted_fip(graph)
    assert not verdict.holds
    assert verdict.forced_cycle is not None and not verdict.exhausted
    assert verdict.branches == 0
    assert {graph.profile_of(e.src) for e in verdict.forced_cycle} == RING_CYCLE
    for e in verdict.forced_cycle:
        assert graph.slot_edges(e.src, e.voter) == (
            graph.out_edges[e.src][graph.out_edges[e.src].index(
                next(i for i in graph.out_edges[e.src] if graph.edges[i] == e)
            )],
        )
    assert "forced cycle" in verdict.certificate()


def test_restricted_fip_exhausted_search():
    entry = catalog_entry("weighted_direct_cycle")
    graph = build_graph(entry.game, entry.policy)
    verdict = is_restricted_fip(graph)
    assert not verdict.holds
    assert verdict.exhausted and verdict.forced_cycle is None
    assert verdict.branches > 0
    assert "exhausted the restriction space" in verdict.certificate()


def test_restricted_fip_branch_budget():
    entry = catalog_entry("weighted_direct_cycle")
    graph = build_graph(entry.game, entry.policy)
    with pytest.raises(LimitError):
        is_restricted_fip(graph, branch_budget=1)


# ---------------------------------------------------------------------------
# path lengths and per-start reports


def test_longest_convergence_path():
    graph = build_graph(fork_game(), BETTER_LEX)
    assert longest_convergence_path(graph) == 3
    assert longest_path_from(graph, graph.node_of((0, 0))) == 3
    assert longest_path_from(graph, graph.node_of((2, 2))) == 1
    assert longest_path_from(graph, graph.node_of((1, 2))) == 0


def test_longest_path_rejects_cycles():
    graph = build_graph(ring_game(), BETTER_LEX)
    with pytest.raises(UnsupportedOperationError):
        longest_convergence_path(graph)
    with pytest.raises(UnsupportedOperationError):
        longest_path_from(graph, graph.node_of((0, 0)))


def test_from_state_on_acyclic_region():
    graph = build_graph(fork_game(), BETTER_LEX)
    res = from_state(graph, (2, 2))
    assert res.start == (2, 2)
    assert res.reachable == 3
    assert res.has_ne and res.fip and res.weak_fip and res.restricted_fip
    assert res.cycle is None
    assert res.longest == 1
    at_sink = from_state(graph, (1, 2))
    assert at_sink.reachable == 1 and at_sink.longest == 0


def test_from_state_inside_ring_sees_no_way_out():
    graph = build_graph(ring_game(), BETTER_LEX)
    res = from_state(graph, (0, 2))
    assert res.reachable == 6
    assert res.has_ne  # the sink is reachable from the start...
    assert not res.fip
    assert res.cycle is not None
    assert not res.weak_fip  # ...but not from the ring states downstream
    assert res.restricted_fip is False
    assert res.longest is None
    lazy = from_state(graph, (0, 2), compute_restricted=False)
    assert lazy.restricted_fip is None


def test_from_state_restriction_can_escape_a_cycle():
    graph = build_graph(catalog_entry("lex_best_cycle").game, BEST_LEX)
    res = from_state(graph, (1, 2))
    assert not res.fip
    assert res.weak_fip
    assert res.restricted_fip is True


def test_hierarchy_holds_table():
    assert hierarchy_holds(True, True, True, True)
    assert hierarchy_holds(True, False, True, True)
    assert hierarchy_holds(True, False, False, False)
    assert not hierarchy_holds(True, True, True, False)
    assert not hierarchy_holds(True, False, False, True)
    assert not hierarchy_holds(False, False, True, False)
    assert hierarchy_holds(True, False, False, None)


# ---------------------------------------------------------------------------
# bundled reports


def test_classify_game_report_consistency():
    seed = 0
    for trial in range(40):
        m = 2 + trial % 3
        n = 2 + trial % 2
        tiebreak = TieBreak.RANDOMIZED if trial % 4 == 0 else TieBreak.LEXICOGRAPHIC
        params = GameParams(
            candidates=m, voters=n, weight_bound=2, score_bound=2, tiebreak=tiebreak
        )
        game = random_game(params, seed + trial)
        kind = (ReplyKind.BETTER, ReplyKind.DIRECT, ReplyKind.BEST)[trial % 3]
        policy = default_policy(game, kind)
        report = classify_game(game, policy, starts=(truthful_profile(game),))
        assert report.hierarchy_ok
        assert report.has_ne == bool(report.equilibria)
        assert (report.longest is not None) == report.fip.holds
        if report.fip.holds:
            assert report.weak_fip.holds and report.restricted_fip.holds
        if report.weak_fip.holds:
            for node in range(report.graph.num_nodes):
                walk_route(report.graph, report.weak_fip.route, node)
        if report.restricted_fip.holds:
            sub = selection_subgraph(report.graph, report.restricted_fip.selection)
            assert is_fip(sub).holds
        fs = report.from_starts[0]
        assert hierarchy_holds(fs.has_ne, fs.fip, fs.weak_fip, fs.restricted_fip)
        assert fs.reachable <= report.num_nodes


def test_render_game_report_mentions_the_verdicts():
    game = ring_game()
    report = classify_game(game, BETTER_LEX, starts=((2, 0),))
    text = render_game_report(report)
    assert "classification report" in text
    assert "has_ne: yes" in text
    assert "fip: no" in text
    assert "weak_fip: no" in text
    assert "restricted_fip: no" in text
    assert "forced cycle" in text
    assert "hierarchy_ok: yes" in text
    assert "from (p2,q0):" in text


def test_classify_game_form_exhaustive_finds_ring_prefs():
    form = ring_game().form
    report = classify_game_form(form, BETTER_LEX)
    # all four properties falsify early: the sweep stops at the fourth
    # profile, whose game has no equilibrium at all
    assert report.games_checked == 4
    assert report.scope.startswith("exhaustive over 36")
    assert not report.has_ne.holds
    assert report.has_ne.prefs == ((0, 1, 2), (1, 2, 0))
    assert not report.fip.holds
    assert not report.weak_fip.holds
    assert not report.restricted_fip.holds
    assert report.weak_fip.prefs == ((0, 1, 2), (1, 0, 2))
    text = render_form_report(report)
    assert "form classification report" in text
    assert "cycle through" in text.replace("\n", " ")
    assert "no path to a sink" in text
    assert "no equilibrium profile" in text


def test_classify_game_form_sampled_mode_counts():
    form = PluralityForm(("a", "b"), (1, 1))
    report = classify_game_form(form, BETTER_LEX, sample=7, seed=3)
    assert report.games_checked == 7
    assert report.scope == "7 sampled preference profiles (seed 3)"
    assert report.fip.holds


def test_classify_game_form_utility_sampling_multiplies_games():
    form = PluralityForm(("a", "b"), (1, 1), (0, 0), TieBreak.RANDOMIZED)
    policy = ReplyPolicy(ReplyKind.BETTER, ComparatorMode.EXPECTED_UTILITY)
    report = classify_game_form(form, policy, utility_samples=3)
    assert report.games_checked == 4 * 3


# ---------------------------------------------------------------------------
# direct closure


def test_direct_closure_contains_direct_reply_reachability():
    form = PluralityForm(("a", "b", "c"), (1, 1), (1, 0, 0))
    start = (1, 2)
    closure = set(direct_closure(form, start))
    assert start in closure
    orders = [
        (PreferenceOrder((0, 1, 2)), PreferenceOrder((2, 1, 0))),
        (PreferenceOrder((1, 2, 0)), PreferenceOrder((0, 2, 1))),
        (PreferenceOrder((2, 0, 1)), PreferenceOrder((1, 0, 2))),
    ]
    for prefs in orders:
        game = Game(form, prefs)
        graph = build_graph(game, DIRECT_LEX)
        node = graph.node_of(start)
        seen = {node}
        stack = [node]
        while stack:
            i = stack.pop()
            for dst in graph.successors(i):
                if dst not in seen:
                    seen.add(dst)
                    stack.append(dst)
        assert {graph.profile_of(i) for i in seen} <= closure


def test_direct_closure_respects_node_limit():
    form = PluralityForm(("a", "b", "c"), (1, 1), (1, 0, 0))
    with pytest.raises(LimitError):
        direct_closure(form, (1, 2), node_limit=1)


# ---------------------------------------------------------------------------
# scanning


def test_conjecture_scan_is_deterministic_and_witnesses_verify():
    params = ScanParams(max_candidates=3, max_voters=3, weight_bound=3, score_bound=2)
    first = conjecture_scan(params, trials=25, seed=11, prop="fip", policy=BETTER_LEX)
    second = conjecture_scan(params, trials=25, seed=11, prop="fip", policy=BETTER_LEX)
    assert render_scan_report(first) == render_scan_report(second)
    assert first.checked == 25
    assert first.violations, "expected better-reply cycles among weighted games"
    for violation in first.violations:
        graph = build_graph(violation.game, BETTER_LEX)
        assert not is_fip(graph).holds
        assert violation.witness.startswith("cycle through")


def test_conjecture_scan_weak_fip_default_policy():
    params = ScanParams(max_candidates=3, max_voters=4, weight_bound=4, score_bound=2)
    report = conjecture_scan(params, trials=20, seed=5)
    assert report.prop == "weak_fip"
    assert report.policy.kind is ReplyKind.DIRECT
    assert report.checked == 20
    text = render_scan_report(report)
    assert "conjecture scan" in text
    if not report.violations:
        assert "no counterexample found (not a proof)" in text
    with pytest.raises(ConfigurationError):
        conjecture_scan(params, trials=1, prop="converges")
