import math

import pytest

from attackpath import (
    AnalysisError,
    AnalysisRequest,
    EdgeKind,
    SearchState,
    ThreatGraph,
    TriggerKind,
    expand_state,
    initial_channels,
    number_actions,
    plan_attacks,
    plan_sort_key,
    precompute_heuristic,
    search,
    validate_request,
)


def shape(path):
    """(push edge, activation kind, consumption kind) per step."""
    return [
        (
            step.push.edge,
            step.activation.kind.value if step.activation else None,
            step.consumption.kind.value if step.consumption else None,
        )
        for step in path.steps
    ]


def numbered(path):
    return [(a.seq, a.edge, a.role, a.cost) for a in number_actions(path)]


# -- worked scenarios, values frozen from the exhaustive oracle --


def test_fig4a_top3(fig4a):
    plans = plan_attacks(fig4a, AnalysisRequest(attacker="attacker", target="car_agent"))
    assert [p.total_cost for p in plans] == [3, 5, 5]
    assert [p.rank for p in plans] == [1, 2, 3]

    best = plans[0]
    assert shape(best) == [("chat", None, None), ("store", None, "automatic_watch")]
    assert numbered(best) == [
        (1, "chat", "push", 1),
        (2, "store", "push", 1),
        (3, "recall", "consumption", 1),
    ]
    assert best.steps[1].cost.total == 2

    assert shape(plans[1]) == [
        ("chat", None, None),
        ("store", None, "automatic_watch"),
        ("store", None, "automatic_watch"),
    ]
    assert shape(plans[2]) == [
        ("chat", None, None),
        ("reply", "already_active", None),
        ("chat", None, None),
        ("store", None, "automatic_watch"),
    ]


def test_fig4a_without_watch(fig4a_nowatch):
    plans = plan_attacks(fig4a_nowatch, AnalysisRequest(attacker="attacker", target="car_agent"))
    assert [p.total_cost for p in plans] == [4, 6, 7]

    best = plans[0]
    assert shape(best) == [("chat", None, None), ("store", None, "consumption")]
    assert numbered(best) == [
        (1, "chat", "push", 1),
        (2, "store", "push", 1),
        (3, "chat", "consumption", 1),
        (4, "recall", "consumption", 1),
    ]
    assert shape(plans[1]) == [
        ("chat", None, None),
        ("reply", "already_active", None),
        ("chat", None, None),
        ("store", None, "consumption"),
    ]
    assert shape(plans[2]) == [
        ("chat", None, None),
        ("store", None, "consumption"),
        ("store", None, "consumption"),
    ]


def test_fig6a_activation_plan(fig6a):
    plans = plan_attacks(fig6a, AnalysisRequest(attacker="attacker", target="car_agent"))
    assert [p.total_cost for p in plans] == [2, 3, 4]

    assert shape(plans[0]) == [("plant", None, "automatic_watch")]

    respond = plans[1]
    assert shape(respond) == [("payload", "activation", None)]
    assert respond.steps[0].cost.activation_trigger == 2
    assert numbered(respond) == [
        (1, "plant", "activation", 1),
        (2, "poll", "activation", 1),
        (3, "hail", "activation", 0),
        (4, "payload", "push", 1),
    ]

    assert shape(plans[2]) == [
        ("plant", None, "automatic_watch"),
        ("hail", None, None),
        ("payload", "already_active", None),
    ]


def test_fig6a_channel_soundness(fig6a):
    # Without the counterpart's communicate edge no channel can ever open,
    # so every respond push disappears from every plan.
    pruned = ThreatGraph(
        nodes=fig6a.nodes,
        edges=tuple(e for e in fig6a.edges if e.id != "hail"),
        watches=fig6a.watches,
        metadata=fig6a.metadata,
    )
    plans = plan_attacks(pruned, AnalysisRequest(attacker="attacker", target="car_agent"))
    assert [p.total_cost for p in plans] == [2]
    assert all(
        step.push.edge != "payload" for plan in plans for step in plan.steps
    )


def test_fig6b_consumption_plan(fig6b):
    plans = plan_attacks(fig6b, AnalysisRequest(attacker="attacker", target="car_agent"))
    assert len(plans) == 1
    only = plans[0]
    assert only.total_cost == 3
    assert shape(only) == [("drop", None, "consumption")]
    assert only.steps[0].consumption.total_cost == 2
    assert numbered(only) == [
        (1, "drop", "push", 1),
        (2, "nudge", "consumption", 1),
        (3, "fetch", "consumption", 1),
    ]


def test_persistence_revisits_are_capped(persistence):
    result = search(persistence, AnalysisRequest(attacker="attacker", target="assistant"))
    assert [p.total_cost for p in result.plans] == [4, 7, 10]
    # The store/recall loop revisits the same key; the cap must both fire
    # and stay bounded, or the cyclic walk space would never terminate.
    assert result.stats.pruned_by_key >= 1
    assert result.stats.max_arrivals_per_key == 3


def test_target_asset_annotation(fig4a):
    request = AnalysisRequest(
        attacker="attacker", target="car_agent", target_asset="privacy-and-personal-data"
    )
    plans = plan_attacks(fig4a, request)
    assert plans[0].target_asset == "privacy-and-personal-data"
    assert plans[0].total_cost == 3


# -- request validation --


@pytest.mark.parametrize(
    "request_kwargs, code",
    [
        (dict(attacker="ghost", target="car_agent"), "UNKNOWN_NODE"),
        (dict(attacker="attacker", target="memory"), "NOT_AN_ACTOR"),
        (dict(attacker="attacker", target="attacker"), "ATTACKER_IS_TARGET"),
        (dict(attacker="car_agent", target="attacker"), "NOT_ATTACKER_CAPABLE"),
        (
            dict(attacker="attacker", target="car_agent", target_asset="reputation-and-dignity"),
            "TARGET_ASSET_MISSING",
        ),
        (dict(attacker="attacker", target="car_agent", k=0), "BAD_BOUNDS"),
        (dict(attacker="attacker", target="car_agent", max_cost=-1), "BAD_BOUNDS"),
        (dict(attacker="attacker", target="car_agent", trigger_depth=-1), "BAD_BOUNDS"),
    ],
)
def test_validate_request_errors(fig4a, request_kwargs, code):
    with pytest.raises(AnalysisError) as exc:
        validate_request(fig4a, AnalysisRequest(**request_kwargs))
    assert exc.value.code == code


def test_validate_request_accepts_defaults(fig4a):
    validate_request(fig4a, AnalysisRequest(attacker="attacker", target="car_agent"))


# -- initial channels metadata --


def test_initial_channels_absent(fig4a):
    assert initial_channels(fig4a) == frozenset()


def channels_graph(fig6a, raw):
    return ThreatGraph(
        nodes=fig6a.nodes,
        edges=fig6a.edges,
        watches=fig6a.watches,
        metadata={"initial_channels": raw},
    )


def test_initial_channels_parsed(fig6a):
    graph = channels_graph(fig6a, '[["car_agent", "attacker"]]')
    assert initial_channels(graph) == frozenset({("car_agent", "attacker")})


def test_initial_channels_change_the_best_plan(fig6a):
    # A pre-existing session makes the respond push free to activate.
    graph = channels_graph(fig6a, '[["car_agent", "attacker"]]')
    plans = plan_attacks(graph, AnalysisRequest(attacker="attacker", target="car_agent"))
    assert plans[0].total_cost == 1
    assert shape(plans[0]) == [("payload", "already_active", None)]


@pytest.mark.parametrize(
    "raw",
    ["not json", '{"a": 1}', '["car_agent", "attacker"]', '[["car_agent"]]', '[["ghost", "attacker"]]', '[["calendar", "attacker"]]'],
)
def test_initial_channels_bad_metadata(fig6a, raw):
    with pytest.raises(AnalysisError) as exc:
        initial_channels(channels_graph(fig6a, raw))
    assert exc.value.code == "BAD_METADATA"


# -- heuristic --


def test_heuristic_values(fig4a):
    h = precompute_heuristic(fig4a, "car_agent")
    assert h["car_agent"] == 0
    assert h["attacker"] == 1
    assert h["memory"] == 0  # read edge relays poison for free


def test_heuristic_unreachable_is_inf(fig4a, persistence):
    h = precompute_heuristic(persistence, "attacker")
    assert h["attacker"] == 0
    # Nobody communicates or writes toward the attacker in this graph.
    assert h["assistant"] == math.inf
    with pytest.raises(KeyError):
        precompute_heuristic(fig4a, "ghost")


def test_unreachable_target_returns_no_plans(persistence):
    result = search(persistence, AnalysisRequest(attacker="attacker", target="assistant", max_cost=0))
    assert result.plans == ()


# -- bounds and k --


def test_k1_returns_only_the_best(fig4a):
    plans = plan_attacks(fig4a, AnalysisRequest(attacker="attacker", target="car_agent", k=1))
    assert len(plans) == 1 and plans[0].total_cost == 3


def test_large_k_is_capped_by_max_cost(fig6b):
    plans = plan_attacks(
        fig6b, AnalysisRequest(attacker="attacker", target="car_agent", k=50, max_cost=6)
    )
    # Only one distinct plan exists within the cost bound.
    assert len(plans) == 1


def test_zero_budgets_mean_no_plans(fig4a):
    for kwargs in (dict(max_cost=0), dict(max_steps=0)):
        plans = plan_attacks(
            fig4a, AnalysisRequest(attacker="attacker", target="car_agent", **kwargs)
        )
        assert plans == []


def test_max_cost_truncates_plan_list(fig4a):
    plans = plan_attacks(
        fig4a, AnalysisRequest(attacker="attacker", target="car_agent", max_cost=3)
    )
    assert [p.total_cost for p in plans] == [3]


def test_max_steps_prefers_shorter_plans(fig4a):
    plans = plan_attacks(
        fig4a, AnalysisRequest(attacker="attacker", target="car_agent", max_steps=3)
    )
    # The 4-step cost-5 plan drops out; the 3-step cost-5 plan stays.
    assert [p.total_cost for p in plans] == [3, 5]
    assert max(len(p.steps) for p in plans) <= 3


# -- expansion --


def test_expand_state_shapes(fig4a_nowatch):
    request = AnalysisRequest(attacker="attacker", target="car_agent")
    start = SearchState("attacker", frozenset(), (), 0)
    first = expand_state(fig4a_nowatch, start, request)
    # Only the communicate is available: no channel for a respond, and the
    # attacker holds no write edge in this graph.
    assert [(step.push.edge, state.frontier) for step, state in first] == [
        ("chat", "car_agent")
    ]
    step, after_chat = first[0]
    assert after_chat.channels == frozenset({("attacker", "car_agent")})

    second = expand_state(fig4a_nowatch, after_chat, request)
    by_edge = {step.push.edge: (step, state) for step, state in second}
    assert set(by_edge) == {"reply", "store"}
    write_step, write_state = by_edge["store"]
    assert write_step.cost.total == 3  # base 1 + compelled chat/recall chain
    assert write_step.consumption.kind is TriggerKind.CONSUMPTION
    assert write_state.frontier == "car_agent"
    reply_step, _ = by_edge["reply"]
    assert reply_step.activation.kind is TriggerKind.ALREADY_ACTIVE


def test_search_is_deterministic(fig4a):
    request = AnalysisRequest(attacker="attacker", target="car_agent")
    a = plan_attacks(fig4a, request)
    b = plan_attacks(fig4a, request)
    assert [plan_sort_key(p) for p in a] == [plan_sort_key(p) for p in b]
    assert a == b


def test_plans_are_sorted_by_documented_order(fig4a, fig6a):
    for graph in (fig4a, fig6a):
        plans = plan_attacks(graph, AnalysisRequest(attacker="attacker", target="car_agent", k=10))
        keys = [plan_sort_key(p) for p in plans]
        assert keys == sorted(keys)
        assert [p.rank for p in plans] == list(range(1, len(plans) + 1))


def test_heuristic_is_admissible_along_plans(fig4a, fig4a_nowatch, fig6a, fig6b):
    # Walking any real plan backwards, the estimate at each intermediate
    # frontier must never exceed the cost actually still to be paid.
    for graph in (fig4a, fig4a_nowatch, fig6a, fig6b):
        h = precompute_heuristic(graph, "car_agent")
        plans = plan_attacks(graph, AnalysisRequest(attacker="attacker", target="car_agent", k=10))
        for plan in plans:
            frontier = "attacker"
            remaining = plan.total_cost
            for step in plan.steps:
                assert h[frontier] <= remaining
                remaining -= step.cost.total
                frontier = (
                    step.consumption.steps[-1].src
                    if step.push.kind is EdgeKind.WRITE
                    else step.push.dst
                )
            assert remaining == 0 and h[frontier] == 0
