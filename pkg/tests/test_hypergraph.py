"""Direct checks of the weighted-hypergraph engine."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lcdep import hypergraph
from lcdep.hypergraph import NEG_INF


def build_chain(edge_event_lists):
    """A forest that is a single chain: item k has one edge to item k-1
    (item 0 is a leaf), with the given event-id lists on the edges."""
    n_events = 1 + max((max(e) for e in edge_event_lists if e), default=0)
    events = [("ev", k) for k in range(n_events)]

    def expand(item):
        k = item[1]
        if k == 0:
            return [((), tuple(events[i] for i in edge_event_lists[0]))]
        return [
            ((("it", k - 1),), tuple(events[i] for i in edge_event_lists[k]))
        ]

    return hypergraph.build_forest(("it", len(edge_event_lists) - 1), expand)


@given(
    st.lists(
        st.lists(st.integers(min_value=0, max_value=5), max_size=4),
        min_size=1,
        max_size=6,
    )
)
def test_edge_weights_sum_each_edges_events(edge_event_lists):
    forest = build_chain(edge_event_lists)
    eventw = np.arange(1.0, len(forest.events) + 1.0)
    got = forest.edge_weights(eventw)
    for e in range(forest.n_edges):
        expected = sum(eventw[k] for k in forest.edge_events[e])
        assert got[e] == pytest.approx(expected)


def test_edge_weights_multi_event_edge_before_empty_edge():
    # a two-event edge followed by event-free edges; the vectorized sum must
    # not truncate the first edge's segment
    forest = build_chain([[0, 1], [], []])
    eventw = np.array([2.0, 3.0] + [0.0] * (len(forest.events) - 2))
    got = forest.edge_weights(eventw)
    first = [
        e
        for e in range(forest.n_edges)
        if len(forest.edge_events[e]) == 2
    ]
    assert got[first[0]] == pytest.approx(5.0)
    assert sum(abs(x) for x in got) == pytest.approx(5.0)


def test_inside_logsum_diamond_adds_parallel_edges():
    events = {"a": math.log(0.25), "b": math.log(0.5)}

    def expand(item):
        if item == "goal":
            return [((), (("ev", "a"),)), ((), (("ev", "b"),))]
        raise AssertionError

    forest = hypergraph.build_forest("goal", expand)
    eventw = forest.event_weights(lambda ev: events[ev[1]])
    inside = hypergraph.inside_logsum(forest, eventw)
    assert inside[forest.goal_id] == pytest.approx(math.log(0.75))


def test_cycle_detection():
    def expand(item):
        return [(((item + 1) % 2,), ())] if isinstance(item, int) else []

    with pytest.raises(ValueError):
        hypergraph.build_forest(0, expand)
