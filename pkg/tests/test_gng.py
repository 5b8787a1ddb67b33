"""Core update-rule tests: bootstrap, attraction, aging, insertion, pruning."""

from __future__ import annotations

import math

import numpy as np
import pytest

from conftest import make_gas
from navgas.gng import PROXIMITY, TRAJECTORY, ConfigurationError, Gas, Params, new_gas
from reference import RefGas


def test_new_gas_is_empty():
    g = new_gas(Params())
    assert g.nodes == {}
    assert g.edges == {}
    assert g.tick == 0


def test_default_params():
    p = Params()
    assert p.winner_attraction == 0.03
    assert p.neighbor_attraction == 0.0006
    assert p.error_decay == 10.0
    assert p.max_error == 20000.0
    assert p.max_age == 75
    assert new_gas(Params(max_age=75)).params.max_age == 75


@pytest.mark.parametrize(
    "kwargs, field",
    [
        ({"winner_attraction": 0.0}, "winner_attraction"),
        ({"winner_attraction": 1.5}, "winner_attraction"),
        ({"neighbor_attraction": -0.1}, "neighbor_attraction"),
        ({"error_decay": 0.0}, "error_decay"),
        ({"max_error": 0.0}, "max_error"),
        ({"max_age": 0}, "max_age"),
        ({"edge_mode": "psychic"}, "edge_mode"),
        ({"neighbor_rule": "osmosis"}, "neighbor_rule"),
        ({"max_error": math.inf}, "max_error"),
    ],
)
def test_invalid_params_name_the_bound(kwargs, field):
    with pytest.raises(ConfigurationError, match=field):
        new_gas(Params(**kwargs))


def test_bootstrap_first_node():
    g = new_gas()
    report = g.step((0.0, 0.0, 0.0))
    assert report.winner is None
    assert report.second is None
    assert report.nodes_added == [0]
    assert len(g.nodes) == 1
    assert g.nodes[0].pos == (0.0, 0.0, 0.0)
    assert g.nodes[0].error == 0.0
    assert g.edges == {}
    assert g.tick == 1


def test_bootstrap_edge_appears_with_second_node():
    g = new_gas()
    g.step((0.0, 0.0, 0.0))
    report = g.step((100.0, 0.0, 0.0))
    assert report.winner is None
    assert report.nodes_added == [1]
    assert report.edges_added == [(0, 1, PROXIMITY)]
    assert g.edges == {(0, 1, PROXIMITY): 0}


def test_hand_traced_step():
    # A=(0,0,0) and B=(100,0,0), fresh edge; input at (10,0,0) with defaults.
    g = new_gas()
    g.step((0.0, 0.0, 0.0))
    g.step((100.0, 0.0, 0.0))
    report = g.step((10.0, 0.0, 0.0))

    a, b = g.nodes[0], g.nodes[1]
    assert report.winner == 0
    assert report.second == 1
    assert a.x == pytest.approx(0.3, abs=1e-12)
    assert a.pos[1:] == (0.0, 0.0)
    assert b.x == pytest.approx(99.946, abs=1e-12)
    # error gained 10 and decayed 10 in the same step
    assert a.error == 0.0
    assert b.error == 0.0
    assert g.edges == {(0, 1, PROXIMITY): 1}
    assert g.tick == 3


def test_winner_attraction_is_exact():
    g = new_gas()
    g.step((0.0, 0.0, 0.0))
    g.step((100.0, 0.0, 0.0))
    old = g.nodes[0].pos
    g.step((10.0, -4.0, 7.0))
    expected = tuple(o + 0.03 * (i - o) for o, i in zip(old, (10.0, -4.0, 7.0)))
    assert g.nodes[0].pos == expected


def test_winner_pair_orders_by_distance():
    g = make_gas(nodes=[(0, 0, 0, 0, 0), (1, 5, 0, 0, 0), (2, 9, 0, 0, 0)])
    assert g.winner_pair((1.0, 0.0, 0.0)) == (0, 1)


def test_winner_pair_tie_breaks_to_lowest_id():
    for order in ([(4, 3, 3, 0, 0), (7, 3, 3, 0, 0)], [(7, 3, 3, 0, 0), (4, 3, 3, 0, 0)]):
        g = make_gas(nodes=order)
        assert g.winner_pair((50.0, -2.0, 1.0)) == (4, 7)
        assert g.winner_pair((3.0, 3.0, 0.0)) == (4, 7)


def test_winner_pair_needs_two_nodes():
    g = make_gas(nodes=[(0, 0, 0, 0, 0)])
    with pytest.raises(ValueError):
        g.winner_pair((0.0, 0.0, 0.0))


def test_non_finite_input_rejected_without_mutation():
    g = new_gas()
    g.step((0.0, 0.0, 0.0))
    g.step((100.0, 0.0, 0.0))
    before = g.snapshot()
    for bad in ((math.nan, 0, 0), (0, math.inf, 0), (0, 0, -math.inf)):
        with pytest.raises(ValueError):
            g.step(bad)
    assert g.snapshot() == before
    assert g.tick == 2


def test_refreshed_edge_ends_step_at_age_one():
    g = new_gas()
    g.step((0.0, 0.0, 0.0))
    g.step((100.0, 0.0, 0.0))
    for _ in range(5):
        g.step((10.0, 0.0, 0.0))
        assert g.edges[(0, 1, PROXIMITY)] == 1


def test_edge_at_max_age_is_kept():
    g = make_gas(
        nodes=[(0, 0, 0, 0, 0), (1, 100, 0, 0, 0)],
        edges=[(0, 1, PROXIMITY, 75)],
    )
    removed_edges, removed_nodes = g.prune()
    assert removed_edges == []
    assert removed_nodes == []
    assert g.edges == {(0, 1, PROXIMITY): 75}


def test_edge_older_than_max_age_is_pruned():
    g = make_gas(
        nodes=[(0, 0, 0, 0, 0), (1, 100, 0, 0, 0), (2, 50, 80, 0, 0)],
        edges=[(0, 1, PROXIMITY, 75), (0, 2, PROXIMITY, 75)],
    )
    g.edges[(0, 2, PROXIMITY)] = 76
    removed_edges, removed_nodes = g.prune()
    assert removed_edges == [(0, 2, PROXIMITY)]
    assert removed_nodes == [2]
    assert (0, 1, PROXIMITY) in g.edges


def test_step_deletes_stale_edge_and_orphan():
    # Input near A refreshes {A,B}; {A,C} crosses the age bound and C dies.
    g = make_gas(
        nodes=[(0, 0, 0, 0, 0), (1, 10, 0, 0, 0), (2, 2000, 0, 0, 0)],
        edges=[(0, 1, PROXIMITY, 0), (0, 2, PROXIMITY, 75)],
    )
    report = g.step((1.0, 0.0, 0.0))
    assert report.winner == 0
    assert report.edges_removed == [(0, 2, PROXIMITY)]
    assert report.nodes_removed == [2]
    assert set(g.nodes) == {0, 1}


def test_isolated_node_kept_when_removal_disabled():
    g = make_gas(
        nodes=[(0, 0, 0, 0, 0), (1, 10, 0, 0, 0), (2, 2000, 0, 0, 0)],
        edges=[(0, 1, PROXIMITY, 0), (0, 2, PROXIMITY, 75)],
        params=Params(remove_isolated_nodes=False),
    )
    report = g.step((1.0, 0.0, 0.0))
    assert report.nodes_removed == []
    assert set(g.nodes) == {0, 1, 2}
    assert g.neighbors(2) == []


def test_node_floor_of_two_survives_pruning():
    g = make_gas(
        nodes=[(0, 0, 0, 0, 0), (1, 100, 0, 0, 0)],
        edges=[(0, 1, PROXIMITY, 75)],
    )
    g.edges[(0, 1, PROXIMITY)] = 76
    g.prune()
    assert set(g.nodes) == {0, 1}
    assert g.edges == {}


def test_neighbor_attraction_moves_all_neighbors():
    g = make_gas(
        nodes=[(0, 0, 0, 0, 0), (1, 10, 0, 0, 0), (2, 0, 30, 0, 0)],
        edges=[(0, 1, PROXIMITY, 0), (0, 2, TRAJECTORY, 0)],
        params=Params(edge_mode="both"),
    )
    g.step((1.0, 0.0, 0.0))
    assert g.nodes[1].x == pytest.approx(10 + 0.0006 * (1 - 10))
    assert g.nodes[2].y == pytest.approx(30 + 0.0006 * (0 - 30))


def test_second_offset_rule_displaces_by_fixed_vector():
    nodes = [(0, 0, 0, 0, 0), (1, 10, 0, 0, 0), (2, 0, 30, 0, 0)]
    edges = [(0, 1, PROXIMITY, 0), (0, 2, PROXIMITY, 0)]
    g = make_gas(nodes=nodes, edges=edges, params=Params(neighbor_rule="second_offset"))
    g.step((1.0, 0.0, 0.0))
    # second is node 1 at (10,0,0); every neighbor shifts by 0.0006*((1,0,0)-(10,0,0))
    assert g.nodes[1].x == pytest.approx(10 + 0.0006 * (1 - 10))
    assert g.nodes[2].x == pytest.approx(0 + 0.0006 * (1 - 10))
    assert g.nodes[2].y == pytest.approx(30.0)


def test_error_decay_clamps_at_zero():
    g = new_gas()
    g.step((0.0, 0.0, 0.0))
    g.step((100.0, 0.0, 0.0))
    g.step((3.0, 0.0, 0.0))  # winner gains 3, decays 10
    assert g.nodes[0].error == 0.0
    assert g.nodes[1].error == 0.0


def test_insertion_trigger_arithmetic():
    # 19995 + 30 - 10 = 20015 > 20000 fires the split.
    g = make_gas(nodes=[(0, 0, 0, 0, 19995), (1, 100, 0, 0, 0)], edges=[(0, 1, PROXIMITY, 0)])
    report = g.step((30.0, 0.0, 0.0))
    assert report.nodes_added == [2]
    assert len(g.nodes) == 3
    # exact conservation: the halves add back to the pre-split total
    assert g.nodes[0].error + g.nodes[1].error + g.nodes[2].error == 20015.0
    assert g.nodes[2].error == g.nodes[0].error + g.nodes[1].error
    # rewired through the new node
    assert (0, 1, PROXIMITY) not in g.edges
    assert g.edges[(0, 2, PROXIMITY)] == 0
    assert g.edges[(1, 2, PROXIMITY)] == 0


def test_insertion_below_threshold_does_not_fire():
    # 19975 + 30 - 10 = 19995 stays under 20000.
    g = make_gas(nodes=[(0, 0, 0, 0, 19975), (1, 100, 0, 0, 0)], edges=[(0, 1, PROXIMITY, 0)])
    report = g.step((30.0, 0.0, 0.0))
    assert report.nodes_added == []
    assert len(g.nodes) == 2


def test_insert_node_midpoint_and_halving():
    g = make_gas(
        nodes=[(0, 0, 0, 0, 24000), (1, 10, 0, 0, 6000)],
        edges=[(0, 1, PROXIMITY, 3)],
    )
    new_id = g.insert_node(0)
    assert new_id == 2
    assert g.nodes[2].pos == (5.0, 0.0, 0.0)
    assert g.nodes[0].error == 12000.0
    assert g.nodes[1].error == 3000.0
    assert g.nodes[2].error == 15000.0
    assert g.edges == {(0, 2, PROXIMITY): 0, (1, 2, PROXIMITY): 0}


def test_insert_node_zero_error_neighbor():
    g = make_gas(
        nodes=[(0, 0, 0, 0, 22000), (1, 8, 0, 0, 0)],
        edges=[(0, 1, PROXIMITY, 0)],
    )
    g.insert_node(0)
    assert g.nodes[0].error == 11000.0
    assert g.nodes[2].error == 11000.0


def test_insert_node_without_neighbors_is_a_no_op():
    g = make_gas(
        nodes=[(0, 0, 0, 0, 30000), (1, 100, 0, 0, 0), (2, 200, 0, 0, 0)],
        edges=[(1, 2, PROXIMITY, 0)],
        params=Params(remove_isolated_nodes=False),
    )
    before = g.snapshot()
    assert g.insert_node(0) is None
    assert g.snapshot() == before


def test_insert_node_picks_max_error_neighbor_lowest_id_on_tie():
    g = make_gas(
        nodes=[(0, 0, 0, 0, 25000), (1, 10, 0, 0, 500), (2, 0, 10, 0, 500)],
        edges=[(0, 1, PROXIMITY, 0), (0, 2, PROXIMITY, 0)],
    )
    g.insert_node(0)
    # tie between nodes 1 and 2 resolves to node 1
    assert g.nodes[3].pos == (5.0, 0.0, 0.0)


def test_trajectory_edges_link_consecutive_winners_per_demonstrator():
    g = make_gas(
        nodes=[(0, 0, 0, 0, 0), (1, 100, 0, 0, 0), (2, 200, 0, 0, 0)],
        params=Params(edge_mode="trajectory", remove_isolated_nodes=False),
    )
    g.step((0.0, 0.0, 0.0), demonstrator=0)
    g.step((200.0, 0.0, 0.0), demonstrator=1)
    assert g.edges == {}
    assert g.last_winner == {0: 0, 1: 2}
    g.step((100.0, 0.0, 0.0), demonstrator=0)
    assert (0, 1, TRAJECTORY) in g.edges
    g.step((100.0, 0.0, 0.0), demonstrator=1)
    assert (1, 2, TRAJECTORY) in g.edges
    assert g.last_winner == {0: 1, 1: 1}
    assert not any(kind == PROXIMITY for _, _, kind in g.edges)


def test_proximity_mode_keeps_no_winner_memory():
    g = new_gas()
    for pos in [(0, 0, 0), (100, 0, 0), (50, 0, 0)]:
        g.step(tuple(map(float, pos)))
    assert g.last_winner == {}


def test_same_winner_twice_makes_no_trajectory_self_edge():
    g = make_gas(
        nodes=[(0, 0, 0, 0, 0), (1, 100, 0, 0, 0)],
        params=Params(edge_mode="trajectory", remove_isolated_nodes=False),
    )
    g.step((1.0, 0.0, 0.0))
    g.step((1.0, 0.0, 0.0))
    assert g.edges == {}


def test_snapshot_is_sorted_and_frozen():
    g = new_gas()
    rng = np.random.default_rng(3)
    for _ in range(200):
        g.step(tuple(rng.uniform(0, 50, size=3)))
    snap = g.snapshot()
    assert list(snap.nodes) == sorted(snap.nodes)
    assert list(snap.edges) == sorted(snap.edges)
    assert snap.node_count == len(g.nodes)
    with pytest.raises(AttributeError):
        snap.tick = 99


def test_matches_reference_stepper_on_mixed_run():
    p = Params(max_error=500.0, max_age=10, edge_mode="both")
    g, ref = Gas(p), RefGas(p)
    rng = np.random.default_rng(11)
    for _ in range(1500):
        pos = tuple(rng.uniform(-80, 80, size=3))
        dem = int(rng.integers(0, 2))
        g.step(pos, dem)
        ref.step(pos, dem)
    snap = g.snapshot()
    assert (snap.tick, snap.nodes, snap.edges, tuple(sorted(g.last_winner.items()))) == ref.state()
