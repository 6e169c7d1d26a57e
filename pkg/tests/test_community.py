from collections import deque

import numpy as np
import pytest

from _helpers import (
    clique_edges,
    cpm_value,
    modularity_value,
    planted_blocks,
    set_partitions,
    two_cliques,
)
from orgmap.community import (
    CommunityError,
    SizeModularityCurve,
    detect_hierarchy,
    elbow_point,
    leiden,
    sweep_and_elbow,
)
from orgmap.graph import CollabGraph, Partition, cpm_quality, modularity


def groups_of(partition: Partition):
    return {frozenset(members) for members in partition.communities().values()}


def assert_communities_connected(g: CollabGraph, p: Partition):
    for members in p.communities().values():
        sub = g.subgraph(members)
        seen = {members[0]}
        queue = deque([members[0]])
        while queue:
            cur = queue.popleft()
            for nbr in sub.neighbors(cur):
                if nbr not in seen:
                    seen.add(nbr)
                    queue.append(nbr)
        assert seen == set(members), f"community {members} not connected"


def test_leiden_two_cliques_cpm_matches_exhaustive_optimum():
    # weight 2 makes the two-clique split the unique CPM optimum at
    # resolution 1.0 (weight 1 ties with singletons); confirmed by searching
    # all 115975 partitions of the 10 nodes
    g = two_cliques(5, weight=2.0, bridge_weight=2.0)
    edges = list(g.edges())
    best_value = -float("inf")
    best_parts = []
    for part in set_partitions(list(g.node_ids)):
        value = cpm_value(edges, part, gamma=1.0)
        if value > best_value + 1e-9:
            best_value = value
            best_parts = [part]
        elif value > best_value - 1e-9:
            best_parts.append(part)
    expected = {
        frozenset(n for n in g.node_ids if n.startswith("a")),
        frozenset(n for n in g.node_ids if n.startswith("b")),
    }
    assert len(best_parts) == 1
    assert {frozenset(grp) for grp in best_parts[0]} == expected

    p = leiden(g, "cpm", 1.0, seed=3)
    assert groups_of(p) == expected
    assert cpm_quality(g, p, 1.0) == pytest.approx(best_value)


def test_leiden_triangle_modularity_matches_exhaustive_optimum():
    g = CollabGraph.from_edges(clique_edges(["a", "b", "c"]))
    edges = list(g.edges())
    parts = list(set_partitions(["a", "b", "c"]))
    assert len(parts) == 5
    best = max(parts, key=lambda part: modularity_value(edges, part))
    assert {frozenset(grp) for grp in best} == {frozenset(["a", "b", "c"])}
    p = leiden(g, "modularity", 1.0, seed=0)
    assert groups_of(p) == {frozenset(["a", "b", "c"])}


def test_leiden_edgeless_graph_singletons():
    g = CollabGraph(["a", "b", "c"], [])
    p = leiden(g, "cpm", 1.0, seed=0)
    assert p.n_communities == 3


def test_leiden_rejects_bad_resolution():
    g = two_cliques()
    with pytest.raises(CommunityError):
        leiden(g, "cpm", 0.0, seed=0)
    with pytest.raises(CommunityError):
        leiden(g, "cpm", -1.0, seed=0)


def test_leiden_deterministic_and_connected():
    g, _ = planted_blocks([12, 9, 15], seed=5)
    p1 = leiden(g, "cpm", 1.0, seed=42)
    p2 = leiden(g, "cpm", 1.0, seed=42)
    assert p1.assignment == p2.assignment
    assert_communities_connected(g, p1)


def test_leiden_beats_singleton_start():
    g, _ = planted_blocks([10, 10], seed=1)
    singletons = Partition.from_groups([[n] for n in g.node_ids])
    p = leiden(g, "modularity", 1.0, seed=7)
    assert modularity(g, p) >= modularity(g, singletons)
    p2 = leiden(g, "cpm", 1.0, seed=7)
    assert cpm_quality(g, p2, 1.0) >= cpm_quality(g, singletons, 1.0)


def test_leiden_recovers_planted_blocks():
    g, blocks = planted_blocks([10, 10, 10, 10], p_in=0.9, p_out=0.02, seed=9)
    p = leiden(g, "cpm", 1.0, seed=1)
    assert groups_of(p) == {frozenset(b) for b in blocks}


def test_detect_hierarchy_planted_blocks_one_level():
    g, blocks = planted_blocks([10, 10, 10, 10], p_in=0.9, p_out=0.02, seed=2)
    h = detect_hierarchy(g, max_size=15, seed=0)
    assert h.depth == 1
    assert groups_of(h.leaf_partition) == {frozenset(b) for b in blocks}


def test_detect_hierarchy_depth_one_when_everything_fits():
    g = CollabGraph.from_edges(clique_edges([f"n{i}" for i in range(6)], weight=10.0))
    h = detect_hierarchy(g, max_size=10, seed=0)
    assert h.depth == 1
    assert h.leaf_partition.n_communities == 1


def test_detect_hierarchy_force_splits_clique():
    g = CollabGraph.from_edges(clique_edges([f"n{i}" for i in range(5)], weight=10.0))
    h = detect_hierarchy(g, max_size=2, seed=0)
    sizes = [len(m) for m in h.leaf_partition.communities().values()]
    assert all(s <= 2 for s in sizes)


def test_detect_hierarchy_rejects_small_max_size():
    g = two_cliques()
    with pytest.raises(CommunityError):
        detect_hierarchy(g, max_size=1, seed=0)


def test_hierarchy_levels_refine_and_bound():
    g, _ = planted_blocks([30, 25, 20], p_in=0.6, p_out=0.01, seed=3)
    h = detect_hierarchy(g, max_size=12, seed=0)
    leaf_sizes = [len(m) for m in h.leaf_partition.communities().values()]
    assert all(s <= 12 for s in leaf_sizes)
    for prev, nxt in zip(h.levels, h.levels[1:]):
        # every community at the finer level sits inside one coarser community
        for members in nxt.communities().values():
            parents = {prev.assignment[m] for m in members}
            assert len(parents) == 1


def test_elbow_l_curve_example():
    points = [(10, 0.60), (20, 0.70), (40, 0.74), (80, 0.75), (160, 0.755)]
    assert points[elbow_point(points)][0] == 40


def test_elbow_linear_curve_first_interior():
    points = [(10, 0.1), (20, 0.2), (30, 0.3), (40, 0.4)]
    assert elbow_point(points) == 1


def test_elbow_sharp_corner():
    # L-curve with an unmistakable corner at x=30
    points = [(10, 0.0), (20, 0.45), (30, 0.9), (40, 0.91), (50, 0.92), (60, 0.93)]
    assert points[elbow_point(points)][0] == 30


def test_elbow_needs_three_points():
    with pytest.raises(CommunityError):
        elbow_point([(1, 1.0), (2, 2.0)])
    with pytest.raises(CommunityError):
        SizeModularityCurve([(1, 0.5), (2, 0.6)])


def test_sweep_and_elbow_runs():
    g, _ = planted_blocks([20, 20, 20, 20, 20], p_in=0.5, p_out=0.01, seed=4)
    curve, chosen = sweep_and_elbow(g, [10, 25, 50, 90], seed=0)
    assert len(curve.points) == 4
    assert chosen in {10, 25, 50, 90}
    with pytest.raises(CommunityError):
        sweep_and_elbow(g, [10, 20], seed=0)
