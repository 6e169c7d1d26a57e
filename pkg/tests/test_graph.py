import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _helpers import clique_edges, two_cliques
from orgmap.graph import (
    CollabGraph,
    DegreeStats,
    GraphError,
    OrgTree,
    Partition,
    cpm_quality,
    largest_connected_component,
    modularity,
    read_edge_list,
    read_partition_csv,
    write_edge_list,
    write_partition_csv,
)


def test_rejects_self_loops_and_bad_weights():
    with pytest.raises(GraphError, match="self-loop"):
        CollabGraph.from_edges([("a", "a", 1.0)])
    with pytest.raises(GraphError, match="non-positive"):
        CollabGraph.from_edges([("a", "b", 0.0)])
    with pytest.raises(GraphError, match="non-positive"):
        CollabGraph.from_edges([("a", "b", -2.0)])


def test_parallel_edges_merge_by_sum():
    g = CollabGraph.from_edges([("a", "b", 1.0), ("b", "a", 2.0)])
    assert g.n_edges == 1
    assert g.weight("a", "b") == 3.0


def test_lcc_keeps_larger_component():
    edges = clique_edges(["a", "b", "c", "d", "e"]) + clique_edges(["x", "y", "z"])
    g = CollabGraph.from_edges(edges)
    lcc = largest_connected_component(g)
    assert set(lcc.node_ids) == {"a", "b", "c", "d", "e"}


def test_lcc_identity_on_connected_graph():
    g = two_cliques()
    lcc = largest_connected_component(g)
    assert set(lcc.node_ids) == set(g.node_ids)
    assert lcc.n_edges == g.n_edges


def test_lcc_tie_breaks_to_smallest_member_id():
    # two components of size 4; "a" is the global lexicographic minimum
    edges = clique_edges(["a", "m", "n", "o"]) + clique_edges(["b", "c", "d", "e"])
    g = CollabGraph.from_edges(edges)
    lcc = largest_connected_component(g)
    assert "a" in lcc.node_ids


def test_lcc_idempotent():
    edges = clique_edges(["a", "b", "c"]) + [("x", "y", 1.0)]
    g = CollabGraph.from_edges(edges)
    once = largest_connected_component(g)
    twice = largest_connected_component(once)
    assert set(once.node_ids) == set(twice.node_ids)


def test_lcc_empty_graph_errors():
    with pytest.raises(GraphError, match="empty graph"):
        largest_connected_component(CollabGraph((), ()))


def test_modularity_two_triangles():
    edges = clique_edges(["a", "b", "c"]) + clique_edges(["x", "y", "z"])
    edges.append(("a", "x", 1.0))
    g = CollabGraph.from_edges(edges)
    p = Partition.from_groups([["a", "b", "c"], ["x", "y", "z"]])
    assert modularity(g, p) == pytest.approx(5.0 / 14.0, abs=1e-12)


def test_modularity_single_community_is_zero():
    g = two_cliques(5, weight=3.0)
    p = Partition.from_groups([list(g.node_ids)])
    assert modularity(g, p) == pytest.approx(0.0, abs=1e-12)


def test_modularity_weight_scaling_invariance():
    base = two_cliques(4, weight=1.0, bridge_weight=2.0)
    p = Partition.from_groups(
        [[n for n in base.node_ids if n.startswith("a")],
         [n for n in base.node_ids if n.startswith("b")]]
    )
    q1 = modularity(base, p)
    for scale in (0.5, 3.0, 17.0):
        scaled = CollabGraph.from_edges([(a, b, w * scale) for a, b, w in base.edges()])
        assert modularity(scaled, p) == pytest.approx(q1, rel=1e-12)


def test_modularity_incomplete_partition_errors():
    g = CollabGraph.from_edges([("a", "b", 1.0)])
    with pytest.raises(GraphError, match="partition incomplete"):
        modularity(g, Partition({"a": 0}))


def test_modularity_unweighted_flag():
    g = CollabGraph.from_edges([("a", "b", 10.0), ("b", "c", 1.0), ("a", "c", 1.0)])
    p = Partition.from_groups([["a", "b"], ["c"]])
    q_unweighted = modularity(g, p, weighted=False)
    edges = [("a", "b", 1.0), ("b", "c", 1.0), ("a", "c", 1.0)]
    assert q_unweighted == pytest.approx(modularity(CollabGraph.from_edges(edges), p))


def test_cpm_five_clique():
    g = CollabGraph.from_edges(clique_edges([f"n{i}" for i in range(5)]))
    p = Partition.from_groups([list(g.node_ids)])
    # 10 internal edges minus 10 pair penalty
    assert cpm_quality(g, p, 1.0) == pytest.approx(0.0, abs=1e-12)


def test_cpm_two_cliques():
    g = two_cliques(5)
    split = Partition.from_groups(
        [[n for n in g.node_ids if n.startswith("a")],
         [n for n in g.node_ids if n.startswith("b")]]
    )
    merged = Partition.from_groups([list(g.node_ids)])
    assert cpm_quality(g, split, 1.0) == pytest.approx(0.0, abs=1e-12)
    assert cpm_quality(g, merged, 1.0) == pytest.approx(-24.0, abs=1e-12)
    assert cpm_quality(g, split, 1.0) > cpm_quality(g, merged, 1.0)


def test_cpm_edgeless_singletons():
    g = CollabGraph(["a", "b", "c"], [])
    p = Partition.from_groups([["a"], ["b"], ["c"]])
    assert cpm_quality(g, p, 1.0) == 0.0


def test_cpm_requires_positive_resolution():
    g = CollabGraph.from_edges([("a", "b", 1.0)])
    p = Partition.from_groups([["a", "b"]])
    with pytest.raises(GraphError):
        cpm_quality(g, p, 0.0)


@given(st.integers(min_value=2, max_value=6), st.floats(min_value=0.1, max_value=50))
@settings(max_examples=25, deadline=None)
def test_single_community_modularity_zero_property(k, w):
    g = CollabGraph.from_edges(clique_edges([f"n{i}" for i in range(k)], w))
    p = Partition.from_groups([list(g.node_ids)])
    assert modularity(g, p) == pytest.approx(0.0, abs=1e-12)


def test_degree_stats():
    g = CollabGraph.from_edges([("a", "b", 5.0), ("b", "c", 1.0)])
    stats = DegreeStats.of(g)
    assert stats.per_node == {"a": 1, "b": 2, "c": 1}
    assert stats.max == 2
    assert stats.mean == pytest.approx(4 / 3)


def test_org_tree_validation():
    from datetime import date

    with pytest.raises(GraphError, match="cycle"):
        OrgTree(date(2024, 1, 1), {"a": "b", "b": "a"}, "r")
    with pytest.raises(GraphError, match="missing"):
        OrgTree(date(2024, 1, 1), {"a": "ghost"}, "r")
    tree = OrgTree(date(2024, 1, 1), {"a": "r", "b": "a"}, "r")
    assert tree.children("r") == ["a"]
    assert "b" in tree


def test_edge_list_round_trip(tmp_path):
    g = two_cliques(4, weight=2.5)
    path = tmp_path / "edges.csv"
    write_edge_list(g, path)
    back = read_edge_list(path)
    assert set(back.node_ids) == set(g.node_ids)
    assert back.n_edges == g.n_edges
    for a, b, w in g.edges():
        assert back.weight(a, b) == pytest.approx(w)


def test_partition_csv_round_trip(tmp_path):
    p0 = Partition.from_groups([["a", "b", "c", "d"]])
    p1 = Partition.from_groups([["a", "b"], ["c", "d"]], level=1)
    path = tmp_path / "partition.csv"
    write_partition_csv([p0, p1], path)
    levels = read_partition_csv(path)
    assert len(levels) == 2
    assert levels[1].communities() == p1.communities()


def test_partition_requires_dense_ids():
    with pytest.raises(GraphError, match="dense"):
        Partition({"a": 0, "b": 2})
    p = Partition({"a": 1, "b": 0, "c": 1})
    assert p.n_communities == 2
