from datetime import date

import numpy as np
import pytest

from _helpers import random_org_tree
from orgmap.embedding import EmbeddingPair, build_omnibus, spectral_embed
from orgmap.graph import CollabGraph, OrgTree, Partition
from orgmap.metrics import (
    MetricError,
    Workgroup,
    aggregate_node_metric,
    fluidity,
    freedom,
    freedom_for_tree,
    minimal_spanning_subtree,
    workgroups_of,
)


def manual_pair(positions, months=("m1", "m2")):
    d = len(next(iter(positions.values()))[0])
    return EmbeddingPair(d, {k: (np.array(p), np.array(c)) for k, (p, c) in positions.items()}, months, np.array([]))


# -- fluidity ---------------------------------------------------------------


def test_fluidity_static_series_is_zero():
    g = CollabGraph.from_edges(
        [("a", "b", 4.0), ("b", "c", 6.0), ("c", "d", 5.0), ("a", "d", 2.0)]
    )
    pairs = [spectral_embed(build_omnibus(g, g)) for _ in range(3)]
    w = Workgroup.of(0, g.node_ids)
    score = fluidity(w, pairs)
    assert score.value == pytest.approx(0.0, abs=1e-9)
    assert score.months_used == 3


def test_fluidity_half_turn_example():
    # one member rotates to orthogonal, the other stays: 1 - (0 + 1)/2 = 0.5
    pair = manual_pair(
        {
            "a": ([1.0, 0.0], [0.0, 1.0]),
            "b": ([0.5, 0.5], [0.5, 0.5]),
        }
    )
    score = fluidity(Workgroup.of(0, ["a", "b"]), [pair])
    assert score.value == pytest.approx(0.5, abs=1e-12)


def test_fluidity_skips_zero_vector_members():
    pair = manual_pair(
        {
            "a": ([1.0, 0.0], [0.0, 0.0]),  # absent in the second month
            "b": ([0.0, 1.0], [0.0, 1.0]),
        }
    )
    score = fluidity(Workgroup.of(0, ["a", "b"]), [pair])
    assert score.value == pytest.approx(0.0, abs=1e-12)


def test_fluidity_excludes_fully_skipped_pairs_from_n():
    silent = manual_pair({"a": ([0.0, 0.0], [1.0, 0.0]), "b": ([0.0, 0.0], [0.0, 1.0])})
    active = manual_pair({"a": ([1.0, 0.0], [0.0, 1.0]), "b": ([1.0, 0.0], [1.0, 0.0])})
    score = fluidity(Workgroup.of(0, ["a", "b"]), [silent, active])
    assert score.months_used == 1
    assert score.value == pytest.approx(0.5)


def test_fluidity_errors_when_no_signal():
    pair = manual_pair({"a": ([0.0, 0.0], [1.0, 0.0])})
    with pytest.raises(MetricError, match="no fluidity signal"):
        fluidity(Workgroup.of(0, ["a"]), [pair])
    with pytest.raises(MetricError):
        fluidity(Workgroup.of(0, ["a"]), [])


def test_fluidity_invariant_to_relabeling_and_rotation():
    rng = np.random.default_rng(5)
    base = {f"p{i}": (rng.normal(size=3), rng.normal(size=3)) for i in range(6)}
    pair = manual_pair(base)
    w = Workgroup.of(0, list(base))
    score = fluidity(w, [pair]).value

    relabeled = manual_pair({f"q{i}": base[f"p{i}"] for i in range(6)})
    w2 = Workgroup.of(0, [f"q{i}" for i in range(6)])
    assert fluidity(w2, [relabeled]).value == pytest.approx(score, abs=1e-12)

    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    rotated = manual_pair({k: (q @ p, q @ c) for k, (p, c) in base.items()})
    assert fluidity(w, [rotated]).value == pytest.approx(score, abs=1e-9)


def test_fluidity_contribution_bounds():
    # antipodal vectors give the maximum single-pair contribution of 2
    pair = manual_pair({"a": ([1.0, 0.0], [-1.0, 0.0])})
    score = fluidity(Workgroup.of(0, ["a"]), [pair])
    assert score.value == pytest.approx(2.0)


# -- minimal spanning subtree -----------------------------------------------


def star_tree():
    parent = {f"d{i}": "m" for i in range(1, 5)}
    parent["m"] = "root"
    return OrgTree(date(2024, 1, 15), parent, "root")


def branch_tree():
    # root r with branches a and b; x,x2 under a; y,y2 under b
    parent = {
        "a": "r",
        "b": "r",
        "x": "a",
        "x2": "a",
        "y": "b",
        "y2": "b",
    }
    return OrgTree(date(2024, 1, 15), parent, "r")


def test_mst_manager_and_directs():
    tree = star_tree()
    members = {"m", "d1", "d2", "d3", "d4"}
    assert minimal_spanning_subtree(tree, members) == members


def test_mst_two_siblings_pass_through_parent():
    tree = star_tree()
    assert minimal_spanning_subtree(tree, {"d1", "d2"}) == {"m", "d1", "d2"}


def test_mst_distant_branches_path_union():
    tree = branch_tree()
    assert minimal_spanning_subtree(tree, {"x", "y"}) == {"x", "a", "r", "b", "y"}


def test_mst_unresolvable_errors():
    tree = star_tree()
    with pytest.raises(MetricError, match="not resolvable"):
        minimal_spanning_subtree(tree, {"ghost"})


def test_mst_single_member():
    tree = star_tree()
    assert minimal_spanning_subtree(tree, {"d3"}) == {"d3"}


# -- freedom ------------------------------------------------------------------


def test_freedom_perfect_alignment_is_zero():
    tree = star_tree()
    w = Workgroup.of(0, {"m", "d1", "d2", "d3", "d4"})
    assert freedom(w, [tree]).value == pytest.approx(0.0, abs=1e-12)


def test_freedom_two_of_four_directs():
    tree = star_tree()
    w = Workgroup.of(1, {"d1", "d2"})
    # MST {m,d1,d2}; peers of d1,d2 are all four directs; S has 5 nodes
    assert freedom(w, [tree]).value == pytest.approx(1.0 - 2.0 / 5.0, abs=1e-12)


def test_freedom_distant_branches():
    tree = branch_tree()
    w = Workgroup.of(2, {"x", "y"})
    # S = {x,x2,a,b,r,y,y2}
    assert freedom(w, [tree]).value == pytest.approx(1.0 - 2.0 / 7.0, abs=1e-12)


def test_freedom_single_member_is_zero():
    tree = star_tree()
    assert freedom(Workgroup.of(3, {"d2"}), [tree]).value == pytest.approx(0.0)


def test_freedom_mean_over_snapshots():
    t1 = star_tree()
    t2 = branch_tree()
    # d1,d2 resolve only in t1; x resolves only in t2
    w = Workgroup.of(4, {"d1", "d2", "x"})
    score = freedom(w, [t1, t2])
    v1 = 1.0 - 2.0 / 5.0
    v2 = 0.0  # single resolvable member in t2
    assert score.value == pytest.approx((v1 + v2) / 2.0)
    assert len(score.per_month) == 2


def test_freedom_unresolvable_everywhere_errors():
    w = Workgroup.of(5, {"ghost"})
    with pytest.raises(MetricError, match="not resolvable"):
        freedom(w, [star_tree()])


def test_freedom_in_unit_interval_random_trees():
    rng = np.random.default_rng(0)
    for seed in range(30):
        tree = random_org_tree(40, seed)
        nodes = sorted(tree.nodes())
        size = int(rng.integers(1, 12))
        members = set(rng.choice(nodes, size=size, replace=False))
        value = freedom_for_tree(Workgroup.of(0, members), tree)
        assert 0.0 <= value < 1.0


def test_freedom_antitone_in_added_sibling():
    # adding a missing sibling of a non-root MST member never raises freedom
    rng = np.random.default_rng(1)
    checked = 0
    for seed in range(200):
        tree = random_org_tree(30, seed)
        nodes = sorted(tree.nodes())
        members = set(rng.choice(nodes, size=4, replace=False))
        w = Workgroup.of(0, members)
        mst = minimal_spanning_subtree(tree, members)
        root = next(n for n in mst if n not in tree.parent or tree.parent[n] not in mst)
        candidates = [
            (v, s)
            for v in sorted(mst & members)
            if v != root
            for s in tree.children(tree.parent[v])
            if s not in members
        ]
        if not candidates:
            continue
        v, sibling = candidates[0]
        before = freedom_for_tree(w, tree)
        after = freedom_for_tree(Workgroup.of(0, members | {sibling}), tree)
        assert after <= before + 1e-12
        checked += 1
    assert checked > 50


# -- aggregation ---------------------------------------------------------------


def test_aggregate_constant_values():
    p = Partition.from_groups([["a", "b"], ["c"]])
    out = aggregate_node_metric({"a": 2.0, "b": 2.0, "c": 2.0}, p)
    assert out == {0: 2.0, 1: 2.0}


def test_aggregate_mean_and_median():
    p = Partition.from_groups([["a", "b"], ["c", "d", "e"]])
    values = {"a": 1.0, "b": 3.0, "c": 1.0, "d": 10.0, "e": 2.0}
    assert aggregate_node_metric(values, p, "mean")[0] == pytest.approx(2.0)
    assert aggregate_node_metric(values, p, "median")[1] == pytest.approx(2.0)


def test_aggregate_missing_community_marked_none():
    p = Partition.from_groups([["a"], ["b"]])
    out = aggregate_node_metric({"a": 1.0}, p)
    assert out[0] == 1.0
    assert out[1] is None


def test_workgroups_of_partition():
    p = Partition.from_groups([["a", "b"], ["c"]])
    ws = workgroups_of(p)
    assert len(ws) == 2
    assert ws[0].members == frozenset({"a", "b"})
