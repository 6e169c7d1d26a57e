"""Synthetic hierarchical collaboration networks and node metrics.

Generation follows four steps: community sizes from a truncated power law,
preferential attachment with power-law edge weights inside each community,
degree-preferential edges between communities, and recursion that treats
each community as a sub-organization. Nothing here depends on real data, so
outputs carry no disclosure risk while keeping message-count-like weights
and heavy-tailed degrees.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .community import WorkgroupHierarchy
from .graph import CollabGraph, OrgTree, Partition


class SynthesisError(ValueError):
    pass


@dataclass
class SynthConfig:
    top_level_communities: int = 10
    size_exponent: float = 2.5
    size_range: Tuple[int, int] = (20, 120)
    intra_edges_per_node: int = 2
    inter_edge_fraction: float = 0.15
    weight_exponent: float = 3.5
    weight_scale: float = 60.0
    hierarchy_depth: int = 2
    seed: int = 0

    def validate(self) -> None:
        lo, hi = self.size_range
        if lo < 3 or hi < lo:
            raise SynthesisError(f"invalid size range {self.size_range}")
        if self.intra_edges_per_node < 1:
            raise SynthesisError("need at least one intra edge per node")
        if self.intra_edges_per_node >= lo:
            raise SynthesisError(
                f"intra_edges_per_node={self.intra_edges_per_node} must be below "
                f"the minimum community size {lo}"
            )
        if not 0 < self.inter_edge_fraction < 1:
            raise SynthesisError("inter_edge_fraction must lie in (0, 1)")
        if self.size_exponent <= 1 or self.weight_exponent <= 1:
            raise SynthesisError("power-law exponents must exceed 1")
        if self.hierarchy_depth < 1 or self.top_level_communities < 1:
            raise SynthesisError("depth and community count must be positive")
        if self.weight_scale <= 0:
            raise SynthesisError("weight_scale must be positive")


@dataclass
class SynthResult:
    graph: CollabGraph
    planted_hierarchy: WorkgroupHierarchy
    node_metrics: Dict[str, Dict[str, float]] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# sampling primitives
# ---------------------------------------------------------------------------


def _sample_size(rng: np.random.Generator, lo: int, hi: int, exponent: float) -> int:
    sizes = np.arange(lo, hi + 1, dtype=float)
    probs = sizes**-exponent
    probs /= probs.sum()
    return int(rng.choice(sizes, p=probs))


def _sample_weight(rng: np.random.Generator, scale: float, exponent: float) -> float:
    # truncated continuous power law on [scale, 100*scale] via inverse CDF
    a = exponent
    lo, hi = scale, 100.0 * scale
    u = rng.random()
    lo_p, hi_p = lo ** (1.0 - a), hi ** (1.0 - a)
    return float((lo_p - u * (lo_p - hi_p)) ** (1.0 / (1.0 - a)))


def synthesize_metric(
    nodes: Sequence[str], scale: float, exponent: float, seed: int
) -> Dict[str, float]:
    """I.i.d. truncated power-law node values clipped to [0, 1].

    The tail CCDF has log-log slope -(exponent - 1) before clipping.
    """
    if exponent <= 1:
        raise SynthesisError("exponent must exceed 1")
    rng = np.random.default_rng(seed)
    u = rng.random(len(nodes))
    raw = scale * u ** (-1.0 / (exponent - 1.0))
    return {node: float(min(1.0, v)) for node, v in zip(nodes, raw)}


# ---------------------------------------------------------------------------
# graph construction
# ---------------------------------------------------------------------------


def _preferential_attachment(
    rng: np.random.Generator,
    nodes: List[str],
    m: int,
    weight_scale: float,
    weight_exponent: float,
) -> List[Tuple[str, str, float]]:
    """Grow one community: each new node attaches to m existing nodes with
    probability proportional to degree + 1. The growth chain keeps the
    community connected."""
    n = len(nodes)
    edges: List[Tuple[str, str, float]] = []
    deg = np.zeros(n)
    for i in range(1, min(m, n)):
        edges.append((nodes[i - 1], nodes[i], _sample_weight(rng, weight_scale, weight_exponent)))
        deg[i - 1] += 1
        deg[i] += 1
    for i in range(max(m, 1), n):
        weights = deg[:i] + 1.0
        targets: List[int] = []
        while len(targets) < min(m, i):
            probs = weights / weights.sum()
            t = int(rng.choice(i, p=probs))
            if t not in targets:
                targets.append(t)
        for t in targets:
            edges.append((nodes[t], nodes[i], _sample_weight(rng, weight_scale, weight_exponent)))
            deg[t] += 1
            deg[i] += 1
    return edges


def _branching(cfg: SynthConfig) -> int:
    if cfg.hierarchy_depth == 1:
        return 1
    return max(2, round(cfg.top_level_communities ** (1.0 / cfg.hierarchy_depth)))


def _inter_edges(
    rng: np.random.Generator,
    groups: List[List[str]],
    deg: Dict[str, float],
    existing: set,
    budget: int,
    weight_scale: float,
    weight_exponent: float,
) -> List[Tuple[str, str, float]]:
    """Degree-preferential endpoints in distinct groups; duplicates rejected.

    The kernel is superlinear (square of degree+1) so repeated placement
    concentrates on a few global hubs rather than spreading evenly.
    """
    nodes = [n for grp in groups for n in grp]
    group_of = {n: i for i, grp in enumerate(groups) for n in grp}
    edges: List[Tuple[str, str, float]] = []
    attempts = 0
    while len(edges) < budget and attempts < budget * 50:
        attempts += 1
        w = np.array([(deg[n] + 1.0) ** 2 for n in nodes])
        u = nodes[int(rng.choice(len(nodes), p=w / w.sum()))]
        others = [n for n in nodes if group_of[n] != group_of[u]]
        if not others:
            break
        w2 = np.array([(deg[n] + 1.0) ** 2 for n in others])
        v = others[int(rng.choice(len(others), p=w2 / w2.sum()))]
        key = (u, v) if u <= v else (v, u)
        if key in existing:
            continue
        existing.add(key)
        weight = _sample_weight(rng, weight_scale, weight_exponent)
        edges.append((key[0], key[1], weight))
        deg[u] += 1
        deg[v] += 1
    return edges


def synthesize(cfg: SynthConfig) -> SynthResult:
    """Generate a synthetic organization network with a planted hierarchy.

    Deterministic for a fixed seed. If inter-community sampling leaves the
    graph disconnected, a minimum-weight bridge is added from each smaller
    component's highest-degree node to the giant component's highest-degree
    node.
    """
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    counter = [0]

    def fresh_ids(k: int) -> List[str]:
        ids = [f"p{counter[0] + i:05d}" for i in range(k)]
        counter[0] += k
        return ids

    branching = _branching(cfg)

    def build(depth_left: int) -> Tuple[List[str], List[Tuple[str, str, float]], List]:
        """Returns (nodes, edges, nested leaf grouping) for one sub-organization."""
        if depth_left == 1:
            size = _sample_size(rng, *cfg.size_range, cfg.size_exponent)
            nodes = fresh_ids(size)
            edges = _preferential_attachment(
                rng, nodes, cfg.intra_edges_per_node, cfg.weight_scale, cfg.weight_exponent
            )
            return nodes, edges, nodes
        child_nodes, child_edges, tree = [], [], []
        groups = []
        for _ in range(branching):
            nodes, edges, sub = build(depth_left - 1)
            groups.append(nodes)
            child_nodes.extend(nodes)
            child_edges.extend(edges)
            tree.append(sub)
        deg: Dict[str, float] = {n: 0.0 for n in child_nodes}
        existing = set()
        for a, b, _ in child_edges:
            deg[a] += 1
            deg[b] += 1
            existing.add((a, b) if a <= b else (b, a))
        budget = int(np.ceil(cfg.inter_edge_fraction * len(child_edges)))
        child_edges.extend(
            _inter_edges(
                rng, groups, deg, existing, budget,
                cfg.weight_scale, cfg.weight_exponent,
            )
        )
        return child_nodes, child_edges, tree

    all_nodes: List[str] = []
    all_edges: List[Tuple[str, str, float]] = []
    top_trees: List = []
    top_groups: List[List[str]] = []
    for _ in range(cfg.top_level_communities):
        nodes, edges, tree = build(cfg.hierarchy_depth)
        top_groups.append(nodes)
        top_trees.append(tree)
        all_nodes.extend(nodes)
        all_edges.extend(edges)
    deg: Dict[str, float] = {n: 0.0 for n in all_nodes}
    existing = set()
    for a, b, _ in all_edges:
        deg[a] += 1
        deg[b] += 1
        existing.add((a, b) if a <= b else (b, a))
    budget = int(np.ceil(cfg.inter_edge_fraction * len(all_edges)))
    all_edges.extend(
        _inter_edges(
            rng, top_groups, deg, existing, budget,
            cfg.weight_scale, cfg.weight_exponent,
        )
    )

    graph = CollabGraph(all_nodes, all_edges, window="longitudinal")
    graph = repair_connectivity(graph, cfg.weight_scale)

    levels = _partitions_from_tree(top_trees, cfg.hierarchy_depth)
    hierarchy = WorkgroupHierarchy(levels, max_size=cfg.size_range[1])

    metrics = {
        "freedom": synthesize_metric(graph.node_ids, 0.25, 2.5, cfg.seed + 1),
        "fluidity": synthesize_metric(graph.node_ids, 0.15, 3.0, cfg.seed + 2),
    }
    return SynthResult(graph, hierarchy, metrics)


def _flatten(tree) -> List[str]:
    if tree and isinstance(tree[0], str):
        return list(tree)
    out: List[str] = []
    for sub in tree:
        out.extend(_flatten(sub))
    return out


def _partitions_from_tree(top_trees: List, depth: int) -> List[Partition]:
    """Level 0 groups by top community, deeper levels by nested sub-community."""

    def collect(tree, level: int, target: int) -> List[List[str]]:
        if level == target or (tree and isinstance(tree[0], str)):
            return [_flatten(tree)]
        out = []
        for sub in tree:
            out.extend(collect(sub, level + 1, target))
        return out

    partitions = []
    for target in range(depth):
        groups: List[List[str]] = []
        for tree in top_trees:
            groups.extend(collect(tree, 0, target))
        partitions.append(Partition.from_groups(groups, level=target))
    return partitions


def repair_connectivity(graph: CollabGraph, weight_scale: float) -> CollabGraph:
    components = graph.connected_components()
    if len(components) <= 1:
        return graph
    deg = {n: int(d) for n, d in zip(graph.node_ids, graph.degrees())}
    giant = components[0]
    hub = max(giant, key=lambda n: (deg[n], n))
    edges = list(graph.edges())
    for comp in components[1:]:
        local_hub = max(comp, key=lambda n: (deg[n], n))
        edges.append((hub, local_hub, weight_scale))
    return CollabGraph(graph.node_ids, edges, window=graph.window)


# ---------------------------------------------------------------------------
# derived artifacts for the pipeline
# ---------------------------------------------------------------------------


def org_tree_from_hierarchy(
    graph: CollabGraph,
    hierarchy: WorkgroupHierarchy,
    snapshot_date: date = date(2024, 1, 15),
) -> OrgTree:
    """Reporting tree implied by the planted hierarchy: each community's
    highest-degree member leads it; leads report up the community levels."""
    deg = {n: int(d) for n, d in zip(graph.node_ids, graph.degrees())}

    def lead(members: Sequence[str]) -> str:
        return max(members, key=lambda n: (deg[n], n))

    root = lead(graph.node_ids)
    parent: Dict[str, str] = {}
    top = hierarchy.levels[0]
    leads_by_level: List[Dict[int, str]] = []
    for level_idx, partition in enumerate(hierarchy.levels):
        leads = {cid: lead(members) for cid, members in partition.communities().items()}
        leads_by_level.append(leads)
    for cid, members in top.communities().items():
        top_lead = leads_by_level[0][cid]
        if top_lead != root:
            parent[top_lead] = root
    for level_idx in range(1, len(hierarchy.levels)):
        coarser = hierarchy.levels[level_idx - 1]
        for cid, members in hierarchy.levels[level_idx].communities().items():
            sub_lead = leads_by_level[level_idx][cid]
            parent_cid = coarser.assignment[members[0]]
            boss = leads_by_level[level_idx - 1][parent_cid]
            if sub_lead != boss and sub_lead not in parent:
                parent[sub_lead] = boss
    leaf = hierarchy.leaf_partition
    for cid, members in leaf.communities().items():
        boss = leads_by_level[-1][cid]
        for member in members:
            if member != boss and member not in parent and member != root:
                parent[member] = boss
    return OrgTree(snapshot_date, parent, root)


def rewire_edges(
    graph: CollabGraph, fraction: float, seed: int
) -> CollabGraph:
    """Replace a fraction of edges with random non-duplicate pairs, keeping
    each rewired edge's weight. Used to produce month-over-month churn."""
    if not 0 <= fraction <= 1:
        raise SynthesisError("rewire fraction must lie in [0, 1]")
    edges = list(graph.edges())
    if fraction == 0 or not edges:
        return CollabGraph(graph.node_ids, edges, window=graph.window)
    rng = np.random.default_rng(seed)
    n_rewire = int(np.ceil(fraction * len(edges)))
    idx = rng.choice(len(edges), size=n_rewire, replace=False)
    chosen = set(int(i) for i in idx)
    existing = {(a, b) if a <= b else (b, a) for a, b, _ in edges}
    nodes = list(graph.node_ids)
    out = [e for i, e in enumerate(edges) if i not in chosen]
    for i in sorted(chosen):
        _, _, w = edges[i]
        for _ in range(100):
            a, b = rng.choice(len(nodes), size=2, replace=False)
            key = (nodes[min(a, b)], nodes[max(a, b)])
            if key not in existing:
                existing.add(key)
                out.append((key[0], key[1], w))
                break
    return CollabGraph(graph.node_ids, out, window=graph.window)


def synthesize_monthly_series(
    result: SynthResult,
    months: Sequence[str],
    rewire_fraction: float = 0.1,
    seed: int = 0,
) -> Dict[str, CollabGraph]:
    """Monthly variants of the synthetic graph with the given churn level."""
    out = {}
    for i, month in enumerate(months):
        g = rewire_edges(result.graph, rewire_fraction, seed + 7919 * i)
        g.window = month
        out[month] = g
    return out
