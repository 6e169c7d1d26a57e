"""Weighted undirected collaboration graphs, org trees, and quality scores.

The graph type here is deliberately small: an immutable undirected graph
with positive edge weights, plus the handful of structural statistics the
rest of the pipeline needs (connected components, degrees, modularity and
CPM quality). Node identifiers are opaque strings.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from datetime import date
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np
from scipy import sparse


class GraphError(ValueError):
    """Raised for structurally invalid graphs, trees, or partitions."""


def _canon_edge(a: str, b: str) -> Tuple[str, str]:
    return (a, b) if a <= b else (b, a)


class CollabGraph:
    """Undirected person-to-person graph with positive real edge weights.

    Immutable after construction. ``window`` labels the time slice the
    graph was induced from (``"YYYY-MM"`` or ``"longitudinal"``).
    """

    __slots__ = ("node_ids", "window", "_index", "_edges", "_adj_cache")

    def __init__(
        self,
        nodes: Iterable[str],
        edges: Iterable[Tuple[str, str, float]],
        window: Optional[str] = None,
    ):
        merged: Dict[Tuple[str, str], float] = {}
        node_set: Set[str] = {str(n) for n in nodes}
        for a, b, w in edges:
            a, b = str(a), str(b)
            if a == b:
                raise GraphError(f"self-loop on node {a!r}")
            w = float(w)
            if not w > 0:
                raise GraphError(f"non-positive weight {w} on edge ({a!r}, {b!r})")
            key = _canon_edge(a, b)
            merged[key] = merged.get(key, 0.0) + w
            node_set.add(a)
            node_set.add(b)
        if any(not n for n in node_set):
            raise GraphError("empty person id")
        self.node_ids: Tuple[str, ...] = tuple(sorted(node_set))
        self.window = window
        self._index = {n: i for i, n in enumerate(self.node_ids)}
        self._edges = {k: merged[k] for k in sorted(merged)}
        self._adj_cache: Optional[sparse.csr_matrix] = None

    @classmethod
    def from_edges(
        cls, edges: Iterable[Tuple[str, str, float]], window: Optional[str] = None
    ) -> "CollabGraph":
        return cls((), edges, window=window)

    # -- basic accessors ---------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return len(self.node_ids)

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    @property
    def total_weight(self) -> float:
        return float(sum(self._edges.values()))

    def edges(self) -> Iterable[Tuple[str, str, float]]:
        for (a, b), w in self._edges.items():
            yield a, b, w

    def has_edge(self, a: str, b: str) -> bool:
        return _canon_edge(a, b) in self._edges

    def weight(self, a: str, b: str) -> float:
        return self._edges[_canon_edge(a, b)]

    def index_of(self, node: str) -> int:
        return self._index[node]

    def __contains__(self, node: str) -> bool:
        return node in self._index

    def adjacency(self) -> sparse.csr_matrix:
        """Symmetric weighted adjacency in CSR form, rows ordered by node_ids."""
        if self._adj_cache is None:
            n = self.n_nodes
            if not self._edges:
                self._adj_cache = sparse.csr_matrix((n, n))
            else:
                rows, cols, vals = [], [], []
                for (a, b), w in self._edges.items():
                    i, j = self._index[a], self._index[b]
                    rows += [i, j]
                    cols += [j, i]
                    vals += [w, w]
                self._adj_cache = sparse.csr_matrix(
                    (vals, (rows, cols)), shape=(n, n)
                )
        return self._adj_cache

    def degrees(self) -> np.ndarray:
        """Unweighted degree per node (order of node_ids)."""
        deg = np.zeros(self.n_nodes, dtype=np.int64)
        for (a, b) in self._edges:
            deg[self._index[a]] += 1
            deg[self._index[b]] += 1
        return deg

    def strengths(self) -> np.ndarray:
        """Weighted degree per node (order of node_ids)."""
        s = np.zeros(self.n_nodes)
        for (a, b), w in self._edges.items():
            s[self._index[a]] += w
            s[self._index[b]] += w
        return s

    def neighbors(self, node: str) -> List[str]:
        adj = self.adjacency()
        i = self._index[node]
        return [self.node_ids[j] for j in adj.indices[adj.indptr[i] : adj.indptr[i + 1]]]

    def subgraph(self, nodes: Iterable[str]) -> "CollabGraph":
        keep = set(nodes)
        edges = [(a, b, w) for (a, b), w in self._edges.items() if a in keep and b in keep]
        return CollabGraph(keep & set(self.node_ids), edges, window=self.window)

    def connected_components(self) -> List[List[str]]:
        """Components as sorted node lists, largest first (ties: smallest member id)."""
        n = self.n_nodes
        if n == 0:
            return []
        adj = self.adjacency()
        n_comp, labels = sparse.csgraph.connected_components(adj, directed=False)
        groups: List[List[str]] = [[] for _ in range(n_comp)]
        for i, lab in enumerate(labels):
            groups[lab].append(self.node_ids[i])
        groups.sort(key=lambda g: (-len(g), g[0]))
        return groups

    def __repr__(self) -> str:
        w = f", window={self.window!r}" if self.window else ""
        return f"CollabGraph(n={self.n_nodes}, m={self.n_edges}{w})"


@dataclass(frozen=True)
class DegreeStats:
    """Unweighted degree summary used for node sizing in renders."""

    per_node: Dict[str, int]
    max: float
    mean: float

    @classmethod
    def of(cls, g: CollabGraph) -> "DegreeStats":
        deg = g.degrees()
        per = {n: int(d) for n, d in zip(g.node_ids, deg)}
        if len(deg) == 0:
            return cls(per, 0.0, 0.0)
        return cls(per, float(deg.max()), float(deg.mean()))


@dataclass(frozen=True)
class Partition:
    """Node-to-community assignment with dense integer community ids."""

    assignment: Dict[str, int]
    level: int = 0

    def __post_init__(self):
        ids = set(self.assignment.values())
        if ids and ids != set(range(len(ids))):
            raise GraphError("community ids must be dense integers from 0")

    @property
    def n_communities(self) -> int:
        return len(set(self.assignment.values()))

    def communities(self) -> Dict[int, List[str]]:
        out: Dict[int, List[str]] = {}
        for node in sorted(self.assignment):
            out.setdefault(self.assignment[node], []).append(node)
        return out

    @classmethod
    def from_groups(cls, groups: Sequence[Iterable[str]], level: int = 0) -> "Partition":
        assignment = {}
        for cid, group in enumerate(groups):
            for node in group:
                assignment[node] = cid
        return cls(assignment, level)

    def renumbered(self) -> "Partition":
        """Renumber communities densely, ordered by smallest member id."""
        groups = sorted(self.communities().values(), key=lambda g: min(g))
        return Partition.from_groups(groups, self.level)


class OrgTree:
    """Dated snapshot of the formal reporting hierarchy (rooted tree)."""

    def __init__(self, snapshot_date: date, parent: Mapping[str, str], root: str):
        self.snapshot_date = snapshot_date
        self.parent: Dict[str, str] = dict(parent)
        self.root = root
        self._validate()
        self._children: Dict[str, List[str]] = {}
        for child in sorted(self.parent):
            self._children.setdefault(self.parent[child], []).append(child)

    def _validate(self) -> None:
        if self.root in self.parent:
            raise GraphError(f"root {self.root!r} must not have a parent")
        nodes = self.nodes()
        for child, par in self.parent.items():
            if par not in nodes:
                raise GraphError(f"parent {par!r} of {child!r} missing from tree")
        # Walk up from every node; revisiting a node on one walk means a cycle.
        for start in self.parent:
            seen = {start}
            cur = start
            while cur in self.parent:
                cur = self.parent[cur]
                if cur in seen:
                    raise GraphError(f"cycle detected involving {cur!r}")
                seen.add(cur)
            if cur != self.root:
                raise GraphError(f"node {start!r} does not reach root {self.root!r}")

    def nodes(self) -> Set[str]:
        return set(self.parent) | {self.root}

    def children(self, node: str) -> List[str]:
        return self._children.get(node, [])

    def __contains__(self, node: str) -> bool:
        return node == self.root or node in self.parent

    def __repr__(self) -> str:
        return f"OrgTree(date={self.snapshot_date}, n={len(self.nodes())})"


# ---------------------------------------------------------------------------
# structural operations
# ---------------------------------------------------------------------------


def largest_connected_component(g: CollabGraph) -> CollabGraph:
    """Induced subgraph on the largest component.

    Ties between equal-size components go to the one containing the
    lexicographically smallest member id, so repeated runs agree.
    """
    if g.n_nodes == 0:
        raise GraphError("empty graph")
    groups = g.connected_components()
    return g.subgraph(groups[0])


def _check_partition(g: CollabGraph, p: Partition) -> None:
    missing = [n for n in g.node_ids if n not in p.assignment]
    if missing:
        raise GraphError(f"partition incomplete: missing {missing[:5]}")


def modularity(g: CollabGraph, p: Partition, weighted: bool = True) -> float:
    """Newman modularity of a partition.

    Uses edge weights by default; ``weighted=False`` treats every edge as
    weight 1. Returns 0 for an edgeless graph (the degree term vanishes).
    """
    _check_partition(g, p)
    intra = 0.0
    strength: Dict[int, float] = {}
    total = 0.0
    for a, b, w in g.edges():
        if not weighted:
            w = 1.0
        total += w
        ca, cb = p.assignment[a], p.assignment[b]
        strength[ca] = strength.get(ca, 0.0) + w
        strength[cb] = strength.get(cb, 0.0) + w
        if ca == cb:
            intra += w
    if total == 0:
        return 0.0
    two_w = 2.0 * total
    return intra / total - sum((s / two_w) ** 2 for s in strength.values())


def cpm_quality(g: CollabGraph, p: Partition, resolution: float) -> float:
    """Constant Potts model quality: internal weight minus resolution-scaled pairs."""
    if resolution <= 0:
        raise GraphError("resolution must be positive")
    _check_partition(g, p)
    sizes: Dict[int, int] = {}
    for node in g.node_ids:
        cid = p.assignment[node]
        sizes[cid] = sizes.get(cid, 0) + 1
    internal: Dict[int, float] = {}
    for a, b, w in g.edges():
        ca, cb = p.assignment[a], p.assignment[b]
        if ca == cb:
            internal[ca] = internal.get(ca, 0.0) + w
    return sum(
        internal.get(cid, 0.0) - resolution * n * (n - 1) / 2.0
        for cid, n in sizes.items()
    )


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------


def write_edge_list(g: CollabGraph, path) -> None:
    """One line per edge: ``id1,id2,weight``."""
    with open(path, "w", encoding="utf-8") as fh:
        for a, b, w in g.edges():
            fh.write(f"{a},{b},{w:.10g}\n")


def read_edge_list(path, window: Optional[str] = None) -> CollabGraph:
    edges = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise GraphError(f"{path}:{lineno}: expected 'id1,id2,weight'")
            try:
                w = float(parts[2])
            except ValueError as exc:
                raise GraphError(f"{path}:{lineno}: bad weight {parts[2]!r}") from exc
            edges.append((parts[0], parts[1], w))
    return CollabGraph.from_edges(edges, window=window)


def write_org_csv(trees: Sequence[OrgTree], path) -> None:
    """Org snapshots as ``employee_id,manager_id,snapshot_date`` rows."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["employee_id", "manager_id", "snapshot_date"])
        for tree in trees:
            d = tree.snapshot_date.isoformat()
            writer.writerow([tree.root, "", d])
            for child in sorted(tree.parent):
                writer.writerow([child, tree.parent[child], d])


def write_partition_csv(hierarchy_levels: Sequence[Partition], path) -> None:
    """Partition CSV: ``person_id,level0_id,...,leaf_id`` (leaf = last column)."""
    if not hierarchy_levels:
        raise GraphError("no partition levels to write")
    nodes = sorted(hierarchy_levels[0].assignment)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = ["person_id"] + [f"level{i}_id" for i in range(len(hierarchy_levels))]
        writer.writerow(header)
        for node in nodes:
            writer.writerow([node] + [p.assignment[node] for p in hierarchy_levels])


def read_partition_csv(path) -> List[Partition]:
    """Inverse of :func:`write_partition_csv`; returns one Partition per level."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        n_levels = len(header) - 1
        assignments: List[Dict[str, int]] = [{} for _ in range(n_levels)]
        for row in reader:
            if not row:
                continue
            node = row[0]
            for i in range(n_levels):
                assignments[i][node] = int(row[1 + i])
    return [Partition(a, level=i).renumbered() for i, a in enumerate(assignments)]
