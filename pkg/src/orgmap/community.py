"""Workgroup detection: Leiden optimization of CPM or modularity, hierarchical
recursion to a maximum community size, and elbow selection over a size sweep.

The Leiden loop follows the published three-phase structure: a queue-based
local-moving phase, refinement inside each community, and aggregation on the
refined partition constrained by the unrefined one. All randomness flows
through one seeded generator, so identical seeds give identical partitions.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import eigsh

from .graph import CollabGraph, GraphError, Partition, modularity

_EPS = 1e-12
_THETA = 0.01  # randomness of the refinement merge step


class CommunityError(ValueError):
    pass


@dataclass
class WorkgroupHierarchy:
    """Nested partitions, level 0 coarsest; every leaf community ≤ max_size."""

    levels: List[Partition]
    max_size: int

    @property
    def leaf_partition(self) -> Partition:
        return self.levels[-1]

    @property
    def depth(self) -> int:
        return len(self.levels)


@dataclass
class SizeModularityCurve:
    """(max community size, leaf modularity) points, ascending in size."""

    points: List[Tuple[int, float]]

    def __post_init__(self):
        if len(self.points) < 3:
            raise CommunityError("elbow selection needs at least 3 points")
        sizes = [s for s, _ in self.points]
        if sizes != sorted(sizes):
            raise CommunityError("curve points must be sorted by size")


# ---------------------------------------------------------------------------
# internal aggregated-graph representation
# ---------------------------------------------------------------------------


class _AggGraph:
    """CSR adjacency (no self-loops) + self-loop weights + original node counts."""

    def __init__(self, adj: sparse.csr_matrix, self_w: np.ndarray, sizes: np.ndarray):
        self.adj = adj
        self.self_w = self_w
        self.sizes = sizes
        self.n = adj.shape[0]
        self.strength = np.asarray(adj.sum(axis=1)).ravel() + 2.0 * self_w
        self.two_w = float(self.strength.sum())

    @classmethod
    def from_graph(cls, g: CollabGraph) -> "_AggGraph":
        n = g.n_nodes
        return cls(g.adjacency(), np.zeros(n), np.ones(n, dtype=np.int64))

    def neighbor_weights(self, v: int) -> Tuple[np.ndarray, np.ndarray]:
        sl = slice(self.adj.indptr[v], self.adj.indptr[v + 1])
        return self.adj.indices[sl], self.adj.data[sl]


class _Quality:
    """Move gains for CPM or (generalized) modularity.

    Gains are comparable within one graph; constant terms that do not depend
    on the destination community are dropped.
    """

    def __init__(self, mode: str, resolution: float, graph: _AggGraph):
        if mode not in ("cpm", "modularity"):
            raise CommunityError(f"unknown quality {mode!r}")
        self.mode = mode
        self.gamma = resolution
        self.g = graph

    def penalty(self, v: int, comm_tot: float, comm_count: float) -> float:
        if self.mode == "cpm":
            return self.gamma * self.g.sizes[v] * comm_count
        if self.g.two_w == 0:
            return 0.0
        return self.gamma * self.g.strength[v] * comm_tot / self.g.two_w

    def node_well_connected(self, v: int, ext_w: float, comm_count: float) -> bool:
        if self.mode == "cpm":
            need = self.gamma * self.g.sizes[v] * (comm_count - self.g.sizes[v])
            return ext_w >= need - _EPS
        return ext_w > 0.0


def _local_move(
    g: _AggGraph,
    comm: np.ndarray,
    quality: _Quality,
    rng: np.random.Generator,
) -> bool:
    """Queue-based local moving; returns whether any node moved."""
    n = g.n
    tot = np.zeros(n + n)  # community strength sums (modularity penalty)
    count = np.zeros(n + n)  # community original-node counts (CPM penalty)
    for v in range(n):
        tot[comm[v]] += g.strength[v]
        count[comm[v]] += g.sizes[v]
    free: deque = deque(c for c in range(n + n) if count[c] == 0)

    order = rng.permutation(n)
    queue = deque(order)
    in_queue = np.ones(n, dtype=bool)
    moved_any = False

    while queue:
        v = queue.popleft()
        in_queue[v] = False
        cur = comm[v]
        tot[cur] -= g.strength[v]
        count[cur] -= g.sizes[v]

        nbrs, wts = g.neighbor_weights(v)
        k_vc: Dict[int, float] = {}
        for u, w in zip(nbrs.tolist(), wts.tolist()):
            c = comm[u]
            k_vc[c] = k_vc.get(c, 0.0) + w

        best_c = cur
        best_gain = k_vc.get(cur, 0.0) - quality.penalty(v, tot[cur], count[cur])
        if count[cur] > 0 and best_gain < -_EPS:
            # leaving into a fresh singleton community beats a bad current one
            best_c, best_gain = -1, 0.0
        for c in sorted(k_vc):
            if c == cur:
                continue
            gain = k_vc[c] - quality.penalty(v, tot[c], count[c])
            if gain > best_gain + _EPS:
                best_gain, best_c = gain, c

        if best_c == -1:
            best_c = free[0]
        if best_c != cur:
            if count[cur] == 0 and tot[cur] == 0:
                free.append(cur)
            if count[best_c] == 0:
                try:
                    free.remove(best_c)
                except ValueError:
                    pass
            moved_any = True
        comm[v] = best_c
        tot[best_c] += g.strength[v]
        count[best_c] += g.sizes[v]
        if best_c != cur:
            for u in nbrs.tolist():
                if not in_queue[u] and comm[u] != best_c:
                    queue.append(u)
                    in_queue[u] = True
    return moved_any


def _refine(
    g: _AggGraph,
    comm: np.ndarray,
    quality: _Quality,
    rng: np.random.Generator,
) -> np.ndarray:
    """Refinement inside each community, merging only well-connected singletons."""
    n = g.n
    refined = np.arange(n)
    ref_tot = g.strength.copy().astype(float)
    ref_count = g.sizes.astype(float).copy()
    ref_members = [1] * n  # member counts of refined communities

    comm_count = np.zeros(int(comm.max()) + 1 if n else 0)
    for v in range(n):
        comm_count[comm[v]] += g.sizes[v]

    # external (within own community) link weight of each refined community
    ext = np.zeros(n)
    for v in range(n):
        nbrs, wts = g.neighbor_weights(v)
        ext[v] = sum(w for u, w in zip(nbrs.tolist(), wts.tolist()) if comm[u] == comm[v])

    order = rng.permutation(n)
    for v in order:
        if ref_members[refined[v]] > 1:
            continue
        c = comm[v]
        if not quality.node_well_connected(v, ext[v], comm_count[c]):
            continue
        nbrs, wts = g.neighbor_weights(v)
        k_vr: Dict[int, float] = {}
        for u, w in zip(nbrs.tolist(), wts.tolist()):
            if comm[u] == c:
                r = refined[u]
                k_vr[r] = k_vr.get(r, 0.0) + w
        candidates: List[int] = [refined[v]]
        gains: List[float] = [0.0]
        for r in sorted(k_vr):
            if r == refined[v]:
                continue
            if not quality.node_well_connected(r, ext[r], comm_count[c]):
                continue
            gain = k_vr[r] - quality.penalty(v, ref_tot[r], ref_count[r])
            if gain >= -_EPS:
                candidates.append(r)
                gains.append(gain)
        if len(candidates) == 1:
            continue
        logits = np.array(gains) / _THETA
        logits -= logits.max()
        probs = np.exp(logits)
        probs /= probs.sum()
        target = int(rng.choice(np.array(candidates), p=probs))
        if target == refined[v]:
            continue
        src = refined[v]
        refined[v] = target
        ref_members[target] += 1
        ref_members[src] -= 1
        ref_tot[target] += g.strength[v]
        ref_count[target] += g.sizes[v]
        ref_tot[src] -= g.strength[v]
        ref_count[src] -= g.sizes[v]
        ext[target] += ext[src] - 2.0 * k_vr.get(target, 0.0)
        ext[src] = 0.0
    return refined


def _aggregate(
    g: _AggGraph, refined: np.ndarray, comm: np.ndarray
) -> Tuple[_AggGraph, np.ndarray, np.ndarray]:
    """Collapse refined communities to nodes; initial partition from `comm`."""
    ids = np.unique(refined)
    remap = {int(r): i for i, r in enumerate(ids)}
    m = len(ids)
    node_of = np.array([remap[int(r)] for r in refined])

    sizes = np.zeros(m, dtype=np.int64)
    self_w = np.zeros(m)
    new_comm = np.zeros(m, dtype=np.int64)
    for v in range(g.n):
        a = node_of[v]
        sizes[a] += g.sizes[v]
        self_w[a] += g.self_w[v]
        new_comm[a] = comm[v]

    coo = g.adj.tocoo()
    rows, cols, data = [], [], []
    for i, j, w in zip(coo.row, coo.col, coo.data):
        if i >= j:
            continue
        a, b = node_of[i], node_of[j]
        if a == b:
            self_w[a] += w
        else:
            rows += [a, b]
            cols += [b, a]
            data += [w, w]
    adj = sparse.csr_matrix((data, (rows, cols)), shape=(m, m))
    adj.sum_duplicates()
    # renumber the carried-over communities densely
    uniq = np.unique(new_comm)
    dense = {int(c): i for i, c in enumerate(uniq)}
    new_comm = np.array([dense[int(c)] for c in new_comm])
    return _AggGraph(adj, self_w, sizes), new_comm, node_of


def _split_disconnected(g: CollabGraph, groups: List[List[str]]) -> List[List[str]]:
    """Splitting a disconnected community never lowers CPM or modularity."""
    out: List[List[str]] = []
    for members in groups:
        if len(members) == 1:
            out.append(members)
            continue
        sub = g.subgraph(members)
        out.extend(sub.connected_components())
    return out


def _labels_quality(base: _AggGraph, labels: np.ndarray, mode: str, gamma: float) -> float:
    internal: Dict[int, float] = {}
    coo = base.adj.tocoo()
    for i, j, w in zip(coo.row, coo.col, coo.data):
        if i < j and labels[i] == labels[j]:
            c = int(labels[i])
            internal[c] = internal.get(c, 0.0) + w
    if mode == "cpm":
        count: Dict[int, int] = {}
        for v in range(base.n):
            c = int(labels[v])
            count[c] = count.get(c, 0) + int(base.sizes[v])
        return sum(
            internal.get(c, 0.0) - gamma * n * (n - 1) / 2.0 for c, n in count.items()
        )
    if base.two_w == 0:
        return 0.0
    tot: Dict[int, float] = {}
    for v in range(base.n):
        c = int(labels[v])
        tot[c] = tot.get(c, 0.0) + base.strength[v]
    total = base.two_w / 2.0
    return sum(internal.values()) / total - gamma * sum(
        (s / base.two_w) ** 2 for s in tot.values()
    )


def _leiden_pass(
    base: _AggGraph,
    labels: np.ndarray,
    mode: str,
    resolution: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """One full move-refine-aggregate cascade starting from the given labels."""
    work = base
    uniq = {int(c): i for i, c in enumerate(np.unique(labels))}
    comm = np.array([uniq[int(c)] for c in labels])
    membership = np.arange(base.n)
    qual = _Quality(mode, resolution, work)
    for _ in range(100):
        _local_move(work, comm, qual, rng)
        refined = _refine(work, comm, qual, rng)
        if len(np.unique(refined)) == work.n:
            break
        work, comm, node_of = _aggregate(work, refined, comm)
        qual = _Quality(mode, resolution, work)
        membership = node_of[membership]
        if work.n == 1:
            break
    return comm[membership]


def leiden(
    g: CollabGraph,
    quality: str = "cpm",
    resolution: float = 1.0,
    seed: int = 0,
) -> Partition:
    """Detect communities by Leiden optimization of CPM or modularity.

    The move-refine-aggregate cascade restarts from the flat graph until a
    full pass gains no quality, so wrongly merged groups can still unmerge.
    Deterministic for a fixed seed; every returned community induces a
    connected subgraph; quality never drops below the singleton start.
    """
    if resolution <= 0:
        raise CommunityError("resolution must be positive")
    if quality not in ("cpm", "modularity"):
        raise CommunityError(f"unknown quality {quality!r}")
    if g.n_nodes == 0:
        return Partition({}, 0)
    rng = np.random.default_rng(seed)
    base = _AggGraph.from_graph(g)
    labels = np.arange(base.n)
    prev_q = _labels_quality(base, labels, quality, resolution)
    for _ in range(50):
        labels = _leiden_pass(base, labels, quality, resolution, rng)
        q = _labels_quality(base, labels, quality, resolution)
        if q <= prev_q + _EPS:
            break
        prev_q = q

    groups: Dict[int, List[str]] = {}
    for node, lab in zip(g.node_ids, labels):
        groups.setdefault(int(lab), []).append(node)
    parts = _split_disconnected(g, [groups[k] for k in sorted(groups)])
    parts.sort(key=min)
    return Partition.from_groups(parts, level=0)


# ---------------------------------------------------------------------------
# hierarchy
# ---------------------------------------------------------------------------


def _bisect_by_spectrum(sub: CollabGraph) -> List[List[str]]:
    """Split by the sign of the adjacency's second eigenvector."""
    n = sub.n_nodes
    if n <= 1:
        return [list(sub.node_ids)]
    if n == 2:
        return [[sub.node_ids[0]], [sub.node_ids[1]]]
    adj = sub.adjacency()
    if n <= 1500:
        vals, vecs = np.linalg.eigh(adj.toarray())
        order = np.argsort(vals)[::-1]
        vec = vecs[:, order[1]]
    else:
        vals, vecs = eigsh(adj.astype(float), k=2, which="LA")
        vec = vecs[:, int(np.argsort(vals)[0])]
    side = vec > 0
    if side.all() or not side.any():
        side = vec > float(np.median(vec))
        if side.all() or not side.any():
            side = np.zeros(n, dtype=bool)
            side[: n // 2] = True
    first = [sub.node_ids[i] for i in range(n) if side[i]]
    second = [sub.node_ids[i] for i in range(n) if not side[i]]
    return [first, second]


def _force_split(sub: CollabGraph, max_size: int) -> List[List[str]]:
    pending = [list(sub.node_ids)]
    done: List[List[str]] = []
    while pending:
        members = pending.pop()
        if len(members) <= max_size:
            done.append(members)
            continue
        for part in _bisect_by_spectrum(sub.subgraph(members)):
            pending.append(part)
    done.sort(key=min)
    return done


def _child_seed(seed: int, level: int, cid: int) -> int:
    return (seed * 1_000_003 + level * 8191 + cid + 1) % (2**63)


def detect_hierarchy(g: CollabGraph, max_size: int, seed: int = 0) -> WorkgroupHierarchy:
    """Recursive CPM-Leiden at resolution 1.0 until every community fits.

    Oversized communities that Leiden cannot split are bisected by the sign
    of the second adjacency eigenvector until within ``max_size``.
    """
    if max_size < 2:
        raise CommunityError("max_size must be at least 2")
    levels = [leiden(g, "cpm", 1.0, seed)]
    while True:
        groups = levels[-1].communities()
        if all(len(m) <= max_size for m in groups.values()):
            break
        new_groups: List[List[str]] = []
        for cid in sorted(groups):
            members = groups[cid]
            if len(members) <= max_size:
                new_groups.append(members)
                continue
            sub = g.subgraph(members)
            subp = leiden(sub, "cpm", 1.0, _child_seed(seed, len(levels), cid))
            if subp.n_communities <= 1:
                new_groups.extend(_force_split(sub, max_size))
            else:
                new_groups.extend(subp.communities().values())
        nxt = Partition.from_groups(new_groups, level=len(levels))
        levels.append(nxt)
    return WorkgroupHierarchy(levels, max_size)


# ---------------------------------------------------------------------------
# size sweep and elbow
# ---------------------------------------------------------------------------


def elbow_point(points: Sequence[Tuple[float, float]]) -> int:
    """Index of the interior point farthest from the first-last chord.

    Both axes are min-max normalized first; ties go to the earliest point.
    """
    if len(points) < 3:
        raise CommunityError("elbow selection needs at least 3 points")
    xs = np.array([p[0] for p in points], dtype=float)
    ys = np.array([p[1] for p in points], dtype=float)
    xr = xs.max() - xs.min()
    yr = ys.max() - ys.min()
    xn = (xs - xs.min()) / xr if xr > 0 else np.zeros_like(xs)
    yn = (ys - ys.min()) / yr if yr > 0 else np.zeros_like(ys)
    x0, y0 = xn[0], yn[0]
    dx, dy = xn[-1] - x0, yn[-1] - y0
    norm = float(np.hypot(dx, dy))
    if norm == 0:
        return 1
    dist = np.abs(dy * (xn - x0) - dx * (yn - y0)) / norm
    interior = dist[1:-1]
    return 1 + int(np.argmax(interior > interior.max() - _EPS))


DEFAULT_SWEEP_SIZES = (10, 20, 40, 80, 160, 320)


def sweep_and_elbow(
    g: CollabGraph,
    candidate_sizes: Optional[Sequence[int]] = None,
    seed: int = 0,
) -> Tuple[SizeModularityCurve, int]:
    """Run the hierarchy at each candidate size and pick the elbow of the
    size-versus-leaf-modularity curve."""
    if candidate_sizes is None:
        candidate_sizes = [s for s in DEFAULT_SWEEP_SIZES if s < g.n_nodes]
    sizes = sorted(set(int(s) for s in candidate_sizes))
    if len(sizes) < 3:
        raise CommunityError("need at least 3 candidate sizes")
    points = []
    for s in sizes:
        hierarchy = detect_hierarchy(g, s, seed)
        points.append((s, modularity(g, hierarchy.leaf_partition)))
    curve = SizeModularityCurve(points)
    chosen = points[elbow_point(points)][0]
    return curve, chosen
