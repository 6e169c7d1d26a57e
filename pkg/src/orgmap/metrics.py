"""Workgroup fluidity and freedom.

Fluidity is the mean month-over-month change in a workgroup's latent
connectivity: one minus the average cosine similarity of member positions
across each adjacent month pair, averaged over pairs. Freedom is the
complement of a workgroup's alignment with the reporting tree: one minus the
ratio of workgroup size to the size of its minimal spanning subtree extended
with the peer groups of the subtree's non-root members.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .embedding import EmbeddingPair
from .graph import OrgTree, Partition


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class Workgroup:
    id: int
    members: frozenset

    @classmethod
    def of(cls, cid: int, members: Iterable[str]) -> "Workgroup":
        members = frozenset(members)
        if not members:
            raise MetricError("workgroup must be non-empty")
        return cls(cid, members)


@dataclass
class FluidityScore:
    workgroup_id: int
    value: float
    months_used: int
    per_month: List[Tuple[Tuple[Optional[str], Optional[str]], float]]


@dataclass
class FreedomScore:
    workgroup_id: int
    value: float
    per_month: List[Tuple[str, float]]


def workgroups_of(partition: Partition) -> List[Workgroup]:
    return [Workgroup.of(cid, members) for cid, members in partition.communities().items()]


# ---------------------------------------------------------------------------
# fluidity
# ---------------------------------------------------------------------------


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    # clamped against floating-point drift so 1 - cos stays in [0, 2]
    val = float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))
    return max(-1.0, min(1.0, val))


def fluidity(w: Workgroup, embeddings: Sequence[EmbeddingPair]) -> FluidityScore:
    """Mean month-over-month latent change for the workgroup's members.

    Members with a zero position vector in either month of a pair were not
    collaborating then and are skipped for that pair; pairs where every
    member is skipped do not count toward the denominator.
    """
    if not embeddings:
        raise MetricError("at least one embedding pair required")
    contributions = []
    for pair in embeddings:
        sims = []
        for member in sorted(w.members):
            if member not in pair.positions:
                continue
            prev, curr = pair.positions[member]
            if np.linalg.norm(prev) == 0.0 or np.linalg.norm(curr) == 0.0:
                continue
            sims.append(_cosine(prev, curr))
        if sims:
            contributions.append((pair.month_pair, 1.0 - float(np.mean(sims))))
    if not contributions:
        raise MetricError(f"no fluidity signal for workgroup {w.id}")
    value = float(np.mean([c for _, c in contributions]))
    return FluidityScore(w.id, value, len(contributions), contributions)


# ---------------------------------------------------------------------------
# freedom
# ---------------------------------------------------------------------------


def minimal_spanning_subtree(tree: OrgTree, members: Iterable[str]) -> Set[str]:
    """Node set of the smallest connected subtree containing the members.

    Equals the union of pairwise tree paths; its root is the node nearest
    the global root. Members absent from the tree raise only if none are
    present at all.
    """
    present = {m for m in members if m in tree}
    if not present:
        raise MetricError("workgroup not resolvable in org tree")

    # member counts per subtree via one postorder pass
    count: Dict[str, int] = {}
    stack: List[Tuple[str, bool]] = [(tree.root, False)]
    while stack:
        node, processed = stack.pop()
        if processed:
            count[node] = (1 if node in present else 0) + sum(
                count[c] for c in tree.children(node)
            )
            continue
        stack.append((node, True))
        for child in tree.children(node):
            stack.append((child, False))

    total = len(present)
    # descend to the deepest node whose subtree still holds every member
    subtree_root = tree.root
    while subtree_root not in present:
        carriers = [c for c in tree.children(subtree_root) if count[c] == total]
        if not carriers:
            break
        subtree_root = carriers[0]

    nodes: Set[str] = set()
    stack2 = [subtree_root]
    while stack2:
        node = stack2.pop()
        nodes.add(node)
        for child in tree.children(node):
            if count.get(child, 0) > 0:
                stack2.append(child)
    return nodes


def freedom_for_tree(w: Workgroup, tree: OrgTree) -> Optional[float]:
    """Single-snapshot freedom, or None when no member resolves in the tree."""
    resolved = {m for m in w.members if m in tree}
    if not resolved:
        return None
    mst = minimal_spanning_subtree(tree, resolved)
    alignment = set(mst)
    for node in mst:
        parent = tree.parent.get(node)
        # the subtree root (parent outside the MST) contributes no peer group
        if parent is None or parent not in mst:
            continue
        alignment.update(tree.children(parent))
    return 1.0 - len(resolved) / len(alignment)


def freedom(w: Workgroup, trees: Sequence[OrgTree]) -> FreedomScore:
    """Mean freedom across the monthly org snapshots that resolve the group."""
    if not trees:
        raise MetricError("at least one org tree required")
    per_month = []
    for tree in trees:
        value = freedom_for_tree(w, tree)
        if value is not None:
            per_month.append((tree.snapshot_date.isoformat(), value))
    if not per_month:
        raise MetricError(f"workgroup {w.id} not resolvable in any org snapshot")
    return FreedomScore(w.id, float(np.mean([v for _, v in per_month])), per_month)


# ---------------------------------------------------------------------------
# aggregation
# ---------------------------------------------------------------------------


def aggregate_node_metric(
    values: Dict[str, float],
    partition: Partition,
    stat: str = "mean",
) -> Dict[int, Optional[float]]:
    """Community-level mean or median of a node metric.

    Nodes without a value are excluded; a community with no values at all
    maps to None (missing), never to zero.
    """
    if stat not in ("mean", "median"):
        raise MetricError(f"unknown statistic {stat!r}")
    out: Dict[int, Optional[float]] = {}
    for cid, members in partition.communities().items():
        present = [values[m] for m in members if m in values]
        if not present:
            out[cid] = None
        elif stat == "mean":
            out[cid] = float(np.mean(present))
        else:
            out[cid] = float(np.median(present))
    return out


def write_metrics_csv(
    rows: Sequence[Tuple[int, int, Optional[float], Optional[float]]], path
) -> None:
    """Summary CSV: ``workgroup_id,size,freedom,fluidity`` (blank = missing)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("workgroup_id,size,freedom,fluidity\n")
        for wid, size, free, fluid in rows:
            f1 = "" if free is None else f"{free:.10g}"
            f2 = "" if fluid is None else f"{fluid:.10g}"
            fh.write(f"{wid},{size},{f1},{f2}\n")


def write_metric_detail_csv(
    freedom_scores: Dict[int, FreedomScore],
    fluidity_scores: Dict[int, FluidityScore],
    path,
) -> None:
    """Per-month detail: ``workgroup_id,metric,month,value``."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("workgroup_id,metric,month,value\n")
        for wid in sorted(freedom_scores):
            for month, value in freedom_scores[wid].per_month:
                fh.write(f"{wid},freedom,{month},{value:.10g}\n")
        for wid in sorted(fluidity_scores):
            for pair, value in fluidity_scores[wid].per_month:
                fh.write(f"{wid},fluidity,{pair[0]}->{pair[1]},{value:.10g}\n")
