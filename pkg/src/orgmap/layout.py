"""Three-phase people-network layout.

Stage one is a simulated-annealing pass (a high-temperature liquid phase and
an expansion phase with linear cooling) that pulls proto-communities into
their own regions. Stages two and three are force-directed passes in the
ForceAtlas2 force model: an expansion pass with a high scaling parameter and
no gravity, then a contraction pass with low scaling, strong gravity, and
overlap prevention. Everything is seeded and single-threaded, so positions
are byte-identical across runs and worker counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import sparse

from .graph import CollabGraph


class LayoutError(ValueError):
    pass


@dataclass
class LayoutConfig:
    seed: int = 0
    liquid_iterations: Optional[int] = None  # default 200 * ln(n)
    expansion_iterations: Optional[int] = None  # default 100 * ln(n)
    fa2_expand_scaling: float = 40.0
    fa2_contract_scaling: float = 2.0
    gravity: float = 1.0
    barnes_hut_theta: float = 1.2
    convergence_tolerance: float = 1e-3
    fa2_iterations: int = 300
    exact_repulsion_limit: int = 2000

    def validate(self) -> None:
        if not self.fa2_expand_scaling > self.fa2_contract_scaling > 0:
            raise LayoutError("require fa2_expand_scaling > fa2_contract_scaling > 0")
        if self.barnes_hut_theta <= 0:
            raise LayoutError("barnes_hut_theta must be positive")


@dataclass
class LayoutResult:
    positions: Dict[str, Tuple[float, float]]
    node_radii: Dict[str, float]


def node_radii(g: CollabGraph, base: float = 1.0) -> np.ndarray:
    return base * np.sqrt(g.degrees() + 1.0)


# ---------------------------------------------------------------------------
# stage 1: annealing
# ---------------------------------------------------------------------------


def _density_penalty(pos: np.ndarray, cell: float) -> np.ndarray:
    """Occupancy of each node's grid cell (crowding pressure)."""
    cells = np.floor(pos / cell).astype(np.int64)
    keys = cells[:, 0] * 1_000_003 + cells[:, 1]
    uniq, inverse, counts = np.unique(keys, return_inverse=True, return_counts=True)
    return counts[inverse].astype(float) - 1.0


def _local_energy(
    adj: sparse.csr_matrix,
    strength: np.ndarray,
    pos_field: np.ndarray,
    candidate: np.ndarray,
    density: np.ndarray,
    density_weight: float,
) -> np.ndarray:
    """Sum of weighted squared distances to neighbors plus crowding penalty.

    Evaluated for every node at its candidate position against the current
    positions of all others.
    """
    sq = np.asarray((adj @ (pos_field**2).sum(axis=1)[:, None])).ravel()
    wx = adj @ pos_field
    cand_sq = (candidate**2).sum(axis=1)
    neighbor_term = strength * cand_sq - 2.0 * (candidate * wx).sum(axis=1) + sq
    return neighbor_term + density_weight * density


def anneal_stage(g: CollabGraph, cfg: LayoutConfig) -> Dict[str, Tuple[float, float]]:
    """Liquid + expansion annealing that separates proto-communities."""
    cfg.validate()
    n = g.n_nodes
    if n == 0:
        return {}
    if n == 1:
        return {g.node_ids[0]: (0.0, 0.0)}
    rng = np.random.default_rng(cfg.seed)
    adj = g.adjacency()
    strength = g.strengths()
    radius0 = math.sqrt(n)

    r = radius0 * np.sqrt(rng.random(n))
    theta = 2.0 * math.pi * rng.random(n)
    pos = np.column_stack([r * np.cos(theta), r * np.sin(theta)])

    liquid_iters = cfg.liquid_iterations
    if liquid_iters is None:
        liquid_iters = int(200 * math.log(n))
    expansion_iters = cfg.expansion_iterations
    if expansion_iters is None:
        expansion_iters = int(100 * math.log(n))

    mean_strength = float(strength.mean()) if strength.size else 1.0
    density_weight = mean_strength * (radius0 / 8.0) ** 2

    def sweep(temp: float, bound: float) -> None:
        nonlocal pos
        cell = max(bound / 16.0, 1e-6)
        density = _density_penalty(pos, cell)
        current = _local_energy(adj, strength, pos, pos, density, density_weight)

        with np.errstate(invalid="ignore"):
            bary = np.asarray((adj @ pos)) / np.where(strength > 0, strength, 1.0)[:, None]
        bary[strength == 0] = pos[strength == 0]
        jitter = rng.normal(scale=temp, size=(n, 2))
        use_jump = rng.random(n) < 0.5
        candidate = np.where(
            use_jump[:, None], pos + jitter, bary + 0.25 * jitter
        )
        norms = np.linalg.norm(candidate, axis=1)
        over = norms > bound
        candidate[over] *= (bound / norms[over])[:, None]

        cand_keys = (np.floor(candidate / cell).astype(np.int64) * np.array([1_000_003, 1])).sum(axis=1)
        pos_keys = (np.floor(pos / cell).astype(np.int64) * np.array([1_000_003, 1])).sum(axis=1)
        uniq, counts = np.unique(pos_keys, return_counts=True)
        slot = np.clip(np.searchsorted(uniq, cand_keys), 0, len(uniq) - 1)
        cand_density = np.where(uniq[slot] == cand_keys, counts[slot], 0).astype(float)
        cand_density[cand_keys == pos_keys] -= 1.0
        proposed = _local_energy(adj, strength, pos, candidate, cand_density, density_weight)
        accept = proposed < current
        pos[accept] = candidate[accept]

    temp0 = 0.35 * radius0
    for _ in range(liquid_iters):
        sweep(temp0, radius0)
    for k in range(expansion_iters):
        frac = (k + 1) / expansion_iters
        temp = temp0 * max(1.0 - frac, 0.02)
        bound = radius0 * (1.0 + 2.0 * frac)
        sweep(temp, bound)

    return {node: (float(x), float(y)) for node, (x, y) in zip(g.node_ids, pos)}


# ---------------------------------------------------------------------------
# stage 2/3: ForceAtlas2
# ---------------------------------------------------------------------------


class _QuadTree:
    """Barnes-Hut quadtree over node positions with per-cell mass totals."""

    __slots__ = ("cx", "cy", "half", "mass", "mx", "my", "children", "index")

    def __init__(self, cx: float, cy: float, half: float):
        self.cx, self.cy, self.half = cx, cy, half
        self.mass = 0.0
        self.mx = 0.0
        self.my = 0.0
        self.children = None
        self.index = -1  # leaf payload

    def insert(self, i: int, x: float, y: float, m: float) -> None:
        node = self
        depth = 0
        while True:
            node.mass += m
            node.mx += m * x
            node.my += m * y
            if node.children is None and node.index < 0:
                node.index = i
                return
            if node.children is None:
                if depth > 48:  # coincident points; keep them in one leaf
                    return
                node._subdivide()
            node = node._child_for(x, y)
            depth += 1

    def _subdivide(self) -> None:
        h = self.half / 2.0
        self.children = [
            _QuadTree(self.cx - h, self.cy - h, h),
            _QuadTree(self.cx + h, self.cy - h, h),
            _QuadTree(self.cx - h, self.cy + h, h),
            _QuadTree(self.cx + h, self.cy + h, h),
        ]
        # push the existing payload down one level
        i = self.index
        self.index = -1
        if i >= 0:
            child = self._child_for(_bh_x[i], _bh_y[i])
            child.mass += _bh_m[i]
            child.mx += _bh_m[i] * _bh_x[i]
            child.my += _bh_m[i] * _bh_y[i]
            child.index = i

    def _child_for(self, x: float, y: float) -> "_QuadTree":
        east = x >= self.cx
        north = y >= self.cy
        return self.children[(2 if north else 0) + (1 if east else 0)]


_bh_x = _bh_y = _bh_m = None  # module-level scratch for tree construction


def _barnes_hut_repulsion(
    pos: np.ndarray, mass: np.ndarray, scaling: float, theta: float
) -> np.ndarray:
    global _bh_x, _bh_y, _bh_m
    n = len(pos)
    _bh_x, _bh_y, _bh_m = pos[:, 0], pos[:, 1], mass
    half = max(
        float(np.abs(pos).max() if n else 1.0), 1.0
    )
    root = _QuadTree(0.0, 0.0, half * 1.01)
    for i in range(n):
        root.insert(i, pos[i, 0], pos[i, 1], mass[i])
    force = np.zeros((n, 2))
    for i in range(n):
        xi, yi, mi = pos[i, 0], pos[i, 1], mass[i]
        stack = [root]
        fx = fy = 0.0
        while stack:
            node = stack.pop()
            if node.mass == 0.0:
                continue
            gx = node.mx / node.mass
            gy = node.my / node.mass
            dx = xi - gx
            dy = yi - gy
            dist_sq = dx * dx + dy * dy
            if node.children is None:
                if node.index == i or node.index < 0:
                    continue
                if dist_sq < 1e-12:
                    dist_sq = 1e-12
                f = scaling * mi * node.mass / dist_sq
                fx += f * dx
                fy += f * dy
            elif (2.0 * node.half) ** 2 < theta * theta * dist_sq:
                f = scaling * mi * node.mass / max(dist_sq, 1e-12)
                fx += f * dx
                fy += f * dy
            else:
                stack.extend(node.children)
        force[i, 0] = fx
        force[i, 1] = fy
    return force


def _exact_repulsion(
    pos: np.ndarray,
    mass: np.ndarray,
    scaling: float,
    radii: Optional[np.ndarray],
) -> np.ndarray:
    # elementwise broadcasting only: no BLAS reductions, so results do not
    # depend on the thread count of the underlying math library
    px, py = pos[:, 0], pos[:, 1]
    dx = px[:, None] - px[None, :]
    dy = py[:, None] - py[None, :]
    dist_sq = dx * dx + dy * dy
    np.fill_diagonal(dist_sq, np.inf)
    factor = scaling * mass[:, None] * mass[None, :] / dist_sq
    if radii is not None:
        reach = radii[:, None] + radii[None, :]
        factor = np.where(dist_sq < reach * reach, factor * 100.0, factor)
    return np.column_stack([(factor * dx).sum(axis=1), (factor * dy).sum(axis=1)])


def fa2_stage(
    g: CollabGraph,
    positions: Dict[str, Tuple[float, float]],
    scaling: float,
    gravity_mode: str = "none",
    prevent_overlap: bool = False,
    iterations: int = 300,
    cfg: Optional[LayoutConfig] = None,
) -> Dict[str, Tuple[float, float]]:
    """One ForceAtlas2 pass over existing positions.

    Linear attraction along edges (times weight), repulsion proportional to
    (deg_u+1)(deg_v+1)/distance, optional strong gravity that is not
    attenuated by distance, and the adaptive swinging/traction speed scheme.
    Overlap prevention boosts repulsion and zeroes attraction for
    intersecting node disks.
    """
    cfg = cfg or LayoutConfig()
    if gravity_mode not in ("none", "strong"):
        raise LayoutError(f"unknown gravity mode {gravity_mode!r}")
    n = g.n_nodes
    if n == 0:
        return {}
    pos = np.array([positions[node] for node in g.node_ids], dtype=float)
    if n == 1:
        return {g.node_ids[0]: (float(pos[0, 0]), float(pos[0, 1]))}
    mass = g.degrees() + 1.0
    radii = node_radii(g) if prevent_overlap else None
    edges = [(g.index_of(a), g.index_of(b), w) for a, b, w in g.edges()]
    eu = np.array([e[0] for e in edges], dtype=np.int64)
    ev = np.array([e[1] for e in edges], dtype=np.int64)
    ew = np.array([e[2] for e in edges], dtype=float)
    if len(ew):
        # keep the attraction/repulsion balance independent of the weight
        # unit (raw message counts would drown the repulsion term)
        ew = ew / ew.mean()

    if np.unique(pos, axis=0).shape[0] < n:
        # coincident nodes produce undefined directions; one deterministic jitter
        jig = np.random.default_rng(cfg.seed + 1).normal(scale=1e-6, size=pos.shape)
        pos = pos + jig
        if np.unique(pos, axis=0).shape[0] < n:
            raise LayoutError("coincident nodes persist after jitter")

    speed = 1.0
    speed_efficiency = 1.0
    old_force = np.zeros((n, 2))
    for _ in range(iterations):
        if n <= cfg.exact_repulsion_limit:
            force = _exact_repulsion(pos, mass, scaling, radii)
        else:
            force = _barnes_hut_repulsion(pos, mass, scaling, cfg.barnes_hut_theta)

        if len(eu):
            diff = pos[eu] - pos[ev]
            if radii is not None:
                dist = np.linalg.norm(diff, axis=1)
                blocked = dist < radii[eu] + radii[ev]
                attract = np.where(blocked, 0.0, ew)
            else:
                attract = ew
            pull = attract[:, None] * diff
            np.add.at(force, eu, -pull)
            np.add.at(force, ev, pull)

        if gravity_mode == "strong":
            norms = np.linalg.norm(pos, axis=1)
            safe = np.where(norms > 1e-12, norms, 1.0)
            force -= cfg.gravity * mass[:, None] * pos / safe[:, None]

        if not np.isfinite(force).all():
            raise LayoutError("non-finite forces (degenerate geometry)")

        swing = np.linalg.norm(old_force - force, axis=1)
        traction = 0.5 * np.linalg.norm(old_force + force, axis=1)
        total_swing = float((mass * swing).sum()) + 1e-12
        total_traction = float((mass * traction).sum()) + 1e-12
        node_swing = mass * swing

        jitter_opt = 0.05 * math.sqrt(n)
        jt = max(math.sqrt(jitter_opt), min(10.0, jitter_opt * total_traction / n**2))
        if total_swing / total_traction > 2.0:
            if speed_efficiency > 0.05:
                speed_efficiency *= 0.5
            jt = max(jt, 1.0)
        target_speed = jt * speed_efficiency * total_traction / total_swing
        if total_swing > jt * total_traction:
            if speed_efficiency > 0.05:
                speed_efficiency *= 0.7
        elif speed < 1000:
            speed_efficiency *= 1.3
        speed = speed + min(target_speed - speed, 0.5 * speed)

        factor = speed / (1.0 + np.sqrt(speed * node_swing))
        if prevent_overlap:
            # cap displacement so disks settle instead of tunnelling
            step = force * factor[:, None]
            lengths = np.linalg.norm(step, axis=1)
            cap = 10.0
            too_far = lengths > cap
            step[too_far] *= (cap / lengths[too_far])[:, None]
            disp = step
        else:
            disp = force * factor[:, None]
        pos = pos + disp
        old_force = force
        if float(np.abs(disp).mean()) < cfg.convergence_tolerance:
            break

    if prevent_overlap:
        pos = _resolve_overlaps(pos, node_radii(g))
    return {node: (float(x), float(y)) for node, (x, y) in zip(g.node_ids, pos)}


def _circle_overlap_area(d: float, r1: float, r2: float) -> float:
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        r = min(r1, r2)
        return math.pi * r * r
    a1 = r1 * r1 * math.acos((d * d + r1 * r1 - r2 * r2) / (2 * d * r1))
    a2 = r2 * r2 * math.acos((d * d + r2 * r2 - r1 * r1) / (2 * d * r2))
    a3 = 0.5 * math.sqrt(
        max((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2), 0.0)
    )
    return a1 + a2 - a3


def overlap_ratio(pos: np.ndarray, radii: np.ndarray) -> float:
    """Total pairwise intersection area over total disk area."""
    n = len(pos)
    total_area = float(np.pi * (radii**2).sum())
    if n < 2 or total_area == 0:
        return 0.0
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))
    overlap = 0.0
    reach = radii[:, None] + radii[None, :]
    ii, jj = np.where(np.triu(dist < reach, k=1))
    for i, j in zip(ii, jj):
        overlap += _circle_overlap_area(float(dist[i, j]), float(radii[i]), float(radii[j]))
    return overlap / total_area


def _resolve_overlaps(
    pos: np.ndarray, radii: np.ndarray, target: float = 0.005, max_sweeps: int = 60
) -> np.ndarray:
    """Deterministic pairwise separation until residual overlap is tiny."""
    pos = pos.copy()
    n = len(pos)
    for _ in range(max_sweeps):
        if overlap_ratio(pos, radii) <= target:
            break
        diff = pos[:, None, :] - pos[None, :, :]
        dist = np.sqrt((diff**2).sum(axis=2))
        reach = radii[:, None] + radii[None, :]
        ii, jj = np.where(np.triu(dist < reach, k=1))
        for i, j in zip(ii, jj):
            d = dist[i, j]
            if d < 1e-9:
                direction = np.array([1.0, 0.0])
                d = 1e-9
            else:
                direction = (pos[i] - pos[j]) / d
            push = 0.5 * (reach[i, j] - d) * 1.05
            pos[i] += direction * push
            pos[j] -= direction * push
    return pos


# ---------------------------------------------------------------------------
# full pipeline
# ---------------------------------------------------------------------------


def layout_pipeline(g: CollabGraph, cfg: Optional[LayoutConfig] = None) -> LayoutResult:
    """Anneal, expand (high scaling, no gravity), contract (low scaling,
    strong gravity, no-overlap)."""
    cfg = cfg or LayoutConfig()
    cfg.validate()
    radii = node_radii(g)
    radii_map = {node: float(r) for node, r in zip(g.node_ids, radii)}
    if g.n_nodes == 0:
        return LayoutResult({}, {})
    pos = anneal_stage(g, cfg)
    pos = fa2_stage(
        g, pos, cfg.fa2_expand_scaling, "none", False, cfg.fa2_iterations, cfg
    )
    pos = fa2_stage(
        g, pos, cfg.fa2_contract_scaling, "strong", True, cfg.fa2_iterations, cfg
    )
    return LayoutResult(pos, radii_map)


def write_positions_csv(result: LayoutResult, path) -> None:
    """Positions CSV: ``person_id,x,y,radius``."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("person_id,x,y,radius\n")
        for node in sorted(result.positions):
            x, y = result.positions[node]
            fh.write(f"{node},{x:.6f},{y:.6f},{result.node_radii[node]:.6f}\n")


def read_positions_csv(path) -> LayoutResult:
    positions = {}
    radii = {}
    with open(path, encoding="utf-8") as fh:
        next(fh)
        for line in fh:
            node, x, y, r = line.strip().split(",")
            positions[node] = (float(x), float(y))
            radii[node] = float(r)
    return LayoutResult(positions, radii)
