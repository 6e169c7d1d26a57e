"""Omnibus spectral embedding of adjacent monthly graph pairs.

Two monthly adjacency matrices over the union node set form a 2n x 2n block
matrix whose off-diagonal blocks are their elementwise average. Its leading
eigenpairs (by absolute eigenvalue) give every node one position vector per
month in a shared latent space, so month-over-month movement is comparable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .graph import CollabGraph

DENSE_NODE_LIMIT = 500  # below this union size the dense eigensolver is used


class EmbeddingError(ValueError):
    pass


@dataclass
class OmnibusMatrix:
    """2n x 2n symmetric block matrix for one adjacent month pair."""

    matrix: sparse.csr_matrix
    node_ids: Tuple[str, ...]
    month_pair: Tuple[Optional[str], Optional[str]]

    @property
    def n(self) -> int:
        return len(self.node_ids)

    def block_index(self, node: str) -> Tuple[int, int]:
        i = self.node_ids.index(node)
        return i, self.n + i

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()


@dataclass
class EmbeddingPair:
    """Per-node latent positions for the two months of one omnibus embedding."""

    dimension: int
    positions: Dict[str, Tuple[np.ndarray, np.ndarray]]
    month_pair: Tuple[Optional[str], Optional[str]]
    eigenvalues: np.ndarray  # all computed eigenvalues, |.| descending

    def vectors(self, node: str) -> Tuple[np.ndarray, np.ndarray]:
        return self.positions[node]


def build_omnibus(g_prev: CollabGraph, g_curr: CollabGraph) -> OmnibusMatrix:
    """Union-node omnibus matrix; nodes absent from a month get zero rows."""
    union = sorted(set(g_prev.node_ids) | set(g_curr.node_ids))
    if not union:
        raise EmbeddingError("both graphs empty")
    n = len(union)
    index = {node: i for i, node in enumerate(union)}

    def lift(g: CollabGraph) -> sparse.csr_matrix:
        rows, cols, vals = [], [], []
        for a, b, w in g.edges():
            i, j = index[a], index[b]
            rows += [i, j]
            cols += [j, i]
            vals += [w, w]
        return sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))

    a_prev = lift(g_prev)
    a_curr = lift(g_curr)
    off = (a_prev + a_curr) * 0.5
    matrix = sparse.bmat([[a_prev, off], [off, a_curr]], format="csr")
    return OmnibusMatrix(matrix, tuple(union), (g_prev.window, g_curr.window))


def _eig_abs_desc(matrix: sparse.csr_matrix, k: int, method: str) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenpairs sorted by |eigenvalue| descending, deterministic sign."""
    m = matrix.shape[0]
    if method == "dense" or (method == "auto" and m < 2 * DENSE_NODE_LIMIT):
        vals, vecs = np.linalg.eigh(matrix.toarray())
    else:
        k_eff = min(k, m - 1)
        v0 = np.full(m, 1.0 / np.sqrt(m))
        try:
            vals, vecs = eigsh(
                matrix.astype(float),
                k=k_eff,
                which="LM",
                v0=v0,
                tol=1e-10,
                maxiter=10 * m,
            )
        except ArpackNoConvergence as exc:
            raise EmbeddingError(
                f"eigensolver failed to converge after {10 * m} iterations "
                f"({len(exc.eigenvalues)} of {k_eff} eigenvalues converged)"
            ) from exc
    order = np.lexsort((-vals, -np.abs(vals)))[:k]
    vals = vals[order]
    vecs = vecs[:, order]
    # fix each eigenvector's sign: largest-magnitude entry positive
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        lead = int(np.argmax(np.abs(col)))
        if col[lead] < 0:
            vecs[:, j] = -col
    return vals, vecs


def _choose_dimension(abs_vals: np.ndarray, d_min: int, d_max: int) -> int:
    """Largest relative gap in the |eigenvalue| scree within [d_min, d_max]."""
    avail = len(abs_vals)
    lo = min(d_min, avail)
    hi = min(d_max, avail)
    if avail <= lo:
        return avail
    best_d, best_gap = lo, -1.0
    for d in range(lo, hi + 1):
        if d >= avail:
            break
        top = abs_vals[d - 1]
        gap = (top - abs_vals[d]) / top if top > 0 else 0.0
        if gap > best_gap + 1e-15:
            best_gap, best_d = gap, d
    return best_d


def spectral_embed(
    omnibus: OmnibusMatrix,
    d_min: int = 2,
    d_max: int = 32,
    fixed_d: Optional[int] = None,
    method: str = "auto",
) -> EmbeddingPair:
    """Adjacency spectral embedding of the omnibus matrix.

    Positions are U_d |L_d|^(1/2) with the d eigenpairs of largest absolute
    eigenvalue; d is picked at the largest relative scree gap inside
    [d_min, d_max] unless ``fixed_d`` pins it. Rows split into the
    previous-month and current-month blocks.
    """
    if method not in ("auto", "dense", "lanczos"):
        raise EmbeddingError(f"unknown method {method!r}")
    two_n = omnibus.matrix.shape[0]
    want = min(max(d_max + 1, (fixed_d or 0) + 1), two_n)
    vals, vecs = _eig_abs_desc(omnibus.matrix, want, method)
    abs_vals = np.abs(vals)
    if abs_vals.max(initial=0.0) <= 1e-12:
        raise EmbeddingError("degenerate omnibus matrix: no explanatory directions")
    if fixed_d is not None:
        if fixed_d < 1 or fixed_d > two_n:
            raise EmbeddingError(f"fixed dimension {fixed_d} out of range")
        d = fixed_d
    else:
        d = _choose_dimension(abs_vals, d_min, d_max)
    x = vecs[:, :d] * np.sqrt(abs_vals[:d])
    n = omnibus.n
    positions = {
        node: (x[i].copy(), x[n + i].copy()) for i, node in enumerate(omnibus.node_ids)
    }
    return EmbeddingPair(d, positions, omnibus.month_pair, vals)


def embed_adjacent_months(
    graphs: Dict[str, CollabGraph],
    months: List[str],
    d_min: int = 2,
    d_max: int = 32,
) -> List[EmbeddingPair]:
    """One omnibus embedding per adjacent month pair, in month order."""
    if len(months) < 2:
        raise EmbeddingError("need at least two months for adjacent pairs")
    pairs = []
    for prev, curr in zip(months, months[1:]):
        omnibus = build_omnibus(graphs[prev], graphs[curr])
        pairs.append(spectral_embed(omnibus, d_min=d_min, d_max=d_max))
    return pairs


def write_embedding_csv(pairs: List[EmbeddingPair], path) -> None:
    """Optional dump: ``person_id,month,v1..vd`` rows for every embedding."""
    with open(path, "w", encoding="utf-8") as fh:
        d = max(p.dimension for p in pairs)
        header = ",".join(["person_id", "month"] + [f"v{i+1}" for i in range(d)])
        fh.write(header + "\n")
        for pair in pairs:
            for which, month in ((0, pair.month_pair[0]), (1, pair.month_pair[1])):
                for node in sorted(pair.positions):
                    vec = pair.positions[node][which]
                    cells = [f"{v:.10g}" for v in vec] + [""] * (d - len(vec))
                    fh.write(f"{node},{month}," + ",".join(cells) + "\n")
