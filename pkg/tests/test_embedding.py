import numpy as np
import pytest

from orgmap.embedding import (
    EmbeddingError,
    build_omnibus,
    embed_adjacent_months,
    spectral_embed,
)
from orgmap.graph import CollabGraph


def single_edge_graph(window=None):
    return CollabGraph.from_edges([("a", "b", 1.0)], window=window)


def random_graph(n, seed, p=0.2, wmax=5.0):
    rng = np.random.default_rng(seed)
    edges = []
    nodes = [f"n{i:02d}" for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges.append((nodes[i], nodes[j], float(rng.uniform(0.5, wmax))))
    return CollabGraph(nodes, edges)


def test_omnibus_identical_months_blocks():
    g = single_edge_graph()
    omnibus = build_omnibus(g, g)
    dense = omnibus.dense()
    block = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert dense.shape == (4, 4)
    for bi in range(2):
        for bj in range(2):
            np.testing.assert_allclose(dense[2 * bi : 2 * bi + 2, 2 * bj : 2 * bj + 2], block)


def test_omnibus_zero_pads_missing_nodes():
    g_prev = CollabGraph.from_edges([("a", "b", 1.0), ("b", "c", 2.0)])
    g_curr = CollabGraph.from_edges([("a", "b", 1.0)])
    omnibus = build_omnibus(g_prev, g_curr)
    dense = omnibus.dense()
    _, curr_row = omnibus.block_index("c")
    assert np.all(dense[curr_row, omnibus.n :] == 0)
    assert np.all(dense[omnibus.n :, curr_row] == 0)


def test_omnibus_off_diagonal_average():
    g_prev = single_edge_graph()
    g_curr = CollabGraph(["a", "b"], [])
    omnibus = build_omnibus(g_prev, g_curr)
    dense = omnibus.dense()
    np.testing.assert_allclose(dense[:2, 2:], np.array([[0.0, 0.5], [0.5, 0.0]]))


def test_omnibus_both_empty_errors():
    with pytest.raises(EmbeddingError, match="empty"):
        build_omnibus(CollabGraph((), ()), CollabGraph((), ()))


def test_embed_identical_months_equal_vectors():
    g = single_edge_graph()
    omnibus = build_omnibus(g, g)
    vals = np.linalg.eigvalsh(omnibus.dense())
    np.testing.assert_allclose(sorted(vals), [-2.0, 0.0, 0.0, 2.0], atol=1e-12)
    pair = spectral_embed(omnibus)
    assert pair.dimension == 2
    for node in ("a", "b"):
        prev, curr = pair.vectors(node)
        np.testing.assert_allclose(prev, curr, atol=1e-9)


def test_embed_zero_matrix_rejected():
    omnibus = build_omnibus(CollabGraph(["a", "b"], []), CollabGraph(["a", "b"], []))
    with pytest.raises(EmbeddingError, match="degenerate"):
        spectral_embed(omnibus)


def test_reconstruction_matches_dense_oracle():
    # X X^T must equal the rank-d reconstruction U_d |L_d| U_d^T from a full
    # dense eigendecomposition, eigenpairs picked by |lambda|
    for seed in range(8):
        n = int(np.random.default_rng(seed).integers(8, 50))
        g_prev = random_graph(n, seed)
        g_curr = random_graph(n, seed + 1000)
        omnibus = build_omnibus(g_prev, g_curr)
        pair = spectral_embed(omnibus)
        d = pair.dimension

        dense = omnibus.dense()
        vals, vecs = np.linalg.eigh(dense)
        order = np.argsort(-np.abs(vals))[:d]
        oracle = vecs[:, order] @ np.diag(np.abs(vals[order])) @ vecs[:, order].T

        nodes = omnibus.node_ids
        x = np.vstack(
            [pair.positions[v][0] for v in nodes] + [pair.positions[v][1] for v in nodes]
        )
        np.testing.assert_allclose(x @ x.T, oracle, atol=1e-8)


def test_lanczos_agrees_with_dense():
    g_prev = random_graph(40, 3)
    g_curr = random_graph(40, 4)
    omnibus = build_omnibus(g_prev, g_curr)
    dense_pair = spectral_embed(omnibus, method="dense")
    lanczos_pair = spectral_embed(omnibus, method="lanczos")
    assert dense_pair.dimension == lanczos_pair.dimension
    nodes = omnibus.node_ids
    for which in (0, 1):
        xd = np.vstack([dense_pair.positions[v][which] for v in nodes])
        xl = np.vstack([lanczos_pair.positions[v][which] for v in nodes])
        np.testing.assert_allclose(xd @ xd.T, xl @ xl.T, atol=1e-6)


def test_cosine_similarities_are_solver_invariant():
    # cosine similarities are invariant to any orthogonal rotation of the
    # latent space, so two solver routes must agree on them
    g_prev = random_graph(30, 8)
    g_curr = random_graph(30, 9)
    omnibus = build_omnibus(g_prev, g_curr)
    p1 = spectral_embed(omnibus, method="dense")
    p2 = spectral_embed(omnibus, method="lanczos")

    def cosines(pair):
        out = []
        for node in omnibus.node_ids:
            prev, curr = pair.vectors(node)
            np_, nc = np.linalg.norm(prev), np.linalg.norm(curr)
            if np_ == 0 or nc == 0:
                continue
            out.append(float(prev @ curr / (np_ * nc)))
        return np.array(out)

    np.testing.assert_allclose(cosines(p1), cosines(p2), atol=1e-7)


def test_fixed_dimension_override():
    omnibus = build_omnibus(random_graph(20, 1), random_graph(20, 2))
    pair = spectral_embed(omnibus, fixed_d=5)
    assert pair.dimension == 5
    assert all(v[0].shape == (5,) for v in pair.positions.values())
    with pytest.raises(EmbeddingError):
        spectral_embed(omnibus, fixed_d=0)


def test_embed_adjacent_months():
    months = ["2024-01", "2024-02", "2024-03"]
    graphs = {m: random_graph(15, i, p=0.3) for i, m in enumerate(months)}
    for m in months:
        graphs[m].window = m
    pairs = embed_adjacent_months(graphs, months)
    assert len(pairs) == 2
    assert pairs[0].month_pair == ("2024-01", "2024-02")
    assert pairs[1].month_pair == ("2024-02", "2024-03")
    with pytest.raises(EmbeddingError):
        embed_adjacent_months(graphs, ["2024-01"])
