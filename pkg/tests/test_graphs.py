import numpy as np
import pytest

from sparse_givens.givens import build_covariance, build_precision, rotator_matrix
from sparse_givens.graphs import (
    UndirectedGraph,
    graph_from_precision,
    is_decomposable,
    propagate_rotator_edges,
    sparsity_pattern_match,
    write_edge_csv,
)

from conftest import make_random_model


def brute_force_edges(K, thresh):
    # independent oracle: explicit entry scan
    q = K.shape[0]
    return frozenset(
        (i + 1, j + 1)
        for i in range(q - 1)
        for j in range(i + 1, q)
        if abs(K[i, j]) > thresh
    )


def test_graph_from_diagonal_precision_is_empty():
    g = graph_from_precision(np.diag([1.0, 2.0, 3.0]))
    assert g.edges == frozenset()


def test_graph_from_single_offdiagonal_entry():
    K = np.eye(4)
    K[0, 2] = K[2, 0] = 0.5
    g = graph_from_precision(K)
    assert g.edges == frozenset({(1, 3)})


def test_graph_matches_brute_force_scan(rng):
    for _ in range(20):
        m = make_random_model(rng, q=6, z=5)
        K = build_precision(m)
        g = graph_from_precision(K, tol=1e-9)
        assert g.edges == brute_force_edges(K, 1e-9 * np.abs(K).max())


def test_graph_rejects_asymmetric():
    K = np.eye(3)
    K[0, 1] = 0.5
    with pytest.raises(ValueError):
        graph_from_precision(K)


def test_propagate_on_empty_graph():
    g = propagate_rotator_edges(UndirectedGraph(q=3), (1, 2))
    assert g.edges == frozenset({(1, 2)})


def test_propagate_unions_neighborhoods():
    g0 = UndirectedGraph(q=3, edges=frozenset({(2, 3)}))
    g1 = propagate_rotator_edges(g0, (1, 2))
    assert g1.edges == frozenset({(1, 2), (1, 3), (2, 3)})


def test_propagate_matches_numeric_conjugation(rng):
    # oracle: conjugate a precision with a generic-angle rotator numerically
    for _ in range(30):
        m = make_random_model(rng, q=7, z=int(rng.integers(0, 8)))
        K0 = build_precision(m)
        g0 = graph_from_precision(K0)
        i = int(rng.integers(1, 7))
        j = int(rng.integers(i + 1, 8))
        w = float(rng.uniform(0.2, 1.2))
        O = rotator_matrix((i, j), w, 7)
        K1 = O @ K0 @ O.T
        predicted = propagate_rotator_edges(g0, (i, j))
        assert graph_from_precision(K1).edges == predicted.edges


def test_empty_graph_is_decomposable():
    ok, order = is_decomposable(UndirectedGraph(q=4))
    assert ok and sorted(order) == [1, 2, 3, 4]


def test_four_cycle_is_not_decomposable():
    g = UndirectedGraph(q=4, edges=frozenset({(1, 2), (2, 3), (3, 4), (1, 4)}))
    ok, order = is_decomposable(g)
    assert not ok and order is None


def test_chorded_four_cycle_is_decomposable():
    g = UndirectedGraph(
        q=4, edges=frozenset({(1, 2), (2, 3), (3, 4), (1, 4), (1, 3)})
    )
    assert is_decomposable(g)[0]


def test_complete_graph_is_decomposable():
    q = 5
    g = UndirectedGraph(
        q=q,
        edges=frozenset((i, j) for i in range(1, q) for j in range(i + 1, q + 1)),
    )
    assert is_decomposable(g)[0]


def _is_perfect_elimination_ordering(g, order):
    # independent witness check straight from the definition
    pos = {v: t for t, v in enumerate(order)}
    adj = g.adjacency()
    for v in order:
        later = [u for u in adj[v] if pos[u] > pos[v]]
        for a in range(len(later)):
            for b in range(a + 1, len(later)):
                if later[b] not in adj[later[a]]:
                    return False
    return True


def test_sparse_models_induce_decomposable_graphs(rng):
    # graphs of random sparse-rotator precisions are always chordal, and the
    # returned ordering is verified against the raw definition
    for _ in range(200):
        m = make_random_model(rng, q=int(rng.integers(2, 13)))
        g = graph_from_precision(build_precision(m))
        ok, order = is_decomposable(g)
        assert ok
        assert _is_perfect_elimination_ordering(g, order)


def test_propagation_contains_numeric_graph(rng):
    # walking the rotator sequence right-to-left predicts a supergraph of the
    # numeric one, with equality at generic angles
    for _ in range(50):
        m = make_random_model(rng, q=8)
        g = UndirectedGraph(q=8)
        for pair in reversed(m.pairs):
            g = propagate_rotator_edges(g, pair)
        numeric = graph_from_precision(build_precision(m))
        assert numeric.edges <= g.edges


def test_pattern_match_diagonal():
    assert sparsity_pattern_match(np.diag([2.0, 1.0]), np.diag([0.5, 1.0]))


def test_pattern_match_random_models(rng):
    for _ in range(100):
        m = make_random_model(rng)
        assert sparsity_pattern_match(build_covariance(m), build_precision(m))


def test_pattern_match_fails_for_tridiagonal_precision():
    # autoregressive-style tridiagonal precision has a dense covariance
    q = 6
    K = np.diag(np.full(q, 2.0)) + np.diag(np.full(q - 1, -0.9), 1) \
        + np.diag(np.full(q - 1, -0.9), -1)
    V = np.linalg.inv(K)
    assert not sparsity_pattern_match(V, K)


def test_edge_csv_export(tmp_path):
    g = UndirectedGraph(q=4, edges=frozenset({(2, 4), (1, 2)}))
    path = tmp_path / "edges.csv"
    write_edge_csv(g, path)
    assert path.read_text() == "1,2\n2,4\n"


def test_graph_validation():
    with pytest.raises(ValueError):
        UndirectedGraph(q=3, edges=frozenset({(1, 1)}))
    with pytest.raises(ValueError):
        UndirectedGraph(q=3, edges=frozenset({(1, 4)}))
