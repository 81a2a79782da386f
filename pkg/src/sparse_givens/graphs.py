"""Conditional-independence graphs induced by sparse precision matrices.

Vertices are 1-based.  An edge (i, j) is present exactly when the precision
entry K_ij is (numerically) nonzero; absence encodes conditional independence
in a Gaussian.  Includes the symbolic edge-merge rule for adding one rotator,
a chordality test via maximum-cardinality search, and edge-list CSV export.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "UndirectedGraph",
    "graph_from_precision",
    "propagate_rotator_edges",
    "is_decomposable",
    "sparsity_pattern_match",
    "write_edge_csv",
]

DEFAULT_ZERO_TOL = 1e-9


@dataclass(frozen=True)
class UndirectedGraph:
    """Vertex count plus a set of 1-based edges (i, j) with i < j."""

    q: int
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        norm = set()
        for i, j in self.edges:
            i, j = int(i), int(j)
            if i == j:
                raise ValueError("self-loops are not allowed")
            if i > j:
                i, j = j, i
            if not (1 <= i < j <= self.q):
                raise ValueError(f"edge ({i}, {j}) outside 1..{self.q}")
            norm.add((i, j))
        object.__setattr__(self, "edges", frozenset(norm))

    def neighbors(self, v: int) -> set[int]:
        out = set()
        for i, j in self.edges:
            if i == v:
                out.add(j)
            elif j == v:
                out.add(i)
        return out

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.q + 1)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj


def graph_from_precision(
    K: np.ndarray, tol: float = DEFAULT_ZERO_TOL, relative: bool = True
) -> UndirectedGraph:
    """Edge (i, j) present iff |K_ij| exceeds the zero threshold.

    With ``relative=True`` (default) the threshold is ``tol * max|K|``, which
    separates structural zeros from floating-point rounding.
    """
    K = np.asarray(K, dtype=np.float64)
    q = K.shape[0]
    if K.shape != (q, q):
        raise ValueError("K must be square")
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    asym = np.abs(K - K.T).max() if q else 0.0
    if asym > 1e-8 * max(1.0, np.abs(K).max()):
        raise ValueError(f"K is not symmetric (max asymmetry {asym:.3g})")
    thresh = tol * np.abs(K).max() if relative else tol
    edges = {
        (i + 1, j + 1)
        for i in range(q - 1)
        for j in range(i + 1, q)
        if abs(K[i, j]) > thresh
    }
    return UndirectedGraph(q=q, edges=frozenset(edges))


def propagate_rotator_edges(
    g0: UndirectedGraph, pair: tuple[int, int]
) -> UndirectedGraph:
    """Predicted edge set after conjugating by one more generic-angle rotator.

    Connects i and j and unions their neighborhoods: the new rows/columns i, j
    of the precision carry the union of the old nonzero index sets.  Angles of
    exactly 0 or pi/2 (which do not merge neighborhoods) are the caller's
    responsibility to exclude.
    """
    i, j = int(pair[0]), int(pair[1])
    if i > j:
        i, j = j, i
    if not (1 <= i < j <= g0.q):
        raise ValueError(f"invalid pair ({i}, {j}) for q={g0.q}")
    edges = set(g0.edges)
    edges.add((i, j))
    for k in g0.neighbors(j):
        if k != i:
            edges.add((min(i, k), max(i, k)))
    for k in g0.neighbors(i):
        if k != j:
            edges.add((min(j, k), max(j, k)))
    return UndirectedGraph(q=g0.q, edges=frozenset(edges))


def is_decomposable(g: UndirectedGraph) -> tuple[bool, list[int] | None]:
    """Chordality test via maximum-cardinality search plus fill-in check.

    Returns (True, elimination_ordering) where the witness ordering is
    perfect: each vertex's neighbors occurring later in the ordering form a
    clique.  Returns (False, None) for non-chordal graphs.
    """
    q = g.q
    adj = g.adjacency()
    weight = [0] * (q + 1)
    numbered: list[int] = []
    in_order = [False] * (q + 1)
    # visit vertices by descending count of already-visited neighbors
    for _ in range(q):
        v = max(
            (u for u in range(1, q + 1) if not in_order[u]),
            key=lambda u: weight[u],
        )
        in_order[v] = True
        numbered.append(v)
        for u in adj[v]:
            if not in_order[u]:
                weight[u] += 1
    pos = {v: t for t, v in enumerate(numbered)}
    for t, v in enumerate(numbered):
        pred = [u for u in adj[v] if pos[u] < t]
        if not pred:
            continue
        u_last = max(pred, key=lambda u: pos[u])
        for u in pred:
            if u != u_last and u not in adj[u_last]:
                return False, None
    # eliminating in reverse visit order makes later neighbors a clique
    return True, list(reversed(numbered))


def sparsity_pattern_match(
    V: np.ndarray, K: np.ndarray, tol: float = DEFAULT_ZERO_TOL
) -> bool:
    """True iff V and K share the same off-diagonal zero/nonzero pattern."""
    gv = graph_from_precision(V, tol)
    gk = graph_from_precision(K, tol)
    return gv.edges == gk.edges


def write_edge_csv(g: UndirectedGraph, path) -> None:
    """One ``i,j`` row per edge, sorted, for downstream tooling."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, j in sorted(g.edges):
            fh.write(f"{i},{j}\n")
