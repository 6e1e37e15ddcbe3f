"""Weighted complete graphs over feature data and classical spanning-tree machinery.

Vertices are data samples; edge weights are Euclidean distances in feature
space.  Provides the deterministic Prim baseline, an exhaustive
spanning-tree enumerator used as the oracle in tests and success metrics,
and a spanning-tree validity check.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

logger = logging.getLogger(__name__)

Edge = tuple[int, int]

EXHAUSTIVE_VERTEX_LIMIT = 7


@dataclass(frozen=True)
class Sample:
    """One dataset row: a feature vector, a 0-based class id, and its source row."""

    features: tuple[float, ...]
    label: int
    source_index: int

    def __post_init__(self):
        if len(self.features) == 0:
            raise ValueError("sample features must be non-empty")
        if self.label < 0:
            raise ValueError("labels are non-negative class ids")

    def distance_to(self, other: "Sample") -> float:
        if len(self.features) != len(other.features):
            raise ValueError("feature dimension mismatch")
        return math.dist(self.features, other.features)


@dataclass(frozen=True)
class WeightedGraph:
    """Complete undirected graph: symmetric weight matrix plus per-vertex labels.

    Off-diagonal weights are expected to be positive; zeros (duplicate
    feature vectors) are tolerated with a warning because real datasets
    contain repeated rows.
    """

    n: int
    weights: np.ndarray
    labels: tuple[int, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.shape != (self.n, self.n):
            raise ValueError(f"weights must be {self.n}x{self.n}")
        if not np.allclose(w, w.T, atol=0.0):
            raise ValueError("weights must be symmetric")
        if np.any(np.diag(w) != 0.0):
            raise ValueError("diagonal weights must be zero")
        if np.any(w < 0.0):
            raise ValueError("weights must be non-negative")
        if self.n > 1:
            off = w[~np.eye(self.n, dtype=bool)]
            if np.any(off == 0.0):
                logger.warning(
                    "graph has zero-weight edges (duplicate samples); "
                    "MST uniqueness assumptions may not hold"
                )
        if len(self.labels) != self.n:
            raise ValueError("one label per vertex required")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    def edges(self) -> Iterator[Edge]:
        """All unordered vertex pairs in lexicographic order."""
        return itertools.combinations(range(self.n), 2)

    def edge_weight(self, u: int, v: int) -> float:
        return float(self.weights[u, v])

    def total_weight(self) -> float:
        """Sum of all edge weights (each unordered pair counted once)."""
        return sum(self.edge_weight(u, v) for u, v in self.edges())


@dataclass(frozen=True)
class SpanningTree:
    """An (n-1)-edge acyclic connected subgraph with its summed weight."""

    edges: frozenset[Edge]
    total_weight: float

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)


def build_complete_graph(samples: Sequence[Sample]) -> WeightedGraph:
    """Complete graph whose edge weights are pairwise Euclidean distances."""
    if len(samples) < 1:
        raise ValueError("need at least one sample")
    dim = len(samples[0].features)
    if any(len(s.features) != dim for s in samples):
        raise ValueError("all samples must share a feature dimension")
    n = len(samples)
    w = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            w[i, j] = w[j, i] = samples[i].distance_to(samples[j])
    return WeightedGraph(n=n, weights=w, labels=tuple(s.label for s in samples))


def prim_mst(graph: WeightedGraph) -> SpanningTree:
    """Minimum spanning tree grown from vertex 0.

    Tie-breaking is fixed: among equal-weight frontier edges, the edge with
    the lexicographically smallest (min vertex, max vertex) pair is taken,
    so the result is deterministic even on degenerate weight matrices.
    """
    n = graph.n
    if n == 1:
        return SpanningTree(edges=frozenset(), total_weight=0.0)
    in_tree = [0]
    outside = set(range(1, n))
    edges: set[Edge] = set()
    total = 0.0
    while outside:
        best: tuple[float, int, int] | None = None
        for u in in_tree:
            for v in outside:
                key = (graph.edge_weight(u, v), min(u, v), max(u, v))
                if best is None or key < best:
                    best = key
                    best_vertex = v
        assert best is not None
        total += best[0]
        edges.add((best[1], best[2]))
        in_tree.append(best_vertex)
        outside.remove(best_vertex)
    return SpanningTree(edges=frozenset(edges), total_weight=total)


def is_spanning_tree(graph: WeightedGraph, edges: Iterable[Edge]) -> bool:
    """True iff the edge set has n-1 edges and connects all n vertices acyclically."""
    edge_list = [(min(u, v), max(u, v)) for u, v in edges]
    for u, v in edge_list:
        if not (0 <= u < graph.n and 0 <= v < graph.n) or u == v:
            raise ValueError(f"edge ({u}, {v}) references invalid vertices")
    if len(set(edge_list)) != len(edge_list):
        return False
    if len(edge_list) != graph.n - 1:
        return False
    parent = list(range(graph.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edge_list:
        ru, rv = find(u), find(v)
        if ru == rv:
            return False  # cycle
        parent[ru] = rv
    return True


def tree_weight(graph: WeightedGraph, edges: Iterable[Edge]) -> float:
    """Weight of an edge set, summed in sorted edge order for reproducibility."""
    return sum(graph.edge_weight(u, v) for u, v in sorted(edges))


def exhaustive_mst(graph: WeightedGraph) -> tuple[float, list[SpanningTree]]:
    """Enumerate every spanning tree; return the minimum weight and all attaining trees.

    Guarded to n <= 7 (at most C(21, 6) candidate edge subsets).  Weight ties
    are grouped with a 1e-12 relative tolerance.
    """
    n = graph.n
    if n > EXHAUSTIVE_VERTEX_LIMIT:
        raise ValueError(f"exhaustive enumeration limited to n <= {EXHAUSTIVE_VERTEX_LIMIT}")
    if n == 1:
        return 0.0, [SpanningTree(edges=frozenset(), total_weight=0.0)]
    all_edges = list(graph.edges())
    best_weight = math.inf
    best: list[SpanningTree] = []
    for subset in itertools.combinations(all_edges, n - 1):
        if not is_spanning_tree(graph, subset):
            continue
        w = tree_weight(graph, subset)
        if not best or w < best_weight - 1e-12 * max(1.0, abs(best_weight)):
            best_weight = w
            best = [SpanningTree(edges=frozenset(subset), total_weight=w)]
        elif math.isclose(w, best_weight, rel_tol=1e-12, abs_tol=0.0):
            best.append(SpanningTree(edges=frozenset(subset), total_weight=w))
    return best_weight, best
