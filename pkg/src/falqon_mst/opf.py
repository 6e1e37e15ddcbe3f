"""Optimum-Path Forest classification over a complete training graph.

Prototypes are the endpoints of spanning-tree edges whose endpoints carry
different labels.  Training assigns every vertex the minimax path cost from
the prototype set (minimum over paths of the maximum edge weight along the
path); classification conquers a test sample with the training vertex
minimizing max(training cost, distance), inheriting that vertex's label.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass
from typing import Sequence

from .graph import Sample, SpanningTree

logger = logging.getLogger(__name__)

PrototypeSet = frozenset[int]


def select_prototypes(tree: SpanningTree, labels: Sequence[int]) -> PrototypeSet:
    """Endpoints of every tree edge that crosses classes.

    A label-homogeneous vertex set has no such edge; vertex 0 is then used
    as a deterministic fallback so downstream training stays total.
    """
    n = len(labels)
    for u, v in tree.edges:
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError("tree references vertices outside the label list")
    prototypes = set()
    for u, v in tree.edges:
        if labels[u] != labels[v]:
            prototypes.add(u)
            prototypes.add(v)
    if not prototypes:
        logger.info("single-class vertex set: falling back to prototype {0}")
        prototypes = {0}
    return frozenset(prototypes)


@dataclass(frozen=True)
class TrainedOpf:
    """Per-vertex optimum cost, conquering label, predecessor, prototype flag.

    cost_order lists vertex indices by non-decreasing cost (ties by index),
    which classify() exploits for early exit.
    """

    samples: tuple[Sample, ...]
    costs: tuple[float, ...]
    labels: tuple[int, ...]
    predecessors: tuple[int | None, ...]
    is_prototype: tuple[bool, ...]
    cost_order: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.samples)


def train(samples: Sequence[Sample], prototypes: PrototypeSet) -> TrainedOpf:
    """Best-first competition assigning minimax path costs from the prototypes.

    Classic Dijkstra shape with the relaxation max(C(s), w(s, z)) over the
    complete graph; prototypes start at cost 0 and keep their own labels.
    """
    n = len(samples)
    if n == 0:
        raise ValueError("empty training set")
    if not prototypes or any(not 0 <= p < n for p in prototypes):
        raise ValueError("prototype indices must be a non-empty subset of the vertices")

    costs = [math.inf] * n
    labels = [-1] * n
    preds: list[int | None] = [None] * n
    done = [False] * n
    heap: list[tuple[float, int]] = []
    for p in sorted(prototypes):
        costs[p] = 0.0
        labels[p] = samples[p].label
        heapq.heappush(heap, (0.0, p))

    while heap:
        c, u = heapq.heappop(heap)
        if done[u] or c > costs[u]:
            continue
        done[u] = True
        for v in range(n):
            if done[v] or v == u:
                continue
            candidate = max(costs[u], samples[u].distance_to(samples[v]))
            if candidate < costs[v]:
                costs[v] = candidate
                labels[v] = labels[u]
                preds[v] = u
                heapq.heappush(heap, (candidate, v))

    for v in range(n):
        if labels[v] != samples[v].label:
            logger.warning(
                "training vertex %d conquered by class %d but carries class %d "
                "(degenerate weights can break the error-free-training guarantee)",
                v, labels[v], samples[v].label,
            )
    order = sorted(range(n), key=lambda v: (costs[v], v))
    return TrainedOpf(
        samples=tuple(samples),
        costs=tuple(costs),
        labels=tuple(labels),
        predecessors=tuple(preds),
        is_prototype=tuple(v in prototypes for v in range(n)),
        cost_order=tuple(order),
    )


def classify(model: TrainedOpf, test: Sample) -> tuple[int, float]:
    """Label and conquering cost for one test sample.

    Scans training vertices in non-decreasing cost order; once a vertex's
    cost reaches the best candidate, no later vertex can improve it
    (max(C, d) >= C), so the scan stops early.  Ties keep the earlier
    vertex in that order: smallest cost, then lowest index.
    """
    if len(test.features) != len(model.samples[0].features):
        raise ValueError("feature dimension mismatch")
    best_cost = math.inf
    best_vertex = -1
    for v in model.cost_order:
        if model.costs[v] >= best_cost:
            break
        candidate = max(model.costs[v], model.samples[v].distance_to(test))
        if candidate < best_cost:
            best_cost = candidate
            best_vertex = v
    return model.labels[best_vertex], best_cost


def classify_all(model: TrainedOpf, tests: Sequence[Sample]) -> list[int]:
    return [classify(model, t)[0] for t in tests]


def accuracy(predictions: Sequence[int], truths: Sequence[int]) -> float:
    """Fraction of exact label matches."""
    if len(predictions) != len(truths):
        raise ValueError("prediction/truth length mismatch")
    if not predictions:
        raise ValueError("empty prediction list")
    hits = sum(1 for p, t in zip(predictions, truths) if p == t)
    return hits / len(predictions)
