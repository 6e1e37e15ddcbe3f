"""opf module: prototype selection, minimax training, classification."""

import itertools
import math

import numpy as np
import pytest

from falqon_mst.data import SubsetSpec, load_dataset, sample_subset
from falqon_mst.graph import Sample, SpanningTree, build_complete_graph, exhaustive_mst, prim_mst
from falqon_mst.opf import accuracy, classify, classify_all, select_prototypes, train

from conftest import DATA_DIR, random_samples


def tree_of(edges, weight=0.0):
    return SpanningTree(edges=frozenset(edges), total_weight=weight)


def brute_force_costs(samples, prototypes):
    """Minimax path costs by enumerating every simple path from the prototype set."""
    n = len(samples)
    dist = [[samples[i].distance_to(samples[j]) for j in range(n)] for i in range(n)]
    best = [0.0 if v in prototypes else math.inf for v in range(n)]

    def explore(v, visited, bottleneck):
        for u in range(n):
            if u in visited:
                continue
            nb = max(bottleneck, dist[v][u])
            if nb < best[u]:
                best[u] = nb
            explore(u, visited | {u}, nb)

    for p in prototypes:
        explore(p, {p}, 0.0)
    return best


class TestSelectPrototypes:
    def test_path_with_single_boundary(self):
        tree = tree_of([(0, 1), (1, 2), (2, 3)])
        assert select_prototypes(tree, [0, 0, 1, 1]) == frozenset({1, 2})

    def test_star_all_edges_cross(self):
        tree = tree_of([(0, 1), (0, 2), (0, 3)])
        assert select_prototypes(tree, [0, 1, 1, 1]) == frozenset({0, 1, 2, 3})

    def test_single_class_fallback(self, caplog):
        import logging

        tree = tree_of([(0, 1), (1, 2)])
        with caplog.at_level(logging.INFO, logger="falqon_mst.opf"):
            assert select_prototypes(tree, [1, 1, 1]) == frozenset({0})
        assert any("falling back" in rec.getMessage() for rec in caplog.records)

    def test_vertex_count_mismatch(self):
        with pytest.raises(ValueError):
            select_prototypes(tree_of([(0, 3)]), [0, 1])


class TestTrain:
    def test_prototypes_have_zero_cost(self):
        rng = np.random.default_rng(0)
        samples = random_samples(rng, 6)
        model = train(samples, frozenset({1, 4}))
        assert model.costs[1] == 0.0 and model.costs[4] == 0.0
        assert model.is_prototype == (False, True, False, False, True, False)
        others = [model.costs[v] for v in (0, 2, 3, 5)]
        assert all(c > 0 for c in others)

    def test_three_vertex_worked_example(self):
        # w(0,1)=5, w(0,2)=9, w(1,2)=3: vertex 2 is conquered through 1
        samples = [
            Sample((0.0,), 0, 0),
            Sample((5.0,), 1, 1),
            Sample((9.0,), 1, 2),
        ]
        # distances: d01=5, d02=9, d12=4 -> place features so d12=3
        samples[2] = Sample((8.0,), 1, 2)  # d02=8, d12=3
        model = train(samples, frozenset({0}))
        assert model.costs[1] == pytest.approx(5.0)
        assert model.costs[2] == pytest.approx(5.0)  # max(5, 3) beats direct 8
        assert model.predecessors[2] == 1

    def test_matches_brute_force_on_random_instances(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            n = int(rng.integers(3, 8))
            samples = random_samples(rng, n, classes=3)
            k = int(rng.integers(1, n))
            prototypes = frozenset(int(i) for i in rng.choice(n, size=k, replace=False))
            model = train(samples, prototypes)
            expected = brute_force_costs(samples, prototypes)
            assert np.allclose(model.costs, expected, atol=1e-12)

    def test_cost_order_is_monotone(self):
        rng = np.random.default_rng(2)
        samples = random_samples(rng, 7)
        model = train(samples, frozenset({0, 3}))
        costs = [model.costs[v] for v in model.cost_order]
        assert costs == sorted(costs)

    def test_predecessor_chains_end_at_prototypes(self):
        rng = np.random.default_rng(3)
        samples = random_samples(rng, 7)
        prototypes = frozenset({2, 5})
        model = train(samples, prototypes)
        for v in range(7):
            node = v
            for _ in range(10):
                if model.predecessors[node] is None:
                    break
                node = model.predecessors[node]
            assert node in prototypes

    def test_empty_training_rejected(self):
        with pytest.raises(ValueError):
            train([], frozenset({0}))

    def test_labels_are_error_free_with_mst_prototypes(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            samples = random_samples(rng, 6, classes=2)
            graph = build_complete_graph(samples)
            prototypes = select_prototypes(prim_mst(graph), graph.labels)
            model = train(samples, prototypes)
            assert model.labels == tuple(s.label for s in samples)


class TestClassify:
    def test_prototype_test_sample(self):
        rng = np.random.default_rng(5)
        samples = random_samples(rng, 5)
        model = train(samples, frozenset({2}))
        label, cost = classify(model, samples[2])
        assert label == samples[2].label
        assert cost == 0.0

    def test_training_vertex_test_sample(self):
        rng = np.random.default_rng(6)
        samples = random_samples(rng, 5)
        model = train(samples, frozenset({0}))
        for v in range(5):
            label, cost = classify(model, samples[v])
            assert label == model.labels[v]
            assert cost == pytest.approx(model.costs[v])

    def test_matches_double_loop_oracle_on_iris_subsets(self):
        dataset = load_dataset("iris", DATA_DIR)
        for seed in range(12):
            train_s, test_s = sample_subset(dataset, SubsetSpec(seed=seed))
            graph = build_complete_graph(train_s)
            prototypes = select_prototypes(prim_mst(graph), graph.labels)
            model = train(train_s, prototypes)
            for t in test_s:
                label, cost = classify(model, t)
                candidates = [
                    (max(model.costs[v], model.samples[v].distance_to(t)), model.costs[v], v)
                    for v in range(len(train_s))
                ]
                exp_cost, _, exp_vertex = min(candidates)
                assert cost == pytest.approx(exp_cost, abs=1e-12)
                assert label == model.labels[exp_vertex]

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(7)
        model = train(random_samples(rng, 4, dim=3), frozenset({0}))
        with pytest.raises(ValueError):
            classify(model, Sample((1.0,), 0, 0))

    def test_invariant_under_index_permutation(self):
        rng = np.random.default_rng(8)
        samples = random_samples(rng, 6, classes=2)
        tests = random_samples(rng, 5, classes=2)
        graph = build_complete_graph(samples)
        prototypes = select_prototypes(prim_mst(graph), graph.labels)
        base = classify_all(train(samples, prototypes), tests)

        perm = list(rng.permutation(6))
        permuted = [samples[p] for p in perm]
        pgraph = build_complete_graph(permuted)
        pproto = select_prototypes(prim_mst(pgraph), pgraph.labels)
        assert pproto == frozenset(perm.index(p) for p in prototypes)
        assert classify_all(train(permuted, pproto), tests) == base


class TestPrototypeStability:
    def test_any_minimum_tree_gives_same_prototypes_when_unique(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            samples = random_samples(rng, 6, classes=2)
            graph = build_complete_graph(samples)
            _, trees = exhaustive_mst(graph)
            assert len(trees) == 1  # random reals: distinct weights
            assert select_prototypes(trees[0], graph.labels) == select_prototypes(
                prim_mst(graph), graph.labels
            )


class TestAccuracy:
    def test_all_correct(self):
        assert accuracy([1, 0, 2], [1, 0, 2]) == 1.0

    def test_none_correct(self):
        assert accuracy([1, 1], [0, 0]) == 0.0

    def test_three_of_four(self):
        assert accuracy([0, 1, 1, 0], [0, 1, 1, 1]) == 0.75

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            accuracy([], [])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            accuracy([0], [0, 1])
