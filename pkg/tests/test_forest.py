"""Forest training and scoring against brute-force oracles."""

import math

import numpy as np
import pytest

from proxysieve.bundle import forest_to_bytes
from proxysieve.forest import (
    ForestParams,
    LeafNode,
    RandomForestModel,
    SplitNode,
    TrainingError,
    bag_indices,
    best_split,
    entropy,
    feature_importance,
    train_forest_arrays,
    train_tree,
    tree_rng,
)

# ---------------------------------------------------------------------------
# oracles


def oracle_entropy(labels):
    n = len(labels)
    if n == 0:
        return 0.0
    n1 = sum(labels)
    h = 0.0
    for c in (n1, n - n1):
        if c > 0:
            h -= (c / n) * math.log2(c / n)
    return h


def oracle_best_split(X, y, indices, feats):
    """Exhaustive scan over every (feature, midpoint) pair, scalar math."""
    best = None  # (gain, feature, threshold)
    for f in sorted(int(v) for v in feats):
        pairs = [
            (X[i, f], y[i]) for i in indices if not math.isnan(X[i, f])
        ]
        if len(pairs) < 2:
            continue
        pairs.sort(key=lambda p: p[0])
        values = [p[0] for p in pairs]
        labels = [p[1] for p in pairs]
        h_parent = oracle_entropy(labels)
        for i in range(len(values) - 1):
            if values[i] == values[i + 1]:
                continue
            threshold = (values[i] + values[i + 1]) / 2.0
            right = labels[: i + 1]  # x <= threshold
            left = labels[i + 1 :]  # x > threshold
            gain = h_parent - (
                len(left) * oracle_entropy(left) + len(right) * oracle_entropy(right)
            ) / len(labels)
            if best is None or gain > best[0]:
                best = (gain, f, threshold)
    if best is None or best[0] <= 1e-12:
        return None
    return best


def tree_accuracy(root, X, y):
    hits = 0
    for i in range(X.shape[0]):
        node = root
        while not node.is_leaf:
            v = X[i, node.feature]
            node = node.left if v > node.threshold else node.right
        hits += node.label == y[i]
    return hits / X.shape[0]


def oracle_split_count(trees):
    def walk(node):
        if node.is_leaf:
            return 0
        return 1 + walk(node.left) + walk(node.right)

    return sum(walk(t) for t in trees)


def max_tree_depth(node):
    if node.is_leaf:
        return 0
    return 1 + max(max_tree_depth(node.left), max_tree_depth(node.right))


def random_node_set(rng, max_samples=30, max_features=6, with_missing=True):
    n = int(rng.integers(2, max_samples + 1))
    k = int(rng.integers(1, max_features + 1))
    if rng.random() < 0.5:
        X = rng.integers(0, 4, size=(n, k)).astype(float)  # many ties
    else:
        X = np.round(rng.normal(size=(n, k)), 2)
    if with_missing and rng.random() < 0.4:
        mask = rng.random(size=X.shape) < 0.2
        X[mask] = np.nan
    y = rng.integers(0, 2, size=n)
    n_cand = int(rng.integers(1, k + 1))
    feats = rng.choice(k, size=n_cand, replace=False)
    return X, y, np.arange(n), feats


# ---------------------------------------------------------------------------
# entropy


class TestEntropy:
    def test_pure_set(self):
        assert entropy([1, 1, 1, 1]) == 0.0
        assert entropy([0]) == 0.0
        assert entropy([]) == 0.0

    def test_uniform_binary(self):
        assert entropy([0, 1]) == 1.0

    def test_two_to_one_mix(self):
        want = -(1 / 3) * math.log2(1 / 3) - (2 / 3) * math.log2(2 / 3)
        assert entropy([0, 0, 1, 1, 1, 1]) == pytest.approx(want, abs=1e-4)

    def test_matches_oracle_on_random_multisets(self, rng):
        for _ in range(100):
            labels = list(rng.integers(0, 2, size=int(rng.integers(0, 50))))
            assert entropy(labels) == pytest.approx(oracle_entropy(labels), abs=1e-9)


# ---------------------------------------------------------------------------
# best_split


class TestBestSplit:
    def test_reference_example(self):
        X = np.array([[1.0], [2.0], [9.0], [10.0]])
        y = np.array([0, 0, 1, 1])
        choice = best_split(X, y, np.arange(4), [0])
        assert choice.feature == 0
        assert choice.threshold == 5.5
        assert choice.gain == pytest.approx(1.0, abs=1e-12)

    def test_pure_node_returns_none(self):
        X = np.array([[1.0], [2.0], [3.0]])
        y = np.array([1, 1, 1])
        assert best_split(X, y, np.arange(3), [0]) is None

    def test_constant_feature_returns_none(self):
        X = np.array([[5.0], [5.0], [5.0], [5.0]])
        y = np.array([0, 1, 0, 1])
        assert best_split(X, y, np.arange(4), [0]) is None

    def test_missing_excluded_from_gain(self):
        X = np.array([[np.nan], [np.nan], [1.0], [2.0]])
        y = np.array([1, 1, 0, 1])
        choice = best_split(X, y, np.arange(4), [0])
        assert choice.threshold == 1.5
        assert choice.gain == pytest.approx(1.0)  # computed over present two

    def test_matches_bruteforce_on_random_nodes(self, rng):
        for _ in range(300):
            X, y, idx, feats = random_node_set(rng)
            got = best_split(X, y, idx, feats)
            want = oracle_best_split(X, y, idx, feats)
            if want is None:
                assert got is None
            else:
                assert got is not None
                assert (got.feature, got.threshold) == (want[1], want[2])
                assert got.gain == pytest.approx(want[0], abs=1e-9)

    def test_gain_bounds(self, rng):
        for _ in range(200):
            X, y, idx, feats = random_node_set(rng, with_missing=False)
            got = best_split(X, y, idx, feats)
            if got is not None:
                assert got.gain >= 0.0
                assert got.gain <= entropy(y[idx]) + 1e-12


# ---------------------------------------------------------------------------
# train_tree


class TestTrainTree:
    def test_separable_gives_depth_one(self):
        X = np.array([[1.0], [2.0], [9.0], [10.0]])
        y = np.array([0, 0, 1, 1])
        root = train_tree(X, y, ForestParams(trees=1, max_depth=19), tree_rng(0, 0))
        assert not root.is_leaf
        assert root.threshold == 5.5
        assert root.left.is_leaf and root.right.is_leaf
        assert root.left.label == 1 and root.right.label == 0

    def test_single_class_single_leaf(self):
        X = np.zeros((5, 2))
        y = np.ones(5, dtype=int)
        root = train_tree(X, y, ForestParams(trees=1), tree_rng(0, 0))
        assert root.is_leaf and root.label == 1
        assert root.class_counts == (0, 5)

    def test_consistent_data_is_shattered(self, rng):
        for trial in range(20):
            n = int(rng.integers(5, 120))
            k = int(rng.integers(2, 8))
            X = rng.normal(size=(n, k))
            y = rng.integers(0, 2, size=n)
            if len(set(y)) == 1:
                continue
            params = ForestParams(trees=1, max_depth=None, features_per_split=k)
            root = train_tree(X, y, params, tree_rng(trial, 0))
            assert tree_accuracy(root, X, y) == 1.0

    def test_depth_never_exceeds_limit(self, rng):
        X = rng.normal(size=(300, 4))
        y = rng.integers(0, 2, size=300)
        for d_max in (0, 1, 3, 7):
            params = ForestParams(trees=1, max_depth=d_max, features_per_split=4)
            root = train_tree(X, y, params, tree_rng(1, 0))
            assert max_tree_depth(root) <= d_max

    def test_training_partition_routes_missing_right(self):
        X = np.array([[np.nan], [np.nan], [1.0], [2.0]])
        y = np.array([0, 0, 0, 1])
        root = train_tree(
            X, y, ForestParams(trees=1, features_per_split=1), tree_rng(3, 0)
        )
        assert not root.is_leaf
        # Two missing plus the 1.0 sample go right: three training samples.
        assert root.train_count_right == 3
        assert root.train_count_left == 1


# ---------------------------------------------------------------------------
# train_forest


def two_gaussians(rng, n=1000, k=10, shift=2.0):
    X = rng.normal(size=(n, k))
    y = rng.integers(0, 2, size=n)
    X[y == 1, :3] += shift
    return X, y


class TestTrainForest:
    def test_same_seed_identical_bytes(self, rng):
        X, y = two_gaussians(rng, n=200)
        params = ForestParams(trees=10, max_depth=8, features_per_split=3)
        a = train_forest_arrays(X, y, "sld", params, seed=5)
        b = train_forest_arrays(X, y, "sld", params, seed=5)
        assert forest_to_bytes(a) == forest_to_bytes(b)

    def test_different_seed_differs(self, rng):
        X, y = two_gaussians(rng, n=200)
        params = ForestParams(trees=10, max_depth=8, features_per_split=3)
        a = train_forest_arrays(X, y, "sld", params, seed=5)
        b = train_forest_arrays(X, y, "sld", params, seed=6)
        assert forest_to_bytes(a) != forest_to_bytes(b)

    def test_threads_do_not_change_model(self, rng):
        X, y = two_gaussians(rng, n=300)
        params = ForestParams(trees=8, max_depth=10, features_per_split=4)
        a = train_forest_arrays(X, y, "full", params, seed=11, threads=1)
        b = train_forest_arrays(X, y, "full", params, seed=11, threads=3)
        assert forest_to_bytes(a) == forest_to_bytes(b)

    def test_single_class_rejected(self):
        X = np.zeros((10, 3))
        y = np.zeros(10, dtype=int)
        with pytest.raises(TrainingError, match="single class"):
            train_forest_arrays(X, y, "sld", ForestParams(trees=2), seed=1)

    def test_f_larger_than_k_rejected(self):
        X = np.zeros((10, 3))
        y = np.array([0, 1] * 5)
        params = ForestParams(trees=2, features_per_split=5)
        with pytest.raises(TrainingError, match="exceeds"):
            train_forest_arrays(X, y, "sld", params, seed=1)

    def test_bagging_unique_fraction(self):
        rng = tree_rng(123, 0)
        fractions = [
            len(np.unique(bag_indices(rng, 1000))) / 1000 for _ in range(300)
        ]
        assert 0.612 <= float(np.mean(fractions)) <= 0.652

    def test_holdout_accuracy_on_gaussians(self, rng):
        X, y = two_gaussians(rng, n=2000)
        params = ForestParams(trees=40, max_depth=19, features_per_split=3)
        model = train_forest_arrays(X[:1000], y[:1000], "sld", params, seed=3)
        scores = np.array([model.score(x) for x in X[1000:]])
        accuracy = float(np.mean((scores > 0.5) == (y[1000:] == 1)))
        assert accuracy >= 0.95

    def test_default_f_is_third_of_k(self):
        assert ForestParams().effective_f(290) == 97
        assert ForestParams().effective_f(58) == 20
        assert ForestParams(features_per_split=100).effective_f(290) == 100


# ---------------------------------------------------------------------------
# scoring


def hand_model(labels, set_id="sld", n_features=58):
    """Forest of single-leaf trees with fixed votes."""
    trees = [LeafNode(v, (1 - v, v)) for v in labels]
    params = ForestParams(trees=len(labels), max_depth=19)
    return RandomForestModel(trees, params, set_id, seed=0, n_features=n_features)


class TestScore:
    def test_unanimous_votes(self):
        model = hand_model([1, 1, 1])
        assert model.score(np.zeros(58)) == 1.0

    def test_vote_fraction(self):
        model = hand_model([1, 0, 1])
        assert model.score(np.zeros(58)) == pytest.approx(2 / 3)

    def test_all_missing_routes_right(self):
        left = LeafNode(1, (0, 5))
        right = LeafNode(0, (5, 0))
        tree = SplitNode(2, 0.5, left, right, 5, 5)
        model = RandomForestModel(
            [tree], ForestParams(trees=1), "sld", seed=0, n_features=58
        )
        x = np.full(58, np.nan)
        votes, tests = model.votes(x)
        assert (votes, tests) == (0, 1)
        assert model.score(x) == 0.0

    def test_scores_are_vote_multiples(self, rng):
        X, y = two_gaussians(rng, n=400)
        params = ForestParams(trees=7, max_depth=6, features_per_split=3)
        model = train_forest_arrays(X, y, "sld", params, seed=9)
        grid = {v / 7 for v in range(8)}
        for i in range(100):
            assert model.score(X[i]) in grid

    def test_set_mismatch_raises(self, small_models, small_corpus):
        from proxysieve.featurizer import extract
        from proxysieve.forest import ScoringError

        model = hand_model([1], set_id="full", n_features=290)
        fv = extract(small_corpus.flows[0], "sld", small_models)
        with pytest.raises(ScoringError):
            model.score(fv)


# ---------------------------------------------------------------------------
# importance


class TestImportance:
    def test_single_leaf_forest_empty(self):
        model = hand_model([0, 1])
        assert feature_importance(model) == {}

    def test_depth_one_split(self):
        tree = SplitNode(4, 1.0, LeafNode(1, (0, 1)), LeafNode(0, (1, 0)), 1, 1)
        model = RandomForestModel(
            [tree], ForestParams(trees=1), "sld", seed=0, n_features=58
        )
        assert feature_importance(model) == {4: 1}

    def test_counts_sum_to_split_nodes(self, rng):
        X, y = two_gaussians(rng, n=500)
        params = ForestParams(trees=12, max_depth=9, features_per_split=4)
        model = train_forest_arrays(X, y, "sld", params, seed=21)
        counts = feature_importance(model)
        assert sum(counts.values()) == oracle_split_count(model.trees)
        assert sum(counts.values()) == model.split_node_count()
