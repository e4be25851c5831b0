"""Binary decision trees and random forests built from scratch.

Split test: x[feature] > threshold routes left (the "true" branch); a
missing value fails the test and routes right, both in training and at
prediction. Candidate thresholds are midpoints between consecutive
distinct present values; the split maximizing information gain wins,
ties broken by lower feature index then lower threshold.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import kernels
from .featurizer import FeatureVector

RNG_ALGORITHM = "numpy-philox4x64/v1"

_GAIN_EPSILON = 1e-12
_MASK64 = (1 << 64) - 1


class TrainingError(ValueError):
    pass


class ScoringError(ValueError):
    pass


@dataclass(frozen=True)
class GroupKeys:
    url: str
    domain: str
    user_id: str


@dataclass(frozen=True)
class LabeledSample:
    features: FeatureVector
    label: int
    group_keys: Optional[GroupKeys] = None

    def __post_init__(self):
        if self.label not in (0, 1):
            raise TrainingError(f"label must be 0 or 1, got {self.label}")


@dataclass(frozen=True)
class ForestParams:
    trees: int = 40
    max_depth: Optional[int] = 19
    features_per_split: Optional[int] = None  # None -> ceil(K / 3)

    def __post_init__(self):
        if self.trees < 1:
            raise TrainingError("need at least one tree")
        if self.max_depth is not None and self.max_depth < 0:
            raise TrainingError("max_depth must be >= 0")
        if self.features_per_split is not None and self.features_per_split < 1:
            raise TrainingError("features_per_split must be >= 1")

    def effective_f(self, n_features: int) -> int:
        f = self.features_per_split
        if f is None:
            f = math.ceil(n_features / 3)
        if f > n_features:
            raise TrainingError(
                f"features_per_split {f} exceeds feature count {n_features}"
            )
        return f


@dataclass(frozen=True)
class LeafNode:
    label: int
    class_counts: tuple

    @property
    def is_leaf(self) -> bool:
        return True


@dataclass(frozen=True)
class SplitNode:
    feature: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"
    train_count_left: int
    train_count_right: int

    @property
    def is_leaf(self) -> bool:
        return False


TreeNode = Union[LeafNode, SplitNode]


def entropy(labels) -> float:
    """Base-2 Shannon entropy of a 0/1 label multiset; empty or pure -> 0."""
    arr = np.asarray(list(labels) if not isinstance(labels, np.ndarray) else labels)
    n = arr.size
    if n == 0:
        return 0.0
    n1 = int(arr.sum())
    return _entropy_counts(n - n1, n1)


def _entropy_counts(n0: int, n1: int) -> float:
    n = n0 + n1
    if n == 0 or n0 == 0 or n1 == 0:
        return 0.0
    p0 = n0 / n
    p1 = n1 / n
    return float(-(p0 * np.log2(p0) + p1 * np.log2(p1)))


def _entropy_counts_vec(n0: np.ndarray, n1: np.ndarray) -> np.ndarray:
    n = (n0 + n1).astype(np.float64)
    p0 = np.where(n0 > 0, n0 / n, 1.0)
    p1 = np.where(n1 > 0, n1 / n, 1.0)
    return -(p0 * np.log2(p0) + p1 * np.log2(p1))


@dataclass(frozen=True)
class SplitChoice:
    feature: int
    threshold: float
    gain: float


def best_split(
    X: np.ndarray,
    y: np.ndarray,
    indices: np.ndarray,
    candidate_features: Sequence[int],
) -> Optional[SplitChoice]:
    """Exhaustive midpoint search over the candidate features.

    Samples missing a feature are excluded from that feature's gain
    computation. Returns None when no candidate improves on gain 1e-12.
    """
    labels = y[indices]
    best: Optional[SplitChoice] = None
    for f in sorted(int(f) for f in candidate_features):
        v = X[indices, f]
        mask = ~np.isnan(v)
        n = int(mask.sum())
        if n < 2:
            continue
        vv = v[mask]
        yy = labels[mask].astype(np.int64)
        order = np.argsort(vv, kind="stable")
        vv = vv[order]
        yy = yy[order]
        pos_total = int(yy.sum())
        h_parent = _entropy_counts(n - pos_total, pos_total)
        if h_parent == 0.0:
            continue
        boundaries = np.nonzero(vv[1:] != vv[:-1])[0]
        if boundaries.size == 0:
            continue
        prefix = np.cumsum(yy)
        right_n = boundaries + 1
        right_pos = prefix[boundaries]
        left_n = n - right_n
        left_pos = pos_total - right_pos
        h_left = _entropy_counts_vec(left_n - left_pos, left_pos)
        h_right = _entropy_counts_vec(right_n - right_pos, right_pos)
        gains = h_parent - (left_n * h_left + right_n * h_right) / n
        j = int(np.argmax(gains))  # first max -> lowest threshold on ties
        gain = float(gains[j])
        if best is None or gain > best.gain:
            b = int(boundaries[j])
            threshold = (vv[b] + vv[b + 1]) / 2.0
            best = SplitChoice(f, float(threshold), gain)
    if best is None or best.gain <= _GAIN_EPSILON:
        return None
    return best


def _make_leaf(n0: int, n1: int, rng: np.random.Generator) -> LeafNode:
    if n1 > n0:
        label = 1
    elif n0 > n1:
        label = 0
    else:
        label = int(rng.integers(0, 2))  # tie broken once, at training time
    return LeafNode(label, (n0, n1))


def _grow(
    X: np.ndarray,
    y: np.ndarray,
    indices: np.ndarray,
    depth: int,
    params: ForestParams,
    f_per_split: int,
    rng: np.random.Generator,
) -> TreeNode:
    labels = y[indices]
    n1 = int(labels.sum())
    n0 = indices.size - n1
    if n0 == 0 or n1 == 0:
        return _make_leaf(n0, n1, rng)
    if params.max_depth is not None and depth >= params.max_depth:
        return _make_leaf(n0, n1, rng)
    feats = rng.choice(X.shape[1], size=f_per_split, replace=False)
    choice = best_split(X, y, indices, feats)
    if choice is None:
        return _make_leaf(n0, n1, rng)
    v = X[indices, choice.feature]
    with np.errstate(invalid="ignore"):
        go_left = v > choice.threshold  # NaN fails -> right
    left_idx = indices[go_left]
    right_idx = indices[~go_left]
    left = _grow(X, y, left_idx, depth + 1, params, f_per_split, rng)
    right = _grow(X, y, right_idx, depth + 1, params, f_per_split, rng)
    return SplitNode(
        choice.feature, choice.threshold, left, right, left_idx.size, right_idx.size
    )


def tree_rng(seed: int, tree_index: int) -> np.random.Generator:
    """Independent per-tree stream: Philox keyed by (seed, tree index)."""
    return np.random.Generator(np.random.Philox(key=[seed & _MASK64, tree_index]))


def bag_indices(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform with-replacement resample of size n (bagging)."""
    return rng.integers(0, n, size=n)


def train_tree(
    X: np.ndarray,
    y: np.ndarray,
    params: ForestParams,
    rng: np.random.Generator,
    indices: Optional[np.ndarray] = None,
) -> TreeNode:
    if indices is None:
        indices = np.arange(X.shape[0])
    if indices.size == 0:
        raise TrainingError("cannot grow a tree from zero samples")
    f_per_split = params.effective_f(X.shape[1])
    return _grow(X, y, indices, 0, params, f_per_split, rng)


class RandomForestModel:
    """T trained trees over one feature set; 0 = legitimate, 1 = malicious."""

    def __init__(
        self,
        trees: Sequence[TreeNode],
        params: ForestParams,
        feature_set_id: str,
        seed: int,
        n_features: int,
    ):
        self.trees = list(trees)
        self.params = params
        self.feature_set_id = feature_set_id
        self.seed = seed
        self.n_features = n_features
        self._handles: dict = {}
        if len(self.trees) != params.trees:
            raise TrainingError("tree count does not match params.trees")

    # -- flattened array form consumed by the scoring kernels ---------------

    def _flatten(self):
        feat, thresh, left, right, label = [], [], [], [], []

        def emit(node: TreeNode) -> int:
            i = len(feat)
            if node.is_leaf:
                feat.append(-1)
                thresh.append(0.0)
                left.append(-1)
                right.append(-1)
                label.append(node.label)
            else:
                feat.append(node.feature)
                thresh.append(node.threshold)
                left.append(0)
                right.append(0)
                label.append(0)
                li = emit(node.left)
                ri = emit(node.right)
                left[i] = li
                right[i] = ri
            return i

        roots = [emit(root) for root in self.trees]
        return roots, feat, thresh, left, right, label

    def _handle(self):
        name = kernels.active_name()
        handle = self._handles.get(name)
        if handle is None:
            handle = kernels.active().prepare_forest(*self._flatten())
            self._handles[name] = handle
        return handle

    # -- scoring -------------------------------------------------------------

    def votes(self, x: Union[FeatureVector, np.ndarray]):
        """(votes, node_tests) for one feature vector."""
        if isinstance(x, FeatureVector):
            if x.set_id != self.feature_set_id:
                raise ScoringError(
                    f"vector set {x.set_id!r} does not match model set "
                    f"{self.feature_set_id!r}"
                )
            values = x.values
        else:
            values = np.asarray(x, dtype=np.float64)
            if values.shape[0] != self.n_features:
                raise ScoringError(
                    f"expected {self.n_features} features, got {values.shape[0]}"
                )
        return kernels.active().forest_votes(
            self._handle(), np.ascontiguousarray(values)
        )

    def score(self, x: Union[FeatureVector, np.ndarray]) -> float:
        v, _ = self.votes(x)
        return v / self.params.trees

    def feature_importance(self) -> dict:
        """Split-node occurrence count per feature index."""
        counts: dict = {}
        stack = list(self.trees)
        while stack:
            node = stack.pop()
            if not node.is_leaf:
                counts[node.feature] = counts.get(node.feature, 0) + 1
                stack.append(node.left)
                stack.append(node.right)
        return counts

    def split_node_count(self) -> int:
        return sum(self.feature_importance().values())

    def max_depth_used(self) -> int:
        def depth(node: TreeNode) -> int:
            if node.is_leaf:
                return 0
            return 1 + max(depth(node.left), depth(node.right))

        return max(depth(root) for root in self.trees)


def score(model: RandomForestModel, x) -> float:
    return model.score(x)


def feature_importance(model: RandomForestModel) -> dict:
    return model.feature_importance()


def _stack_samples(samples: Sequence[LabeledSample]):
    if not samples:
        raise TrainingError("empty training set")
    set_id = samples[0].features.set_id
    for s in samples:
        if s.features.set_id != set_id:
            raise TrainingError("mixed feature sets in one training set")
    X = np.stack([s.features.values for s in samples]).astype(np.float64)
    y = np.array([s.label for s in samples], dtype=np.int64)
    return X, y, set_id


def train_forest_arrays(
    X: np.ndarray,
    y: np.ndarray,
    feature_set_id: str,
    params: ForestParams,
    seed: int,
    threads: int = 1,
) -> RandomForestModel:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise TrainingError("X and y shapes disagree")
    n = X.shape[0]
    if n == 0:
        raise TrainingError("empty training set")
    if int(y.sum()) in (0, n):
        raise TrainingError("training set contains a single class")
    params.effective_f(X.shape[1])  # validate F <= K up front

    def build(t: int) -> TreeNode:
        rng = tree_rng(seed, t)
        bag = bag_indices(rng, n)
        return train_tree(X, y, params, rng, indices=bag)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trees = list(pool.map(build, range(params.trees)))
    else:
        trees = [build(t) for t in range(params.trees)]
    return RandomForestModel(trees, params, feature_set_id, seed, X.shape[1])


def train_forest(
    samples: Sequence[LabeledSample],
    params: ForestParams,
    seed: int,
    threads: int = 1,
) -> RandomForestModel:
    X, y, set_id = _stack_samples(samples)
    return train_forest_arrays(X, y, set_id, params, seed, threads=threads)
