"""Binary decision-tree induction over continuous features.

Splitting follows the classic recipe: enumerate midpoint thresholds per
feature, score every candidate by impurity reduction (Gini) or information
gain (entropy), and grow recursively until a node is pure, runs out of
samples, exhausts the level budget, or no candidate has positive gain.

Determinism: candidates are scanned feature-major in the caller-supplied
feature order with thresholds ascending, and a candidate replaces the
incumbent only on strictly greater gain. Ties therefore resolve to the
earliest feature and smallest threshold, and construction is invariant to
input row order.

Depth convention: the root sits at depth 1 and a node may split while its
depth does not exceed ``max_depth``, so decision nodes occupy levels
1..max_depth and leaves may sit one level below the last split.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence, Union

from .core import LabeledDataset
from .errors import ConfigError, DataError, DegenerateInput, InvalidSplit, MissingParameter


@dataclass(frozen=True)
class ClassDistribution:
    """Per-class sample counts at a tree node. Classes are 1-based."""

    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.counts:
            raise DataError("distribution needs at least one class")
        if any(c < 0 for c in self.counts):
            raise DataError(f"negative class count in {self.counts}")

    @classmethod
    def from_labels(cls, labels: Iterable[int], num_classes: int) -> "ClassDistribution":
        counts = [0] * num_classes
        for label in labels:
            if not 1 <= label <= num_classes:
                raise DataError(f"label {label} outside 1..{num_classes}")
            counts[label - 1] += 1
        return cls(tuple(counts))

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def num_classes(self) -> int:
        return len(self.counts)

    @property
    def is_pure(self) -> bool:
        return self.total > 0 and max(self.counts) == self.total

    def probabilities(self) -> tuple[float, ...]:
        total = self.total
        if total == 0:
            raise DegenerateInput("empty distribution")
        return tuple(count / total for count in self.counts)

    def majority_class(self) -> int:
        """1-based argmax count; ties resolve to the lower class index."""
        if self.total == 0:
            raise DegenerateInput("empty distribution")
        best = 0
        for index in range(1, len(self.counts)):
            if self.counts[index] > self.counts[best]:
                best = index
        return best + 1

    def add(self, other: "ClassDistribution") -> "ClassDistribution":
        if len(self.counts) != len(other.counts):
            raise DataError("cannot add distributions of different widths")
        return ClassDistribution(tuple(a + b for a, b in zip(self.counts, other.counts)))


def gini_impurity(dist: ClassDistribution) -> float:
    """1 - sum(p_i^2); zero for a pure node, 1 - 1/k for a uniform one."""
    return 1.0 - sum(p * p for p in dist.probabilities())


def entropy(dist: ClassDistribution) -> float:
    """sum(-p_i * log2 p_i); zero-probability classes contribute nothing.

    Ranges over [0, log2 k]; the binary case tops out at 1.
    """
    return sum(-p * math.log2(p) for p in dist.probabilities() if p > 0.0)


class SplitCriterion(enum.Enum):
    """Node-splitting objective."""

    GINI_IMPURITY = "gini"
    INFORMATION_GAIN = "ig"

    @property
    def impurity(self):
        if self is SplitCriterion.GINI_IMPURITY:
            return gini_impurity
        return entropy

    @classmethod
    def parse(cls, name: str) -> "SplitCriterion":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ConfigError(
                f"unknown criterion {name!r}; expected 'gini' or 'ig'"
            ) from None


@dataclass(frozen=True)
class LeafNode:
    distribution: ClassDistribution
    predicted_class: int
    depth: int


@dataclass(frozen=True)
class DecisionNode:
    feature: str
    threshold: float
    left: "TreeNode"
    right: "TreeNode"
    distribution: ClassDistribution
    depth: int


TreeNode = Union[DecisionNode, LeafNode]


@dataclass(frozen=True)
class DecisionTree:
    root: TreeNode
    criterion: SplitCriterion
    max_depth: int
    min_leaf: int
    feature_order: tuple[str, ...]
    num_classes: int

    def nodes(self) -> Iterator[TreeNode]:
        """Preorder walk over every node."""
        stack: list[TreeNode] = [self.root]
        while stack:
            node = stack.pop()
            yield node
            if isinstance(node, DecisionNode):
                stack.append(node.right)
                stack.append(node.left)

    def leaves(self) -> tuple[LeafNode, ...]:
        return tuple(n for n in self.nodes() if isinstance(n, LeafNode))


@dataclass(frozen=True)
class TrainingSet:
    """Row-major feature matrix with 1-based class labels."""

    features: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]
    labels: tuple[int, ...]
    num_classes: int

    def __post_init__(self) -> None:
        if len(self.rows) != len(self.labels):
            raise DataError("one label per row required")
        width = len(self.features)
        for row in self.rows:
            if len(row) != width:
                raise DataError("ragged feature matrix")
        for label in self.labels:
            if not 1 <= label <= self.num_classes:
                raise DataError(f"label {label} outside 1..{self.num_classes}")

    @classmethod
    def from_dataset(cls, dataset: LabeledDataset) -> "TrainingSet":
        features = tuple(dataset.feature_order)
        rows = tuple(
            tuple(record.parameter(name) for name in features)
            for record in dataset.records
        )
        return cls(features, rows, tuple(dataset.labels), dataset.config.num_classes)

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, feature: str) -> tuple[float, ...]:
        try:
            index = self.features.index(feature)
        except ValueError:
            raise ConfigError(f"unknown feature {feature!r}") from None
        return tuple(row[index] for row in self.rows)

    def distribution(self) -> ClassDistribution:
        return ClassDistribution.from_labels(self.labels, self.num_classes)

    def partition(self, feature: str, threshold: float) -> tuple["TrainingSet", "TrainingSet"]:
        """Split into (values <= threshold, values > threshold)."""
        index = self.features.index(feature)
        left_rows, left_labels, right_rows, right_labels = [], [], [], []
        for row, label in zip(self.rows, self.labels):
            if row[index] <= threshold:
                left_rows.append(row)
                left_labels.append(label)
            else:
                right_rows.append(row)
                right_labels.append(label)
        left = TrainingSet(self.features, tuple(left_rows), tuple(left_labels), self.num_classes)
        right = TrainingSet(self.features, tuple(right_rows), tuple(right_labels), self.num_classes)
        return left, right


def as_training_set(data: LabeledDataset | TrainingSet) -> TrainingSet:
    if isinstance(data, TrainingSet):
        return data
    if isinstance(data, LabeledDataset):
        return TrainingSet.from_dataset(data)
    raise ConfigError(f"cannot train on {type(data).__name__}")


def candidate_thresholds(values: Sequence[float]) -> tuple[float, ...]:
    """Midpoints between consecutive distinct sorted values."""
    distinct = sorted({float(v) for v in values})
    return tuple((a + b) / 2.0 for a, b in zip(distinct, distinct[1:]))


class Split(NamedTuple):
    feature: str
    threshold: float
    gain: float


def split_quality(
    subset: LabeledDataset | TrainingSet,
    feature: str,
    threshold: float,
    criterion: SplitCriterion = SplitCriterion.INFORMATION_GAIN,
) -> float:
    """Parent impurity minus the sample-weighted child impurities."""
    ts = as_training_set(subset)
    if len(ts) == 0:
        raise DegenerateInput("empty subset")
    left, right = ts.partition(feature, threshold)
    if len(left) == 0 or len(right) == 0:
        raise InvalidSplit(
            f"threshold {threshold} on {feature} leaves an empty child"
        )
    impurity = criterion.impurity
    n = len(ts)
    weighted = (
        len(left) / n * impurity(left.distribution())
        + len(right) / n * impurity(right.distribution())
    )
    return impurity(ts.distribution()) - weighted


def best_split(
    subset: LabeledDataset | TrainingSet,
    features: Sequence[str] | None = None,
    criterion: SplitCriterion = SplitCriterion.INFORMATION_GAIN,
) -> Split | None:
    """Best (feature, threshold) over all candidates, or None without
    positive gain. Ties go to the earliest feature, then the smallest
    threshold (enforced by the strict comparison in scan order)."""
    ts = as_training_set(subset)
    if len(ts) == 0:
        raise DegenerateInput("empty subset")
    names = tuple(features) if features is not None else ts.features
    best: Split | None = None
    for feature in names:
        for threshold in candidate_thresholds(ts.column(feature)):
            gain = split_quality(ts, feature, threshold, criterion)
            if gain > 0.0 and (best is None or gain > best.gain):
                best = Split(feature, threshold, gain)
    return best


def build_tree(
    data: LabeledDataset | TrainingSet,
    features: Sequence[str] | None = None,
    criterion: SplitCriterion = SplitCriterion.INFORMATION_GAIN,
    max_depth: int = 5,
    min_leaf: int = 1,
) -> DecisionTree:
    """Grow a tree by recursive best-first splitting.

    A node becomes a leaf when it is pure, has fewer than 2*min_leaf
    samples, sits below the level budget, or admits no positive-gain split.
    """
    ts = as_training_set(data)
    if len(ts) == 0:
        raise DegenerateInput("cannot build a tree from an empty dataset")
    if max_depth < 1:
        raise ConfigError(f"max_depth must be >= 1, got {max_depth}")
    if min_leaf < 1:
        raise ConfigError(f"min_leaf must be >= 1, got {min_leaf}")
    names = tuple(features) if features is not None else ts.features
    for name in names:
        ts.column(name)  # fail fast on unknown features
    root = _grow(ts, names, criterion, max_depth, min_leaf, depth=1)
    return DecisionTree(
        root=root,
        criterion=criterion,
        max_depth=max_depth,
        min_leaf=min_leaf,
        feature_order=names,
        num_classes=ts.num_classes,
    )


def _grow(
    ts: TrainingSet,
    features: tuple[str, ...],
    criterion: SplitCriterion,
    max_depth: int,
    min_leaf: int,
    depth: int,
) -> TreeNode:
    dist = ts.distribution()
    if depth > max_depth or dist.is_pure or len(ts) < 2 * min_leaf:
        return LeafNode(dist, dist.majority_class(), depth)
    found = best_split(ts, features, criterion)
    if found is None:
        return LeafNode(dist, dist.majority_class(), depth)
    left_ts, right_ts = ts.partition(found.feature, found.threshold)
    return DecisionNode(
        feature=found.feature,
        threshold=found.threshold,
        left=_grow(left_ts, features, criterion, max_depth, min_leaf, depth + 1),
        right=_grow(right_ts, features, criterion, max_depth, min_leaf, depth + 1),
        distribution=dist,
        depth=depth,
    )


def predict(tree: DecisionTree, vector: Mapping[str, float]) -> int:
    """Route a feature vector to a leaf; values equal to a threshold go left."""
    node = tree.root
    while isinstance(node, DecisionNode):
        if node.feature not in vector:
            raise MissingParameter(f"vector has no {node.feature} value")
        if float(vector[node.feature]) <= node.threshold:
            node = node.left
        else:
            node = node.right
    return node.predicted_class


def tree_to_dict(tree: DecisionTree) -> dict:
    """JSON-ready form: nested node objects under a small metadata header."""
    return {
        "criterion": tree.criterion.value,
        "max_depth": tree.max_depth,
        "min_leaf": tree.min_leaf,
        "num_classes": tree.num_classes,
        "feature_order": list(tree.feature_order),
        "root": _node_to_dict(tree.root),
    }


def _node_to_dict(node: TreeNode) -> dict:
    if isinstance(node, LeafNode):
        return {
            "leaf": list(node.distribution.counts),
            "predicted": node.predicted_class,
        }
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "distribution": list(node.distribution.counts),
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def tree_from_dict(data: Mapping) -> DecisionTree:
    """Inverse of tree_to_dict, with structural consistency checks."""
    try:
        criterion = SplitCriterion(data["criterion"])
        root = _node_from_dict(data["root"], int(data["num_classes"]), depth=1)
        return DecisionTree(
            root=root,
            criterion=criterion,
            max_depth=int(data["max_depth"]),
            min_leaf=int(data["min_leaf"]),
            feature_order=tuple(data["feature_order"]),
            num_classes=int(data["num_classes"]),
        )
    except (KeyError, TypeError, ValueError) as err:
        raise DataError(f"malformed tree document: {err}") from None


def _node_from_dict(data: Mapping, num_classes: int, depth: int) -> TreeNode:
    if "leaf" in data:
        dist = ClassDistribution(tuple(int(c) for c in data["leaf"]))
        if dist.num_classes != num_classes:
            raise DataError("leaf distribution width does not match num_classes")
        predicted = int(data["predicted"])
        if predicted != dist.majority_class():
            raise DataError("leaf prediction inconsistent with its distribution")
        return LeafNode(dist, predicted, depth)
    dist = ClassDistribution(tuple(int(c) for c in data["distribution"]))
    left = _node_from_dict(data["left"], num_classes, depth + 1)
    right = _node_from_dict(data["right"], num_classes, depth + 1)
    if left.distribution.add(right.distribution) != dist:
        raise DataError("child distributions do not sum to the parent")
    return DecisionNode(
        feature=str(data["feature"]),
        threshold=float(data["threshold"]),
        left=left,
        right=right,
        distribution=dist,
        depth=depth,
    )
