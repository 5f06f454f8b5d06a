"""Decision paths, Laplace-corrected certainty, floors and what-if analysis.

A path is the conjunction of threshold conditions from the root toward a
node. Paths predicting a target class become candidate strategies: their
leaf distribution yields a Laplace-corrected probability, and the training
data supplies floor constraints (minima a candidate must still maintain on
features the path leaves unbounded from below) plus the minimum composite
score observed in the target class.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .core import (
    NO_PERCEPTION_WEIGHTS,
    InstituteRecord,
    LabeledDataset,
    composite_score,
    display_name,
    vector_score,
)
from .dtree import (
    ClassDistribution,
    DecisionNode,
    DecisionTree,
    LeafNode,
    SplitCriterion,
    TrainingSet,
    build_tree,
)
from .errors import (
    ConfigError,
    DataError,
    MissingParameter,
    NoPath,
    NoSupport,
    SchemaError,
)


class ConditionOp(enum.Enum):
    LE = "le"
    GT = "gt"


@dataclass(frozen=True)
class PathCondition:
    feature: str
    op: ConditionOp
    threshold: float

    def holds(self, value: float) -> bool:
        if self.op is ConditionOp.LE:
            return value <= self.threshold
        return value > self.threshold

    def describe(self) -> str:
        symbol = "<=" if self.op is ConditionOp.LE else ">"
        return f"{display_name(self.feature)} {symbol} {self.threshold:.2f}"


@dataclass(frozen=True)
class LaplaceEstimate:
    """Add-one smoothed probability, kept as an exact fraction."""

    numerator: int
    denominator: int

    @property
    def value(self) -> float:
        return self.numerator / self.denominator

    def describe(self) -> str:
        return f"{self.value:.2f} ({self.numerator}/{self.denominator})"

    def to_dict(self) -> dict:
        return {"num": self.numerator, "den": self.denominator, "value": self.value}


def laplace_estimate(
    dist: ClassDistribution, target_class: int, num_classes: int | None = None
) -> LaplaceEstimate:
    """(count_target + 1) / (total + k); an empty node yields the uniform
    prior 1/k rather than an extreme 0 or 1."""
    k = num_classes if num_classes is not None else dist.num_classes
    if k < 2:
        raise ConfigError(f"need at least 2 classes, got {k}")
    if not 1 <= target_class <= dist.num_classes:
        raise DataError(
            f"target class {target_class} outside 1..{dist.num_classes}"
        )
    count = dist.counts[target_class - 1]
    return LaplaceEstimate(numerator=count + 1, denominator=dist.total + k)


@dataclass(frozen=True)
class DecisionPath:
    """Root-to-node condition list with its class evidence.

    ``floors`` and ``score_floor`` are data-derived and attached by
    ``path_floor_constraints`` / ``strategy_report``; they are None on
    paths enumerated straight off a tree.
    """

    conditions: tuple[PathCondition, ...]
    node_distribution: ClassDistribution
    target_class: int
    laplace: LaplaceEstimate
    is_leaf: bool
    route: str
    floors: Mapping[str, float] | None = None
    score_floor: float | None = None

    @property
    def level(self) -> int:
        return len(self.conditions)

    def merged_conditions(self) -> tuple[PathCondition, ...]:
        return merge_conditions(self.conditions)

    def satisfied_by(self, values: Mapping[str, float]) -> bool:
        return all(c.holds(float(values[c.feature])) for c in self.conditions)

    def describe(self) -> str:
        return " & ".join(c.describe() for c in self.merged_conditions())


def merge_conditions(conditions: Sequence[PathCondition]) -> tuple[PathCondition, ...]:
    """Collapse repeated conditions on one feature: the largest GT bound
    and the smallest LE bound survive. Order follows first occurrence."""
    merged: dict[tuple[str, ConditionOp], PathCondition] = {}
    for condition in conditions:
        key = (condition.feature, condition.op)
        current = merged.get(key)
        if current is None:
            merged[key] = condition
        elif condition.op is ConditionOp.GT and condition.threshold > current.threshold:
            merged[key] = condition
        elif condition.op is ConditionOp.LE and condition.threshold < current.threshold:
            merged[key] = condition
    return tuple(merged.values())


def enumerate_paths(tree: DecisionTree) -> tuple[DecisionPath, ...]:
    """One path per node below the root, in preorder.

    Leaf paths (is_leaf True) are the full strategies; internal-node paths
    are the level prefixes used by the level-wise probability tables. Each
    path targets its node's majority class.
    """
    paths: list[DecisionPath] = []

    def walk(node, conditions: list[PathCondition], route: str) -> None:
        if conditions:
            dist = node.distribution
            target = dist.majority_class()
            paths.append(
                DecisionPath(
                    conditions=tuple(conditions),
                    node_distribution=dist,
                    target_class=target,
                    laplace=laplace_estimate(dist, target, tree.num_classes),
                    is_leaf=isinstance(node, LeafNode),
                    route=route,
                )
            )
        if isinstance(node, DecisionNode):
            left_cond = PathCondition(node.feature, ConditionOp.LE, node.threshold)
            right_cond = PathCondition(node.feature, ConditionOp.GT, node.threshold)
            walk(node.left, conditions + [left_cond], route + "L")
            walk(node.right, conditions + [right_cond], route + "R")

    walk(tree.root, [], "")
    return tuple(paths)


def leaf_paths(tree: DecisionTree, target_class: int | None = None) -> tuple[DecisionPath, ...]:
    paths = tuple(p for p in enumerate_paths(tree) if p.is_leaf)
    if target_class is None:
        return paths
    return tuple(p for p in paths if p.target_class == target_class)


def _record_satisfies(record: InstituteRecord, conditions: Sequence[PathCondition]) -> bool:
    return all(c.holds(record.parameter(c.feature)) for c in conditions)


def class_score_floor(dataset: LabeledDataset, target_class: int) -> float:
    """Minimum perception-free composite score among target-class records."""
    members = dataset.class_records(target_class)
    if not members:
        raise NoSupport(f"no records labeled class {target_class}")
    return min(composite_score(r, NO_PERCEPTION_WEIGHTS) for r in members)


def path_floor_constraints(
    dataset: LabeledDataset, path: DecisionPath, target_class: int
) -> tuple[dict[str, float], float]:
    """Floors and score floor for a path toward a class.

    The dataset is filtered by the path conditions AND the target class;
    each feature without a strictly-greater condition on the path gets the
    minimum observed value as its floor. The score floor is the minimum
    perception-free composite over all target-class records.
    """
    merged = merge_conditions(path.conditions)
    filtered = [
        record
        for record, label in zip(dataset.records, dataset.labels)
        if label == target_class and _record_satisfies(record, merged)
    ]
    if not filtered:
        raise NoSupport(
            f"no class-{target_class} records satisfy: "
            + " & ".join(c.describe() for c in merged)
        )
    bounded_below = {c.feature for c in merged if c.op is ConditionOp.GT}
    floors = {
        feature: min(record.parameter(feature) for record in filtered)
        for feature in dataset.feature_order
        if feature not in bounded_below
    }
    return floors, class_score_floor(dataset, target_class)


def attach_constraints(
    dataset: LabeledDataset, path: DecisionPath, target_class: int | None = None
) -> DecisionPath:
    target = target_class if target_class is not None else path.target_class
    floors, score_floor = path_floor_constraints(dataset, path, target)
    return replace(path, floors=floors, score_floor=score_floor)


@dataclass(frozen=True)
class LevelRow:
    """One row of a level-wise probability table for a leaf path."""

    level: int
    conditions: tuple[PathCondition, ...]
    matched: int
    target_count: int
    laplace: LaplaceEstimate
    floors: Mapping[str, float]


def level_table(
    dataset: LabeledDataset, path: DecisionPath, target_class: int | None = None
) -> tuple[LevelRow, ...]:
    """Laplace certainty of reaching the target class after each prefix of
    the path, recomputed from the training data (not from node caches)."""
    target = target_class if target_class is not None else path.target_class
    k = dataset.config.num_classes
    rows: list[LevelRow] = []
    for level in range(1, len(path.conditions) + 1):
        prefix = merge_conditions(path.conditions[:level])
        matching = [
            (record, label)
            for record, label in zip(dataset.records, dataset.labels)
            if _record_satisfies(record, prefix)
        ]
        count = sum(1 for _, label in matching if label == target)
        in_class = [record for record, label in matching if label == target]
        bounded_below = {c.feature for c in prefix if c.op is ConditionOp.GT}
        floors = (
            {
                feature: min(r.parameter(feature) for r in in_class)
                for feature in dataset.feature_order
                if feature not in bounded_below
            }
            if in_class
            else {}
        )
        rows.append(
            LevelRow(
                level=level,
                conditions=prefix,
                matched=len(matching),
                target_count=count,
                laplace=LaplaceEstimate(count + 1, len(matching) + k),
                floors=floors,
            )
        )
    return tuple(rows)


@dataclass(frozen=True)
class GapAnalysis:
    """Per-feature shortfall of a subject against one path."""

    required: Mapping[str, float]
    gaps: Mapping[str, float]
    percent_changes: Mapping[str, float | None]


def _gap_analysis(
    path: DecisionPath, subject: Mapping[str, float], feature_order: Sequence[str]
) -> GapAnalysis:
    merged = path.merged_conditions()
    floors = path.floors or {}
    required: dict[str, float] = {}
    for feature in feature_order:
        bounds = [c.threshold for c in merged if c.feature == feature and c.op is ConditionOp.GT]
        if feature in floors:
            bounds.append(floors[feature])
        if bounds:
            required[feature] = max(bounds)
    gaps: dict[str, float] = {}
    percents: dict[str, float | None] = {}
    for feature, bound in required.items():
        current = float(subject[feature])
        gap = max(0.0, bound - current)
        gaps[feature] = gap
        percents[feature] = (100.0 * gap / current) if current > 0 else (None if gap > 0 else 0.0)
    return GapAnalysis(required=required, gaps=gaps, percent_changes=percents)


def _midpoint_recommendation(path: DecisionPath) -> dict[str, float]:
    """For range-style features (an LE bound above, a floor or GT bound
    below), recommend the midpoint of the admissible range."""
    merged = path.merged_conditions()
    floors = path.floors or {}
    recommendation: dict[str, float] = {}
    for condition in merged:
        if condition.op is not ConditionOp.LE:
            continue
        feature = condition.feature
        lower = floors.get(feature)
        if lower is None:
            lower = max(
                (c.threshold for c in merged if c.feature == feature and c.op is ConditionOp.GT),
                default=None,
            )
        if lower is None or lower > condition.threshold:
            continue
        recommendation[feature] = (lower + condition.threshold) / 2.0
    return recommendation


@dataclass(frozen=True)
class StrategyPath:
    path: DecisionPath
    gap_analysis: GapAnalysis | None
    recommendation: Mapping[str, float]


@dataclass(frozen=True)
class StrategyReport:
    target_class: int
    score_floor: float
    subject: Mapping[str, float] | None
    paths: tuple[StrategyPath, ...]


def strategy_report(
    tree: DecisionTree,
    dataset: LabeledDataset,
    target_class: int,
    subject: Mapping[str, float] | None = None,
) -> StrategyReport:
    """Every leaf path predicting the target class, ranked by certainty.

    Paths come back with floors and score floor attached, sorted by Laplace
    probability descending with leaf size breaking ties. With a subject
    vector, each path carries the per-feature gaps and percent changes
    needed to satisfy it.
    """
    if not 1 <= target_class <= tree.num_classes:
        raise ConfigError(
            f"target class {target_class} outside 1..{tree.num_classes}"
        )
    candidates = leaf_paths(tree, target_class)
    if not candidates:
        raise NoPath(f"no leaf predicts class {target_class}")
    if subject is not None:
        subject = _validated_vector(subject, tree.feature_order)
    enriched = []
    for path in candidates:
        path = attach_constraints(dataset, path, target_class)
        enriched.append(
            StrategyPath(
                path=path,
                gap_analysis=_gap_analysis(path, subject, tree.feature_order)
                if subject is not None
                else None,
                recommendation=_midpoint_recommendation(path),
            )
        )
    enriched.sort(
        key=lambda sp: (
            -sp.path.laplace.value,
            -sp.path.node_distribution.total,
            sp.path.route,
        )
    )
    return StrategyReport(
        target_class=target_class,
        score_floor=class_score_floor(dataset, target_class),
        subject=subject,
        paths=tuple(enriched),
    )


def _validated_vector(
    vector: Mapping[str, float], features: Sequence[str]
) -> dict[str, float]:
    cleaned: dict[str, float] = {}
    for feature in features:
        if feature not in vector:
            raise MissingParameter(f"vector has no {feature} value")
        value = float(vector[feature])
        if not 0.0 <= value <= 100.0:
            raise DataError(f"{feature} must lie in [0, 100], got {value}")
        cleaned[feature] = value
    return cleaned


def route_vector(
    tree: DecisionTree, vector: Mapping[str, float]
) -> tuple[LeafNode, tuple[PathCondition, ...], str]:
    """Walk a vector down the tree; returns (leaf, conditions, route)."""
    node = tree.root
    conditions: list[PathCondition] = []
    route: list[str] = []
    while isinstance(node, DecisionNode):
        if node.feature not in vector:
            raise MissingParameter(f"vector has no {node.feature} value")
        if float(vector[node.feature]) <= node.threshold:
            conditions.append(PathCondition(node.feature, ConditionOp.LE, node.threshold))
            route.append("L")
            node = node.left
        else:
            conditions.append(PathCondition(node.feature, ConditionOp.GT, node.threshold))
            route.append("R")
            node = node.right
    return node, tuple(conditions), "".join(route)


@dataclass(frozen=True)
class WhatIfResult:
    predicted_class: int
    path: DecisionPath
    laplace: LaplaceEstimate
    score: float
    score_floor: float | None
    score_below_floor: bool

    @property
    def route(self) -> str:
        return self.path.route


def what_if_routed(
    tree: DecisionTree,
    candidate: Mapping[str, float],
    score_floors: Mapping[int, float] | None = None,
) -> WhatIfResult:
    """Route a candidate and check its score against a per-class floor map.

    This is the dataset-free core used when only a serialized tree (with
    embedded floors) is at hand.
    """
    vector = _validated_vector(candidate, tree.feature_order)
    leaf, conditions, route = route_vector(tree, vector)
    predicted = leaf.predicted_class
    estimate = laplace_estimate(leaf.distribution, predicted, tree.num_classes)
    path = DecisionPath(
        conditions=conditions,
        node_distribution=leaf.distribution,
        target_class=predicted,
        laplace=estimate,
        is_leaf=True,
        route=route,
    )
    score = vector_score(vector, NO_PERCEPTION_WEIGHTS)
    floor = None if score_floors is None else score_floors.get(predicted)
    return WhatIfResult(
        predicted_class=predicted,
        path=path,
        laplace=estimate,
        score=score,
        score_floor=floor,
        score_below_floor=floor is not None and score < floor,
    )


def what_if(
    tree: DecisionTree, dataset: LabeledDataset, candidate: Mapping[str, float]
) -> WhatIfResult:
    """Full what-if: route the candidate, attach data-derived floors to the
    matched leaf path, and compare the candidate's perception-free score
    with the predicted class's score floor."""
    floors_by_class = {
        c: class_score_floor(dataset, c) for c in range(1, tree.num_classes + 1)
    }
    result = what_if_routed(tree, candidate, floors_by_class)
    path = attach_constraints(dataset, result.path, result.predicted_class)
    return replace(result, path=path)


def subparameter_tree(
    rows: Sequence[Mapping[str, float]],
    sub_features: Sequence[str],
    parent_feature: str,
    threshold: float,
    criterion: SplitCriterion = SplitCriterion.INFORMATION_GAIN,
    max_depth: int = 5,
    min_leaf: int = 1,
) -> DecisionTree:
    """Drill-down tree over sub-parameter columns with a binary target:
    class 1 means the parent parameter meets the threshold (>=), class 2
    means it falls short."""
    features = tuple(f.strip().lower() for f in sub_features)
    parent = parent_feature.strip().lower()
    for index, row in enumerate(rows):
        for column in (*features, parent):
            if column not in row:
                raise SchemaError(f"row {index}: missing sub-parameter column {column!r}")
    matrix = tuple(tuple(float(row[f]) for f in features) for row in rows)
    labels = tuple(1 if float(row[parent]) >= threshold else 2 for row in rows)
    ts = TrainingSet(features=features, rows=matrix, labels=labels, num_classes=2)
    return build_tree(
        ts, criterion=criterion, max_depth=max_depth, min_leaf=min_leaf
    )
