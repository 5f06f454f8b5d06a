"""Prediction scoring: confusion matrices, quadratic weighted kappa, depth sweeps.

The kappa here penalizes disagreement by squared ordinal distance, so
predicting class 3 for a class-1 institute costs four times as much as
predicting class 2. Weights use the (i-j)^2/(k-1)^2 normalization, whose
off-diagonal pattern for four classes is 0.11 / 0.44 / 1. Kappa itself is
invariant to uniform scaling of the weight matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import LabeledDataset
from .dtree import DecisionTree, SplitCriterion, build_tree, predict
from .errors import ConfigError, DataError, DegenerateInput, DimensionError

Matrix = tuple[tuple[float, ...], ...]


@dataclass(frozen=True)
class ConfusionMatrix:
    """counts[a][p]: rows are actual classes, columns predicted (0-indexed
    internally, classes are 1-based everywhere in the API)."""

    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        k = len(self.counts)
        for row in self.counts:
            if len(row) != k:
                raise DataError("confusion matrix must be square")
            if any(c < 0 for c in row):
                raise DataError("confusion counts must be non-negative")

    @property
    def num_classes(self) -> int:
        return len(self.counts)

    @property
    def n(self) -> int:
        return sum(sum(row) for row in self.counts)

    def row_marginals(self) -> tuple[int, ...]:
        return tuple(sum(row) for row in self.counts)

    def col_marginals(self) -> tuple[int, ...]:
        k = self.num_classes
        return tuple(sum(self.counts[i][j] for i in range(k)) for j in range(k))


def confusion_matrix(
    actual: Sequence[int], predicted: Sequence[int], num_classes: int
) -> ConfusionMatrix:
    if len(actual) != len(predicted):
        raise DimensionError(
            f"length mismatch: {len(actual)} actual vs {len(predicted)} predicted"
        )
    if not actual:
        raise DimensionError("need at least one observation")
    counts = [[0] * num_classes for _ in range(num_classes)]
    for a, p in zip(actual, predicted):
        for label in (a, p):
            if not 1 <= label <= num_classes:
                raise DataError(f"label {label} outside 1..{num_classes}")
        counts[a - 1][p - 1] += 1
    return ConfusionMatrix(tuple(tuple(row) for row in counts))


def weight_matrix(num_classes: int) -> Matrix:
    """w[i][j] = (i-j)^2 / (k-1)^2: zero diagonal, unit corners."""
    if num_classes < 2:
        raise ConfigError(f"need at least 2 classes, got {num_classes}")
    denom = (num_classes - 1) ** 2
    return tuple(
        tuple((i - j) ** 2 / denom for j in range(num_classes))
        for i in range(num_classes)
    )


def expected_matrix(cm: ConfusionMatrix) -> Matrix:
    """Chance-agreement matrix from the marginals: m[i][j] = row_i*col_j/n."""
    n = cm.n
    if n == 0:
        raise DegenerateInput("empty confusion matrix")
    rows = cm.row_marginals()
    cols = cm.col_marginals()
    return tuple(
        tuple(rows[i] * cols[j] / n for j in range(cm.num_classes))
        for i in range(cm.num_classes)
    )


def quadratic_weighted_kappa(cm: ConfusionMatrix, weights: Matrix | None = None) -> float:
    """kappa = 1 - sum(w*x) / sum(w*m).

    The optional weights argument exists for scale-invariance checks; the
    default is weight_matrix(k).
    """
    k = cm.num_classes
    w = weights if weights is not None else weight_matrix(k)
    m = expected_matrix(cm)
    observed = sum(w[i][j] * cm.counts[i][j] for i in range(k) for j in range(k))
    expected = sum(w[i][j] * m[i][j] for i in range(k) for j in range(k))
    if expected == 0.0:
        raise DegenerateInput("all mass in one class: kappa denominator is zero")
    return 1.0 - observed / expected


def accuracy(cm: ConfusionMatrix) -> float:
    n = cm.n
    if n == 0:
        raise DegenerateInput("empty confusion matrix")
    return sum(cm.counts[i][i] for i in range(cm.num_classes)) / n


def kappa_band(kappa: float) -> str:
    """Qualitative reading of a kappa value."""
    if kappa <= 0.4:
        return "poor"
    if kappa < 0.75:
        return "fair"
    return "excellent"


@dataclass(frozen=True)
class KappaReport:
    confusion: ConfusionMatrix
    weights: Matrix
    expected: Matrix
    kappa: float
    accuracy: float

    @property
    def band(self) -> str:
        return kappa_band(self.kappa)


def kappa_report(cm: ConfusionMatrix) -> KappaReport:
    return KappaReport(
        confusion=cm,
        weights=weight_matrix(cm.num_classes),
        expected=expected_matrix(cm),
        kappa=quadratic_weighted_kappa(cm),
        accuracy=accuracy(cm),
    )


def evaluate_tree(tree: DecisionTree, test: LabeledDataset) -> KappaReport:
    """Predict every test record and score the result."""
    predicted = [predict(tree, row) for row in test.feature_rows()]
    cm = confusion_matrix(list(test.labels), predicted, test.config.num_classes)
    return kappa_report(cm)


@dataclass(frozen=True)
class SweepPoint:
    depth: int
    kappa: float
    accuracy: float


def depth_sweep(
    train: LabeledDataset,
    test: LabeledDataset,
    criterion: SplitCriterion,
    depths: Sequence[int],
    min_leaf: int = 1,
    features: Sequence[str] | None = None,
) -> tuple[SweepPoint, ...]:
    """Train one tree per depth cap and evaluate each on the test data.

    Results come back ordered by depth (duplicates preserved).
    """
    if not depths:
        raise ConfigError("depths must be non-empty")
    if any(d < 1 for d in depths):
        raise ConfigError("every depth must be >= 1")
    points = []
    for depth in sorted(depths):
        tree = build_tree(
            train,
            features=features,
            criterion=criterion,
            max_depth=depth,
            min_leaf=min_leaf,
        )
        report = evaluate_tree(tree, test)
        points.append(SweepPoint(depth=depth, kappa=report.kappa, accuracy=report.accuracy))
    return tuple(points)
