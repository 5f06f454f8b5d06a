"""Core domain model: institute records, score weights, quartile classes.

Scores live on a 0..100 scale. A composite score is a weighted sum of the
five primary parameters (TLR, RPC, GO, OI, PR); the ranking body sorts by
that score to assign ranks, and classes are contiguous rank bands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ConfigError, DataError, MissingParameter

#: Features used for tree induction, in canonical tie-break order.
FEATURES: tuple[str, ...] = ("tlr", "rpc", "go", "oi")

#: All primary parameters, including the survey-based perception score.
PARAMETERS: tuple[str, ...] = ("tlr", "rpc", "go", "oi", "pr")

#: Display names for parameters and derived columns.
DISPLAY_NAMES: dict[str, str] = {
    "score": "Score",
    "tlr": "TLR",
    "rpc": "RPC",
    "go": "GO",
    "oi": "OI",
    "pr": "PR",
}


def display_name(feature: str) -> str:
    return DISPLAY_NAMES.get(feature, feature.upper())


def _require_score_range(name: str, value: float | None) -> None:
    if value is None:
        return
    if not math.isfinite(value) or not 0.0 <= value <= 100.0:
        raise DataError(f"{name} must lie in [0, 100], got {value!r}")


@dataclass(frozen=True)
class InstituteRecord:
    """One institution-year row of ranking data."""

    institute_id: str
    name: str
    year: int
    rank: int
    tlr: float
    rpc: float
    go: float
    oi: float
    pr: float | None = None
    reported_score: float | None = None

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise DataError(f"rank must be >= 1, got {self.rank}")
        for param in PARAMETERS:
            _require_score_range(param, getattr(self, param))
        _require_score_range("reported_score", self.reported_score)

    def parameter(self, name: str) -> float:
        """Return one parameter score; raise MissingParameter if absent."""
        if name not in PARAMETERS:
            raise ConfigError(f"unknown parameter {name!r}")
        value = getattr(self, name)
        if value is None:
            raise MissingParameter(
                f"record {self.institute_id!r} has no {name} value"
            )
        return value


@dataclass(frozen=True)
class ScoreWeights:
    """Weights applied to the five parameters in the composite score.

    The published profile weighs TLR/RPC/GO/OI/PR at 0.3/0.3/0.2/0.1/0.1.
    The perception-free profile zeroes ``w_pr`` and keeps the other weights
    unchanged, so its weights sum to 0.9 by design (no renormalization).
    """

    w_tlr: float = 0.3
    w_rpc: float = 0.3
    w_go: float = 0.2
    w_oi: float = 0.1
    w_pr: float = 0.1

    def __post_init__(self) -> None:
        weights = self.as_mapping()
        if any(w < 0 for w in weights.values()):
            raise ConfigError("weights must be non-negative")
        total = sum(weights.values())
        expected = 0.9 if self.w_pr == 0 else 1.0
        if abs(total - expected) > 1e-9:
            profile = "perception-free" if self.w_pr == 0 else "full"
            raise ConfigError(
                f"{profile} profile weights must sum to {expected}, got {total}"
            )

    def as_mapping(self) -> dict[str, float]:
        return {
            "tlr": self.w_tlr,
            "rpc": self.w_rpc,
            "go": self.w_go,
            "oi": self.w_oi,
            "pr": self.w_pr,
        }

    @property
    def includes_perception(self) -> bool:
        return self.w_pr > 0


FULL_WEIGHTS = ScoreWeights()
NO_PERCEPTION_WEIGHTS = ScoreWeights(w_pr=0.0)

WEIGHT_PROFILES: dict[str, ScoreWeights] = {
    "full": FULL_WEIGHTS,
    "no-perception": NO_PERCEPTION_WEIGHTS,
}


def composite_score(record: InstituteRecord, weights: ScoreWeights = FULL_WEIGHTS) -> float:
    """Weighted sum of parameter scores.

    Parameters with zero weight are never read, so a missing perception
    value is fine under the perception-free profile.
    """
    total = 0.0
    for name, weight in weights.as_mapping().items():
        if weight == 0:
            continue
        total += weight * record.parameter(name)
    return total


def vector_score(vector: Mapping[str, float], weights: ScoreWeights = NO_PERCEPTION_WEIGHTS) -> float:
    """Composite score of a bare feature vector (keys are parameter names)."""
    total = 0.0
    for name, weight in weights.as_mapping().items():
        if weight == 0:
            continue
        if name not in vector:
            raise MissingParameter(f"vector has no {name} value")
        total += weight * float(vector[name])
    return total


@dataclass(frozen=True)
class ClassConfig:
    """Partition of ranks 1..N into contiguous classes."""

    num_classes: int
    class_size: int
    boundaries: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.num_classes < 2:
            raise ConfigError(f"need at least 2 classes, got {self.num_classes}")
        if len(self.boundaries) != self.num_classes:
            raise ConfigError("one boundary pair per class required")
        expected_lo = 1
        for lo, hi in self.boundaries:
            if lo != expected_lo or hi < lo:
                raise ConfigError(
                    f"boundaries must tile ranks contiguously from 1; got {self.boundaries}"
                )
            expected_lo = hi + 1

    @classmethod
    def uniform(cls, total: int, num_classes: int = 4) -> "ClassConfig":
        """Equal-sized classes over ranks 1..total."""
        if num_classes < 2:
            raise ConfigError(f"need at least 2 classes, got {num_classes}")
        if total <= 0 or total % num_classes != 0:
            raise ConfigError(
                f"{total} ranks cannot be divided into {num_classes} equal classes"
            )
        size = total // num_classes
        bounds = tuple((i * size + 1, (i + 1) * size) for i in range(num_classes))
        return cls(num_classes=num_classes, class_size=size, boundaries=bounds)

    @property
    def total(self) -> int:
        return self.boundaries[-1][1]

    def class_of(self, rank: int) -> int:
        """1-based class index of a rank."""
        for index, (lo, hi) in enumerate(self.boundaries, start=1):
            if lo <= rank <= hi:
                return index
        raise DataError(f"rank {rank} outside 1..{self.total}")


def assign_classes(records: Sequence[InstituteRecord], config: ClassConfig) -> list[int]:
    """Class label per record; requires ranks to cover 1..N exactly once."""
    total = config.total
    if len(records) != total:
        raise DataError(
            f"expected {total} records for this class config, got {len(records)}"
        )
    seen: set[int] = set()
    for record in records:
        if record.rank in seen:
            raise DataError(f"duplicate rank {record.rank}")
        seen.add(record.rank)
    missing = sorted(set(range(1, total + 1)) - seen)
    if missing:
        raise DataError(f"rank gap: missing ranks {missing}")
    return [config.class_of(record.rank) for record in records]


@dataclass(frozen=True)
class LabeledDataset:
    """Immutable rank-ordered dataset with class labels attached."""

    records: tuple[InstituteRecord, ...]
    labels: tuple[int, ...]
    weights: ScoreWeights
    config: ClassConfig
    feature_order: tuple[str, ...] = FEATURES

    def __post_init__(self) -> None:
        if len(self.records) != len(self.labels):
            raise DataError("one label per record required")
        previous = 0
        for record, label in zip(self.records, self.labels):
            if record.rank <= previous:
                raise DataError("records must be sorted by rank ascending")
            previous = record.rank
            if label != self.config.class_of(record.rank):
                raise DataError(
                    f"label {label} inconsistent with rank {record.rank}"
                )

    @classmethod
    def from_records(
        cls,
        records: Iterable[InstituteRecord],
        weights: ScoreWeights = FULL_WEIGHTS,
        config: ClassConfig | None = None,
        num_classes: int = 4,
    ) -> "LabeledDataset":
        ordered = tuple(sorted(records, key=lambda r: r.rank))
        if config is None:
            config = ClassConfig.uniform(len(ordered), num_classes)
        labels = tuple(assign_classes(ordered, config))
        return cls(records=ordered, labels=labels, weights=weights, config=config)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[InstituteRecord]:
        return iter(self.records)

    def with_weights(self, weights: ScoreWeights) -> "LabeledDataset":
        return LabeledDataset(self.records, self.labels, weights, self.config, self.feature_order)

    def column(self, name: str) -> tuple[float, ...]:
        """All values of one parameter; raises if any record lacks it."""
        return tuple(record.parameter(name) for record in self.records)

    def ranks(self) -> tuple[int, ...]:
        return tuple(record.rank for record in self.records)

    def scores(self, weights: ScoreWeights | None = None) -> tuple[float, ...]:
        """Composite score per record, with the dataset weights by default."""
        use = weights if weights is not None else self.weights
        return tuple(composite_score(record, use) for record in self.records)

    def feature_rows(self) -> tuple[dict[str, float], ...]:
        """Per-record feature vectors over feature_order, for prediction."""
        return tuple(
            {name: record.parameter(name) for name in self.feature_order}
            for record in self.records
        )

    def class_records(self, target_class: int) -> tuple[InstituteRecord, ...]:
        return tuple(
            record
            for record, label in zip(self.records, self.labels)
            if label == target_class
        )
