"""Exploratory statistics: rank correlations, box-plot summaries, band spreads."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import NO_PERCEPTION_WEIGHTS, LabeledDataset, display_name
from .errors import ConfigError, DegenerateInput, DimensionError

#: Default feature set for correlation analysis, in display order.
DEFAULT_EDA_FEATURES = ("score", "tlr", "rpc", "go", "oi", "pr")


def _average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks with ties replaced by their average position."""
    arr = np.asarray(values, dtype=float)
    order = np.argsort(arr, kind="stable")
    sorted_vals = arr[order]
    ranks = np.empty(arr.shape[0], dtype=float)
    i = 0
    n = arr.shape[0]
    while i < n:
        j = i
        while j + 1 < n and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman_rho(x: Sequence[float], y: Sequence[float]) -> float:
    """Spearman rank correlation coefficient.

    Computed as the product-moment correlation of average-rank vectors,
    which reduces to the classic 1 - 6*sum(d^2)/(n*(n^2-1)) form when no
    ties are present.
    """
    if len(x) != len(y):
        raise DimensionError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise DimensionError("need at least two observations")
    rx = _average_ranks(x)
    ry = _average_ranks(y)
    rx_centered = rx - rx.mean()
    ry_centered = ry - ry.mean()
    vx = float(rx_centered @ rx_centered)
    vy = float(ry_centered @ ry_centered)
    if vx == 0.0 or vy == 0.0:
        raise DegenerateInput("zero rank variance: all values identical")
    return float((rx_centered @ ry_centered) / np.sqrt(vx * vy))


@dataclass(frozen=True)
class CorrelationMatrix:
    """Symmetric matrix of Spearman coefficients with a unit diagonal."""

    labels: tuple[str, ...]
    values: tuple[tuple[float, ...], ...]

    @property
    def size(self) -> int:
        return len(self.labels)


def feature_values(dataset: LabeledDataset, name: str) -> tuple[float, ...]:
    """Values of a named feature; 'score' means the composite score under
    the dataset's weight profile, 'rank' the rank column."""
    key = name.strip().lower()
    if key == "score":
        return dataset.scores()
    if key == "rank":
        return tuple(float(r) for r in dataset.ranks())
    return dataset.column(key)


def correlation_matrix(
    dataset: LabeledDataset, features: Sequence[str] = DEFAULT_EDA_FEATURES
) -> CorrelationMatrix:
    """Pairwise Spearman correlations over the named features."""
    names = [f.strip().lower() for f in features]
    columns = {name: feature_values(dataset, name) for name in names}
    size = len(names)
    grid = [[0.0] * size for _ in range(size)]
    for i in range(size):
        grid[i][i] = 1.0
        for j in range(i + 1, size):
            try:
                rho = spearman_rho(columns[names[i]], columns[names[j]])
            except DegenerateInput as err:
                raise DegenerateInput(
                    f"correlation of ({display_name(names[i])}, "
                    f"{display_name(names[j])}): {err}"
                ) from None
            grid[i][j] = rho
            grid[j][i] = rho
    return CorrelationMatrix(
        labels=tuple(display_name(n) for n in names),
        values=tuple(tuple(row) for row in grid),
    )


@dataclass(frozen=True)
class BoxStats:
    """Five-number summary with 1.5*IQR whiskers and outliers."""

    q1: float
    median: float
    q3: float
    iqr: float
    whisker_low: float
    whisker_high: float
    outliers: tuple[float, ...]


def _median(sorted_values: Sequence[float]) -> float:
    n = len(sorted_values)
    mid = n // 2
    if n % 2 == 1:
        return float(sorted_values[mid])
    return (sorted_values[mid - 1] + sorted_values[mid]) / 2.0


def boxplot_stats(values: Sequence[float]) -> BoxStats:
    """Quartiles via median-of-halves, whiskers at the most extreme data
    within 1.5*IQR of the box.

    Convention note: the lower/upper quartiles are medians of the lower and
    upper halves, excluding the middle element when the count is odd.
    """
    data = sorted(float(v) for v in values)
    n = len(data)
    if n < 4:
        raise DegenerateInput(f"need at least 4 values, got {n}")
    median = _median(data)
    half = n // 2
    q1 = _median(data[:half])
    q3 = _median(data[n - half :])
    iqr = q3 - q1
    fence_low = q1 - 1.5 * iqr
    fence_high = q3 + 1.5 * iqr
    inside = [v for v in data if fence_low <= v <= fence_high]
    outliers = tuple(v for v in data if v < fence_low or v > fence_high)
    return BoxStats(
        q1=q1,
        median=median,
        q3=q3,
        iqr=iqr,
        whisker_low=inside[0],
        whisker_high=inside[-1],
        outliers=outliers,
    )


@dataclass(frozen=True)
class BandSpread:
    rank_low: int
    rank_high: int
    min_score: float
    max_score: float

    @property
    def span(self) -> float:
        return self.max_score - self.min_score


@dataclass(frozen=True)
class RankBandSpread:
    """Min/max of the perception-free composite score per rank band."""

    band_size: int
    bands: tuple[BandSpread, ...]


def rank_band_spread(dataset: LabeledDataset, band_size: int = 10) -> RankBandSpread:
    total = len(dataset)
    if band_size < 1 or total % band_size != 0:
        raise ConfigError(
            f"band size {band_size} does not divide {total} records evenly"
        )
    scores = dataset.scores(NO_PERCEPTION_WEIGHTS)
    bands = []
    for start in range(0, total, band_size):
        chunk = scores[start : start + band_size]
        bands.append(
            BandSpread(
                rank_low=start + 1,
                rank_high=start + band_size,
                min_score=min(chunk),
                max_score=max(chunk),
            )
        )
    return RankBandSpread(band_size=band_size, bands=tuple(bands))
