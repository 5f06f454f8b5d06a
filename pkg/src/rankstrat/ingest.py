"""CSV ingestion, schema checks and score-consistency validation.

The one accepted wire format is UTF-8 CSV with header tokens
``institute_id,name,rank,tlr,rpc,go,oi,pr,score`` in any order; ``pr`` and
``score`` are optional columns, header matching is case-insensitive and
whitespace-tolerant.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

from .core import (
    FULL_WEIGHTS,
    PARAMETERS,
    WEIGHT_PROFILES,
    InstituteRecord,
    LabeledDataset,
    ScoreWeights,
    composite_score,
)
from .errors import ConfigError, DataError, MissingParameter, ParseError, SchemaError

REQUIRED_COLUMNS = ("institute_id", "name", "rank", "tlr", "rpc", "go", "oi")
OPTIONAL_COLUMNS = ("pr", "score")

#: Published tables print scores to two decimals; half a unit in the last
#: place is the tightest defensible tolerance for recomputation checks.
SCORE_TOLERANCE = 0.005


@dataclass(frozen=True)
class DatasetManifest:
    """Where a ranking CSV lives and how it should be interpreted."""

    path: str
    year: int
    category: str = "engineering"
    weight_profile: str = "full"

    def __post_init__(self) -> None:
        if self.year <= 0:
            raise ConfigError(f"year must be positive, got {self.year}")
        if self.weight_profile not in WEIGHT_PROFILES:
            raise ConfigError(
                f"unknown weight profile {self.weight_profile!r}; "
                f"expected one of {sorted(WEIGHT_PROFILES)}"
            )

    @property
    def weights(self) -> ScoreWeights:
        return WEIGHT_PROFILES[self.weight_profile]


@dataclass(frozen=True)
class ScoreMismatch:
    institute_id: str
    reported: float
    recomputed: float
    delta: float


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of recomputing every record's composite score."""

    row_count: int
    score_mismatches: tuple[ScoreMismatch, ...]
    range_violations: tuple[str, ...]
    rank_gaps: tuple[int, ...]
    unverifiable: bool

    @property
    def clean(self) -> bool:
        return not (self.score_mismatches or self.range_violations or self.rank_gaps)


def _parse_header(row: list[str]) -> dict[str, int]:
    tokens = [cell.strip().lower() for cell in row]
    known = set(REQUIRED_COLUMNS) | set(OPTIONAL_COLUMNS)
    columns: dict[str, int] = {}
    for index, token in enumerate(tokens):
        if token not in known:
            raise SchemaError(f"unexpected column {token!r}")
        if token in columns:
            raise SchemaError(f"duplicate column {token!r}")
        columns[token] = index
    for name in REQUIRED_COLUMNS:
        if name not in columns:
            raise SchemaError(f"missing required column {name!r}")
    return columns


def _cell(row: list[str], columns: dict[str, int], name: str) -> str | None:
    index = columns.get(name)
    if index is None:
        return None
    return row[index].strip()


def _parse_int(value: str, field: str, line: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ParseError(f"invalid {field} value {value!r}", line=line) from None


def _parse_float(value: str | None, field: str, line: int) -> float | None:
    if value is None or value == "":
        return None
    try:
        return float(value)
    except ValueError:
        raise ParseError(f"invalid {field} value {value!r}", line=line) from None


def parse_dataset(manifest: DatasetManifest, raw: bytes, num_classes: int = 4) -> LabeledDataset:
    """Parse CSV bytes into a labeled, rank-sorted dataset.

    Raises SchemaError for header problems, ParseError (with line number)
    for malformed cells, DataError for range violations and rank gaps.
    """
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as err:
        raise ParseError(f"input is not valid UTF-8: {err}") from None

    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("empty input: no header row") from None
    columns = _parse_header(header)

    records: list[InstituteRecord] = []
    for row in reader:
        line = reader.line_num
        if not row or all(cell.strip() == "" for cell in row):
            continue
        if len(row) != len(header):
            raise ParseError(
                f"expected {len(header)} fields, got {len(row)}", line=line
            )
        rank = _parse_int(_cell(row, columns, "rank") or "", "rank", line)
        values: dict[str, float | None] = {}
        for name in ("tlr", "rpc", "go", "oi", "pr", "score"):
            values[name] = _parse_float(_cell(row, columns, name), name, line)
        for name in ("tlr", "rpc", "go", "oi"):
            if values[name] is None:
                raise ParseError(f"empty {name} value", line=line)
        for name, value in values.items():
            if value is not None and not 0.0 <= value <= 100.0:
                raise DataError(
                    f"row {line}: {name} out of range [0, 100]: {value}"
                )
        if rank < 1:
            raise DataError(f"row {line}: rank must be >= 1, got {rank}")
        records.append(
            InstituteRecord(
                institute_id=_cell(row, columns, "institute_id") or "",
                name=_cell(row, columns, "name") or "",
                year=manifest.year,
                rank=rank,
                tlr=values["tlr"],
                rpc=values["rpc"],
                go=values["go"],
                oi=values["oi"],
                pr=values["pr"],
                reported_score=values["score"],
            )
        )

    if not records:
        raise DataError("no data rows")
    return LabeledDataset.from_records(
        records, weights=manifest.weights, num_classes=num_classes
    )


def load_dataset(manifest: DatasetManifest, num_classes: int = 4) -> LabeledDataset:
    return parse_dataset(manifest, Path(manifest.path).read_bytes(), num_classes)


def serialize_dataset(dataset: LabeledDataset) -> bytes:
    """Inverse of parse_dataset; round-trips every field exactly."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["institute_id", "name", "rank", "tlr", "rpc", "go", "oi", "pr", "score"])
    for record in dataset.records:
        writer.writerow(
            [
                record.institute_id,
                record.name,
                record.rank,
                repr(record.tlr),
                repr(record.rpc),
                repr(record.go),
                repr(record.oi),
                "" if record.pr is None else repr(record.pr),
                "" if record.reported_score is None else repr(record.reported_score),
            ]
        )
    return buffer.getvalue().encode("utf-8")


def validate_scores(
    dataset: LabeledDataset,
    weights: ScoreWeights | None = None,
    tolerance: float = SCORE_TOLERANCE,
) -> ValidationReport:
    """Compare each reported score against the recomputed composite.

    Records without a reported score (or lacking a parameter the weights
    need) are skipped; when nothing is comparable the report is flagged
    unverifiable. Range and rank invariants are enforced at construction
    time, so those report fields are empty for any parsed dataset.
    """
    use = weights if weights is not None else FULL_WEIGHTS
    mismatches: list[ScoreMismatch] = []
    comparable = 0
    for record in dataset.records:
        if record.reported_score is None:
            continue
        try:
            recomputed = composite_score(record, use)
        except MissingParameter:
            continue
        comparable += 1
        delta = abs(record.reported_score - recomputed)
        if delta > tolerance:
            mismatches.append(
                ScoreMismatch(
                    institute_id=record.institute_id,
                    reported=record.reported_score,
                    recomputed=recomputed,
                    delta=delta,
                )
            )
    return ValidationReport(
        row_count=len(dataset.records),
        score_mismatches=tuple(mismatches),
        range_violations=(),
        rank_gaps=(),
        unverifiable=comparable == 0,
    )
