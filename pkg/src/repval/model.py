"""Domain types, validation and p-value table ingestion.

A dataset is the set of features carried into the follow-up study: one row
per feature with its primary-study and follow-up-study p-values. The number
of features screened in the primary study (m) is typically far larger than
the number followed up (R1) and enters through :class:`AnalysisConfig`.

Everything here is immutable after construction and safe to share across
threads; computations never mutate a dataset.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Optional, Sequence, Union

import numpy as np

__all__ = [
    "FeatureRecord", "AnalysisConfig", "Method", "ValidatedDataset",
    "RValueReport", "validate_dataset", "read_pvalue_table", "PValueTable",
    "DatasetError", "NonPositivePValue", "PValueAboveOne", "DuplicateId",
    "R1ExceedsM",
]


class DatasetError(ValueError):
    """Invalid input data. ``line`` is the 1-based line in the source file
    when the record came from a file, else the 0-based record index."""

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(message)
        self.line = line

    def __str__(self) -> str:
        base = super().__str__()
        return f"line {self.line}: {base}" if self.line is not None else base


class NonPositivePValue(DatasetError):
    """p <= 0 signals a corrupt export; zeros are never clamped silently."""


class PValueAboveOne(DatasetError):
    pass


class DuplicateId(DatasetError):
    pass


class R1ExceedsM(DatasetError):
    """More features followed up than were examined in the primary study."""


@dataclass(frozen=True)
class FeatureRecord:
    """One followed-up feature: primary (p1) and follow-up (p2) p-values."""

    id: str
    p1: float
    p2: float


class Method(str, Enum):
    """Which r-value procedure produced a report."""

    FDR_INDEPENDENT = "fdr"
    FDR_GENERAL_DEP = "fdr-general-dep"
    FDR_THRESHOLD_DEP = "fdr-threshold-dep"
    FWER_BONFERRONI = "fwer-bonferroni"


@dataclass(frozen=True)
class AnalysisConfig:
    """Global parameters of the analysis.

    m     -- number of features examined in the primary study
    l00   -- conservative lower bound on the fraction null in both studies
             (0.8 is a sensible default for whole-genome scans)
    c2    -- emphasis on the follow-up study; larger relaxes its threshold
    t     -- fixed selection threshold on primary p-values; only needed for
             the threshold-dependent variant
    """

    m: int
    l00: float = 0.8
    c2: float = 0.5
    t: Optional[float] = None

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m!r}")
        if not 0.0 <= self.l00 < 1.0:
            raise ValueError(f"l00 must lie in [0, 1), got {self.l00!r}")
        if not 0.0 < self.c2 < 1.0:
            raise ValueError(f"c2 must lie in (0, 1), got {self.c2!r}")
        if self.t is not None and not 0.0 < self.t < 1.0:
            raise ValueError(f"t must lie in (0, 1), got {self.t!r}")


@dataclass(frozen=True)
class ValidatedDataset:
    """Records that passed :func:`validate_dataset`; R1 = len(dataset)."""

    records: tuple[FeatureRecord, ...]

    def __len__(self) -> int:
        return len(self.records)

    @cached_property
    def ids(self) -> tuple[str, ...]:
        return tuple(r.id for r in self.records)

    @cached_property
    def p1(self) -> np.ndarray:
        return np.array([r.p1 for r in self.records], dtype=float)

    @cached_property
    def p2(self) -> np.ndarray:
        return np.array([r.p2 for r in self.records], dtype=float)

    def index_of(self, feature_id: str) -> int:
        try:
            return self.ids.index(feature_id)
        except ValueError:
            raise KeyError(f"unknown feature id {feature_id!r}") from None

    def subset(self, keep: Iterable[int]) -> "ValidatedDataset":
        return ValidatedDataset(tuple(self.records[i] for i in keep))


def validate_dataset(
    records: Union[ValidatedDataset, Sequence[FeatureRecord]],
    config: AnalysisConfig,
    *,
    clamp_zero: Optional[float] = None,
    source_lines: Optional[Sequence[int]] = None,
) -> ValidatedDataset:
    """Check invariants and freeze the dataset; idempotent.

    ``clamp_zero`` opts in to replacing p-values that are exactly 0 with the
    given epsilon, for dirty real-world exports. By default zeros are
    rejected (they would silently break the fixed-point computation).
    ``source_lines`` attaches file line numbers to error messages.
    """
    if isinstance(records, ValidatedDataset):
        if len(records) > config.m:
            raise R1ExceedsM(
                f"{len(records)} features followed up but m={config.m}")
        return records

    seen: set[str] = set()
    cleaned: list[FeatureRecord] = []
    for idx, rec in enumerate(records):
        line = source_lines[idx] if source_lines is not None else None
        p1, p2 = rec.p1, rec.p2
        if clamp_zero is not None:
            p1 = clamp_zero if p1 == 0.0 else p1
            p2 = clamp_zero if p2 == 0.0 else p2
        for name, p in (("p1", p1), ("p2", p2)):
            if not p > 0.0:
                raise NonPositivePValue(
                    f"feature {rec.id!r}: {name}={p} is not positive", line)
            if p > 1.0:
                raise PValueAboveOne(
                    f"feature {rec.id!r}: {name}={p} exceeds 1", line)
        if rec.id in seen:
            raise DuplicateId(f"feature id {rec.id!r} appears twice", line)
        seen.add(rec.id)
        cleaned.append(rec if (p1 == rec.p1 and p2 == rec.p2)
                       else FeatureRecord(rec.id, p1, p2))

    if len(cleaned) > config.m:
        raise R1ExceedsM(f"{len(cleaned)} features followed up but m={config.m}")
    return ValidatedDataset(tuple(cleaned))


@dataclass(frozen=True)
class RValueReport:
    """Per-feature r-values plus the method and parameters that made them."""

    method: Method
    entries: tuple[tuple[str, float], ...]
    config: AnalysisConfig

    @cached_property
    def values(self) -> np.ndarray:
        return np.array([r for _, r in self.entries], dtype=float)

    def r_value(self, feature_id: str) -> float:
        for fid, r in self.entries:
            if fid == feature_id:
                return r
        raise KeyError(f"unknown feature id {feature_id!r}")


# --- file ingestion -------------------------------------------------------

_REQUIRED_COLUMNS = ("id", "p1", "p2")


@dataclass
class PValueTable:
    """Raw parsed table: original header/rows (for echoing extra columns
    through the CLI) plus typed records."""

    fieldnames: list[str]
    rows: list[dict[str, str]]
    records: list[FeatureRecord]
    delimiter: str
    source_lines: list[int]


def _sniff_delimiter(header_line: str) -> str:
    return "\t" if "\t" in header_line else ","


def read_pvalue_table(source, *, clamp_zero: Optional[float] = None) -> PValueTable:
    """Parse a UTF-8 TSV/CSV with header ``id, p1, p2`` (extra columns kept).

    ``source`` is a path or an open text stream. Scientific notation is
    accepted; numbers are stored as float64 while the original strings are
    retained for round-tripping.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    stream = io.StringIO(text)
    first = stream.readline()
    if not first.strip():
        raise DatasetError("empty input table", 1)
    delim = _sniff_delimiter(first)
    stream.seek(0)
    reader = csv.DictReader(stream, delimiter=delim, skipinitialspace=True)
    fieldnames = [fn.strip() for fn in (reader.fieldnames or [])]
    missing = [c for c in _REQUIRED_COLUMNS if c not in fieldnames]
    if missing:
        raise DatasetError(
            f"missing required column(s) {', '.join(missing)}; "
            f"header was {fieldnames}", 1)

    rows: list[dict[str, str]] = []
    records: list[FeatureRecord] = []
    source_lines: list[int] = []
    for lineno, raw in enumerate(reader, start=2):
        row = {(k.strip() if k else k): (v.strip() if isinstance(v, str) else v)
               for k, v in raw.items()}
        fid = row.get("id") or ""
        if not fid:
            raise DatasetError("empty feature id", lineno)
        try:
            p1 = float(row["p1"])
            p2 = float(row["p2"])
        except (TypeError, ValueError):
            raise DatasetError(
                f"could not parse p1/p2 for feature {fid!r}", lineno) from None
        if clamp_zero is not None:
            p1 = clamp_zero if p1 == 0.0 else p1
            p2 = clamp_zero if p2 == 0.0 else p2
        rows.append(row)
        records.append(FeatureRecord(fid, p1, p2))
        source_lines.append(lineno)
    return PValueTable(fieldnames, rows, records, delim, source_lines)
