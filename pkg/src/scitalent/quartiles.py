"""Journal-year Q1 assignment from median Hazen percentiles.

A journal belongs to the first quartile in a year when the median Hazen
percentile of its papers published that year is at or above the threshold
(default 75). Observations pool all (paper, field) percentile pairs of the
journal-year, so one Q1 flag exists per journal-year, not per field.
Publication years with a short citation window can have their Q1 flags
replaced by an earlier year's assignments.
"""

from __future__ import annotations

import csv
from typing import Iterable, NamedTuple

from .corpus import Corpus
from .percentiles import PaperFieldPercentile


class JournalYearQuartile(NamedTuple):
    """Median percentile and Q1 flag of one journal-year.

    ``source_year`` equals ``year`` unless the flag was copied from a
    different year by the short-window substitution; the median always
    stays the journal-year's own.
    """

    journal_id: str
    year: int
    median_percentile: float
    is_q1: bool
    source_year: int


def _median(values: list[float]) -> float:
    ordered = sorted(values)
    n = len(ordered)
    mid = n // 2
    if n % 2:
        return ordered[mid]
    return (ordered[mid - 1] + ordered[mid]) / 2.0


def assign_q1(
    percentiles: Iterable[PaperFieldPercentile],
    corpus: Corpus,
    q1_threshold: float = 75.0,
) -> list[JournalYearQuartile]:
    """Compute per-journal-year medians and Q1 flags.

    Journal-years with no percentile observations (no paper with an
    eligible field) get no entry. Output sorted by (journal_id, year).
    """
    by_pub = corpus.by_pub_id
    groups: dict[tuple[str, int], list[float]] = {}
    for obs in percentiles:
        rec = by_pub[obs.pub_id]
        key = (rec.journal_id, rec.year)
        bucket = groups.get(key)
        if bucket is None:
            groups[key] = [obs.percentile]
        else:
            bucket.append(obs.percentile)
    out = []
    for journal_id, year in sorted(groups):
        med = _median(groups[(journal_id, year)])
        out.append(
            JournalYearQuartile(
                journal_id=journal_id,
                year=year,
                median_percentile=med,
                is_q1=med >= q1_threshold,
                source_year=year,
            )
        )
    return out


def apply_recent_year_substitution(
    quartiles: Iterable[JournalYearQuartile],
    target_years: Iterable[int] = (2019, 2020),
    source_year: int = 2018,
) -> list[JournalYearQuartile]:
    """Replace Q1 flags of short-window years with an earlier year's.

    For each journal that has an entry in ``source_year``, its entries in
    ``target_years`` take that entry's Q1 flag (the median is kept as
    computed). Journals without a source-year entry keep their own-year
    assignment. Idempotent, and touches nothing outside the target years.
    """
    targets = frozenset(target_years)
    if source_year in targets:
        raise ValueError("source_year must not be a target year")
    rows = list(quartiles)
    source_q1 = {q.journal_id: q.is_q1 for q in rows if q.year == source_year}
    out = []
    for q in rows:
        if q.year in targets and q.journal_id in source_q1:
            out.append(q._replace(is_q1=source_q1[q.journal_id], source_year=source_year))
        else:
            out.append(q)
    return out


def write_quartiles_csv(rows: Iterable[JournalYearQuartile], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["journal_id", "year", "median_percentile", "is_q1", "source_year"])
        for q in rows:
            writer.writerow(
                [q.journal_id, q.year, repr(q.median_percentile), "true" if q.is_q1 else "false", q.source_year]
            )


def read_quartiles_csv(path) -> list[JournalYearQuartile]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["journal_id", "year", "median_percentile", "is_q1", "source_year"]:
            raise ValueError(f"unexpected quartiles header {header!r}")
        return [
            JournalYearQuartile(row[0], int(row[1]), float(row[2]), row[3] == "true", int(row[4]))
            for row in reader
        ]
