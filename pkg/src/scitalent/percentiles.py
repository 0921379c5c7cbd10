"""Hazen percentiles of citation counts within (broad field, year) groups.

Each paper is ranked against every other paper published in the same broad
field and year, pooling all citable document types. Ties take the mean of
their tied ranks before the Hazen transform, so equal citation counts get
equal percentiles and the group mean is always exactly 50.
"""

from __future__ import annotations

import csv
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .corpus import Corpus


class PaperFieldPercentile(NamedTuple):
    """A paper's percentile within one (broad field, year) group."""

    pub_id: str
    field: int
    year: int
    percentile: float


def hazen_percentiles(values: Sequence[int] | np.ndarray) -> np.ndarray:
    """Hazen percentiles of a group, aligned with the input order.

    A value with L strictly smaller peers and E equal peers (itself
    included) among n gets 100 * (L + E/2) / n; the endpoints 0 and 100
    are never reached.
    """
    arr = np.asarray(values)
    n = arr.size
    if n == 0:
        raise ValueError("empty group")
    order = np.argsort(arr, kind="stable")
    ranked = arr[order]
    block_start = np.empty(n, dtype=bool)
    block_start[0] = True
    np.not_equal(ranked[1:], ranked[:-1], out=block_start[1:])
    starts = np.flatnonzero(block_start)
    ends = np.append(starts[1:], n)
    # (start + end) / 2 equals L + E/2 for a tied block occupying
    # zero-based positions [start, end); exact in float for half-integers.
    block_mid = (starts + ends) * 0.5
    mid = block_mid[np.cumsum(block_start) - 1]
    out = np.empty(n, dtype=np.float64)
    out[order] = (100.0 * mid) / n
    return out


def compute_paper_percentiles(corpus: Corpus) -> list[PaperFieldPercentile]:
    """Percentile observations for every (paper, eligible field) pair.

    A paper with k eligible broad fields yields k observations, one per
    (field, year) group. Output is canonically ordered by field, year,
    pub_id.
    """
    out: list[PaperFieldPercentile] = []
    index = corpus.by_field_year
    for field, year in sorted(index):
        recs = index[(field, year)]
        counts = np.fromiter((r.citation_count for r in recs), dtype=np.int64, count=len(recs))
        pcts = hazen_percentiles(counts)
        out.extend(
            PaperFieldPercentile(r.pub_id, field, year, p)
            for r, p in zip(recs, pcts.tolist())
        )
    return out


def write_percentiles_csv(rows: Iterable[PaperFieldPercentile], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["pub_id", "field", "year", "percentile"])
        for r in rows:
            writer.writerow([r.pub_id, r.field, r.year, f"{r.percentile:.6f}"])


def read_percentiles_csv(path) -> list[PaperFieldPercentile]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["pub_id", "field", "year", "percentile"]:
            raise ValueError(f"unexpected percentiles header {header!r}")
        return [
            PaperFieldPercentile(row[0], int(row[1]), int(row[2]), float(row[3]))
            for row in reader
        ]


def quantize_percentiles(rows: Iterable[PaperFieldPercentile]) -> list[PaperFieldPercentile]:
    """Round observations to the 6-decimal CSV precision.

    Downstream stages consume the CSV, so in-memory pipelines pass values
    through the same quantization to stay byte-identical with staged runs.
    """
    return [r._replace(percentile=float(f"{r.percentile:.6f}")) for r in rows]
