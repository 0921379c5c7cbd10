"""Early-career author indicators with fractional field counting.

Over the ten calendar years starting at an author's first indexed paper,
three counts are accumulated per broad field: all papers (O), papers in
first-quartile journal-years (Q1), and corresponding-author papers (C).
A paper with k eligible broad fields contributes 1/k to each of its
fields; counting is full per author, so co-authors do not dilute shares.
"""

from __future__ import annotations

import csv
from typing import Iterable, Mapping, NamedTuple

from .corpus import Corpus
from .quartiles import JournalYearQuartile

INDICATOR_KEYS = ("O", "Q1", "C")


class AuthorFieldIndicators(NamedTuple):
    """One author's fractional indicator values in one broad field."""

    author_id: str
    field: int
    first_paper_year: int
    papers: float
    q1_papers: float
    corresponding_papers: float

    def value(self, indicator: str) -> float:
        if indicator == "O":
            return self.papers
        if indicator == "Q1":
            return self.q1_papers
        if indicator == "C":
            return self.corresponding_papers
        raise KeyError(indicator)


def first_paper_year(author_id: str, corpus: Corpus) -> int:
    """Year of the author's earliest corpus record.

    Papers without an eligible broad field still date the career start:
    the field exclusions remove fields from the analysis, not people.
    """
    recs = corpus.by_author.get(author_id)
    if not recs:
        raise ValueError(f"unknown author: {author_id!r}")
    return min(r.year for r in recs)


def first_paper_years(corpus: Corpus) -> dict[str, int]:
    """First paper year for every author in the corpus."""
    return {author: min(r.year for r in recs) for author, recs in corpus.by_author.items()}


def q1_lookup(quartiles: Iterable[JournalYearQuartile]) -> dict[tuple[str, int], bool]:
    return {(q.journal_id, q.year): q.is_q1 for q in quartiles}


def compute_window_indicators(
    corpus: Corpus,
    quartiles: Iterable[JournalYearQuartile] | Mapping[tuple[str, int], bool],
    window_length: int = 10,
) -> list[AuthorFieldIndicators]:
    """Fractional O/Q1/C per (author, broad field) over the early window.

    The window spans first_paper_year .. first_paper_year+window_length-1
    inclusive. A paper whose journal-year has no quartile entry counts
    toward O (and C) but never toward Q1. Only (author, field) pairs with
    at least one eligible in-window paper are emitted, ordered by author
    then field.
    """
    is_q1 = quartiles if isinstance(quartiles, Mapping) else q1_lookup(quartiles)
    out: list[AuthorFieldIndicators] = []
    by_author = corpus.by_author
    for author in sorted(by_author):
        recs = by_author[author]
        y0 = min(r.year for r in recs)
        last = y0 + window_length - 1
        acc: dict[int, list[float]] = {}
        for r in recs:
            if not r.fields or not y0 <= r.year <= last:
                continue
            share = 1.0 / len(r.fields)
            in_q1 = is_q1.get((r.journal_id, r.year), False)
            corr = author in r.corresponding_ids
            for f in r.fields:
                cell = acc.get(f)
                if cell is None:
                    cell = acc[f] = [0.0, 0.0, 0.0]
                cell[0] += share
                if in_q1:
                    cell[1] += share
                if corr:
                    cell[2] += share
        for f in sorted(acc):
            o, q1, c = acc[f]
            out.append(AuthorFieldIndicators(author, f, y0, o, q1, c))
    return out


def write_indicators_csv(rows: Iterable[AuthorFieldIndicators], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["author_id", "field", "first_paper_year", "O", "Q1", "C"])
        for r in rows:
            writer.writerow(
                [
                    r.author_id,
                    r.field,
                    r.first_paper_year,
                    f"{r.papers:.6f}",
                    f"{r.q1_papers:.6f}",
                    f"{r.corresponding_papers:.6f}",
                ]
            )


def read_indicators_csv(path) -> list[AuthorFieldIndicators]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["author_id", "field", "first_paper_year", "O", "Q1", "C"]:
            raise ValueError(f"unexpected indicators header {header!r}")
        return [
            AuthorFieldIndicators(row[0], int(row[1]), int(row[2]), float(row[3]), float(row[4]), float(row[5]))
            for row in reader
        ]


def quantize_indicators(rows: Iterable[AuthorFieldIndicators]) -> list[AuthorFieldIndicators]:
    """Round counts to the 6-decimal CSV precision (see quantize_percentiles)."""
    return [
        r._replace(
            papers=float(f"{r.papers:.6f}"),
            q1_papers=float(f"{r.q1_papers:.6f}"),
            corresponding_papers=float(f"{r.corresponding_papers:.6f}"),
        )
        for r in rows
    ]
