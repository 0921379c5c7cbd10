"""Long-term validation of the selected groups.

For each author the post-window performance is the median Hazen percentile
of their papers from ten years after the first paper until the study end
year, together with the paper count. Group-level tables mirror the three
report shapes (author counts, paper-count statistics, percentile
statistics), each with a talent-minus-control difference row.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .cohorts import COMBINATION_NAMES, GROUP_CONTROL, GROUP_TALENT, CohortAssignment
from .corpus import Corpus
from .percentiles import PaperFieldPercentile

GROUP_DIFFERENCE = "difference"


class AuthorPostWindowPerformance(NamedTuple):
    """Post-window paper count and median percentile of one author."""

    author_id: str
    n_papers: int
    median_percentile: float


@dataclass(frozen=True)
class DistributionStats:
    """Six-number summary of one value distribution."""

    min: float
    q1: float
    median: float
    mean: float
    q3: float
    max: float

    @classmethod
    def from_values(cls, values) -> "DistributionStats":
        arr = np.asarray(values, dtype=np.float64)
        if arr.size == 0:
            raise ValueError("empty distribution")
        q1, median, q3 = np.percentile(arr, [25.0, 50.0, 75.0])
        return cls(
            min=float(arr.min()),
            q1=float(q1),
            median=float(median),
            mean=float(arr.mean()),
            q3=float(q3),
            max=float(arr.max()),
        )


def subtract_stats(a: DistributionStats, b: DistributionStats) -> DistributionStats:
    """Entry-wise difference, used for the talent-minus-control rows."""
    return DistributionStats(
        min=a.min - b.min,
        q1=a.q1 - b.q1,
        median=a.median - b.median,
        mean=a.mean - b.mean,
        q3=a.q3 - b.q3,
        max=a.max - b.max,
    )


@dataclass(frozen=True)
class GroupCell:
    """Summary of one (group, combination): counts plus both stat rows."""

    author_count: int
    dropped_no_postwindow: int
    paper_stats: DistributionStats | None
    percentile_stats: DistributionStats | None


@dataclass(frozen=True)
class DifferenceCell:
    author_count: int
    dropped_no_postwindow: int
    paper_stats: DistributionStats | None
    percentile_stats: DistributionStats | None


@dataclass(frozen=True)
class ValidationSummary:
    """Tables 1-3 shaped summary over all combinations."""

    combinations: tuple[str, ...]
    cells: Mapping[tuple[str, str], GroupCell]
    differences: Mapping[str, DifferenceCell]


def percentiles_by_pub(percentiles: Iterable[PaperFieldPercentile]) -> dict[str, list[float]]:
    """Index percentile observations by paper."""
    out: dict[str, list[float]] = {}
    for obs in percentiles:
        bucket = out.get(obs.pub_id)
        if bucket is None:
            out[obs.pub_id] = [obs.percentile]
        else:
            bucket.append(obs.percentile)
    return out


def _author_median(values: list[float]) -> float:
    ordered = sorted(values)
    n = len(ordered)
    mid = n // 2
    if n % 2:
        return ordered[mid]
    return (ordered[mid - 1] + ordered[mid]) / 2.0


def post_window_performance(
    author_id: str,
    corpus: Corpus,
    pub_percentiles: Mapping[str, list[float]],
    window_length: int = 10,
    end_year: int = 2018,
) -> AuthorPostWindowPerformance | None:
    """Performance over [first_year + window_length, end_year].

    Counts the author's papers with at least one eligible field in that
    span and takes the median over all their (paper, field) percentile
    observations. Returns None when the author published nothing eligible
    after the discovery window.
    """
    recs = corpus.by_author.get(author_id)
    if not recs:
        raise ValueError(f"unknown author: {author_id!r}")
    y0 = min(r.year for r in recs)
    start = y0 + window_length
    n_papers = 0
    obs: list[float] = []
    for r in recs:
        if r.fields and start <= r.year <= end_year:
            n_papers += 1
            obs.extend(pub_percentiles[r.pub_id])
    if n_papers == 0:
        return None
    return AuthorPostWindowPerformance(author_id, n_papers, _author_median(obs))


def group_members(assignments: Iterable[CohortAssignment]) -> dict[tuple[str, str], list[str]]:
    """Distinct author ids per (group, combination), sorted.

    An author assigned in several fields counts once per (group,
    combination); the post-window metric is field-free, so the member
    lists are deduplicated across fields.
    """
    seen: dict[tuple[str, str], set[str]] = {}
    for a in assignments:
        seen.setdefault((a.group, a.combination), set()).add(a.author_id)
    return {key: sorted(members) for key, members in seen.items()}


def summarize(
    assignments: Iterable[CohortAssignment],
    performances: Mapping[str, AuthorPostWindowPerformance],
    combinations: Sequence[str] = COMBINATION_NAMES,
) -> ValidationSummary:
    """Build the three-table summary with difference rows.

    ``performances`` maps author ids to their post-window performance;
    authors missing from it are counted in dropped_no_postwindow and
    excluded from both stat families. Difference cells subtract control
    from talent entry-wise and are absent when either side has no stats.
    """
    members = group_members(assignments)
    cells: dict[tuple[str, str], GroupCell] = {}
    for combination in combinations:
        for group in (GROUP_TALENT, GROUP_CONTROL):
            authors = members.get((group, combination), [])
            perfs = [performances[a] for a in authors if a in performances]
            cells[(group, combination)] = GroupCell(
                author_count=len(authors),
                dropped_no_postwindow=len(authors) - len(perfs),
                paper_stats=DistributionStats.from_values([p.n_papers for p in perfs]) if perfs else None,
                percentile_stats=DistributionStats.from_values([p.median_percentile for p in perfs]) if perfs else None,
            )
    differences: dict[str, DifferenceCell] = {}
    for combination in combinations:
        talent = cells[(GROUP_TALENT, combination)]
        control = cells[(GROUP_CONTROL, combination)]
        differences[combination] = DifferenceCell(
            author_count=talent.author_count - control.author_count,
            dropped_no_postwindow=talent.dropped_no_postwindow - control.dropped_no_postwindow,
            paper_stats=(
                subtract_stats(talent.paper_stats, control.paper_stats)
                if talent.paper_stats and control.paper_stats
                else None
            ),
            percentile_stats=(
                subtract_stats(talent.percentile_stats, control.percentile_stats)
                if talent.percentile_stats and control.percentile_stats
                else None
            ),
        )
    return ValidationSummary(
        combinations=tuple(combinations),
        cells=cells,
        differences=differences,
    )


def rank_combinations(summary: ValidationSummary) -> list[str]:
    """Combinations by talent-minus-control median percentile gap, descending.

    Ties, and combinations whose gap is undefined, fall back to
    lexicographic name order (undefined gaps rank last).
    """
    with_gap = []
    without_gap = []
    for name in summary.combinations:
        diff = summary.differences.get(name)
        if diff is not None and diff.percentile_stats is not None:
            with_gap.append((-diff.percentile_stats.median, name))
        else:
            without_gap.append(name)
    with_gap.sort()
    return [name for _, name in with_gap] + sorted(without_gap)


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.6f}"


def write_counts_report(summary: ValidationSummary, path) -> None:
    """Table 1 shape: author counts per group with difference rows."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["group", "combination", "n_authors", "dropped_no_postwindow"])
        for group in (GROUP_TALENT, GROUP_CONTROL):
            for name in summary.combinations:
                cell = summary.cells[(group, name)]
                writer.writerow([group, name, cell.author_count, cell.dropped_no_postwindow])
        for name in summary.combinations:
            diff = summary.differences[name]
            writer.writerow([GROUP_DIFFERENCE, name, diff.author_count, diff.dropped_no_postwindow])


def _write_stats_report(summary: ValidationSummary, path, columns: list[str], pick) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["group", "combination"] + columns)
        for group in (GROUP_TALENT, GROUP_CONTROL):
            for name in summary.combinations:
                stats = pick(summary.cells[(group, name)])
                writer.writerow([group, name] + [_fmt(getattr(stats, c)) if stats else "" for c in columns])
        for name in summary.combinations:
            stats = pick(summary.differences[name])
            writer.writerow([GROUP_DIFFERENCE, name] + [_fmt(getattr(stats, c)) if stats else "" for c in columns])


def write_papers_report(summary: ValidationSummary, path) -> None:
    """Table 2 shape: post-window paper count statistics."""
    _write_stats_report(summary, path, ["min", "q1", "median", "mean", "q3", "max"], lambda cell: cell.paper_stats)


def write_percentiles_report(summary: ValidationSummary, path) -> None:
    """Table 3 shape: no min/max columns, matching the canonical report."""
    _write_stats_report(summary, path, ["q1", "median", "mean", "q3"], lambda cell: cell.percentile_stats)


def write_summary_text(summary: ValidationSummary, path) -> None:
    """Name the best-discriminating combination and the full gap ranking."""
    ranking = rank_combinations(summary)
    lines = [f"best_combination: {ranking[0]}" if ranking else "best_combination: none"]
    for name in ranking:
        diff = summary.differences.get(name)
        gap = diff.percentile_stats.median if diff and diff.percentile_stats else None
        lines.append(f"{name}: median_percentile_gap={_fmt(gap) if gap is not None else 'n/a'}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")
