"""Cohort construction and talent/control group selection.

Authors are grouped by first-paper year, ranked per (broad field,
indicator) among cohort members active in that field, and assigned to the
potential-talent group (top 1% in every indicator of a combination) or the
control group (below the top-5% cutoff but at or above the top-10% cutoff
for every indicator of the combination). All seven non-empty indicator
combinations are evaluated.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

from .corpus import Corpus
from .indicators import INDICATOR_KEYS, AuthorFieldIndicators

GROUP_TALENT = "talent"
GROUP_CONTROL = "control"


@dataclass(frozen=True)
class IndicatorCombination:
    """Non-empty subset of the O/Q1/C indicators, applied conjunctively."""

    members: tuple[str, ...]

    def __post_init__(self):
        if not self.members:
            raise ValueError("combination needs at least one indicator")
        expected = tuple(k for k in INDICATOR_KEYS if k in self.members)
        if expected != self.members or len(set(self.members)) != len(self.members):
            raise ValueError(f"members must be unique and in canonical order {INDICATOR_KEYS}: {self.members!r}")

    @property
    def name(self) -> str:
        return "x".join(self.members)

    @classmethod
    def from_name(cls, name: str) -> "IndicatorCombination":
        return cls(tuple(name.split("x")))


ALL_COMBINATIONS: tuple[IndicatorCombination, ...] = tuple(
    IndicatorCombination(members)
    for members in [
        ("O",),
        ("Q1",),
        ("C",),
        ("O", "Q1"),
        ("O", "C"),
        ("Q1", "C"),
        ("O", "Q1", "C"),
    ]
)

COMBINATION_NAMES = tuple(c.name for c in ALL_COMBINATIONS)


class CohortAssignment(NamedTuple):
    """Group membership of one author in one field under one combination."""

    author_id: str
    field: int
    combination: str
    group: str


@dataclass(frozen=True)
class ThresholdRow:
    """Top-X% cutoffs for one (field, indicator) ranking population."""

    field: int
    indicator: str
    n: int
    cutoffs: Mapping[float, float]


def top_percent_rank(n: int, percent) -> int:
    """Descending rank of the last author inside the top ``percent``%.

    Uses ceil(percent/100 * n) with exact rational arithmetic so float
    noise can never shift the cutoff rank.
    """
    if n < 1:
        raise ValueError("population must be non-empty")
    frac = Fraction(str(percent)) if isinstance(percent, float) else Fraction(percent)
    if frac <= 0 or frac > 100:
        raise ValueError(f"percent must be in (0, 100]: {percent!r}")
    return math.ceil(n * frac / 100)


def build_cohort(corpus: Corpus, first_year_range: tuple[int, int]) -> frozenset[str]:
    """Authors whose first corpus paper falls inside the given year range.

    The corpus must cover the range plus the nine following years, so the
    ten-year indicator window of every cohort member is observable.
    """
    a, b = first_year_range
    if a > b:
        raise ValueError(f"empty first-year range {first_year_range!r}")
    y_min, y_max = corpus.year_range
    if a < y_min or b + 9 > y_max:
        raise ValueError(
            f"cohort range [{a}, {b}] needs corpus coverage [{a}, {b + 9}], have [{y_min}, {y_max}]"
        )
    out = set()
    for author, recs in corpus.by_author.items():
        if a <= min(r.year for r in recs) <= b:
            out.add(author)
    return frozenset(out)


def compute_thresholds(
    cohort: frozenset[str] | set[str],
    entries: Iterable[AuthorFieldIndicators],
    field: int,
    x_list: Sequence = (1, 5, 10),
) -> list[ThresholdRow]:
    """Threshold rows for one field, one per indicator.

    The ranking population is every cohort author with an entry in the
    field; zero Q1 or C values rank like any other value. Returns an empty
    list when no cohort author is active in the field.
    """
    pop = [e for e in entries if e.field == field and e.author_id in cohort]
    if not pop:
        return []
    rows = []
    n = len(pop)
    ranks = {x: top_percent_rank(n, x) for x in x_list}
    for indicator in INDICATOR_KEYS:
        values = sorted((e.value(indicator) for e in pop), reverse=True)
        rows.append(
            ThresholdRow(
                field=field,
                indicator=indicator,
                n=n,
                cutoffs={x: values[rank - 1] for x, rank in ranks.items()},
            )
        )
    return rows


def compute_threshold_table(
    cohort: frozenset[str] | set[str],
    entries: Iterable[AuthorFieldIndicators],
    x_list: Sequence = (1, 5, 10),
) -> list[ThresholdRow]:
    """Threshold rows for every field with a non-empty population."""
    entries = list(entries)
    rows: list[ThresholdRow] = []
    for field in sorted({e.field for e in entries}):
        rows.extend(compute_thresholds(cohort, entries, field, x_list))
    return rows


def select_groups(
    cohort: frozenset[str] | set[str],
    thresholds: Iterable[ThresholdRow],
    combination: IndicatorCombination,
    field: int,
    entries: Iterable[AuthorFieldIndicators],
    x_list: Sequence = (1, 5, 10),
) -> list[CohortAssignment]:
    """Assign talent and control members for one (field, combination).

    With cutoffs t1 >= t5 >= t10 per indicator: talent needs value >= t1
    for every member indicator; control needs t10 <= value < t5 for every
    member indicator. Boundary ties are always included, so the two groups
    cannot overlap.
    """
    x_talent, x_upper, x_lower = sorted(x_list)
    by_ind = {t.indicator: t for t in thresholds if t.field == field}
    missing = [k for k in combination.members if k not in by_ind]
    if missing:
        raise ValueError(f"no thresholds for field {field} indicators {missing}")
    out = []
    for e in sorted(entries):
        if e.field != field or e.author_id not in cohort:
            continue
        talent = True
        control = True
        for indicator in combination.members:
            cuts = by_ind[indicator].cutoffs
            v = e.value(indicator)
            if v < cuts[x_talent]:
                talent = False
            if not cuts[x_lower] <= v < cuts[x_upper]:
                control = False
        if talent:
            out.append(CohortAssignment(e.author_id, field, combination.name, GROUP_TALENT))
        elif control:
            out.append(CohortAssignment(e.author_id, field, combination.name, GROUP_CONTROL))
    return out


def select_all_groups(
    cohort: frozenset[str] | set[str],
    entries: Iterable[AuthorFieldIndicators],
    thresholds: Iterable[ThresholdRow],
    combinations: Sequence[IndicatorCombination] = ALL_COMBINATIONS,
    x_list: Sequence = (1, 5, 10),
) -> list[CohortAssignment]:
    """Assignments for every field and combination, canonically ordered."""
    thresholds = list(thresholds)
    entries = list(entries)
    fields = sorted({t.field for t in thresholds})
    out: list[CohortAssignment] = []
    for field in fields:
        field_entries = [e for e in entries if e.field == field]
        for combination in combinations:
            out.extend(select_groups(cohort, thresholds, combination, field, field_entries, x_list))
    out.sort()
    return out


def write_thresholds_csv(rows: Iterable[ThresholdRow], path) -> None:
    rows = list(rows)
    x_values = sorted(rows[0].cutoffs) if rows else [1, 5, 10]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["field", "indicator", "n"] + [f"t{x:g}" for x in x_values])
        for r in rows:
            writer.writerow(
                [r.field, r.indicator, r.n] + [f"{r.cutoffs[x]:.6f}" for x in x_values]
            )


def write_assignments_csv(rows: Iterable[CohortAssignment], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["author_id", "field", "combination", "group"])
        for r in rows:
            writer.writerow(list(r))


def read_assignments_csv(path) -> list[CohortAssignment]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["author_id", "field", "combination", "group"]:
            raise ValueError(f"unexpected assignments header {header!r}")
        return [CohortAssignment(row[0], int(row[1]), row[2], row[3]) for row in reader]
