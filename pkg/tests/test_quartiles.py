import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_corpus, raw
from oracles import sort_median
from scitalent.percentiles import PaperFieldPercentile, compute_paper_percentiles
from scitalent.quartiles import (
    JournalYearQuartile,
    apply_recent_year_substitution,
    assign_q1,
    read_quartiles_csv,
    write_quartiles_csv,
)


def corpus_with_observations(spec):
    """spec: list of (pub_id, journal, year); percentiles supplied separately."""
    return make_corpus([raw(pub=p, journal=j, year=y) for p, j, y in spec])


def obs(pub, value, field=13, year=2000):
    return PaperFieldPercentile(pub, field, year, value)


class TestAssignQ1:
    def test_median_exactly_75_is_q1(self):
        corpus = corpus_with_observations([("p1", "jA", 2000), ("p2", "jA", 2000)])
        (q,) = assign_q1([obs("p1", 75.0), obs("p2", 75.0)], corpus)
        assert q.median_percentile == 75.0
        assert q.is_q1 is True

    def test_median_just_below_75_is_not_q1(self):
        corpus = corpus_with_observations([("p1", "jA", 2000), ("p2", "jA", 2000)])
        (q,) = assign_q1([obs("p1", 74.0), obs("p2", 75.98)], corpus)
        assert q.median_percentile == pytest.approx(74.99)
        assert q.is_q1 is False

    def test_odd_group_median(self):
        spec = [(f"p{i}", "jA", 2000) for i in range(5)]
        corpus = corpus_with_observations(spec)
        values = [10.0, 20.0, 80.0, 90.0, 95.0]
        (q,) = assign_q1([obs(f"p{i}", v) for i, v in enumerate(values)], corpus)
        assert q.median_percentile == 80.0
        assert q.is_q1 is True

    def test_multifield_paper_contributes_two_observations(self):
        corpus = corpus_with_observations([("p1", "jA", 2000)])
        (q,) = assign_q1([obs("p1", 60.0, field=13), obs("p1", 90.0, field=16)], corpus)
        assert q.median_percentile == 75.0

    def test_journal_year_without_observations_absent(self):
        corpus = corpus_with_observations([("p1", "jA", 2000), ("p2", "jB", 2001)])
        rows = assign_q1([obs("p1", 50.0)], corpus)
        assert [(q.journal_id, q.year) for q in rows] == [("jA", 2000)]

    def test_source_year_equals_year_before_substitution(self):
        corpus = corpus_with_observations([("p1", "jA", 2019)])
        (q,) = assign_q1([obs("p1", 80.0, year=2019)], corpus)
        assert q.source_year == 2019

    @given(st.lists(st.floats(0.01, 99.99), min_size=1, max_size=25))
    def test_median_matches_sort_oracle(self, values):
        spec = [(f"p{i:02d}", "jA", 2000) for i in range(len(values))]
        corpus = corpus_with_observations(spec)
        (q,) = assign_q1([obs(f"p{i:02d}", v) for i, v in enumerate(values)], corpus)
        assert q.median_percentile == sort_median(values)

    @given(st.lists(st.floats(0.01, 99.99), min_size=1, max_size=25), st.floats(1.0, 99.0))
    def test_threshold_monotonicity(self, values, threshold):
        spec = [(f"p{i:02d}", "jA", 2000) for i in range(len(values))]
        corpus = corpus_with_observations(spec)
        rows = [obs(f"p{i:02d}", v) for i, v in enumerate(values)]
        (lo,) = assign_q1(rows, corpus, q1_threshold=threshold)
        (hi,) = assign_q1(rows, corpus, q1_threshold=threshold + 0.5)
        assert not (hi.is_q1 and not lo.is_q1)

    def test_end_to_end_from_corpus(self, simple_corpus):
        pcts = compute_paper_percentiles(simple_corpus)
        rows = assign_q1(pcts, simple_corpus)
        assert {(q.journal_id, q.year) for q in rows} == {
            (r.journal_id, r.year) for r in simple_corpus.records if r.fields
        }
        assert rows == sorted(rows, key=lambda q: (q.journal_id, q.year))


def q(journal, year, median=50.0, is_q1=False, source=None):
    return JournalYearQuartile(journal, year, median, is_q1, source if source is not None else year)


class TestSubstitution:
    def test_copies_flag_from_source_year(self):
        rows = [q("J", 2018, 80.0, True), q("J", 2019, 60.0, False)]
        out = apply_recent_year_substitution(rows)
        assert out[1].is_q1 is True
        assert out[1].source_year == 2018
        assert out[1].median_percentile == 60.0  # median stays the year's own

    def test_without_source_entry_keeps_own_assignment(self):
        rows = [q("K", 2020, 90.0, True)]
        out = apply_recent_year_substitution(rows)
        assert out == rows
        assert out[0].source_year == 2020

    def test_substitution_can_revoke_q1(self):
        rows = [q("J", 2018, 60.0, False), q("J", 2020, 90.0, True)]
        out = apply_recent_year_substitution(rows)
        assert out[1].is_q1 is False

    def test_non_target_years_untouched(self):
        rows = [q("J", 2017, 10.0, False), q("J", 2018, 80.0, True), q("J", 2019, 70.0, False)]
        out = apply_recent_year_substitution(rows)
        assert out[0] == rows[0]
        assert out[1] == rows[1]

    def test_source_in_targets_rejected(self):
        with pytest.raises(ValueError):
            apply_recent_year_substitution([], target_years={2018, 2019}, source_year=2018)

    @given(
        st.lists(
            st.tuples(
                st.sampled_from(["J1", "J2", "J3", "J4"]),
                st.integers(2015, 2020),
                st.floats(0.01, 99.99),
                st.booleans(),
            ),
            max_size=30,
        )
    )
    def test_idempotent_and_scoped(self, items):
        seen = set()
        rows = []
        for journal, year, median, flag in items:
            if (journal, year) in seen:
                continue
            seen.add((journal, year))
            rows.append(q(journal, year, median, flag))
        once = apply_recent_year_substitution(rows)
        twice = apply_recent_year_substitution(once)
        assert once == twice
        for before, after in zip(rows, once):
            if before.year not in (2019, 2020):
                assert before == after
            else:
                assert (before.journal_id, before.year) == (after.journal_id, after.year)
                assert before.median_percentile == after.median_percentile


def test_csv_roundtrip(tmp_path):
    rows = [q("jA", 2018, 81.25, True), q("jA", 2019, 60.5, True, source=2018), q("jB", 2000, 1 / 3, False)]
    path = tmp_path / "q.csv"
    write_quartiles_csv(rows, path)
    assert read_quartiles_csv(path) == rows
