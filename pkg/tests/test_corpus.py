import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_corpus, raw
from scitalent.corpus import (
    DuplicatePubIdError,
    MalformedRecordError,
    broad_fields_of,
    build_corpus,
    corpus_digest,
    ingest,
    parse_record,
    record_line,
    record_to_obj,
    records_to_csv,
    serialize_corpus,
)


class TestBroadFields:
    def test_same_leading_digits_deduplicate(self):
        assert broad_fields_of({1305, 1312}) == {13}

    def test_excluded_area_prefix_dropped(self):
        assert broad_fields_of({1203}) == set()

    def test_multidisciplinary_code_dropped_exactly(self):
        assert broad_fields_of({1000, 1600}) == {16}

    def test_code_1001_keeps_prefix_10(self):
        # Only the exact code 1000 is excluded, not the 10 prefix.
        assert broad_fields_of({1001}) == {10}

    def test_all_excluded_prefixes(self):
        assert broad_fields_of({1200, 1401, 1833, 2050, 3299, 3301}) == set()

    @given(st.sets(st.integers(1000, 3699), min_size=1, max_size=12))
    def test_never_returns_excluded(self, codes):
        fields = broad_fields_of(codes)
        assert not fields & {12, 14, 18, 20, 32, 33}
        for f in fields:
            assert any(c // 100 == f and c != 1000 for c in codes)

    @given(st.lists(st.integers(1000, 3699), min_size=1, max_size=12))
    def test_order_independent(self, codes):
        assert broad_fields_of(codes) == broad_fields_of(sorted(codes, reverse=True))


class TestParseRecord:
    def test_roundtrip(self):
        rec = parse_record(raw(asjc=(1601, 1305), corresponding=("a1",), authors=("a1", "a2")))
        assert rec.asjc_codes == (1305, 1601)
        assert rec.fields == (13, 16)
        assert record_to_obj(rec)["id"] == "p1"

    def test_record_line_matches_json_dumps(self):
        rec = parse_record(
            raw(pub='p,"x"', journal='j "q", y', asjc=(1305, 1000, 1203), authors=("a,1", 'a"2', "ü℧"), corresponding=('a"2',))
        )
        assert record_line(rec) == json.dumps(record_to_obj(rec), separators=(",", ":"))

    @pytest.mark.parametrize(
        "mutation, message",
        [
            ({"id": ""}, "id"),
            ({"year": "2000"}, "year"),
            ({"year": True}, "year"),
            ({"journal": ""}, "journal"),
            ({"asjc": []}, "asjc"),
            ({"asjc": [999]}, "asjc"),
            ({"asjc": [3700]}, "asjc"),
            ({"authors": []}, "authors"),
            ({"corresponding": ["ghost"]}, "corresponding"),
            ({"citations": -1}, "citations"),
            ({"citations": 1.5}, "citations"),
        ],
    )
    def test_malformed_variants(self, mutation, message):
        obj = raw()
        obj.update(mutation)
        with pytest.raises(MalformedRecordError) as err:
            parse_record(obj, line_no=7)
        assert message in str(err.value)
        assert err.value.line_no == 7

    def test_missing_key(self):
        obj = raw()
        del obj["journal"]
        with pytest.raises(MalformedRecordError, match="journal"):
            parse_record(obj)


class TestIngest:
    def test_doc_type_filter(self):
        records = [raw(pub=f"p{i}") for i in range(4)] + [raw(pub="p9", type="editorial")]
        corpus, stats = ingest(records)
        assert len(corpus.records) == 4
        assert stats.dropped == {"doc_type": 1}

    def test_year_filter(self):
        corpus, stats = ingest([raw(year=1998)], first_year=1999, last_year=2020)
        assert not corpus.records
        assert stats.dropped == {"year": 1}

    def test_partition_property(self):
        records = [
            raw(pub="p1"),
            raw(pub="p2", type="book"),
            raw(pub="p3", year=1971),
            raw(pub="p4", type="letter"),
        ]
        corpus, stats = ingest(records)
        assert stats.records_read == 4
        assert stats.records_kept + stats.records_dropped == stats.records_read
        assert sum(stats.dropped.values()) == stats.records_dropped == 3

    def test_fieldless_record_retained(self):
        corpus, _ = ingest([raw(pub="p1", asjc=(1203,)), raw(pub="p2")])
        assert len(corpus.records) == 2
        fieldless = corpus.by_pub_id["p1"]
        assert fieldless.fields == ()
        assert not any(fieldless in recs for recs in corpus.by_field_year.values())

    def test_duplicate_pub_id_raises(self):
        with pytest.raises(DuplicatePubIdError):
            ingest([raw(pub="p1"), raw(pub="p1", year=2002)])

    def test_duplicate_detected_across_dropped(self):
        with pytest.raises(DuplicatePubIdError):
            ingest([raw(pub="p1", type="editorial"), raw(pub="p1")])

    def test_malformed_fail_fast(self):
        lines = [json.dumps(raw()), "{broken"]
        with pytest.raises(MalformedRecordError, match="line 2"):
            ingest(lines)

    def test_malformed_skip_with_log(self, caplog):
        lines = [json.dumps(raw()), "{broken", json.dumps(raw(pub="p2", citations=-3))]
        with caplog.at_level("WARNING"):
            corpus, stats = ingest(lines, skip_malformed=True)
        assert stats.dropped == {"malformed": 2}
        assert len(corpus.records) == 1
        assert len(caplog.records) == 2

    def test_jsonl_and_dict_sources_agree(self, tmp_path):
        records = [raw(pub=f"p{i}", year=2000 + i % 3, citations=i) for i in range(20)]
        path = tmp_path / "in.jsonl"
        path.write_text("\n".join(json.dumps(r) for r in records) + "\n")
        from_file, _ = ingest(path)
        from_dicts, _ = ingest(records)
        assert from_file == from_dicts

    def test_csv_variant(self, tmp_path):
        records = [
            raw(pub="p1", asjc=(1305, 1601), authors=("a1", "a2"), corresponding=("a2",), citations=5),
            raw(pub="p2"),
        ]
        base, _ = ingest(records)
        path = tmp_path / "in.csv"
        path.write_text(records_to_csv(base.records))
        from_csv, stats = ingest(path)
        assert from_csv == base
        assert stats.dropped == {}

    def test_ingest_serialize_roundtrip(self):
        records = [
            raw(pub=f"p{i}", year=1999 + i % 5, asjc=(1305, 2101) if i % 2 else (1203,), citations=i % 9)
            for i in range(30)
        ]
        corpus, _ = ingest(records)
        again, stats = ingest(list(serialize_corpus(corpus)))
        assert again == corpus
        assert stats.records_dropped == 0
        assert corpus_digest(again) == corpus_digest(corpus)

    def test_ingest_deterministic_digest(self):
        from scitalent.synthgen import SynthConfig, generate

        stream = list(generate(SynthConfig(seed=42, n_authors=120, n_journals=20, n_fields=3)))
        d1 = corpus_digest(ingest(stream)[0])
        d2 = corpus_digest(ingest(stream)[0])
        assert d1 == d2

    def test_index_consistency(self, simple_corpus):
        via_author = {r for recs in simple_corpus.by_author.values() for r in recs}
        via_journal = {r for recs in simple_corpus.by_journal_year.values() for r in recs}
        via_field = {r for recs in simple_corpus.by_field_year.values() for r in recs}
        all_records = set(simple_corpus.records)
        assert via_author == all_records
        assert via_journal == all_records
        assert via_field == {r for r in simple_corpus.records if r.fields}

    def test_records_sorted_by_pub_id(self):
        corpus, _ = ingest([raw(pub="pz"), raw(pub="pa"), raw(pub="pm")])
        assert [r.pub_id for r in corpus.records] == ["pa", "pm", "pz"]

    def test_build_corpus_rejects_duplicates(self):
        rec = parse_record(raw())
        with pytest.raises(DuplicatePubIdError):
            build_corpus([rec, rec], (1999, 2020))
