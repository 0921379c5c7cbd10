"""Publication corpus: record parsing, filtering, and indexed stores.

A corpus is built from a stream of raw publication records (JSON-lines or
CSV), keeps only citable document types within the configured year range,
and exposes immutable indexes by author, journal-year, and broad-field-year.
Records whose subject codes map to no eligible broad field are retained
(they still date an author's career start) but are excluded from all
field-based computation.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple

logger = logging.getLogger(__name__)

ALLOWED_DOC_TYPES = ("article", "review", "proceedings")

# Two-digit research areas not covered well enough for citation analysis
# (arts and humanities, social sciences).
EXCLUDED_AREA_PREFIXES = frozenset({12, 14, 18, 20, 32, 33})

# Excluded as an exact code, not as the prefix 10.
MULTIDISCIPLINARY_CODE = 1000

ASJC_MIN = 1000
ASJC_MAX = 3699

INPUT_COLUMNS = ("id", "year", "type", "journal", "asjc", "authors", "corresponding", "citations")

DROP_DOC_TYPE = "doc_type"
DROP_YEAR = "year"
DROP_MALFORMED = "malformed"


class MalformedRecordError(ValueError):
    """Raised for a structurally invalid input record."""

    def __init__(self, line_no: int, detail: str):
        super().__init__(f"line {line_no}: {detail}")
        self.line_no = line_no
        self.detail = detail


class DuplicatePubIdError(ValueError):
    """Raised when the same pub_id appears twice in one input stream."""


class PublicationRecord(NamedTuple):
    """One indexed paper.

    ``asjc_codes`` and ``corresponding_ids`` are stored as sorted,
    deduplicated tuples; ``author_ids`` keeps the byline order.
    ``fields`` caches the eligible broad fields (may be empty).
    """

    pub_id: str
    year: int
    doc_type: str
    journal_id: str
    asjc_codes: tuple[int, ...]
    author_ids: tuple[str, ...]
    corresponding_ids: tuple[str, ...]
    citation_count: int
    fields: tuple[int, ...]


def broad_fields_of(asjc_codes: Iterable[int]) -> frozenset[int]:
    """Map 4-digit ASJC codes to their eligible two-digit broad fields.

    Drops the exact multidisciplinary code and every code whose leading
    two digits fall in an excluded research area. The result may be empty.
    """
    out = set()
    for code in asjc_codes:
        if code == MULTIDISCIPLINARY_CODE:
            continue
        prefix = code // 100
        if prefix not in EXCLUDED_AREA_PREFIXES:
            out.add(prefix)
    return frozenset(out)


def parse_record(obj: dict, line_no: int = 0) -> PublicationRecord:
    """Validate one raw record object and build a PublicationRecord.

    Raises MalformedRecordError with the input line number on any
    structural problem. Document type and year are not filtered here;
    that is ingest's job.
    """
    if not isinstance(obj, dict):
        raise MalformedRecordError(line_no, "record is not an object")
    try:
        pub_id = obj["id"]
        year = obj["year"]
        doc_type = obj["type"]
        journal = obj["journal"]
        asjc = obj["asjc"]
        authors = obj["authors"]
        corresponding = obj["corresponding"]
        citations = obj["citations"]
    except KeyError as exc:
        raise MalformedRecordError(line_no, f"missing field {exc.args[0]!r}") from None
    if not isinstance(pub_id, str) or not pub_id:
        raise MalformedRecordError(line_no, "id must be a non-empty string")
    if type(year) is not int:
        raise MalformedRecordError(line_no, "year must be an integer")
    if not isinstance(doc_type, str):
        raise MalformedRecordError(line_no, "type must be a string")
    if not isinstance(journal, str) or not journal:
        raise MalformedRecordError(line_no, "journal must be a non-empty string")
    if not isinstance(asjc, (list, tuple)) or not asjc:
        raise MalformedRecordError(line_no, "asjc must be a non-empty array")
    codes_set = set()
    fields_set = set()
    for code in asjc:
        if type(code) is not int or code < ASJC_MIN or code > ASJC_MAX:
            raise MalformedRecordError(line_no, f"asjc code {code!r} outside [{ASJC_MIN}, {ASJC_MAX}]")
        codes_set.add(code)
        if code != MULTIDISCIPLINARY_CODE:
            prefix = code // 100
            if prefix not in EXCLUDED_AREA_PREFIXES:
                fields_set.add(prefix)
    if not isinstance(authors, (list, tuple)) or not authors:
        raise MalformedRecordError(line_no, "authors must be a non-empty array")
    for a in authors:
        if not isinstance(a, str) or not a:
            raise MalformedRecordError(line_no, "author ids must be non-empty strings")
    if not isinstance(corresponding, (list, tuple)):
        raise MalformedRecordError(line_no, "corresponding must be an array")
    for c in corresponding:
        if c not in authors:
            raise MalformedRecordError(line_no, f"corresponding id {c!r} not among authors")
    if type(citations) is not int or citations < 0:
        raise MalformedRecordError(line_no, "citations must be a non-negative integer")
    return PublicationRecord(
        pub_id=pub_id,
        year=year,
        doc_type=doc_type,
        journal_id=journal,
        asjc_codes=tuple(sorted(codes_set)),
        author_ids=tuple(authors),
        corresponding_ids=tuple(sorted(set(corresponding))),
        citation_count=citations,
        fields=tuple(sorted(fields_set)),
    )


def record_to_obj(rec: PublicationRecord) -> dict:
    """Inverse of parse_record, in the canonical input key order."""
    return {
        "id": rec.pub_id,
        "year": rec.year,
        "type": rec.doc_type,
        "journal": rec.journal_id,
        "asjc": list(rec.asjc_codes),
        "authors": list(rec.author_ids),
        "corresponding": list(rec.corresponding_ids),
        "citations": rec.citation_count,
    }


@dataclass
class IngestStats:
    """Bookkeeping for one ingest pass; kept + dropped partitions read."""

    records_read: int = 0
    records_kept: int = 0
    dropped: dict[str, int] = field(default_factory=dict)

    @property
    def records_dropped(self) -> int:
        return sum(self.dropped.values())

    def drop(self, reason: str) -> None:
        self.dropped[reason] = self.dropped.get(reason, 0) + 1


@dataclass(frozen=True)
class Corpus:
    """Filtered publication set with derived indexes.

    ``records`` is canonically sorted by pub_id, so every index and every
    downstream computation iterates in a reproducible order.
    """

    records: tuple[PublicationRecord, ...]
    year_range: tuple[int, int]

    @cached_property
    def by_pub_id(self) -> dict[str, PublicationRecord]:
        return {r.pub_id: r for r in self.records}

    @cached_property
    def by_author(self) -> dict[str, list[PublicationRecord]]:
        index: dict[str, list[PublicationRecord]] = {}
        for r in self.records:
            for a in r.author_ids:
                bucket = index.get(a)
                if bucket is None:
                    index[a] = [r]
                else:
                    bucket.append(r)
        return index

    @cached_property
    def by_journal_year(self) -> dict[tuple[str, int], list[PublicationRecord]]:
        index: dict[tuple[str, int], list[PublicationRecord]] = {}
        for r in self.records:
            key = (r.journal_id, r.year)
            bucket = index.get(key)
            if bucket is None:
                index[key] = [r]
            else:
                bucket.append(r)
        return index

    @cached_property
    def by_field_year(self) -> dict[tuple[int, int], list[PublicationRecord]]:
        index: dict[tuple[int, int], list[PublicationRecord]] = {}
        for r in self.records:
            for f in r.fields:
                key = (f, r.year)
                bucket = index.get(key)
                if bucket is None:
                    index[key] = [r]
                else:
                    bucket.append(r)
        return index


def build_corpus(records: Iterable[PublicationRecord], year_range: tuple[int, int]) -> Corpus:
    """Sort records canonically and wrap them in a Corpus."""
    ordered = sorted(records)
    for prev, cur in zip(ordered, ordered[1:]):
        if prev.pub_id == cur.pub_id:
            raise DuplicatePubIdError(f"duplicate pub_id {cur.pub_id!r}")
    return Corpus(records=tuple(ordered), year_range=(int(year_range[0]), int(year_range[1])))


def _iter_raw_jsonl(lines: Iterable[str]) -> Iterator[tuple[int, object]]:
    loads = json.loads
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            yield line_no, loads(line)
        except json.JSONDecodeError as exc:
            yield line_no, MalformedRecordError(line_no, f"invalid JSON: {exc.msg}")


def _split_cell(cell: str) -> list[str]:
    return cell.split(";") if cell else []


def _iter_raw_csv(lines: Iterable[str]) -> Iterator[tuple[int, object]]:
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        return
    if tuple(header) != INPUT_COLUMNS:
        yield 1, MalformedRecordError(1, f"unexpected CSV header {header!r}")
        return
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(INPUT_COLUMNS):
            yield line_no, MalformedRecordError(line_no, f"expected {len(INPUT_COLUMNS)} columns, got {len(row)}")
            continue
        try:
            obj = {
                "id": row[0],
                "year": int(row[1]),
                "type": row[2],
                "journal": row[3],
                "asjc": [int(c) for c in _split_cell(row[4])],
                "authors": _split_cell(row[5]),
                "corresponding": _split_cell(row[6]),
                "citations": int(row[7]),
            }
        except ValueError:
            yield line_no, MalformedRecordError(line_no, "non-integer numeric cell")
            continue
        yield line_no, obj


def iter_raw_records(source, input_format: str | None = None) -> Iterator[tuple[int, object]]:
    """Yield (line_no, raw object or MalformedRecordError) from a source.

    The source may be a path (format inferred from the extension unless
    given), an iterable of text lines, or an iterable of already-decoded
    record dicts.
    """
    if isinstance(source, (str, os.PathLike)):
        fmt = input_format or ("csv" if str(source).lower().endswith(".csv") else "jsonl")
        with open(source, "r", encoding="utf-8", newline="" if fmt == "csv" else None) as fh:
            it = _iter_raw_csv(fh) if fmt == "csv" else _iter_raw_jsonl(fh)
            yield from it
        return
    source = iter(source)
    try:
        first = next(source)
    except StopIteration:
        return
    if isinstance(first, str):
        lines = _chain_first(first, source)
        if input_format == "csv":
            yield from _iter_raw_csv(lines)
        else:
            yield from _iter_raw_jsonl(lines)
    else:
        yield 1, first
        for line_no, obj in enumerate(source, start=2):
            yield line_no, obj


def _chain_first(first, rest):
    yield first
    yield from rest


def ingest(
    source,
    *,
    first_year: int = 1999,
    last_year: int = 2020,
    doc_types: Iterable[str] = ALLOWED_DOC_TYPES,
    skip_malformed: bool = False,
    input_format: str | None = None,
) -> tuple[Corpus, IngestStats]:
    """Read, validate, and filter a record stream into a Corpus.

    Keeps records with an allowed document type and a year inside
    [first_year, last_year]. Malformed records abort the ingest unless
    ``skip_malformed`` is set, in which case they are logged and counted.
    A duplicate pub_id always aborts: the upstream extract is assumed
    deduplicated, and merging would hide corruption.
    """
    allowed = frozenset(doc_types)
    if isinstance(source, (str, os.PathLike)):
        fmt = input_format or ("csv" if str(source).lower().endswith(".csv") else "jsonl")
        if fmt == "jsonl":
            with open(source, "r", encoding="utf-8") as fh:
                return _ingest_jsonl(fh, allowed, first_year, last_year, skip_malformed)
    return _ingest_pairs(
        iter_raw_records(source, input_format=input_format),
        allowed,
        first_year,
        last_year,
        skip_malformed,
    )


def _finish(kept, stats, seen, first_year, last_year) -> tuple[Corpus, IngestStats]:
    kept.sort()
    stats.records_kept = len(kept)
    return Corpus(records=tuple(kept), year_range=(first_year, last_year)), stats


def _ingest_jsonl(lines, allowed, first_year, last_year, skip_malformed) -> tuple[Corpus, IngestStats]:
    # Tight loop over JSON lines; this path carries millions of records.
    loads = json.loads
    stats = IngestStats()
    kept: list[PublicationRecord] = []
    append = kept.append
    seen: set[str] = set()
    add_seen = seen.add
    read = 0
    n_doc = n_year = n_mal = 0
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        read += 1
        try:
            rec = parse_record(loads(line), line_no)
        except json.JSONDecodeError as exc:
            err: MalformedRecordError = MalformedRecordError(line_no, f"invalid JSON: {exc.msg}")
            if not skip_malformed:
                raise err from None
            logger.warning("skipping malformed record: %s", err)
            n_mal += 1
            continue
        except MalformedRecordError as exc:
            if not skip_malformed:
                raise
            logger.warning("skipping malformed record: %s", exc)
            n_mal += 1
            continue
        pub_id = rec.pub_id
        if pub_id in seen:
            raise DuplicatePubIdError(f"duplicate pub_id {pub_id!r} at line {line_no}")
        add_seen(pub_id)
        if rec.doc_type not in allowed:
            n_doc += 1
            continue
        year = rec.year
        if year < first_year or year > last_year:
            n_year += 1
            continue
        append(rec)
    stats.records_read = read
    if n_mal:
        stats.dropped[DROP_MALFORMED] = n_mal
    if n_doc:
        stats.dropped[DROP_DOC_TYPE] = n_doc
    if n_year:
        stats.dropped[DROP_YEAR] = n_year
    return _finish(kept, stats, seen, first_year, last_year)


def _ingest_pairs(pairs, allowed, first_year, last_year, skip_malformed) -> tuple[Corpus, IngestStats]:
    stats = IngestStats()
    kept: list[PublicationRecord] = []
    seen: set[str] = set()
    for line_no, raw in pairs:
        stats.records_read += 1
        if isinstance(raw, MalformedRecordError):
            err: MalformedRecordError | None = raw
            rec = None
        else:
            try:
                rec = parse_record(raw, line_no)
                err = None
            except MalformedRecordError as exc:
                err = exc
                rec = None
        if err is not None:
            if not skip_malformed:
                raise err
            logger.warning("skipping malformed record: %s", err)
            stats.drop(DROP_MALFORMED)
            continue
        assert rec is not None
        if rec.pub_id in seen:
            raise DuplicatePubIdError(f"duplicate pub_id {rec.pub_id!r} at line {line_no}")
        seen.add(rec.pub_id)
        if rec.doc_type not in allowed:
            stats.drop(DROP_DOC_TYPE)
            continue
        if not first_year <= rec.year <= last_year:
            stats.drop(DROP_YEAR)
            continue
        kept.append(rec)
    return _finish(kept, stats, seen, first_year, last_year)


def record_line(rec: PublicationRecord) -> str:
    """Canonical JSON line for one record.

    Byte-identical to ``json.dumps(record_to_obj(rec), separators=(",", ":"))``
    but built directly, which matters at millions of records.
    """
    dumps = json.dumps
    return (
        '{"id":%s,"year":%d,"type":%s,"journal":%s,"asjc":[%s],'
        '"authors":[%s],"corresponding":[%s],"citations":%d}'
        % (
            dumps(rec.pub_id),
            rec.year,
            dumps(rec.doc_type),
            dumps(rec.journal_id),
            ",".join(map(str, rec.asjc_codes)),
            ",".join(map(dumps, rec.author_ids)),
            ",".join(map(dumps, rec.corresponding_ids)),
            rec.citation_count,
        )
    )


def serialize_corpus(corpus: Corpus) -> Iterator[str]:
    """Yield canonical JSON lines; ingest of these rebuilds the corpus."""
    for rec in corpus.records:
        yield record_line(rec)


def write_corpus_jsonl(corpus: Corpus, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in serialize_corpus(corpus):
            fh.write(line)
            fh.write("\n")


def corpus_digest(corpus: Corpus) -> str:
    """SHA-256 over the canonical serialization."""
    h = hashlib.sha256()
    for line in serialize_corpus(corpus):
        h.update(line.encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()


def write_ingest_report(stats: IngestStats, path) -> None:
    """CSV report: one row per drop reason, plus kept/read totals."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["reason", "count"])
        for reason in sorted(stats.dropped):
            writer.writerow([reason, stats.dropped[reason]])
        writer.writerow(["kept", stats.records_kept])
        writer.writerow(["read", stats.records_read])


def records_to_csv(records: Iterable[PublicationRecord]) -> str:
    """Render records in the CSV input variant (semicolon-joined lists)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(INPUT_COLUMNS)
    for r in records:
        writer.writerow(
            [
                r.pub_id,
                r.year,
                r.doc_type,
                r.journal_id,
                ";".join(str(c) for c in r.asjc_codes),
                ";".join(r.author_ids),
                ";".join(r.corresponding_ids),
                r.citation_count,
            ]
        )
    return buf.getvalue()
