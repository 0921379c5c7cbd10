import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from scitalent.corpus import ingest


def raw(
    pub="p1",
    year=2000,
    type="article",
    journal="j1",
    asjc=(1305,),
    authors=("a1",),
    corresponding=(),
    citations=0,
):
    """One raw input record with convenient defaults."""
    return {
        "id": pub,
        "year": year,
        "type": type,
        "journal": journal,
        "asjc": list(asjc),
        "authors": list(authors),
        "corresponding": list(corresponding),
        "citations": citations,
    }


def make_corpus(records, first_year=1999, last_year=2020, **kwargs):
    corpus, _ = ingest(records, first_year=first_year, last_year=last_year, **kwargs)
    return corpus


@pytest.fixture
def simple_corpus():
    """Three authors, two fields, two journals across a decade."""
    records = [
        raw(pub="p01", year=1999, journal="jA", asjc=(1301,), authors=("alice",), corresponding=("alice",), citations=10),
        raw(pub="p02", year=2000, journal="jA", asjc=(1302, 1601), authors=("alice", "bob"), citations=4),
        raw(pub="p03", year=2000, journal="jB", asjc=(1601,), authors=("bob",), corresponding=("bob",), citations=7),
        raw(pub="p04", year=2001, journal="jB", asjc=(1603,), authors=("carol",), citations=0),
        raw(pub="p05", year=2009, journal="jA", asjc=(1305,), authors=("alice",), corresponding=("alice",), citations=2),
        raw(pub="p06", year=2010, journal="jB", asjc=(1602,), authors=("alice",), citations=9),
    ]
    return make_corpus(records)
