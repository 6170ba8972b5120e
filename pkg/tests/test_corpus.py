"""Corpus model: dates, author-name normalization, JSONL ingestion."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cidlab.corpus import (
    CorpusIntegrityError,
    NameKey,
    YearMonth,
    load_corpus,
    month_index,
    months_between,
    normalize_author_name,
    save_corpus,
)
from conftest import article, citation, preprint


# ------------------------------------------------------------------ dates --


class TestYearMonth:
    def test_parse(self):
        assert YearMonth.parse("1994-03") == YearMonth(1994, 3)
        assert YearMonth.parse(" 2001-12 ") == YearMonth(2001, 12)

    @pytest.mark.parametrize("bad", ["1994-13", "1994-00", "1994-3", "199403", "not a date", ""])
    def test_parse_rejects(self, bad):
        with pytest.raises(ValueError):
            YearMonth.parse(bad)

    def test_str_roundtrip(self):
        ym = YearMonth(1997, 4)
        assert YearMonth.parse(str(ym)) == ym

    def test_shift_crosses_year(self):
        assert YearMonth(1993, 11).shift(3) == YearMonth(1994, 2)
        assert YearMonth(1993, 2).shift(-2) == YearMonth(1992, 12)

    @given(st.integers(min_value=1, max_value=3000 * 12))
    def test_absolute_roundtrip(self, serial):
        assert YearMonth.from_absolute(serial).absolute() == serial


def test_months_between_is_signed():
    assert months_between(YearMonth(1994, 3), YearMonth(1993, 9)) == 6
    assert months_between(YearMonth(1993, 9), YearMonth(1994, 3)) == -6
    assert months_between(YearMonth(1994, 3), YearMonth(1994, 3)) == 0


def test_month_index_examples():
    assert month_index(YearMonth(1992, 1), 1992) == 0
    assert month_index(YearMonth(1992, 12), 1992) == 11
    assert month_index(YearMonth(1994, 3), 1992) == 26


def test_month_index_rejects_pre_epoch():
    with pytest.raises(ValueError):
        month_index(YearMonth(1991, 12), 1992)


@given(
    st.integers(min_value=1992, max_value=2010),
    st.integers(min_value=1, max_value=12),
    st.integers(min_value=1992, max_value=2010),
    st.integers(min_value=1, max_value=12),
)
def test_month_index_is_monotone(y1, m1, y2, m2):
    a, b = YearMonth(y1, m1), YearMonth(y2, m2)
    if a.absolute() < b.absolute():
        assert month_index(a, 1992) < month_index(b, 1992)


# ------------------------------------------------------------------ names --


class TestNormalizeAuthorName:
    def test_surname_comma_initials(self):
        assert normalize_author_name("Smith, J.A.") == NameKey("smith", "ja")

    def test_wos_style_equals_comma_style(self):
        assert normalize_author_name("SMITH J") == normalize_author_name("Smith, J.")

    def test_given_first(self):
        assert normalize_author_name("J. Smith") == NameKey("smith", "j")
        assert normalize_author_name("John Smith") == NameKey("smith", "j")

    def test_particles_fold_into_surname(self):
        assert normalize_author_name("van der Berg, P").surname == "vanderberg"
        assert normalize_author_name("P. van der Berg").surname == "vanderberg"

    def test_diacritics_fold(self):
        assert normalize_author_name("Müller, K.") == NameKey("muller", "k")

    def test_empty_is_an_error(self):
        with pytest.raises(ValueError):
            normalize_author_name("   ")

    @pytest.mark.parametrize(
        "raw",
        ["Smith, J.A.", "SMITH J", "de la Cruz, M", "Ng J", "John Smith", "Wu, X.-Y."],
    )
    def test_idempotent_through_render(self, raw):
        key = normalize_author_name(raw)
        assert normalize_author_name(key.render()) == key

    def test_compatible_with_is_prefix_on_initials(self):
        full = normalize_author_name("Smith, J.A.")
        short = normalize_author_name("Smith, J.")
        other = normalize_author_name("Smith, K.")
        assert full.compatible_with(short)
        assert short.compatible_with(full)
        assert not full.compatible_with(other)
        assert not full.compatible_with(normalize_author_name("Smythe, J.A."))


# ---------------------------------------------------------------- loading --


def test_three_article_fixture_loads_clean(corpus_files):
    paths = corpus_files(
        [article("a1"), article("a2", journal="jchem"), article("a3")],
        [preprint("p1")],
        [citation("a2", "a1", "1995-01")],
    )
    corpus = load_corpus(*paths)
    assert len(corpus.articles) == 3
    assert corpus.load_report.n_rejected == 0
    assert corpus.load_report.loaded == {"articles": 3, "preprints": 1, "citations": 1}
    assert corpus.journals == {"jphys", "jchem"}


def test_citation_to_unknown_article_names_the_id(corpus_files):
    paths = corpus_files(
        [article("a1")],
        [],
        [citation("a1", "ghost-42", "1995-01")],
    )
    with pytest.raises(CorpusIntegrityError, match="ghost-42"):
        load_corpus(*paths)


def test_citing_article_must_exist(corpus_files):
    paths = corpus_files(
        [article("a1")],
        [],
        [citation("nobody", "a1", "1995-01")],
    )
    with pytest.raises(CorpusIntegrityError, match="nobody"):
        load_corpus(*paths)


def test_duplicate_article_id_aborts(corpus_files):
    paths = corpus_files([article("a1"), article("a1")])
    with pytest.raises(CorpusIntegrityError, match="a1"):
        load_corpus(*paths)


def test_malformed_line_rejected_with_line_number(corpus_files):
    paths = corpus_files(
        [article("a1"), "{this is not json", article("a2")],
    )
    corpus = load_corpus(*paths)
    assert set(corpus.articles) == {"a1", "a2"}
    # line 1 is the schema header, so the bad record sits on line 3
    assert [(label, lineno) for label, lineno, _ in corpus.load_report.rejected] == [
        ("articles", 3)
    ]


@pytest.mark.parametrize(
    "bad_record",
    [
        article("ax", byline=[]),
        article("ax", byline=["  "]),
        article("ax", index_entry_date="1999-07"),  # outside pub_year window
        article("ax", index_entry_date="94-03"),
        {"article_id": "ax"},  # missing fields
        citation("a1", "a2", "1995-01", kind="misc"),
    ],
)
def test_invalid_records_are_rejected_not_fatal(corpus_files, bad_record):
    is_citation = "citing_article_id" in bad_record
    paths = corpus_files(
        [article("a1"), article("a2")] + ([] if is_citation else [bad_record]),
        [],
        [bad_record] if is_citation else [],
    )
    corpus = load_corpus(*paths)
    assert len(corpus.articles) == 2
    assert corpus.load_report.n_rejected == 1


def test_epoch_spans_all_dated_records(corpus_files):
    paths = corpus_files(
        [article("a1", pub_year=1994, index_entry_date="1994-03")],
        [preprint("p1", deposit_date="1992-05")],
        [citation("a1", "a1", "2001-11")],
    )
    corpus = load_corpus(*paths)
    assert corpus.epoch == (1992, 2001)


def test_save_load_roundtrip(tmp_path, corpus_files):
    paths = corpus_files(
        [
            article("a1", byline=["Smith, J.", "Wu, X."]),
            article("a2", journal="jchem", title="Another matter entirely"),
        ],
        [preprint("p1", journal_ref="J. Phys. 10, 77 (1994)")],
        [citation("a2", "a1", "1995-06"), citation("a1", "smith:p1", "1994-01", kind="preprint_key")],
    )
    corpus = load_corpus(*paths)
    out = tmp_path / "resaved"
    written = save_corpus(corpus, out)
    reloaded = load_corpus(written["articles"], written["preprints"], written["citations"])
    assert reloaded.articles == corpus.articles
    assert reloaded.preprints == corpus.preprints
    assert reloaded.citations == corpus.citations
    assert reloaded.epoch == corpus.epoch
