"""Impact indicators: CID/IR formulas, window counting, per-journal tables."""

from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cidlab.corpus import YearMonth, load_corpus
from cidlab.linkage import build_link_table, resolve_citations
from cidlab.metrics import (
    AGGREGATE_LABEL,
    WINDOW_1,
    WINDOW_2,
    CountingOptions,
    WindowSpec,
    cid,
    cid_from_impact_ratio,
    cited_effective_date,
    citations_per_paper,
    count_citations,
    cpp_pair,
    impact_ratio,
    journal_cid_table,
    split_deposited,
    variable_window_series,
)
from conftest import article, citation, preprint

nonneg = st.floats(min_value=0.0, max_value=1e6, allow_nan=False)
positive = st.floats(min_value=1e-3, max_value=1e6, allow_nan=False)


# --------------------------------------------------------------- formulas --


class TestCidFormula:
    def test_fixed_points(self):
        assert cid(7.3, 7.3) == 0.0
        assert cid(1.0, 0.0) == 200.0
        assert cid(0.0, 1.0) == -200.0
        assert cid(0.0, 0.0) == 0.0

    def test_reference_values(self):
        assert cid(28.6, 13.9) == pytest.approx(69.2, abs=0.1)
        assert impact_ratio(28.6, 13.9) == pytest.approx(205.8, abs=0.1)
        assert cid(0.79, 0.18) == pytest.approx(125.8, abs=0.1)

    def test_negative_inputs_rejected(self):
        with pytest.raises(ValueError):
            cid(-1.0, 2.0)
        with pytest.raises(ValueError):
            impact_ratio(1.0, -2.0)

    def test_impact_ratio_undefined_when_denominator_zero(self):
        assert impact_ratio(3.0, 0.0) is None
        assert impact_ratio(0.0, 3.0) == 0.0

    @given(nonneg, nonneg)
    def test_antisymmetry(self, a, b):
        assert cid(a, b) == -cid(b, a)

    @given(positive, positive, st.floats(min_value=1e-3, max_value=1e3))
    def test_scale_invariance(self, a, b, k):
        assert cid(k * a, k * b) == pytest.approx(cid(a, b), rel=1e-9)

    @given(nonneg, nonneg)
    def test_bounded(self, a, b):
        assert -200.0 <= cid(a, b) <= 200.0

    @given(positive, positive)
    def test_identity_with_impact_ratio(self, a, b):
        value = cid_from_impact_ratio(impact_ratio(a, b))
        assert value == pytest.approx(cid(a, b), rel=1e-9)

    @given(
        st.floats(min_value=1e-3, max_value=1e3),
        st.floats(min_value=1e-3, max_value=1e3),
        st.floats(min_value=1e-3, max_value=1e3),
    )
    def test_strictly_increasing_in_first_argument(self, a, delta, b):
        assert cid(a + delta, b) > cid(a, b)


# ---------------------------------------------------------------- windows --


class TestWindowSpec:
    def test_fixed_month_bounds(self):
        assert WINDOW_1.month_bounds == (0, 35)
        assert WINDOW_2.month_bounds == (36, 71)
        assert WindowSpec.fixed(1, 6).month_bounds == (0, 71)

    def test_labels(self):
        assert WINDOW_1.label == "1-3"
        assert WINDOW_2.label == "4-6"
        assert WindowSpec.variable(2001).label == "thru2001"

    def test_invalid_fixed_windows(self):
        with pytest.raises(ValueError):
            WindowSpec.fixed(0, 3)
        with pytest.raises(ValueError):
            WindowSpec.fixed(4, 3)

    def test_variable_has_no_month_bounds(self):
        with pytest.raises(ValueError):
            WindowSpec.variable(2001).month_bounds


# --------------------------------------------------------------- counting --


@pytest.fixture
def counting_corpus(corpus_files):
    """a1 is deposited (p1, 1993-09) and indexed 1994-03; citation ages are
    pinned at the window-1/window-2 boundaries."""
    citers = [
        article(f"c{i}", byline=[f"Citer{i}, Q."], pub_year=year, index_entry_date=f"{year}-06")
        for i, year in enumerate((1994, 1995, 1997, 2000, 2001))
    ]
    paths = corpus_files(
        [
            article("a1", title="Interface growth beyond mean field",
                    byline=["Smith, J."], pub_year=1994, index_entry_date="1994-03"),
            article("a2", title="A different subject altogether",
                    byline=["Wu, X."], pub_year=1994, index_entry_date="1994-03"),
            *citers,
        ],
        [preprint("p1", title="Interface growth beyond mean field",
                  first_author="Smith, J.", deposit_date="1993-09")],
        [
            # journal-version citations, aged from the 1994-03 index entry
            citation("c0", "a1", "1994-03"),   # age 0
            citation("c1", "a1", "1997-02"),   # age 35, last month of window 1
            citation("c2", "a1", "1997-03"),   # age 36, first month of window 2
            citation("c3", "a1", "2000-02"),   # age 71, last month of window 2
            citation("c4", "a1", "2000-03"),   # age 72, beyond both windows
            # preprint-version citations, aged from the 1993-09 deposit
            citation("c0", "smith:p1", "1993-09", kind="preprint_key"),  # age 0
            citation("c0", "smith:p1", "1994-01", kind="preprint_key"),  # age 4
            # the only citation a2 receives
            citation("c1", "a2", "1995-01"),
        ],
    )
    corpus = load_corpus(*paths)
    table = build_link_table(corpus)
    return corpus, table, resolve_citations(corpus, table)


def test_fixed_window_counts_both_versions(counting_corpus):
    _, _, resolved = counting_corpus
    assert count_citations(resolved, WINDOW_1)["a1"] == 4  # ages 0, 35 + 0, 4
    assert count_citations(resolved, WINDOW_2)["a1"] == 2  # ages 36, 71


def test_fixed_window_without_preprint_versions(counting_corpus):
    _, _, resolved = counting_corpus
    options = CountingOptions(include_preprint_cites=False)
    assert count_citations(resolved, WINDOW_1, options)["a1"] == 2
    assert count_citations(resolved, WINDOW_2, options)["a1"] == 2


def test_variable_window_is_calendar_bounded(counting_corpus):
    _, _, resolved = counting_corpus
    # pub_year 1994 through 1997: three journal-version + one preprint-version
    # event fall in 1994..1997; the 1993-09 deposit-phase event is earlier.
    counts = count_citations(resolved, WindowSpec.variable(1997))
    assert counts["a1"] == 4


def test_effective_date_follows_the_link(counting_corpus):
    corpus, table, _ = counting_corpus
    assert cited_effective_date("a1", corpus, table) == YearMonth(1993, 9)
    no_preprints = CountingOptions(include_preprint_cites=False)
    assert cited_effective_date("a1", corpus, table, no_preprints) == YearMonth(1994, 3)
    assert cited_effective_date("a2", corpus, table) == YearMonth(1994, 3)


def test_citations_per_paper_examples(counting_corpus):
    _, _, resolved = counting_corpus
    window = WindowSpec.fixed(1, 6)
    assert citations_per_paper({"a1"}, resolved, window) == 6.0
    assert citations_per_paper({"a1", "a2"}, resolved, window) == 3.5
    assert citations_per_paper(set(), resolved, window) is None
    assert citations_per_paper({"c4"}, resolved, window) == 0.0


def test_self_citations_excluded_by_default(corpus_files):
    paths = corpus_files(
        [
            article("a1", byline=["Smith, J.", "Wu, X."]),
            article("a2", byline=["Wu, X."], pub_year=1995, index_entry_date="1995-01"),
        ],
        [],
        [citation("a2", "a1", "1995-01")],
    )
    corpus = load_corpus(*paths)
    table = build_link_table(corpus)
    resolved = resolve_citations(corpus, table)
    assert citations_per_paper({"a1"}, resolved, WINDOW_1) == 0.0
    keep = CountingOptions(exclude_self_citations=False)
    assert citations_per_paper({"a1"}, resolved, WINDOW_1, keep) == 1.0


def test_split_deposited(counting_corpus):
    corpus, table, _ = counting_corpus
    deposited, nondeposited = split_deposited(corpus, table)
    assert deposited == {"a1"}
    assert "a2" in nondeposited and len(nondeposited) == 6


def test_cpp_pair_carries_set_sizes(counting_corpus):
    corpus, table, resolved = counting_corpus
    deposited, nondeposited = split_deposited(corpus, table)
    pair = cpp_pair(deposited, nondeposited, resolved, WINDOW_1)
    assert (pair.n_a, pair.n_na) == (1, 6)
    assert pair.cpp_a == 4.0
    assert pair.cid() == cid(pair.cpp_a, pair.cpp_na)


def test_nondeposited_cpp_invariant_under_preprint_toggle(bias_pipeline):
    _, nondeposited = split_deposited(bias_pipeline.corpus, bias_pipeline.links)
    with_pp = citations_per_paper(nondeposited, bias_pipeline.resolved, WINDOW_1,
                                  CountingOptions(include_preprint_cites=True))
    without_pp = citations_per_paper(nondeposited, bias_pipeline.resolved, WINDOW_1,
                                     CountingOptions(include_preprint_cites=False))
    assert with_pp == without_pp


# ------------------------------------------------------------ the reports --


@pytest.fixture
def two_journal_corpus(corpus_files):
    """jphys has a deposited article; jrare has deposits below every threshold."""
    records = [
        article("a1", title="Flux pinning in ceramic superconductors",
                byline=["Smith, J."], pub_year=1994, index_entry_date="1994-03"),
        article("a2", title="Another topic entirely", byline=["Wu, X."],
                pub_year=1994, index_entry_date="1994-05"),
    ]
    # 200 non-deposited articles keep jrare's deposited share at zero
    records += [
        article(f"r{i}", journal="jrare", title=f"Unrelated result number {i}",
                byline=[f"Author{i}, Z."], pub_year=1994, index_entry_date="1994-06")
        for i in range(200)
    ]
    paths = corpus_files(
        records,
        [preprint("p1", title="Flux pinning in ceramic superconductors",
                  first_author="Smith, J.", deposit_date="1993-09")],
        [citation("a2", "a1", "1995-01")],
    )
    corpus = load_corpus(*paths)
    table = build_link_table(corpus)
    return corpus, table, resolve_citations(corpus, table)


def test_journal_table_selection_rule(two_journal_corpus):
    corpus, table, resolved = two_journal_corpus
    report = journal_cid_table(corpus, resolved, table)
    labels = [row.journal for row in report.rows]
    assert labels == ["jphys", AGGREGATE_LABEL]
    assert report.aggregate.journal == AGGREGATE_LABEL
    # the aggregate pools only the selected journal
    assert report.aggregate.n_pubs == 2


def test_journal_table_row_contents(two_journal_corpus):
    corpus, table, resolved = two_journal_corpus
    row = journal_cid_table(corpus, resolved, table).rows[0]
    assert row.n_deposited == 1
    assert row.pct_deposited == 50.0
    assert row.share_of_deposited == 100.0
    assert row.cid_w1 == 200.0  # only the deposited paper is cited
    assert row.ir_w1 is None    # undefined: non-deposited side uncited


def test_variable_series_single_year(two_journal_corpus):
    corpus, table, resolved = two_journal_corpus
    series = variable_window_series(corpus, resolved, table, horizon_year=1995)
    assert [row.pub_year for row in series] == [1994]
    assert series[0].n_a == 1 and series[0].n_na == 201


def test_variable_series_horizon_must_lie_in_epoch(two_journal_corpus):
    corpus, table, resolved = two_journal_corpus
    with pytest.raises(ValueError):
        variable_window_series(corpus, resolved, table, horizon_year=2050)
