"""Citation-impact indicators over deposited vs. non-deposited paper sets.

CID  = 100 * (CPPa - CPPna) / ((CPPa + CPPna) / 2), bounded to [-200, +200]
IR   = 100 * CPPa / CPPna, undefined when CPPna is zero

Fixed citation windows count whole months elapsed since the date of the
cited *version* (deposit date for preprint-version citations, index entry
date for journal-version citations); variable windows are calendar-bounded
from the article's publication year through a horizon year inclusive.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from cidlab.corpus import Corpus, YearMonth, months_between
from cidlab.linkage import LinkTable, ResolvedCitations, ResolvedEvent

logger = logging.getLogger(__name__)

FIXED = "fixed"
VARIABLE = "variable"


@dataclass(frozen=True)
class WindowSpec:
    """A citation-counting window, either offset-fixed or calendar-variable."""

    kind: str
    start_offset_years: int = 0
    end_offset_years: int = 0
    horizon_year: int = 0

    @classmethod
    def fixed(cls, start_offset_years: int, end_offset_years: int) -> "WindowSpec":
        if start_offset_years < 1 or end_offset_years < start_offset_years:
            raise ValueError("fixed window needs 1 <= start <= end")
        return cls(FIXED, start_offset_years, end_offset_years)

    @classmethod
    def variable(cls, horizon_year: int) -> "WindowSpec":
        return cls(VARIABLE, horizon_year=horizon_year)

    @property
    def month_bounds(self) -> tuple[int, int]:
        """Inclusive month-age bounds: years 1-3 -> (0, 35), years 4-6 -> (36, 71)."""
        if self.kind != FIXED:
            raise ValueError("month_bounds only defined for fixed windows")
        return (self.start_offset_years - 1) * 12, self.end_offset_years * 12 - 1

    @property
    def label(self) -> str:
        if self.kind == FIXED:
            return f"{self.start_offset_years}-{self.end_offset_years}"
        return f"thru{self.horizon_year}"


WINDOW_1 = WindowSpec.fixed(1, 3)
WINDOW_2 = WindowSpec.fixed(4, 6)


@dataclass(frozen=True)
class CountingOptions:
    include_preprint_cites: bool = True
    exclude_self_citations: bool = True


@dataclass(frozen=True)
class CppPair:
    cpp_a: float | None  # deposited set
    cpp_na: float | None  # non-deposited set
    n_a: int
    n_na: int

    def cid(self) -> float | None:
        if self.cpp_a is None or self.cpp_na is None:
            return None
        return cid(self.cpp_a, self.cpp_na)

    def impact_ratio(self) -> float | None:
        if self.cpp_a is None or self.cpp_na is None:
            return None
        return impact_ratio(self.cpp_a, self.cpp_na)


# -------------------------------------------------------------- formulas ---


def cid(cpp_a: float, cpp_na: float) -> float:
    """Citation impact differential in [-200, +200]; zero when both sides are zero."""
    if cpp_a < 0 or cpp_na < 0:
        raise ValueError("citations-per-paper values must be non-negative")
    if cpp_a == 0 and cpp_na == 0:
        return 0.0
    # the quotient |a-b|/(a+b) never exceeds 1 in float arithmetic (rounding
    # is monotone), so scaling it keeps the result inside [-200, 200]; the
    # grouping matters, and halving the denominator separately could
    # underflow subnormal sums to a zero divide
    return 200.0 * ((cpp_a - cpp_na) / (cpp_a + cpp_na))


def impact_ratio(cpp_a: float, cpp_na: float) -> float | None:
    """100 * CPPa / CPPna; undefined (None) when the non-deposited side is zero."""
    if cpp_a < 0 or cpp_na < 0:
        raise ValueError("citations-per-paper values must be non-negative")
    if cpp_na == 0:
        return None
    return 100.0 * cpp_a / cpp_na


def cid_from_impact_ratio(ir: float) -> float:
    """Algebraic identity: cid == 200 * (IR - 100) / (IR + 100)."""
    return 200.0 * (ir - 100.0) / (ir + 100.0)


# ------------------------------------------------------------- counting ----


def cited_effective_date(
    article_id: str,
    corpus: Corpus,
    link_table: LinkTable,
    options: CountingOptions | None = None,
) -> YearMonth:
    """Article-level availability date.

    When preprint-version citations are being counted and the article is
    linked, the article became available at its preprint's deposit date;
    otherwise at its index entry date.  (Window counting itself dates each
    event by the version it targeted; see module docstring.)
    """
    options = options or CountingOptions()
    article = corpus.articles[article_id]
    if options.include_preprint_cites:
        link = link_table.by_article.get(article_id)
        if link is not None:
            return corpus.preprints[link.preprint_id].deposit_date
    return article.index_entry_date


def _event_counts(event: ResolvedEvent, options: CountingOptions) -> bool:
    if event.via_preprint_version and not options.include_preprint_cites:
        return False
    if event.self_citation and options.exclude_self_citations:
        return False
    return True


def count_citations(
    resolved: ResolvedCitations,
    window: WindowSpec,
    options: CountingOptions | None = None,
) -> dict[str, int]:
    """Qualifying citation count per article for one window."""
    options = options or CountingOptions()
    counts: dict[str, int] = {}
    if window.kind == FIXED:
        lo, hi = window.month_bounds
        for article_id, events in resolved.article_events.items():
            n = 0
            for event in events:
                if not _event_counts(event, options):
                    continue
                age = months_between(event.citation_date, event.effective_cited_date)
                if lo <= age <= hi:
                    n += 1
            counts[article_id] = n
    else:
        horizon = window.horizon_year
        articles = resolved.corpus.articles
        for article_id, events in resolved.article_events.items():
            start_year = articles[article_id].pub_year
            n = 0
            for event in events:
                if not _event_counts(event, options):
                    continue
                if start_year <= event.citation_date.year <= horizon:
                    n += 1
            counts[article_id] = n
    return counts


def citations_per_paper(
    paper_set: set[str] | frozenset[str],
    resolved: ResolvedCitations,
    window: WindowSpec,
    options: CountingOptions | None = None,
    counts: dict[str, int] | None = None,
) -> float | None:
    """Mean qualifying citations per paper over the set; None for an empty set.

    Precomputed per-article counts may be passed to avoid rescanning events.
    """
    if not paper_set:
        return None
    if counts is None:
        counts = count_citations(resolved, window, options)
    return sum(counts.get(pid, 0) for pid in paper_set) / len(paper_set)


def cpp_pair(
    deposited: set[str],
    nondeposited: set[str],
    resolved: ResolvedCitations,
    window: WindowSpec,
    options: CountingOptions | None = None,
    counts: dict[str, int] | None = None,
) -> CppPair:
    if counts is None:
        counts = count_citations(resolved, window, options)
    return CppPair(
        cpp_a=citations_per_paper(deposited, resolved, window, options, counts),
        cpp_na=citations_per_paper(nondeposited, resolved, window, options, counts),
        n_a=len(deposited),
        n_na=len(nondeposited),
    )


def split_deposited(
    corpus: Corpus, link_table: LinkTable, journal_id: str | None = None
) -> tuple[set[str], set[str]]:
    """Partition article ids into (deposited, non-deposited), optionally per journal."""
    deposited: set[str] = set()
    nondeposited: set[str] = set()
    for article_id, article in corpus.articles.items():
        if journal_id is not None and article.journal_id != journal_id:
            continue
        if link_table.is_deposited(article_id):
            deposited.add(article_id)
        else:
            nondeposited.add(article_id)
    return deposited, nondeposited


# ------------------------------------------------------------ reporting ----

AGGREGATE_LABEL = "ALL"


@dataclass(frozen=True)
class JournalCidRow:
    journal: str
    n_pubs: int
    n_deposited: int
    pct_deposited: float
    share_of_deposited: float  # this journal's deposited papers / all deposited
    cpp_w1: CppPair
    cpp_w2: CppPair
    cid_w1: float | None
    cid_w2: float | None
    ir_w1: float | None
    ir_w2: float | None
    abs_decline: float | None
    rel_decline: float | None  # percent of the window-1 CID lost by window 2


@dataclass
class CidReport:
    rows: list[JournalCidRow]
    window_1: WindowSpec
    window_2: WindowSpec
    options: CountingOptions

    @property
    def aggregate(self) -> JournalCidRow:
        return self.rows[-1]


def _decline(cid_w1: float | None, cid_w2: float | None) -> tuple[float | None, float | None]:
    if cid_w1 is None or cid_w2 is None:
        return None, None
    absolute = cid_w1 - cid_w2
    relative = 100.0 * absolute / cid_w1 if cid_w1 != 0 else None
    return absolute, relative


def _make_row(
    label: str,
    deposited: set[str],
    nondeposited: set[str],
    total_deposited: int,
    resolved: ResolvedCitations,
    w1: WindowSpec,
    w2: WindowSpec,
    options: CountingOptions,
    counts_w1: dict[str, int],
    counts_w2: dict[str, int],
) -> JournalCidRow:
    pair1 = cpp_pair(deposited, nondeposited, resolved, w1, options, counts_w1)
    pair2 = cpp_pair(deposited, nondeposited, resolved, w2, options, counts_w2)
    n_pubs = len(deposited) + len(nondeposited)
    cid_w1, cid_w2 = pair1.cid(), pair2.cid()
    abs_decline, rel_decline = _decline(cid_w1, cid_w2)
    return JournalCidRow(
        journal=label,
        n_pubs=n_pubs,
        n_deposited=len(deposited),
        pct_deposited=100.0 * len(deposited) / n_pubs if n_pubs else 0.0,
        share_of_deposited=100.0 * len(deposited) / total_deposited if total_deposited else 0.0,
        cpp_w1=pair1,
        cpp_w2=pair2,
        cid_w1=cid_w1,
        cid_w2=cid_w2,
        ir_w1=pair1.impact_ratio(),
        ir_w2=pair2.impact_ratio(),
        abs_decline=abs_decline,
        rel_decline=rel_decline,
    )


def journal_cid_table(
    corpus: Corpus,
    resolved: ResolvedCitations,
    link_table: LinkTable,
    window_1: WindowSpec = WINDOW_1,
    window_2: WindowSpec = WINDOW_2,
    options: CountingOptions | None = None,
    min_deposited: int = 10,
    min_deposited_share: float = 0.01,
) -> CidReport:
    """Per-journal CID/IR rows for both fixed windows plus an aggregate row.

    A journal enters the report when it has at least min_deposited deposited
    articles or a deposited share of at least min_deposited_share.  The
    aggregate row (labelled ALL) pools the selected journals and is last.
    """
    options = options or CountingOptions()
    counts_w1 = count_citations(resolved, window_1, options)
    counts_w2 = count_citations(resolved, window_2, options)

    per_journal: dict[str, tuple[set[str], set[str]]] = {}
    for journal in sorted(corpus.journals):
        per_journal[journal] = split_deposited(corpus, link_table, journal)

    selected = {
        journal: (dep, nondep)
        for journal, (dep, nondep) in per_journal.items()
        if len(dep) >= min_deposited
        or (len(dep) + len(nondep) > 0 and len(dep) / (len(dep) + len(nondep)) >= min_deposited_share)
    }
    total_deposited = sum(len(dep) for dep, _ in selected.values())

    rows = [
        _make_row(journal, dep, nondep, total_deposited, resolved,
                  window_1, window_2, options, counts_w1, counts_w2)
        for journal, (dep, nondep) in sorted(selected.items())
    ]
    all_dep = set().union(*(dep for dep, _ in selected.values())) if selected else set()
    all_nondep = set().union(*(nondep for _, nondep in selected.values())) if selected else set()
    rows.append(
        _make_row(AGGREGATE_LABEL, all_dep, all_nondep, total_deposited, resolved,
                  window_1, window_2, options, counts_w1, counts_w2)
    )
    return CidReport(rows=rows, window_1=window_1, window_2=window_2, options=options)


@dataclass(frozen=True)
class YearSeriesRow:
    pub_year: int
    cpp_a: float | None
    cpp_na: float | None
    cid: float | None
    ir: float | None
    n_a: int
    n_na: int


def variable_window_series(
    corpus: Corpus,
    resolved: ResolvedCitations,
    link_table: LinkTable,
    horizon_year: int | None = None,
    options: CountingOptions | None = None,
) -> list[YearSeriesRow]:
    """Per-publication-year CID/IR with a variable window through the horizon."""
    options = options or CountingOptions()
    if horizon_year is None:
        horizon_year = corpus.epoch[1]
    if not corpus.epoch[0] <= horizon_year <= corpus.epoch[1]:
        raise ValueError(f"horizon {horizon_year} outside corpus epoch {corpus.epoch}")
    window = WindowSpec.variable(horizon_year)
    counts = count_citations(resolved, window, options)

    by_year: dict[int, tuple[set[str], set[str]]] = {}
    for article_id, article in corpus.articles.items():
        dep, nondep = by_year.setdefault(article.pub_year, (set(), set()))
        (dep if link_table.is_deposited(article_id) else nondep).add(article_id)

    rows: list[YearSeriesRow] = []
    for year in sorted(y for y in by_year if y <= horizon_year):
        dep, nondep = by_year[year]
        pair = cpp_pair(dep, nondep, resolved, window, options, counts)
        rows.append(
            YearSeriesRow(
                pub_year=year,
                cpp_a=pair.cpp_a,
                cpp_na=pair.cpp_na,
                cid=pair.cid(),
                ir=pair.impact_ratio(),
                n_a=pair.n_a,
                n_na=pair.n_na,
            )
        )
    return rows
