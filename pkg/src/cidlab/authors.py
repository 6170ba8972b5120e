"""Author-level analyses separating quality bias from access effects.

An author's prominence inside a journal is the citations-per-paper of their
*non-deposited* papers there (full counting: a paper counts once for every
distinct byline author).  Prominence quartiles, per-author CIDs, their
medians with an exact sign test, CID histograms, co-authorship mixing
classes, and the deposit-only author share all build on the same per-journal
author profiles.

Threshold conventions (see glossary): an author is "productive" at threshold
k when they have >= k non-deposited papers in the journal; CID eligibility
additionally requires at least one deposited paper.  The deposit-only share
uses a total-paper threshold since those authors have no non-deposited work.
"""

from __future__ import annotations

import logging
import math
import statistics
from dataclasses import dataclass, field

from cidlab.corpus import Corpus, NameKey, normalize_author_name
from cidlab.linkage import LinkTable, ResolvedCitations
from cidlab.metrics import CountingOptions, WindowSpec, cid, count_citations

logger = logging.getLogger(__name__)

QUARTILES = (1, 2, 3, 4)  # 1 = most prominent

THRESHOLD_GT1 = 1  # ">1 publ": >= 1 non-deposited (and >= 1 deposited for CID)
THRESHOLD_GT4 = 5  # ">4 publ": >= 5 non-deposited

_THRESHOLD_LABELS = {THRESHOLD_GT1: ">1", THRESHOLD_GT4: ">4"}


def threshold_label(min_nondeposited: int) -> str:
    return _THRESHOLD_LABELS.get(min_nondeposited, f">={min_nondeposited}")


@dataclass
class AuthorJournalProfile:
    """One author's deposited/non-deposited paper and citation tallies in a journal."""

    author: NameKey
    journal: str
    n_deposited: int = 0
    n_nondeposited: int = 0
    cites_deposited: int = 0
    cites_nondeposited: int = 0
    deposited_ids: list[str] = field(default_factory=list)
    nondeposited_ids: list[str] = field(default_factory=list)

    @property
    def n_total(self) -> int:
        return self.n_deposited + self.n_nondeposited

    @property
    def cpp_deposited(self) -> float | None:
        return self.cites_deposited / self.n_deposited if self.n_deposited else None

    @property
    def cpp_nondeposited(self) -> float | None:
        return self.cites_nondeposited / self.n_nondeposited if self.n_nondeposited else None

    def cid(self) -> float | None:
        """Author CID; defined only with at least one paper on each side."""
        if not self.n_deposited or not self.n_nondeposited:
            return None
        return cid(self.cpp_deposited, self.cpp_nondeposited)


def byline_keys(byline: tuple[str, ...]) -> tuple[NameKey, ...]:
    """Distinct normalized author keys of a byline, in byline order."""
    seen: dict[NameKey, None] = {}
    for name in byline:
        seen.setdefault(normalize_author_name(name), None)
    return tuple(seen)


def journal_author_profiles(
    corpus: Corpus,
    resolved: ResolvedCitations,
    link_table: LinkTable,
    journal: str,
    window: WindowSpec,
    options: CountingOptions | None = None,
    counts: dict[str, int] | None = None,
) -> dict[NameKey, AuthorJournalProfile]:
    """Build per-author tallies for one journal and one citation window."""
    options = options or CountingOptions()
    if journal not in corpus.journals:
        raise KeyError(f"journal {journal!r} not in corpus")
    if counts is None:
        counts = count_citations(resolved, window, options)
    profiles: dict[NameKey, AuthorJournalProfile] = {}
    for article_id, article in corpus.articles.items():
        if article.journal_id != journal:
            continue
        deposited = link_table.is_deposited(article_id)
        n_cites = counts.get(article_id, 0)
        for key in byline_keys(article.byline):
            profile = profiles.get(key)
            if profile is None:
                profile = profiles[key] = AuthorJournalProfile(author=key, journal=journal)
            if deposited:
                profile.n_deposited += 1
                profile.cites_deposited += n_cites
                profile.deposited_ids.append(article_id)
            else:
                profile.n_nondeposited += 1
                profile.cites_nondeposited += n_cites
                profile.nondeposited_ids.append(article_id)
    return profiles


# ------------------------------------------------------------ prominence ---


def author_prominence(
    profiles: dict[NameKey, AuthorJournalProfile],
) -> dict[NameKey, float]:
    """Prominence = CPP of the author's non-deposited papers in the journal.

    Authors with no non-deposited papers have no prominence (excluded here,
    tallied separately by deposit_only_author_fraction)."""
    return {
        key: p.cpp_nondeposited
        for key, p in profiles.items()
        if p.n_nondeposited > 0
    }


def quartile_assignment(prominence: dict[NameKey, float]) -> dict[NameKey, int]:
    """Split authors into prominence quartiles 1..4 (descending prominence).

    Quartile sizes differ by at most one, surplus going to the top quartiles:
    5 authors -> sizes (2, 1, 1, 1).  Ties order lexicographically by NameKey
    so the assignment is deterministic.
    """
    ranked = sorted(prominence.items(), key=lambda kv: (-kv[1], kv[0]))
    n = len(ranked)
    base, surplus = divmod(n, 4)
    sizes = [base + (1 if q <= surplus else 0) for q in QUARTILES]
    assignment: dict[NameKey, int] = {}
    cursor = 0
    for quartile, size in zip(QUARTILES, sizes):
        for key, _ in ranked[cursor:cursor + size]:
            assignment[key] = quartile
        cursor += size
    return assignment


@dataclass
class QuartileDistribution:
    """Authorship shares per prominence quartile for both paper sets."""

    pct_deposited: dict[int, float]
    pct_nondeposited: dict[int, float]
    unquartiled_deposited: int = 0
    unquartiled_nondeposited: int = 0


def authorship_quartile_distribution(
    corpus: Corpus,
    link_table: LinkTable,
    journal: str,
    quartiles: dict[NameKey, int],
) -> QuartileDistribution:
    """Percent of authorships falling in each quartile, per paper set.

    Every distinct byline author of every paper contributes one authorship.
    Authors without a quartile (no non-deposited papers in the journal) are
    tallied separately; the four percentages sum to 100 per set.
    """
    tallies = {True: {q: 0 for q in QUARTILES}, False: {q: 0 for q in QUARTILES}}
    unquartiled = {True: 0, False: 0}
    for article_id, article in corpus.articles.items():
        if article.journal_id != journal:
            continue
        deposited = link_table.is_deposited(article_id)
        for key in byline_keys(article.byline):
            quartile = quartiles.get(key)
            if quartile is None:
                unquartiled[deposited] += 1
            else:
                tallies[deposited][quartile] += 1

    def to_pct(counts: dict[int, int]) -> dict[int, float]:
        total = sum(counts.values())
        if total == 0:
            return {q: 0.0 for q in QUARTILES}
        return {q: 100.0 * counts[q] / total for q in QUARTILES}

    return QuartileDistribution(
        pct_deposited=to_pct(tallies[True]),
        pct_nondeposited=to_pct(tallies[False]),
        unquartiled_deposited=unquartiled[True],
        unquartiled_nondeposited=unquartiled[False],
    )


# ------------------------------------------------------------- sign test ---


def sign_test(values: list[float]) -> float:
    """Exact two-sided binomial sign test against a zero median.

    Zeros are dropped; p is the two-sided tail probability of seeing at
    least max(n_pos, n_neg) same-sign values out of n at rate 1/2, capped
    at 1.  An empty (or all-zero) sample returns p = 1.0.
    """
    n_pos = sum(1 for v in values if v > 0)
    n_neg = sum(1 for v in values if v < 0)
    n = n_pos + n_neg
    if n == 0:
        return 1.0
    m = max(n_pos, n_neg)
    tail = sum(math.comb(n, k) for k in range(m, n + 1))
    # Integer / integer division: exact and safe for any n (2.0 * tail would
    # overflow the float range already around n = 1024).
    return min(1.0, (2 * tail) / (2 ** n))


# --------------------------------------------------------------- medians ---


@dataclass(frozen=True)
class MedianCidReport:
    journal: str
    window_label: str
    threshold_label: str
    n_authors: int
    median_cid: float | None
    sign_test_p: float
    significant_at_0_01: bool
    author_cids: tuple[float, ...] = ()


def author_cid(
    corpus: Corpus,
    resolved: ResolvedCitations,
    link_table: LinkTable,
    author: NameKey,
    journal: str,
    window: WindowSpec,
    options: CountingOptions | None = None,
) -> float | None:
    """CID between one author's deposited and non-deposited papers in a journal."""
    profiles = journal_author_profiles(corpus, resolved, link_table, journal, window, options)
    profile = profiles.get(author)
    return profile.cid() if profile is not None else None


def eligible_author_cids(
    profiles: dict[NameKey, AuthorJournalProfile],
    min_nondeposited: int = THRESHOLD_GT1,
) -> dict[NameKey, float]:
    """Author CIDs for authors meeting the threshold (>=1 deposited always)."""
    out: dict[NameKey, float] = {}
    for key, profile in profiles.items():
        if profile.n_deposited < 1 or profile.n_nondeposited < min_nondeposited:
            continue
        value = profile.cid()
        if value is not None:
            out[key] = value
    return out


def median_cid_over_authors(
    profiles: dict[NameKey, AuthorJournalProfile],
    journal: str,
    window_label: str,
    min_nondeposited: int = THRESHOLD_GT1,
    alpha: float = 0.01,
) -> MedianCidReport:
    """Median per-author CID with an exact sign test against a zero median."""
    cids = sorted(eligible_author_cids(profiles, min_nondeposited).values())
    p = sign_test(cids)
    return MedianCidReport(
        journal=journal,
        window_label=window_label,
        threshold_label=threshold_label(min_nondeposited),
        n_authors=len(cids),
        median_cid=statistics.median(cids) if cids else None,
        sign_test_p=p,
        significant_at_0_01=p < alpha,
        author_cids=tuple(cids),
    )


# ------------------------------------------------------------- histogram ---


@dataclass(frozen=True)
class CidHistogram:
    midpoints: tuple[float, ...]
    counts: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.counts)


def cid_histogram(values: list[float], bin_width: int = 25) -> CidHistogram:
    """Histogram of CID values over midpoints -200..200.

    bin_width must divide 400; +/-200 are themselves midpoints.  Values snap
    to the nearest midpoint, half-way ties resolving toward zero.  Values
    outside [-200, 200] are an error.
    """
    if bin_width <= 0 or 400 % bin_width != 0:
        raise ValueError("bin_width must be a positive divisor of 400")
    midpoints = [-200.0 + i * bin_width for i in range(400 // bin_width + 1)]
    counts = [0] * len(midpoints)
    for value in values:
        if not -200.0 <= value <= 200.0:
            raise ValueError(f"CID {value} outside [-200, 200]")
        ratio = value / bin_width
        # round half toward zero
        snapped = math.ceil(ratio - 0.5) if ratio > 0 else math.floor(ratio + 0.5)
        index = snapped + 200 // bin_width
        counts[index] += 1
    return CidHistogram(midpoints=tuple(midpoints), counts=tuple(counts))


# ----------------------------------------------------------- coauthorship --

CLASS_ONLY_PRODUCTIVE = "only_productive"
CLASS_MIXED = "mixed"
CLASS_ONLY_LESS = "only_less_productive"
COAUTHOR_CLASSES = (CLASS_ONLY_PRODUCTIVE, CLASS_MIXED, CLASS_ONLY_LESS)


@dataclass(frozen=True)
class CoauthorClassRow:
    coauthor_class: str
    fraction_deposited: float | None       # share of the deposited set's papers
    fraction_nondeposited: float | None
    cpp_deposited: float | None
    cpp_nondeposited: float | None


@dataclass
class CoauthorReport:
    journal: str
    window_label: str
    threshold_label: str
    rows: list[CoauthorClassRow]
    # Of papers with at least one less-productive author, the share that is
    # mixed (i.e. also carries a productive author), per set.
    mixed_share_deposited: float | None = None
    mixed_share_nondeposited: float | None = None


def coauthorship_class_analysis(
    corpus: Corpus,
    resolved: ResolvedCitations,
    link_table: LinkTable,
    journal: str,
    window: WindowSpec,
    min_nondeposited: int = THRESHOLD_GT4,
    options: CountingOptions | None = None,
    counts: dict[str, int] | None = None,
) -> CoauthorReport:
    """Classify a journal's papers by byline composition and compare impact.

    Classes: every author productive / none productive / mixed, where
    productive means >= min_nondeposited non-deposited papers in the journal.
    """
    options = options or CountingOptions()
    if counts is None:
        counts = count_citations(resolved, window, options)
    profiles = journal_author_profiles(
        corpus, resolved, link_table, journal, window, options, counts
    )
    productive = {
        key for key, p in profiles.items() if p.n_nondeposited >= min_nondeposited
    }

    paper_tallies = {
        cls: {True: [0, 0], False: [0, 0]}  # set -> [n_papers, n_cites]
        for cls in COAUTHOR_CLASSES
    }
    for article_id, article in corpus.articles.items():
        if article.journal_id != journal:
            continue
        keys = byline_keys(article.byline)
        n_productive = sum(1 for k in keys if k in productive)
        if n_productive == len(keys):
            cls = CLASS_ONLY_PRODUCTIVE
        elif n_productive == 0:
            cls = CLASS_ONLY_LESS
        else:
            cls = CLASS_MIXED
        deposited = link_table.is_deposited(article_id)
        tally = paper_tallies[cls][deposited]
        tally[0] += 1
        tally[1] += counts.get(article_id, 0)

    set_totals = {
        flag: sum(paper_tallies[cls][flag][0] for cls in COAUTHOR_CLASSES)
        for flag in (True, False)
    }
    rows: list[CoauthorClassRow] = []
    for cls in COAUTHOR_CLASSES:
        n_dep, cites_dep = paper_tallies[cls][True]
        n_non, cites_non = paper_tallies[cls][False]
        rows.append(
            CoauthorClassRow(
                coauthor_class=cls,
                fraction_deposited=n_dep / set_totals[True] if set_totals[True] else None,
                fraction_nondeposited=n_non / set_totals[False] if set_totals[False] else None,
                cpp_deposited=cites_dep / n_dep if n_dep else None,
                cpp_nondeposited=cites_non / n_non if n_non else None,
            )
        )

    def mixed_share(flag: bool) -> float | None:
        mixed = paper_tallies[CLASS_MIXED][flag][0]
        only_less = paper_tallies[CLASS_ONLY_LESS][flag][0]
        with_less = mixed + only_less
        return mixed / with_less if with_less else None

    return CoauthorReport(
        journal=journal,
        window_label=window.label,
        threshold_label=threshold_label(min_nondeposited),
        rows=rows,
        mixed_share_deposited=mixed_share(True),
        mixed_share_nondeposited=mixed_share(False),
    )


# ------------------------------------------------------------ note-1 tally -


def deposit_only_author_fraction(
    profiles: dict[NameKey, AuthorJournalProfile],
    min_total_papers: int = 1,
) -> float | None:
    """Share of the journal's authors (>= min_total_papers papers in total)
    whose every paper there is deposited; None when no author qualifies."""
    qualifying = [p for p in profiles.values() if p.n_total >= min_total_papers]
    if not qualifying:
        return None
    deposit_only = sum(1 for p in qualifying if p.n_nondeposited == 0)
    return deposit_only / len(qualifying)
