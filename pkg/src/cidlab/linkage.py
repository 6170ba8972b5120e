"""Record linkage between preprint deposits and published journal articles.

Two production tiers plus an oracle:

1. journal_ref parsing — a self-reported "Journal 55, 1142 (1997)" reference
   resolved through a journal alias map; unique journal+year+first-author
   matches link with score 1.0.
2. author+title matching — blocking on the first author's surname, scored by
   significant-title-word overlap, greedy one-to-one assignment.
3. brute_force_link — the same predicate evaluated over every pair, kept as
   an independent oracle for the blocked matcher.

Also resolves citation events against the link table (preprint-version
citations fold into the linked article) and flags self-citations.
"""

from __future__ import annotations

import logging
import re
import statistics
from dataclasses import dataclass, field

from cidlab.corpus import (
    ArticleRecord,
    Corpus,
    CitationEvent,
    NameKey,
    PreprintRecord,
    YearMonth,
    months_between,
    normalize_author_name,
    ARTICLE_TARGET,
)

logger = logging.getLogger(__name__)

METHOD_JOURNAL_REF = "journal_ref"
METHOD_AUTHOR_TITLE = "author_title"

# Function words ignored when comparing titles.  Tokens must also be at
# least three letters long to count as significant.
STOPWORDS = frozenset(
    """
    the a an and or of in on for with from by at to as is are be was were
    new non not its via under over between during through toward against
    this that these those can may all any some using used use based study
    studies effect effects
    """.split()
)


@dataclass(frozen=True)
class MatchParams:
    """Knobs for the author+title tier."""

    title_overlap_threshold: float = 0.6
    max_lag_months: int = 36
    min_significant_words: int = 2
    stopwords: frozenset[str] = STOPWORDS

    def __post_init__(self) -> None:
        if not 0.0 < self.title_overlap_threshold <= 1.0:
            raise ValueError("title_overlap_threshold must be in (0, 1]")
        if self.max_lag_months < 0:
            raise ValueError("max_lag_months must be >= 0")
        if self.min_significant_words < 1:
            raise ValueError("min_significant_words must be >= 1")


@dataclass(frozen=True)
class Link:
    preprint_id: str
    article_id: str
    method: str
    score: float


@dataclass
class LinkTable:
    """One-to-one preprint<->article assignment with per-link provenance."""

    links: list[Link] = field(default_factory=list)
    ambiguities: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.links = sorted(self.links, key=lambda l: (l.preprint_id, l.article_id))
        self.by_preprint = {l.preprint_id: l for l in self.links}
        self.by_article = {l.article_id: l for l in self.links}
        if len(self.by_preprint) != len(self.links) or len(self.by_article) != len(self.links):
            raise ValueError("link table is not one-to-one")

    def pair_set(self) -> set[tuple[str, str]]:
        return {(l.preprint_id, l.article_id) for l in self.links}

    def is_deposited(self, article_id: str) -> bool:
        return article_id in self.by_article


# -------------------------------------------------- journal_ref parsing ----


@dataclass(frozen=True)
class JournalRef:
    journal_key: str  # normalized alias token, not yet a journal_id
    volume: int
    first_page: int
    year: int


_JREF_RE = re.compile(
    r"^\s*(?P<journal>[^,(]*[A-Za-z][^,(]*?)\s+(?P<volume>\d+)\s*,"
    r"\s*(?P<page>\d+)\s*\(\s*(?P<year>\d{4})\s*\)"
)


def normalize_journal_key(text: str) -> str:
    """Alias-map key for a journal name: lowercase alphanumerics only."""
    return "".join(ch for ch in text.lower() if ch.isalnum())


def parse_journal_ref(text: str | None) -> JournalRef | None:
    """Parse "<journal> <volume>, <page> (<year>)"; anything else is absent.

    Total over arbitrary input: free-text refs like "to appear" return None.
    """
    if not text:
        return None
    m = _JREF_RE.match(text)
    if not m:
        return None
    key = normalize_journal_key(m.group("journal"))
    if not key:
        return None
    return JournalRef(
        journal_key=key,
        volume=int(m.group("volume")),
        first_page=int(m.group("page")),
        year=int(m.group("year")),
    )


def default_alias_map(corpus: Corpus) -> dict[str, str]:
    """Identity alias map over the corpus' own journal ids."""
    return {normalize_journal_key(j): j for j in sorted(corpus.journals)}


# ------------------------------------------------------------- matching ----


def _first_author_key(preprint: PreprintRecord) -> NameKey:
    return normalize_author_name(preprint.first_author)


def _first_authors_compatible(preprint: PreprintRecord, article: ArticleRecord) -> bool:
    return _first_author_key(preprint).compatible_with(
        normalize_author_name(article.byline[0])
    )


_WORD_RE = re.compile(r"[a-z0-9]+")


def significant_words(title: str, params: MatchParams) -> frozenset[str]:
    """Lowercased title tokens, stopwords removed, length >= 3."""
    tokens = _WORD_RE.findall(title.lower())
    return frozenset(t for t in tokens if len(t) >= 3 and t not in params.stopwords)


def title_overlap(a: frozenset[str], b: frozenset[str]) -> float:
    """|intersection| / |smaller set|; 0.0 when either set is empty."""
    if not a or not b:
        return 0.0
    return len(a & b) / min(len(a), len(b))


def candidate_score(
    preprint: PreprintRecord,
    article: ArticleRecord,
    params: MatchParams,
) -> float | None:
    """Author+title tier predicate; None when the pair is not linkable.

    Requires a compatible first-author NameKey, publication lag within
    [0, max_lag_months] of the deposit, both titles carrying at least
    min_significant_words significant words, and word overlap at or above
    the threshold.  The returned score is the overlap fraction.
    """
    if not _first_authors_compatible(preprint, article):
        return None
    lag = months_between(article.index_entry_date, preprint.deposit_date)
    if not 0 <= lag <= params.max_lag_months:
        return None
    words_p = significant_words(preprint.title, params)
    words_a = significant_words(article.title, params)
    if len(words_p) < params.min_significant_words:
        return None
    if len(words_a) < params.min_significant_words:
        return None
    overlap = title_overlap(words_p, words_a)
    if overlap < params.title_overlap_threshold:
        return None
    return overlap


def _greedy_assign(
    scored: list[tuple[float, str, str]],
    method: str,
    taken_preprints: set[str],
    taken_articles: set[str],
) -> list[Link]:
    """One-to-one assignment: descending score, lexicographic id tie-break."""
    links: list[Link] = []
    for score, preprint_id, article_id in sorted(
        scored, key=lambda t: (-t[0], t[1], t[2])
    ):
        if preprint_id in taken_preprints or article_id in taken_articles:
            continue
        taken_preprints.add(preprint_id)
        taken_articles.add(article_id)
        links.append(Link(preprint_id, article_id, method, score))
    return links


def link_by_journal_ref(
    preprints: dict[str, PreprintRecord],
    articles: dict[str, ArticleRecord],
    journal_alias_map: dict[str, str],
) -> LinkTable:
    """Tier 1: link preprints whose journal_ref parses to a unique article.

    A parsed reference must resolve through the alias map and match exactly
    one article on (journal, year, compatible first author); zero or several
    candidates - or an already-claimed article - leave the preprint unlinked
    and are logged as ambiguities.
    """
    by_journal_year: dict[tuple[str, int], list[ArticleRecord]] = {}
    for article in articles.values():
        by_journal_year.setdefault((article.journal_id, article.pub_year), []).append(article)

    links: list[Link] = []
    ambiguities: list[str] = []
    taken_articles: set[str] = set()
    for preprint_id in sorted(preprints):
        preprint = preprints[preprint_id]
        ref = parse_journal_ref(preprint.journal_ref)
        if ref is None:
            continue
        journal_id = journal_alias_map.get(ref.journal_key)
        if journal_id is None:
            ambiguities.append(f"{preprint_id}: unknown journal alias {ref.journal_key!r}")
            continue
        candidates = [
            a for a in by_journal_year.get((journal_id, ref.year), [])
            if _first_authors_compatible(preprint, a)
        ]
        if len(candidates) != 1:
            if candidates:
                ambiguities.append(
                    f"{preprint_id}: {len(candidates)} candidates in {journal_id} {ref.year}"
                )
            continue
        article = candidates[0]
        if article.article_id in taken_articles:
            ambiguities.append(
                f"{preprint_id}: article {article.article_id} already claimed"
            )
            continue
        taken_articles.add(article.article_id)
        links.append(Link(preprint_id, article.article_id, METHOD_JOURNAL_REF, 1.0))
    table = LinkTable(links=links, ambiguities=ambiguities)
    for note in ambiguities:
        logger.debug("journal_ref ambiguity: %s", note)
    return table


def link_by_author_title(
    preprints: dict[str, PreprintRecord],
    articles: dict[str, ArticleRecord],
    params: MatchParams | None = None,
) -> LinkTable:
    """Tier 2: surname-blocked candidate scoring with greedy assignment."""
    params = params or MatchParams()
    by_surname: dict[str, list[ArticleRecord]] = {}
    for article in articles.values():
        surname = normalize_author_name(article.byline[0]).surname
        by_surname.setdefault(surname, []).append(article)

    scored: list[tuple[float, str, str]] = []
    for preprint_id in sorted(preprints):
        preprint = preprints[preprint_id]
        bucket = by_surname.get(_first_author_key(preprint).surname, ())
        for article in bucket:
            score = candidate_score(preprint, article, params)
            if score is not None:
                scored.append((score, preprint_id, article.article_id))

    links = _greedy_assign(scored, METHOD_AUTHOR_TITLE, set(), set())
    return LinkTable(links=links)


def brute_force_link(
    preprints: dict[str, PreprintRecord],
    articles: dict[str, ArticleRecord],
    params: MatchParams | None = None,
) -> LinkTable:
    """Oracle matcher: same predicate and assignment, no blocking index.

    Intended for small corpora (a few hundred records); results must be
    set-identical to link_by_author_title.
    """
    params = params or MatchParams()
    scored: list[tuple[float, str, str]] = []
    for preprint_id in sorted(preprints):
        preprint = preprints[preprint_id]
        for article_id in sorted(articles):
            score = candidate_score(preprint, articles[article_id], params)
            if score is not None:
                scored.append((score, preprint_id, article_id))
    links = _greedy_assign(scored, METHOD_AUTHOR_TITLE, set(), set())
    return LinkTable(links=links)


def build_link_table(
    corpus: Corpus,
    journal_alias_map: dict[str, str] | None = None,
    params: MatchParams | None = None,
) -> LinkTable:
    """Run tier 1 then tier 2 on the remainder; merged table stays one-to-one."""
    alias_map = journal_alias_map if journal_alias_map is not None else default_alias_map(corpus)
    tier1 = link_by_journal_ref(corpus.preprints, corpus.articles, alias_map)
    remaining_preprints = {
        pid: p for pid, p in corpus.preprints.items() if pid not in tier1.by_preprint
    }
    remaining_articles = {
        aid: a for aid, a in corpus.articles.items() if aid not in tier1.by_article
    }
    tier2 = link_by_author_title(remaining_preprints, remaining_articles, params)
    return LinkTable(
        links=tier1.links + tier2.links,
        ambiguities=tier1.ambiguities + tier2.ambiguities,
    )


# ------------------------------------------------------------ matchkeys ----


def build_citation_matchkey(preprint: PreprintRecord) -> str:
    """"<normalized first-author surname>:<preprint_id>" citation target key."""
    surname = normalize_author_name(preprint.first_author).surname
    if not surname:
        raise ValueError(f"preprint {preprint.preprint_id} has no usable first author")
    return f"{surname}:{preprint.preprint_id}"


def parse_citation_matchkey(key: str) -> tuple[str, str]:
    """Split a matchkey back into (surname, preprint_id)."""
    surname, sep, preprint_id = key.partition(":")
    if not sep or not surname or not preprint_id:
        raise ValueError(f"malformed citation matchkey {key!r}")
    return surname, preprint_id


# ------------------------------------------------------ self-citations -----


def is_self_citation(citing_byline: tuple[str, ...], cited_byline: tuple[str, ...]) -> bool:
    """True iff the bylines share an author NameKey.

    Initials are compared by prefix compatibility, so "Smith, J" on one side
    matches "Smith, J.A." on the other.
    """
    citing = [normalize_author_name(n) for n in citing_byline]
    cited = [normalize_author_name(n) for n in cited_byline]
    by_surname: dict[str, list[NameKey]] = {}
    for key in cited:
        by_surname.setdefault(key.surname, []).append(key)
    for key in citing:
        for other in by_surname.get(key.surname, ()):
            if key.compatible_with(other):
                return True
    return False


# ------------------------------------------------------------ resolving ----


@dataclass(frozen=True)
class ResolvedEvent:
    """A citation event annotated during resolution.

    effective_cited_date is the date of the *version the event targeted*:
    deposit date for preprint-version citations, index entry date for
    citations to the journal version.
    """

    citing_article_id: str
    citation_date: YearMonth
    effective_cited_date: YearMonth
    via_preprint_version: bool
    self_citation: bool


@dataclass
class ResolvedCitations:
    """Citations attached to articles (and to unlinked preprints) post-linkage."""

    corpus: Corpus
    article_events: dict[str, list[ResolvedEvent]]
    preprint_events: dict[str, list[ResolvedEvent]]
    unresolved: list[CitationEvent]

    @property
    def n_resolved(self) -> int:
        return sum(len(v) for v in self.article_events.values())

    @property
    def n_preprint_attached(self) -> int:
        return sum(len(v) for v in self.preprint_events.values())

    @property
    def n_unresolved(self) -> int:
        return len(self.unresolved)

    @property
    def total(self) -> int:
        return self.n_resolved + self.n_preprint_attached + self.n_unresolved


def resolve_citations(corpus: Corpus, link_table: LinkTable) -> ResolvedCitations:
    """Attach every citation event to an article, an unlinked preprint, or
    the unresolved tally; flags preprint-version and self-citations.

    Conservation: resolved + preprint-attached + unresolved == total events.
    """
    matchkey_to_preprint = {
        build_citation_matchkey(p): pid for pid, p in corpus.preprints.items()
    }
    article_events: dict[str, list[ResolvedEvent]] = {aid: [] for aid in corpus.articles}
    preprint_events: dict[str, list[ResolvedEvent]] = {}
    unresolved: list[CitationEvent] = []

    for event in corpus.citations:
        citing = corpus.articles[event.citing_article_id]
        if event.target_kind == ARTICLE_TARGET:
            article = corpus.articles[event.target]
            resolved = ResolvedEvent(
                citing_article_id=event.citing_article_id,
                citation_date=event.citation_date,
                effective_cited_date=article.index_entry_date,
                via_preprint_version=False,
                self_citation=is_self_citation(citing.byline, article.byline),
            )
            article_events[article.article_id].append(resolved)
            continue

        preprint_id = matchkey_to_preprint.get(event.target)
        if preprint_id is None:
            unresolved.append(event)
            continue
        preprint = corpus.preprints[preprint_id]
        link = link_table.by_preprint.get(preprint_id)
        if link is not None:
            cited_byline = corpus.articles[link.article_id].byline
            resolved = ResolvedEvent(
                citing_article_id=event.citing_article_id,
                citation_date=event.citation_date,
                effective_cited_date=preprint.deposit_date,
                via_preprint_version=True,
                self_citation=is_self_citation(citing.byline, cited_byline),
            )
            article_events[link.article_id].append(resolved)
        else:
            resolved = ResolvedEvent(
                citing_article_id=event.citing_article_id,
                citation_date=event.citation_date,
                effective_cited_date=preprint.deposit_date,
                via_preprint_version=True,
                self_citation=is_self_citation(citing.byline, (preprint.first_author,)),
            )
            preprint_events.setdefault(preprint_id, []).append(resolved)

    if unresolved:
        logger.info("%d citation events had unknown preprint keys", len(unresolved))
    return ResolvedCitations(
        corpus=corpus,
        article_events=article_events,
        preprint_events=preprint_events,
        unresolved=unresolved,
    )


# ------------------------------------------------------------ reporting ----


@dataclass(frozen=True)
class LinkageStats:
    n_preprints: int
    n_linked: int
    linked_fraction: float
    median_lag_months: float | None
    per_method_counts: dict[str, int]


def link_lag_months(link: Link, corpus: Corpus) -> int:
    """Whole months from deposit to the linked article's index entry."""
    article = corpus.articles[link.article_id]
    preprint = corpus.preprints[link.preprint_id]
    return months_between(article.index_entry_date, preprint.deposit_date)


def linkage_stats(link_table: LinkTable, corpus: Corpus) -> LinkageStats:
    n_preprints = len(corpus.preprints)
    n_linked = len(link_table.links)
    lags = [link_lag_months(l, corpus) for l in link_table.links]
    counts: dict[str, int] = {}
    for link in link_table.links:
        counts[link.method] = counts.get(link.method, 0) + 1
    return LinkageStats(
        n_preprints=n_preprints,
        n_linked=n_linked,
        linked_fraction=(n_linked / n_preprints) if n_preprints else 0.0,
        median_lag_months=statistics.median(lags) if lags else None,
        per_method_counts=counts,
    )
