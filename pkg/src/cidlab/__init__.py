"""cidlab: preprint-to-journal record linkage and citation impact differentials.

The package links repository deposits to their published journal versions,
resolves citation events against the linked corpus, and computes the
citation-impact-differential family of indicators (journal tables, citation
age curves, author-level medians) plus a seeded synthetic-corpus generator
with ground-truth oracles for validating the whole pipeline.
"""

from cidlab.corpus import (
    ArticleRecord,
    CitationEvent,
    Corpus,
    NameKey,
    PreprintRecord,
    YearMonth,
    load_corpus,
    month_index,
    normalize_author_name,
    save_corpus,
)
from cidlab.linkage import (
    LinkTable,
    MatchParams,
    build_citation_matchkey,
    build_link_table,
    linkage_stats,
    parse_journal_ref,
    resolve_citations,
)
from cidlab.metrics import CountingOptions, WindowSpec, cid, citations_per_paper, impact_ratio

__version__ = "0.1.0"

__all__ = [
    "ArticleRecord",
    "CitationEvent",
    "Corpus",
    "CountingOptions",
    "LinkTable",
    "MatchParams",
    "NameKey",
    "PreprintRecord",
    "WindowSpec",
    "YearMonth",
    "__version__",
    "build_citation_matchkey",
    "build_link_table",
    "cid",
    "citations_per_paper",
    "impact_ratio",
    "linkage_stats",
    "load_corpus",
    "month_index",
    "normalize_author_name",
    "parse_journal_ref",
    "resolve_citations",
    "save_corpus",
]
