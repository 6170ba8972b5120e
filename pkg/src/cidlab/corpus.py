"""Bibliographic corpus model: records, author-name normalization, ingestion.

The corpus is exchanged as three line-record JSONL files (articles, preprints,
citation events), each starting with a ``#schema=cidlab-v1`` header comment.
Malformed lines are rejected record-by-record with line numbers; dangling
references and duplicate identifiers abort the load with an integrity error.
"""

from __future__ import annotations

import functools
import json
import logging
import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

logger = logging.getLogger(__name__)

SCHEMA_TAG = "cidlab-v1"
SCHEMA_HEADER = f"#schema={SCHEMA_TAG}"

ARTICLE_TARGET = "article"
PREPRINT_KEY_TARGET = "preprint_key"


class CorpusError(Exception):
    """Base error for corpus loading and validation."""


class CorpusIntegrityError(CorpusError):
    """A cross-record invariant is broken (dangling id, duplicate id)."""


# ---------------------------------------------------------------- dates ----


class YearMonth(NamedTuple):
    """A calendar month, the finest time resolution used anywhere."""

    year: int
    month: int

    @classmethod
    def parse(cls, text: str) -> "YearMonth":
        m = re.fullmatch(r"(\d{4})-(\d{2})", text.strip())
        if not m:
            raise ValueError(f"expected YYYY-MM date, got {text!r}")
        year, month = int(m.group(1)), int(m.group(2))
        if not 1 <= month <= 12:
            raise ValueError(f"month out of range in {text!r}")
        return cls(year, month)

    def absolute(self) -> int:
        """Month serial number on a continuous axis (year*12 + month-1)."""
        return self.year * 12 + self.month - 1

    @classmethod
    def from_absolute(cls, serial: int) -> "YearMonth":
        return cls(serial // 12, serial % 12 + 1)

    def shift(self, months: int) -> "YearMonth":
        return YearMonth.from_absolute(self.absolute() + months)

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}"


def months_between(later: YearMonth, earlier: YearMonth) -> int:
    """Signed whole-month distance (later - earlier)."""
    return later.absolute() - earlier.absolute()


def month_index(date: YearMonth, epoch_start_year: int) -> int:
    """Map a date to a monotone 0-based month offset from January of the epoch year.

    (1992-01, 1992) -> 0, (1992-12, 1992) -> 11, (1994-03, 1992) -> 26.
    """
    if date.year < epoch_start_year:
        raise ValueError(f"{date} precedes epoch start year {epoch_start_year}")
    return (date.year - epoch_start_year) * 12 + date.month - 1


# ---------------------------------------------------------------- names ----

# Surname particles that travel with the family name when names are written
# out (van der Berg, de la Cruz).  Checked before the initial-length rule so
# "de"/"la" are never read as initials.
_PARTICLES = frozenset(
    {
        "van", "de", "der", "von", "den", "ter", "ten", "da", "di", "del",
        "della", "dos", "du", "la", "le",
    }
)


class NameKey(NamedTuple):
    """Normalized author identity: folded surname plus initials string."""

    surname: str
    initials: str

    def render(self) -> str:
        """Canonical text form; normalize_author_name() maps it back to self."""
        if not self.initials:
            return self.surname
        return f"{self.surname}, " + ".".join(self.initials) + "."

    def compatible_with(self, other: "NameKey") -> bool:
        """Same surname and prefix-compatible initials ("j" matches "ja")."""
        if self.surname != other.surname:
            return False
        a, b = self.initials, other.initials
        return a.startswith(b) or b.startswith(a)


def _fold(text: str) -> str:
    """Lowercase, strip diacritics, keep ASCII letters only."""
    decomposed = unicodedata.normalize("NFKD", text)
    return "".join(c for c in decomposed if c.isascii() and c.isalpha()).lower()


def _initials_of(token: str) -> str:
    """Initials contributed by one given-name token.

    Dotted tokens ("J.A.") and one/two-letter tokens ("J", "JA") are read as
    run-together initials; longer tokens are full given names contributing
    their first letter.
    """
    letters = _fold(token)
    if not letters:
        return ""
    if "." in token or len(letters) <= 2:
        return letters
    return letters[0]


@functools.lru_cache(maxsize=None)
def normalize_author_name(raw: str) -> NameKey:
    """Reduce a raw byline string to a NameKey.

    Handles "Surname, Given" order, surname-first WoS style ("SMITH J"),
    given-first style ("J. Smith", "John Smith"), and surname particles,
    which are folded into the surname ("van der Berg, P" -> "vanderberg").
    Idempotent: normalizing the rendered form of a key yields the same key.
    """
    text = raw.strip()
    if not text:
        raise ValueError("empty author name")

    if "," in text:
        surname_part, given_part = text.split(",", 1)
        surname = _fold(surname_part)
        initials = []
        extra_particles = []
        for token in given_part.split():
            letters = _fold(token)
            if letters in _PARTICLES:
                extra_particles.append(letters)
            else:
                initials.append(_initials_of(token))
        # "Berg, P. van der" carries its particles after the comma.
        surname = "".join(extra_particles) + surname
        if not surname:
            raise ValueError(f"no surname in {raw!r}")
        return NameKey(surname, "".join(initials))

    tokens = text.split()
    particles: list[tuple[int, str]] = []
    words: list[tuple[int, str]] = []
    initial_tokens: list[tuple[int, str]] = []
    for pos, token in enumerate(tokens):
        letters = _fold(token)
        if not letters:
            continue
        if letters in _PARTICLES:
            particles.append((pos, letters))
        elif "." in token or len(letters) <= 2:
            initial_tokens.append((pos, token))
        else:
            words.append((pos, letters))

    if not words and not particles:
        if not initial_tokens:
            raise ValueError(f"no usable name tokens in {raw!r}")
        # All tokens look like initials ("Ng J"): the longest undotted token
        # is the best surname candidate, first wins on ties.
        undotted = [(p, t) for p, t in initial_tokens if "." not in t]
        pool = undotted or initial_tokens
        spos, stoken = max(pool, key=lambda item: (len(_fold(item[1])), -item[0]))
        initials = "".join(
            _initials_of(t) for p, t in initial_tokens if p != spos
        )
        return NameKey(_fold(stoken), initials)

    if initial_tokens or len(words) <= 1:
        # Explicit initials present (or a lone word): every word plus every
        # particle belongs to the surname, in written order.
        surname_parts = sorted(particles + words)
        surname = "".join(part for _, part in surname_parts)
        initials = "".join(_initials_of(t) for _, t in sorted(initial_tokens))
        return NameKey(surname, initials)

    # Western "Given ... Surname" order: final word (with any immediately
    # preceding particles) is the surname, earlier words become initials.
    last_pos, last_word = words[-1]
    attached = [last_word]
    cursor = last_pos - 1
    particle_map = dict(particles)
    while cursor in particle_map:
        attached.insert(0, particle_map[cursor])
        cursor -= 1
    surname = "".join(attached)
    initials = "".join(w[0] for _, w in words[:-1])
    return NameKey(surname, initials)


# -------------------------------------------------------------- records ----


@dataclass(frozen=True)
class ArticleRecord:
    """A published journal article as indexed in the citation database."""

    article_id: str
    journal_id: str
    title: str
    byline: tuple[str, ...]
    pub_year: int
    index_entry_date: YearMonth

    def name_keys(self) -> tuple[NameKey, ...]:
        return tuple(normalize_author_name(name) for name in self.byline)


@dataclass(frozen=True)
class PreprintRecord:
    """A repository deposit; journal_ref is the self-reported published venue."""

    preprint_id: str
    title: str
    first_author: str
    deposit_date: YearMonth
    journal_ref: str | None = None


@dataclass(frozen=True)
class CitationEvent:
    """One citing-article -> target edge, dated by the citing article's index entry."""

    citing_article_id: str
    target_kind: str  # ARTICLE_TARGET or PREPRINT_KEY_TARGET
    target: str
    citation_date: YearMonth


@dataclass
class LoadReport:
    loaded: dict[str, int] = field(default_factory=dict)
    rejected: list[tuple[str, int, str]] = field(default_factory=list)

    @property
    def n_rejected(self) -> int:
        return len(self.rejected)


@dataclass
class Corpus:
    articles: dict[str, ArticleRecord]
    preprints: dict[str, PreprintRecord]
    citations: list[CitationEvent]
    journals: set[str] = field(default_factory=set)
    epoch: tuple[int, int] = (0, 0)
    load_report: LoadReport | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not self.journals:
            self.journals = {a.journal_id for a in self.articles.values()}
        if self.epoch == (0, 0):
            self.epoch = _derive_epoch(self)


def _derive_epoch(corpus: Corpus) -> tuple[int, int]:
    years: list[int] = []
    for a in corpus.articles.values():
        years.append(a.pub_year)
        years.append(a.index_entry_date.year)
    for p in corpus.preprints.values():
        years.append(p.deposit_date.year)
    for c in corpus.citations:
        years.append(c.citation_date.year)
    if not years:
        return (0, 0)
    return (min(years), max(years))


# -------------------------------------------------------------- loading ----


class _RecordError(ValueError):
    """Raised while parsing a single line; becomes a rejection entry."""


def _need(record: dict, key: str, kind: type) -> object:
    if key not in record:
        raise _RecordError(f"missing field {key!r}")
    value = record[key]
    if kind is int and isinstance(value, bool):
        raise _RecordError(f"field {key!r} must be {kind.__name__}")
    if not isinstance(value, kind):
        raise _RecordError(f"field {key!r} must be {kind.__name__}")
    return value


def _parse_date_field(record: dict, key: str) -> YearMonth:
    raw = _need(record, key, str)
    try:
        return YearMonth.parse(raw)  # type: ignore[arg-type]
    except ValueError as exc:
        raise _RecordError(str(exc)) from exc


def _parse_article(record: dict) -> ArticleRecord:
    byline_raw = _need(record, "byline", list)
    byline = tuple(str(name) for name in byline_raw)  # type: ignore[union-attr]
    if not byline or any(not name.strip() for name in byline):
        raise _RecordError("byline must be a non-empty list of names")
    pub_year = _need(record, "pub_year", int)
    entry = _parse_date_field(record, "index_entry_date")
    if not pub_year - 1 <= entry.year <= pub_year + 2:
        raise _RecordError(
            f"index_entry_date {entry} outside [pub_year-1, pub_year+2]"
        )
    return ArticleRecord(
        article_id=str(_need(record, "article_id", str)),
        journal_id=str(_need(record, "journal_id", str)),
        title=str(_need(record, "title", str)),
        byline=byline,
        pub_year=pub_year,  # type: ignore[arg-type]
        index_entry_date=entry,
    )


def _parse_preprint(record: dict) -> PreprintRecord:
    ref = record.get("journal_ref")
    if ref is not None and not isinstance(ref, str):
        raise _RecordError("journal_ref must be a string when present")
    first_author = str(_need(record, "first_author", str))
    if not first_author.strip():
        raise _RecordError("first_author must be non-empty")
    return PreprintRecord(
        preprint_id=str(_need(record, "preprint_id", str)),
        title=str(_need(record, "title", str)),
        first_author=first_author,
        deposit_date=_parse_date_field(record, "deposit_date"),
        journal_ref=ref,
    )


def _parse_citation(record: dict) -> CitationEvent:
    kind = _need(record, "target_kind", str)
    if kind not in (ARTICLE_TARGET, PREPRINT_KEY_TARGET):
        raise _RecordError(f"unknown target_kind {kind!r}")
    return CitationEvent(
        citing_article_id=str(_need(record, "citing_article_id", str)),
        target_kind=kind,  # type: ignore[arg-type]
        target=str(_need(record, "target", str)),
        citation_date=_parse_date_field(record, "citation_date"),
    )


def _iter_records(path: Path, report: LoadReport, parse, label: str):
    count = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if line.startswith("#schema=") and line != SCHEMA_HEADER:
                    raise CorpusError(
                        f"{path}: unsupported schema {line.removeprefix('#schema=')!r}"
                    )
                continue
            try:
                record = json.loads(line)
                if not isinstance(record, dict):
                    raise _RecordError("line is not a JSON object")
                yield parse(record)
                count += 1
            except (json.JSONDecodeError, _RecordError) as exc:
                report.rejected.append((label, lineno, str(exc)))
                logger.warning("%s:%d rejected: %s", path, lineno, exc)
    report.loaded[label] = count


def load_corpus(
    article_path: str | Path,
    preprint_path: str | Path,
    citation_path: str | Path,
    fmt: str = "jsonl",
) -> Corpus:
    """Load and validate the three corpus files.

    Malformed lines are dropped (counted in the returned corpus' load_report);
    referential-integrity failures raise CorpusIntegrityError naming the
    dangling or duplicated identifier.
    """
    if fmt != "jsonl":
        raise ValueError(f"unsupported corpus format {fmt!r}")
    report = LoadReport()

    articles: dict[str, ArticleRecord] = {}
    for article in _iter_records(Path(article_path), report, _parse_article, "articles"):
        if article.article_id in articles:
            raise CorpusIntegrityError(f"duplicate article_id {article.article_id!r}")
        articles[article.article_id] = article

    preprints: dict[str, PreprintRecord] = {}
    for preprint in _iter_records(Path(preprint_path), report, _parse_preprint, "preprints"):
        if preprint.preprint_id in preprints:
            raise CorpusIntegrityError(f"duplicate preprint_id {preprint.preprint_id!r}")
        preprints[preprint.preprint_id] = preprint

    citations: list[CitationEvent] = []
    for event in _iter_records(Path(citation_path), report, _parse_citation, "citations"):
        if event.citing_article_id not in articles:
            raise CorpusIntegrityError(
                f"citation from unknown article_id {event.citing_article_id!r}"
            )
        if event.target_kind == ARTICLE_TARGET and event.target not in articles:
            raise CorpusIntegrityError(
                f"citation to unknown article_id {event.target!r}"
            )
        citations.append(event)

    corpus = Corpus(articles=articles, preprints=preprints, citations=citations)
    corpus.load_report = report
    logger.info(
        "loaded corpus: %d articles, %d preprints, %d citations (%d rejected)",
        len(articles), len(preprints), len(citations), report.n_rejected,
    )
    return corpus


# -------------------------------------------------------------- writing ----


def _article_json(a: ArticleRecord) -> dict:
    return {
        "article_id": a.article_id,
        "journal_id": a.journal_id,
        "title": a.title,
        "byline": list(a.byline),
        "pub_year": a.pub_year,
        "index_entry_date": str(a.index_entry_date),
    }


def _preprint_json(p: PreprintRecord) -> dict:
    record = {
        "preprint_id": p.preprint_id,
        "title": p.title,
        "first_author": p.first_author,
        "deposit_date": str(p.deposit_date),
    }
    if p.journal_ref is not None:
        record["journal_ref"] = p.journal_ref
    return record


def _citation_json(c: CitationEvent) -> dict:
    return {
        "citing_article_id": c.citing_article_id,
        "target_kind": c.target_kind,
        "target": c.target,
        "citation_date": str(c.citation_date),
    }


def write_jsonl(path: str | Path, records: Iterable[dict]) -> None:
    """Atomic JSONL write with the schema header (temp file + rename)."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(SCHEMA_HEADER + "\n")
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
    tmp.replace(path)


def save_corpus(corpus: Corpus, out_dir: str | Path) -> dict[str, Path]:
    """Write articles/preprints/citations JSONL files; returns their paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "articles": out / "articles.jsonl",
        "preprints": out / "preprints.jsonl",
        "citations": out / "citations.jsonl",
    }
    write_jsonl(paths["articles"],
                (_article_json(a) for _, a in sorted(corpus.articles.items())))
    write_jsonl(paths["preprints"],
                (_preprint_json(p) for _, p in sorted(corpus.preprints.items())))
    write_jsonl(paths["citations"], (_citation_json(c) for c in corpus.citations))
    return paths
