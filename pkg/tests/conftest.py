"""Shared fixtures: synthetic corpora, loaded pipelines, hand-written files.

The synthetic pipelines are session-scoped because generation plus linkage
over a 20k-paper corpus costs seconds; every test module shares them.  The
acceptance tests append their verdict lines to ``config._acceptance_lines``
and the terminal-summary hook prints the collected lines after the run.
"""

from __future__ import annotations

import contextlib
import json
from dataclasses import dataclass
from pathlib import Path

import pytest

from cidlab.corpus import SCHEMA_HEADER, Corpus, load_corpus
from cidlab.linkage import LinkTable, ResolvedCitations, build_link_table, resolve_citations
from cidlab.synthgen import GeneratorParams, GroundTruth, generate_corpus


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)


@pytest.fixture
def acceptance(request):
    """Context manager that records one '[acceptance] criterion N: ...' line.

    The block's assertions decide the verdict: a clean exit records PASS,
    any exception records FAIL (and propagates, so the test still fails).
    """

    @contextlib.contextmanager
    def criterion(number: int):
        passed = False
        try:
            yield
            passed = True
        finally:
            verdict = "PASS" if passed else "FAIL"
            request.config._acceptance_lines.append(
                f"[acceptance] criterion {number}: {verdict}"
            )

    return criterion


# ------------------------------------------------------ synthetic corpora --


@dataclass(frozen=True)
class Pipeline:
    """A generated corpus taken through load -> link -> resolve."""

    root: Path
    corpus: Corpus
    links: LinkTable
    resolved: ResolvedCitations
    truth: GroundTruth


def build_pipeline(root: Path, params: GeneratorParams) -> Pipeline:
    result = generate_corpus(params, root)
    corpus = load_corpus(
        root / "articles.jsonl", root / "preprints.jsonl", root / "citations.jsonl"
    )
    links = build_link_table(corpus)
    resolved = resolve_citations(corpus, links)
    return Pipeline(
        root=root,
        corpus=corpus,
        links=links,
        resolved=resolved,
        truth=result.ground_truth,
    )


@pytest.fixture(scope="session")
def bias_pipeline(tmp_path_factory) -> Pipeline:
    """Default generator config: quality bias on, lag 6, no intrinsic boost."""
    return build_pipeline(tmp_path_factory.mktemp("corpus-bias"), GeneratorParams(seed=42))


@pytest.fixture(scope="session")
def boost_pipeline(tmp_path_factory) -> Pipeline:
    """Like the default config but with a genuine citation boost for deposits."""
    return build_pipeline(
        tmp_path_factory.mktemp("corpus-boost"),
        GeneratorParams(seed=77, oa_boost=0.25),
    )


@pytest.fixture(scope="session")
def null_pipeline(tmp_path_factory) -> Pipeline:
    """No bias, no lag, no boost: deposit status carries no signal at all."""
    return build_pipeline(
        tmp_path_factory.mktemp("corpus-null"),
        GeneratorParams(
            seed=10,
            n_journals=2,
            papers_per_journal=5000,
            deposit_bias=0.0,
            lag_months=0,
            lag_jitter_months=0.0,
        ),
    )


# ------------------------------------------------------ hand-written files --


def write_jsonl_fixture(path: Path, records: list[dict | str]) -> Path:
    """Write records (dicts, or raw lines for deliberate malformation)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(SCHEMA_HEADER + "\n")
        for record in records:
            if isinstance(record, str):
                fh.write(record + "\n")
            else:
                fh.write(json.dumps(record) + "\n")
    return path


@pytest.fixture
def corpus_files(tmp_path):
    """Writer for a three-file corpus; returns (articles, preprints, citations) paths."""

    def write(articles, preprints=(), citations=(), root=None):
        root = root or tmp_path
        root.mkdir(parents=True, exist_ok=True)
        return (
            write_jsonl_fixture(root / "articles.jsonl", list(articles)),
            write_jsonl_fixture(root / "preprints.jsonl", list(preprints)),
            write_jsonl_fixture(root / "citations.jsonl", list(citations)),
        )

    return write


def article(article_id, journal="jphys", title="On a topic of record", byline=("Smith, J.",),
            pub_year=1994, index_entry_date="1994-03"):
    return {
        "article_id": article_id,
        "journal_id": journal,
        "title": title,
        "byline": list(byline),
        "pub_year": pub_year,
        "index_entry_date": index_entry_date,
    }


def preprint(preprint_id, title="On a topic of record", first_author="Smith, J.",
             deposit_date="1993-09", journal_ref=None):
    record = {
        "preprint_id": preprint_id,
        "title": title,
        "first_author": first_author,
        "deposit_date": deposit_date,
    }
    if journal_ref is not None:
        record["journal_ref"] = journal_ref
    return record


def citation(citing, target, date, kind="article"):
    return {
        "citing_article_id": citing,
        "target_kind": kind,
        "target": target,
        "citation_date": date,
    }
