"""Command-line front end: ingestion -> linkage -> analyses -> report files.

Subcommands:

* ``link``      build the preprint/article link table and linkage stats
* ``analyze``   emit every report (tables, year series, age curves, author
                analyses) for one corpus
* ``synth``     generate a synthetic corpus with ground truth
* ``aging``     age-curve comparison and lag estimate only
* ``authors``   author-level analyses for one journal
* ``validate``  load the corpus files and print a diagnostic summary

Options resolve as: command-line flag > --config JSON file > built-in
default.  Exit codes: 0 success, 2 input/config error, 3 analysis-domain
error.  All outputs are written atomically and contain no timestamps, so a
rerun on identical inputs is byte-identical.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from pathlib import Path

from cidlab import __version__
from cidlab.aging import (
    DEFAULT_COMPARE_MONTHS,
    DEFAULT_HORIZON_MONTHS,
    DEFAULT_LAG_SEARCH,
    age_histogram,
    class_by_label,
    classify_by_citation_count,
    estimate_lag,
    fully_observed_papers,
    moving_average,
)
from cidlab.authors import (
    THRESHOLD_GT1,
    THRESHOLD_GT4,
    author_prominence,
    authorship_quartile_distribution,
    cid_histogram,
    coauthorship_class_analysis,
    eligible_author_cids,
    journal_author_profiles,
    median_cid_over_authors,
    quartile_assignment,
)
from cidlab.corpus import Corpus, CorpusError, load_corpus
from cidlab.linkage import (
    MatchParams,
    build_link_table,
    linkage_stats,
    resolve_citations,
)
from cidlab.metrics import (
    AGGREGATE_LABEL,
    WINDOW_1,
    WINDOW_2,
    CountingOptions,
    WindowSpec,
    count_citations,
    journal_cid_table,
    split_deposited,
    variable_window_series,
)
from cidlab.reports import (
    aging_tsv,
    cid_histogram_tsv,
    coauthor_tsv,
    lag_estimate_json,
    link_table_tsv,
    linkage_stats_json,
    quartile_tsv,
    table1_tsv,
    table2_tsv,
    year_series_tsv,
)
from cidlab.synthgen import GeneratorParamError, GeneratorParams, generate_corpus

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ANALYSIS = 3

_ALL_REPORTS = ("links", "table1", "fig1", "table2", "aging", "authors")


class InputError(Exception):
    """Bad paths, config, or parameters: exit status 2."""


class AnalysisError(Exception):
    """Valid inputs but an impossible analysis request: exit status 3."""


# ------------------------------------------------------------- option glue ---


def _read_config(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.is_file():
        raise InputError(f"config file not found: {p}")
    try:
        with open(p, encoding="utf-8") as fh:
            config = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"config file {p} is not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise InputError(f"config file {p} must hold a JSON object")
    return config


def _pick(flag_value, config: dict, key: str, default):
    if flag_value is not None:
        return flag_value
    if key in config:
        return config[key]
    return default


def _out_dir(args, config: dict) -> Path:
    out = Path(_pick(args.out_dir, config, "out_dir", "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _counting_options(args, config: dict) -> CountingOptions:
    return CountingOptions(
        include_preprint_cites=bool(_pick(args.include_preprint_cites, config,
                                          "include_preprint_cites", True)),
        exclude_self_citations=bool(_pick(args.exclude_self_cites, config,
                                          "exclude_self_cites", True)),
    )


def parse_window(text: str) -> WindowSpec:
    """Parse ``A-B`` (fixed years after the effective date) or ``thruYYYY``."""
    try:
        if text.startswith("thru"):
            return WindowSpec.variable(int(text[4:]))
        m = re.fullmatch(r"(\d+)-(\d+)", text)
        if not m:
            raise ValueError(f"window must look like '1-3' or 'thru2005', got {text!r}")
        return WindowSpec.fixed(int(m.group(1)), int(m.group(2)))
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _focus_window(args, config: dict) -> WindowSpec:
    text = _pick(args.window, config, "window", None)
    return WINDOW_1 if text is None else parse_window(str(text))


def _threshold(args, config: dict) -> int:
    value = int(_pick(args.threshold, config, "threshold", THRESHOLD_GT1))
    if value < 1:
        raise InputError(f"threshold must be >= 1, got {value}")
    return value


def _match_params(config: dict) -> MatchParams:
    section = config.get("match", {})
    if not isinstance(section, dict):
        raise InputError("config key 'match' must be an object")
    allowed = {"title_overlap_threshold", "max_lag_months", "min_significant_words"}
    unknown = set(section) - allowed
    if unknown:
        raise InputError(f"unknown match parameter: {sorted(unknown)[0]}")
    try:
        return MatchParams(**section)
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad match parameters: {exc}") from exc


def _load_inputs(args, config: dict) -> Corpus:
    base = Path(_pick(args.corpus_dir, config, "corpus_dir", "."))
    paths = {
        "articles": Path(_pick(args.articles, config, "articles", base / "articles.jsonl")),
        "preprints": Path(_pick(args.preprints, config, "preprints", base / "preprints.jsonl")),
        "citations": Path(_pick(args.citations, config, "citations", base / "citations.jsonl")),
    }
    for label, path in paths.items():
        if not path.is_file():
            raise InputError(f"{label} file not found: {path}")
    corpus = load_corpus(paths["articles"], paths["preprints"], paths["citations"])
    report = corpus.load_report
    if report.rejected:
        logger.warning("dropped %d malformed input line(s)", len(report.rejected))
    return corpus


def _pipeline(args, config: dict, corpus: Corpus):
    table = build_link_table(corpus, params=_match_params(config))
    resolved = resolve_citations(corpus, table)
    return table, resolved


def _default_journal(corpus: Corpus, link_table) -> str | None:
    """The journal with the most deposited papers (ties: lexicographic)."""
    counts: dict[str, int] = {}
    for link in link_table.links:
        journal = corpus.articles[link.article_id].journal_id
        counts[journal] = counts.get(journal, 0) + 1
    if not counts:
        return None
    return min(counts, key=lambda j: (-counts[j], j))


# --------------------------------------------------------------- commands ---


def cmd_link(args, config: dict) -> int:
    corpus = _load_inputs(args, config)
    table, _ = _pipeline(args, config, corpus)
    out = _out_dir(args, config)
    link_table_tsv(table, corpus, out / "link_table.tsv")
    linkage_stats_json(linkage_stats(table, corpus), out / "linkage_stats.json")
    logger.info("linked %d of %d preprints", len(table.links), len(corpus.preprints))
    return EXIT_OK


def _emit_aging(corpus, table, resolved, options, config, out,
                class_label: str, horizon: int, journal: str | None) -> None:
    if horizon < 1:
        raise InputError(f"horizon must be >= 1 month, got {horizon}")
    try:
        klass = class_by_label(class_label)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    deposited, nondeposited = split_deposited(corpus, table, journal)
    observed = fully_observed_papers(deposited | nondeposited, corpus, table,
                                     horizon, options)
    deposited &= observed
    nondeposited &= observed
    scope = deposited | nondeposited
    assignment = classify_by_citation_count(scope, resolved, None, options)
    dep_set = {p for p in deposited if assignment.get(p) == klass}
    nondep_set = {p for p in nondeposited if assignment.get(p) == klass}
    if not dep_set or not nondep_set:
        side = "deposited" if not dep_set else "non-deposited"
        raise AnalysisError(
            f"citation class {class_label} has no {side} papers"
            + (f" in journal {journal}" if journal else "")
        )
    dep_curve = age_histogram(dep_set, resolved, options, horizon, label="deposited")
    nondep_curve = age_histogram(nondep_set, resolved, options, horizon, label="non-deposited")
    try:
        estimate = estimate_lag(
            moving_average(dep_curve.values),
            moving_average(nondep_curve.values),
            search_range=DEFAULT_LAG_SEARCH,
            compare_months=int(config.get("compare_months", DEFAULT_COMPARE_MONTHS)),
            anchor=str(config.get("compare_anchor", "post_shift")),
            metric=str(config.get("distance_metric", "rms")),
        )
    except ValueError as exc:
        raise AnalysisError(str(exc)) from exc
    aging_tsv(dep_curve, nondep_curve, out / "fig2.tsv")
    aging_tsv(dep_curve, nondep_curve, out / "fig3.tsv", shift=estimate.lag_months)
    lag_estimate_json(estimate, out / "lag_estimate.json")


def _emit_authors(corpus, table, resolved, options, out, journal: str,
                  focus_window: WindowSpec, threshold: int,
                  table2_journals: list[str]) -> None:
    if journal not in corpus.journals:
        raise AnalysisError(f"unknown journal: {journal}")
    counts_w1 = count_citations(resolved, WINDOW_1, options)
    counts_w2 = count_citations(resolved, WINDOW_2, options)
    counts_focus = count_citations(resolved, focus_window, options)

    # table2: every selected journal x both windows x both thresholds
    reports = []
    for j in table2_journals:
        for window, counts in ((WINDOW_1, counts_w1), (WINDOW_2, counts_w2)):
            profiles = journal_author_profiles(corpus, resolved, table, j,
                                               window, options, counts=counts)
            for min_nondep in (THRESHOLD_GT1, THRESHOLD_GT4):
                reports.append(median_cid_over_authors(
                    profiles, j, window.label, min_nondeposited=min_nondep))
    table2_tsv(reports, out / "table2.tsv")

    # fig4: authorship distribution over prominence quartiles (focus window)
    profiles_focus = journal_author_profiles(corpus, resolved, table, journal,
                                             focus_window, options, counts=counts_focus)
    prominence = author_prominence(profiles_focus)
    if prominence:
        quartiles = quartile_assignment(prominence)
        quartile_tsv(authorship_quartile_distribution(corpus, table, journal, quartiles),
                     out / "fig4.tsv")
    else:
        logger.warning("no quartile-eligible authors in %s; fig4.tsv not written", journal)

    # fig6: per-journal histograms of author differentials (focus window)
    histograms = {}
    for j in table2_journals:
        profiles = journal_author_profiles(corpus, resolved, table, j,
                                           focus_window, options, counts=counts_focus)
        values = list(eligible_author_cids(profiles, threshold).values())
        histograms[j] = cid_histogram(values)
    cid_histogram_tsv(histograms, out / "fig6.tsv")

    coauthor_tsv(
        coauthorship_class_analysis(corpus, resolved, table, journal, focus_window,
                                    min_nondeposited=max(threshold, THRESHOLD_GT4),
                                    options=options, counts=counts_focus),
        out / "coauthor.tsv",
    )


def cmd_analyze(args, config: dict) -> int:
    corpus = _load_inputs(args, config)
    table, resolved = _pipeline(args, config, corpus)
    options = _counting_options(args, config)
    out = _out_dir(args, config)
    selected = config.get("reports", list(_ALL_REPORTS))
    unknown = set(selected) - set(_ALL_REPORTS)
    if unknown:
        raise InputError(f"unknown report selection: {sorted(unknown)[0]}")

    if "links" in selected:
        link_table_tsv(table, corpus, out / "link_table.tsv")
        linkage_stats_json(linkage_stats(table, corpus), out / "linkage_stats.json")

    report = journal_cid_table(corpus, resolved, table, options=options)
    if "table1" in selected:
        table1_tsv(report, out / "table1.tsv")
    if "fig1" in selected:
        horizon = config.get("horizon_year")
        series = variable_window_series(corpus, resolved, table,
                                        horizon_year=horizon, options=options)
        year_series_tsv(series, out / "fig1.tsv")

    if "aging" in selected:
        try:
            _emit_aging(corpus, table, resolved, options, config, out,
                        class_label=str(config.get("citation_class", "3-6")),
                        horizon=int(config.get("horizon_months", DEFAULT_HORIZON_MONTHS)),
                        journal=args.journal)
        except AnalysisError as exc:
            if args.journal is not None:
                raise
            logger.warning("aging reports skipped: %s", exc)

    if "table2" in selected or "authors" in selected:
        journal = args.journal or config.get("journal") or _default_journal(corpus, table)
        if journal is None:
            logger.warning("no deposited papers anywhere; author reports skipped")
        else:
            table2_journals = [r.journal for r in report.rows if r.journal != AGGREGATE_LABEL]
            try:
                _emit_authors(corpus, table, resolved, options, out, journal,
                              _focus_window(args, config), _threshold(args, config),
                              table2_journals or [journal])
            except AnalysisError:
                if args.journal is not None or config.get("journal"):
                    raise
                logger.warning("author reports skipped for %s", journal)
    return EXIT_OK


def cmd_synth(args, config: dict) -> int:
    section = config.get("generator", {})
    if not isinstance(section, dict):
        raise InputError("config key 'generator' must be an object")
    fields = {f for f in GeneratorParams.__dataclass_fields__}
    unknown = set(section) - fields
    if unknown:
        raise InputError(f"unknown generator parameter: {sorted(unknown)[0]}")
    merged = dict(section)
    if "epoch" in merged:
        epoch = merged["epoch"]
        if not (isinstance(epoch, (list, tuple)) and len(epoch) == 2):
            raise InputError("generator parameter epoch must be a [start, end] pair")
        merged["epoch"] = (int(epoch[0]), int(epoch[1]))
    if args.seed is not None:
        merged["seed"] = args.seed
    try:
        params = GeneratorParams(**merged)
    except TypeError as exc:
        raise InputError(f"bad generator parameters: {exc}") from exc
    out = Path(_pick(args.out_dir, config, "out_dir", "."))
    result = generate_corpus(params, out)
    gt = result.ground_truth
    logger.info("synthetic corpus written to %s (%d articles, %d links)",
                out, len(gt.papers), len(gt.links))
    return EXIT_OK


def cmd_aging(args, config: dict) -> int:
    corpus = _load_inputs(args, config)
    table, resolved = _pipeline(args, config, corpus)
    options = _counting_options(args, config)
    out = _out_dir(args, config)
    if args.journal is not None and args.journal not in corpus.journals:
        raise AnalysisError(f"unknown journal: {args.journal}")
    _emit_aging(corpus, table, resolved, options, config, out,
                class_label=args.citation_class
                or str(config.get("citation_class", "3-6")),
                horizon=int(_pick(args.horizon, config, "horizon_months",
                                  DEFAULT_HORIZON_MONTHS)),
                journal=args.journal)
    return EXIT_OK


def cmd_authors(args, config: dict) -> int:
    corpus = _load_inputs(args, config)
    table, resolved = _pipeline(args, config, corpus)
    options = _counting_options(args, config)
    out = _out_dir(args, config)
    journal = args.journal or config.get("journal") or _default_journal(corpus, table)
    if journal is None:
        raise AnalysisError("no deposited papers in any journal; nothing to analyze")
    _emit_authors(corpus, table, resolved, options, out, journal,
                  _focus_window(args, config), _threshold(args, config),
                  table2_journals=[journal])
    return EXIT_OK


def cmd_validate(args, config: dict) -> int:
    corpus = _load_inputs(args, config)
    report = corpus.load_report
    print(f"articles:  {len(corpus.articles)}")
    print(f"preprints: {len(corpus.preprints)}")
    print(f"citations: {len(corpus.citations)}")
    print(f"journals:  {len(corpus.journals)}")
    print(f"epoch:     {corpus.epoch[0]}-{corpus.epoch[1]}")
    print(f"rejected lines: {len(report.rejected)}")
    for label, lineno, reason in report.rejected[:20]:
        print(f"  {label}:{lineno}: {reason}")
    if len(report.rejected) > 20:
        print(f"  ... and {len(report.rejected) - 20} more")
    return EXIT_OK


# ----------------------------------------------------------------- parser ---


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="JSON", help="config file; flags override it")
    common.add_argument("--out-dir", metavar="DIR", help="directory for report files")
    common.add_argument("--seed", type=int, help="generator seed (synth)")
    common.add_argument("--include-preprint-cites", action=argparse.BooleanOptionalAction,
                        default=None, help="count citations to the preprint version (default: on)")
    common.add_argument("--exclude-self-cites", action=argparse.BooleanOptionalAction,
                        default=None, help="drop byline-overlap citations (default: on)")
    common.add_argument("--window", metavar="SPEC",
                        help="analysis window, e.g. 1-3 or thru2005 (default: 1-3)")
    common.add_argument("--threshold", type=int, metavar="N",
                        help="author productivity threshold (min non-deposited papers)")
    common.add_argument("--corpus-dir", metavar="DIR",
                        help="directory holding articles/preprints/citations JSONL files")
    common.add_argument("--articles", metavar="PATH")
    common.add_argument("--preprints", metavar="PATH")
    common.add_argument("--citations", metavar="PATH")
    common.add_argument("--journal", metavar="ID", help="restrict analysis to one journal")
    common.add_argument("-v", "--verbose", action="store_true", help="info-level logging")

    parser = argparse.ArgumentParser(
        prog="cidlab",
        description="Preprint/article linkage and citation-impact analysis toolkit.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("link", parents=[common],
                   help="build the link table and linkage stats").set_defaults(func=cmd_link)
    sub.add_parser("analyze", parents=[common],
                   help="emit all report files").set_defaults(func=cmd_analyze)
    sub.add_parser("synth", parents=[common],
                   help="generate a synthetic corpus").set_defaults(func=cmd_synth)
    aging = sub.add_parser("aging", parents=[common], help="age curves and lag estimate")
    aging.add_argument("--citation-class", metavar="LABEL",
                       help="citedness class for the curves (default: 3-6)")
    aging.add_argument("--horizon", type=int, metavar="MONTHS",
                       help="age-curve horizon in months (default: 84)")
    aging.set_defaults(func=cmd_aging)
    sub.add_parser("authors", parents=[common],
                   help="author-level analyses for one journal").set_defaults(func=cmd_authors)
    sub.add_parser("validate", parents=[common],
                   help="load and sanity-check corpus files").set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = _read_config(args.config)
        return args.func(args, config)
    except InputError as exc:
        print(f"cidlab: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GeneratorParamError as exc:
        print(f"cidlab: invalid generator parameter {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AnalysisError as exc:
        print(f"cidlab: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    except CorpusError as exc:
        print(f"cidlab: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"cidlab: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
