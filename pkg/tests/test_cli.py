"""Command-line behaviour: exit codes, emitted files, config precedence."""

from __future__ import annotations

import json

import pytest

from cidlab import __version__
from cidlab.cli import EXIT_ANALYSIS, EXIT_INPUT, EXIT_OK, InputError, main, parse_window
from cidlab.reports import AGING_HEADER, LINKS_HEADER, TABLE1_HEADER, TABLE2_HEADER

from conftest import article, citation, preprint, write_jsonl_fixture


# ------------------------------------------------------------------ helpers


def _demo_corpus(write):
    """Four articles, one linkable preprint, one stray preprint, three cites.

    The deposited paper a1 collects one citation to the journal version
    (age 2 months from its index date) and one to the preprint version
    (age 2 months from its deposit date); the non-deposited a2 collects a
    single citation at age 3 months.  Citing articles live in a separate
    journal so jphys is the only journal with any deposits.
    """
    articles = [
        article("a1", title="Spectral gaps in layered crystal lattices",
                byline=("Smith, J.",), pub_year=1994, index_entry_date="1994-03"),
        article("a2", title="Counting arguments for sparse graph families",
                byline=("Ng, A.",), pub_year=1994, index_entry_date="1994-02"),
        article("c1", journal="jcite", title="A survey of recent developments",
                byline=("Park, H.",), pub_year=1994, index_entry_date="1994-04"),
        article("c2", journal="jcite", title="Methods for comparative analysis",
                byline=("Lee, B.",), pub_year=1993, index_entry_date="1993-10"),
    ]
    preprints = [
        preprint("pre/9309001", title="Spectral gaps in layered crystal lattices",
                 first_author="Smith, J.", deposit_date="1993-09"),
        preprint("pre/9501002", title="Wholly unrelated musings tonight",
                 first_author="Zu, Q.", deposit_date="1995-01"),
    ]
    citations = [
        citation("c1", "a1", "1994-05"),
        citation("c1", "a2", "1994-05"),
        citation("c2", "smith:pre/9309001", "1993-11", kind="preprint_key"),
    ]
    return write(articles, preprints, citations)


@pytest.fixture(scope="module")
def synth_root(tmp_path_factory):
    """A small generated corpus, built through the CLI itself."""
    root = tmp_path_factory.mktemp("cli-synth")
    cfg = root / "generator.json"
    cfg.write_text(json.dumps(
        {"generator": {"n_journals": 2, "papers_per_journal": 600, "seed": 5}}
    ))
    assert main(["synth", "--config", str(cfg), "--out-dir", str(root / "corpus")]) == EXIT_OK
    return root / "corpus"


# ------------------------------------------------------------ parse_window


@pytest.mark.parametrize("text,bounds", [
    ("1-3", (0, 35)),
    ("4-6", (36, 71)),
    ("1-1", (0, 11)),
])
def test_parse_window_fixed(text, bounds):
    spec = parse_window(text)
    assert spec.label == text
    assert spec.month_bounds == bounds


def test_parse_window_variable():
    spec = parse_window("thru1997")
    assert spec.label == "thru1997"
    assert spec.horizon_year == 1997


@pytest.mark.parametrize("text", ["banana", "6-4", "0-3", "thruXY", "1-3-5", ""])
def test_parse_window_rejects(text):
    with pytest.raises(InputError):
        parse_window(text)


# ---------------------------------------------------------------- plumbing


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert f"cidlab {__version__}" in capsys.readouterr().out


def test_missing_input_file(tmp_path, capsys):
    assert main(["link", "--corpus-dir", str(tmp_path)]) == EXIT_INPUT
    assert "articles file not found" in capsys.readouterr().err


@pytest.mark.parametrize("payload", [None, "{nope", "[1, 2]"])
def test_config_errors(tmp_path, capsys, payload):
    cfg = tmp_path / "cfg.json"
    if payload is not None:
        cfg.write_text(payload)
    assert main(["link", "--config", str(cfg)]) == EXIT_INPUT
    assert capsys.readouterr().err.startswith("cidlab:")


def test_schema_header_rejection(tmp_path, capsys):
    (tmp_path / "articles.jsonl").write_text("#schema=other-v9\n")
    write_jsonl_fixture(tmp_path / "preprints.jsonl", [])
    write_jsonl_fixture(tmp_path / "citations.jsonl", [])
    assert main(["validate", "--corpus-dir", str(tmp_path)]) == EXIT_INPUT
    assert capsys.readouterr().err.startswith("cidlab:")


# -------------------------------------------------------------------- link


def test_link_outputs(corpus_files, tmp_path):
    articles, preprints_path, citations = _demo_corpus(corpus_files)
    out = tmp_path / "out"
    rc = main([
        "link",
        "--articles", str(articles),
        "--preprints", str(preprints_path),
        "--citations", str(citations),
        "--out-dir", str(out),
    ])
    assert rc == EXIT_OK

    lines = (out / "link_table.tsv").read_text().splitlines()
    assert lines[0] == LINKS_HEADER
    assert lines[1:] == ["pre/9309001\ta1\tauthor_title\t1.0000\t6"]

    stats = json.loads((out / "linkage_stats.json").read_text())
    assert stats == {
        "n_preprints": 2,
        "n_linked": 1,
        "linked_fraction": 0.5,
        "median_lag_months": 6,
        "per_method_counts": {"author_title": 1},
    }


# ----------------------------------------------------------------- analyze


def test_analyze_sparse_fixture_degrades_gracefully(corpus_files, tmp_path):
    """Reports that cannot be computed are skipped, not fatal."""
    _demo_corpus(corpus_files)
    out = tmp_path / "out"
    assert main(["analyze", "--corpus-dir", str(tmp_path), "--out-dir", str(out)]) == EXIT_OK

    for name in ("link_table.tsv", "table1.tsv", "fig1.tsv",
                 "table2.tsv", "fig4.tsv", "fig6.tsv", "coauthor.tsv"):
        assert (out / name).is_file(), name
    # citation class 3-6 is unpopulated here, so the aging pair is skipped
    assert not (out / "fig2.tsv").exists()

    lines = (out / "table1.tsv").read_text().splitlines()
    assert lines[0] == TABLE1_HEADER
    assert [row.split("\t")[0] for row in lines[1:]] == ["jphys", "ALL"]


def test_analyze_report_selection(corpus_files, tmp_path):
    _demo_corpus(corpus_files)
    out = tmp_path / "out"
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"reports": ["table1"], "out_dir": str(out)}))
    assert main(["analyze", "--corpus-dir", str(tmp_path), "--config", str(cfg)]) == EXIT_OK
    assert [p.name for p in out.iterdir()] == ["table1.tsv"]


def test_analyze_unknown_report(corpus_files, tmp_path, capsys):
    _demo_corpus(corpus_files)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"reports": ["table9"]}))
    rc = main(["analyze", "--corpus-dir", str(tmp_path), "--config", str(cfg),
               "--out-dir", str(tmp_path / "out")])
    assert rc == EXIT_INPUT
    assert "unknown report selection: table9" in capsys.readouterr().err


def test_preprint_cite_toggle_changes_table1(corpus_files, tmp_path):
    """Dropping preprint-version citations halves a1's count: CID 66.7 -> 0."""
    _demo_corpus(corpus_files)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"reports": ["table1"]}))

    def run(out_name, *extra):
        out = tmp_path / out_name
        rc = main(["analyze", "--corpus-dir", str(tmp_path), "--config", str(cfg),
                   "--out-dir", str(out), *extra])
        assert rc == EXIT_OK
        lines = (out / "table1.tsv").read_text().splitlines()
        return dict(zip(lines[0].split("\t"), lines[1].split("\t")))

    with_pp = run("out-default")
    without_pp = run("out-strict", "--no-include-preprint-cites")
    assert with_pp["cid_w1"] == "66.7"
    assert without_pp["cid_w1"] == "0.0"


def test_analyze_reruns_are_byte_identical(synth_root, tmp_path):
    outs = []
    for name in ("first", "second"):
        out = tmp_path / name
        assert main(["analyze", "--corpus-dir", str(synth_root),
                     "--out-dir", str(out)]) == EXIT_OK
        outs.append(out)
    names = sorted(p.name for p in outs[0].iterdir())
    assert names == sorted(p.name for p in outs[1].iterdir())
    assert "fig2.tsv" in names and "table2.tsv" in names
    for name in names:
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes(), name


# ------------------------------------------------------------------- synth


def test_synth_seed_flag_overrides_config(tmp_path):
    def run(seed_in_config, out_name, *extra):
        cfg = tmp_path / f"{out_name}.json"
        cfg.write_text(json.dumps({"generator": {
            "n_journals": 2, "papers_per_journal": 80, "seed": seed_in_config,
        }}))
        out = tmp_path / out_name
        assert main(["synth", "--config", str(cfg), "--out-dir", str(out), *extra]) == EXIT_OK
        return out

    baseline = run(5, "from-config")
    overridden = run(99, "from-flag", "--seed", "5")
    for name in ("articles.jsonl", "preprints.jsonl", "citations.jsonl", "ground_truth.json"):
        assert (baseline / name).read_bytes() == (overridden / name).read_bytes(), name


@pytest.mark.parametrize("generator,fragment", [
    ({"n_journal": 2}, "unknown generator parameter"),
    ({"epoch": [1992]}, "must be a [start, end] pair"),
    ({"epoch": [2005, 1992]}, "invalid generator parameter"),
    ({"lag_months": -3}, "invalid generator parameter"),
    ([1, 2], "must be an object"),
])
def test_synth_rejects_bad_config(tmp_path, capsys, generator, fragment):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"generator": generator}))
    rc = main(["synth", "--config", str(cfg), "--out-dir", str(tmp_path / "corpus")])
    assert rc == EXIT_INPUT
    assert fragment in capsys.readouterr().err


# ------------------------------------------------------------------- aging


def test_aging_outputs(synth_root, tmp_path):
    out = tmp_path / "out"
    rc = main(["aging", "--corpus-dir", str(synth_root), "--out-dir", str(out),
               "--citation-class", "1-2", "--horizon", "60"])
    assert rc == EXIT_OK

    fig2 = (out / "fig2.tsv").read_text().splitlines()
    assert fig2[0] == AGING_HEADER
    assert len(fig2) == 1 + 60  # one row per month of age
    assert (out / "fig3.tsv").is_file()

    estimate = json.loads((out / "lag_estimate.json").read_text())
    assert sorted(estimate) == ["distance_at_min", "lag_months", "search_range"]
    assert estimate["search_range"] == [0, 24]
    lo, hi = estimate["search_range"]
    assert lo <= estimate["lag_months"] <= hi


def test_aging_unknown_journal(synth_root, tmp_path, capsys):
    rc = main(["aging", "--corpus-dir", str(synth_root),
               "--out-dir", str(tmp_path), "--journal", "nosuch"])
    assert rc == EXIT_ANALYSIS
    assert "unknown journal: nosuch" in capsys.readouterr().err


def test_aging_bad_citation_class(synth_root, tmp_path, capsys):
    rc = main(["aging", "--corpus-dir", str(synth_root),
               "--out-dir", str(tmp_path), "--citation-class", "2-5"])
    assert rc == EXIT_INPUT
    assert "unknown citation class" in capsys.readouterr().err


def test_aging_bad_horizon(synth_root, tmp_path, capsys):
    rc = main(["aging", "--corpus-dir", str(synth_root),
               "--out-dir", str(tmp_path), "--horizon", "0"])
    assert rc == EXIT_INPUT
    assert "horizon must be >= 1" in capsys.readouterr().err


# ----------------------------------------------------------------- authors


def test_authors_default_journal(synth_root, tmp_path):
    out = tmp_path / "out"
    assert main(["authors", "--corpus-dir", str(synth_root), "--out-dir", str(out)]) == EXIT_OK
    for name in ("table2.tsv", "fig4.tsv", "fig6.tsv", "coauthor.tsv"):
        assert (out / name).is_file(), name
    lines = (out / "table2.tsv").read_text().splitlines()
    assert lines[0] == TABLE2_HEADER
    assert len(lines) == 1 + 4  # one journal x two windows x two thresholds


def test_authors_unknown_journal(synth_root, tmp_path, capsys):
    rc = main(["authors", "--corpus-dir", str(synth_root),
               "--out-dir", str(tmp_path), "--journal", "nosuch"])
    assert rc == EXIT_ANALYSIS
    assert "unknown journal: nosuch" in capsys.readouterr().err


def test_authors_flag_validation(corpus_files, tmp_path, capsys):
    _demo_corpus(corpus_files)
    base = ["authors", "--corpus-dir", str(tmp_path), "--out-dir", str(tmp_path / "out")]
    assert main(base + ["--window", "nope"]) == EXIT_INPUT
    assert "window must look like" in capsys.readouterr().err
    assert main(base + ["--threshold", "0"]) == EXIT_INPUT
    assert "threshold must be >= 1" in capsys.readouterr().err


# ---------------------------------------------------------------- validate


def test_validate_prints_counts(synth_root, capsys):
    assert main(["validate", "--corpus-dir", str(synth_root)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "articles:  1200" in out
    assert "rejected lines: 0" in out
