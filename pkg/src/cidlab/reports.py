"""Tab-separated and JSON report emitters.

Every writer is atomic (temp file + rename), emits a fixed header line, and
formats numbers deterministically so reruns on the same inputs are
byte-identical.  Percentages, differential indices, and impact ratios are
rendered with one decimal; per-paper citation rates and match scores with
four; p-values with six significant digits; missing values as ``NA``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from cidlab.aging import AgeCurve, LagEstimate, moving_average, translate_curve
from cidlab.authors import CidHistogram, CoauthorReport, MedianCidReport, QuartileDistribution
from cidlab.corpus import Corpus
from cidlab.linkage import LinkageStats, LinkTable, link_lag_months
from cidlab.metrics import CidReport, YearSeriesRow

TABLE1_HEADER = ("journal\tn_pubs\tpct_deposited\tshare_of_deposited\t"
                 "cid_w1\tcid_w2\tir_w1\tir_w2\tabs_decline\trel_decline")
TABLE2_HEADER = "journal\twindow\tthreshold\tN\tmedian_cid\tp\tsignificant"
FIG1_HEADER = "pub_year\tcid\tir\tcpp_a\tcpp_na"
AGING_HEADER = ("month_index\tcites_per_paper_deposited\tcites_per_paper_nondeposited\t"
                "cites_per_paper_deposited_smoothed\tcites_per_paper_nondeposited_smoothed")
QUARTILE_HEADER = "quartile\tpct_deposited\tpct_nondeposited"
COAUTHOR_HEADER = "class\tfraction_dep\tfraction_nondep\tcpp_dep\tcpp_nondep"
LINKS_HEADER = "preprint_id\tarticle_id\tmethod\tscore\tlag_months"

NA = "NA"


# -------------------------------------------------------------- formatting ---


def _f1(value: float | None) -> str:
    return NA if value is None else f"{value:.1f}"


def _f4(value: float | None) -> str:
    return NA if value is None else f"{value:.4f}"


def _fp(value: float | None) -> str:
    return NA if value is None else f"{value:.6g}"


def write_rows(path: str | Path, header: str, rows: Iterable[Iterable[str]]) -> Path:
    """Atomic TSV write: header line, then one tab-joined line per row."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write("\t".join(row) + "\n")
    tmp.replace(path)
    return path


def write_json(path: str | Path, payload: dict) -> Path:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    tmp.replace(path)
    return path


# ---------------------------------------------------------------- emitters ---


def table1_tsv(report: CidReport, path: str | Path) -> Path:
    rows = (
        (
            row.journal,
            str(row.n_pubs),
            _f1(row.pct_deposited),
            _f1(row.share_of_deposited),
            _f1(row.cid_w1),
            _f1(row.cid_w2),
            _f1(row.ir_w1),
            _f1(row.ir_w2),
            _f1(row.abs_decline),
            _f1(row.rel_decline),
        )
        for row in report.rows
    )
    return write_rows(path, TABLE1_HEADER, rows)


def table2_tsv(reports: list[MedianCidReport], path: str | Path) -> Path:
    rows = (
        (
            r.journal,
            r.window_label,
            r.threshold_label,
            str(r.n_authors),
            _f1(r.median_cid),
            _fp(r.sign_test_p),
            "yes" if r.significant_at_0_01 else "no",
        )
        for r in reports
    )
    return write_rows(path, TABLE2_HEADER, rows)


def year_series_tsv(series: list[YearSeriesRow], path: str | Path) -> Path:
    rows = (
        (str(r.pub_year), _f1(r.cid), _f1(r.ir), _f4(r.cpp_a), _f4(r.cpp_na))
        for r in series
    )
    return write_rows(path, FIG1_HEADER, rows)


def aging_tsv(
    deposited: AgeCurve,
    nondeposited: AgeCurve,
    path: str | Path,
    smooth_window: int = 3,
    shift: int = 0,
) -> Path:
    """Monthly age curves plus smoothed companions.

    With ``shift`` > 0 the deposited columns are translated right by that many
    months (zero-filling the opened prefix), which realigns an
    early-availability curve with the journal-dated one.
    """
    dep_raw = list(deposited.values)
    nondep_raw = list(nondeposited.values)
    dep_smooth = moving_average(dep_raw, smooth_window)
    nondep_smooth = moving_average(nondep_raw, smooth_window)
    if shift:
        dep_raw = translate_curve(dep_raw, shift)
        dep_smooth = translate_curve(dep_smooth, shift)
    n = min(len(dep_raw), len(nondep_raw))
    rows = (
        (str(m), _f4(dep_raw[m]), _f4(nondep_raw[m]), _f4(dep_smooth[m]), _f4(nondep_smooth[m]))
        for m in range(n)
    )
    return write_rows(path, AGING_HEADER, rows)


def quartile_tsv(dist: QuartileDistribution, path: str | Path) -> Path:
    rows = (
        (
            f"Q{q}",
            _f1(dist.pct_deposited.get(q, 0.0)),
            _f1(dist.pct_nondeposited.get(q, 0.0)),
        )
        for q in sorted(dist.pct_deposited.keys() | dist.pct_nondeposited.keys())
    )
    return write_rows(path, QUARTILE_HEADER, rows)


def cid_histogram_tsv(histograms: dict[str, CidHistogram], path: str | Path) -> Path:
    """Wide table: one midpoint column, then one count column per journal
    (journals in lexicographic order).  All histograms must share binning."""
    if not histograms:
        raise ValueError("no histograms to write")
    journals = sorted(histograms)
    midpoints = histograms[journals[0]].midpoints
    for journal in journals[1:]:
        if histograms[journal].midpoints != midpoints:
            raise ValueError("histogram binning differs between journals")
    header = "bin_midpoint\t" + "\t".join(journals)
    rows = (
        (_f1(mid), *(str(histograms[j].counts[i]) for j in journals))
        for i, mid in enumerate(midpoints)
    )
    return write_rows(path, header, rows)


def coauthor_tsv(report: CoauthorReport, path: str | Path) -> Path:
    rows = (
        (
            row.coauthor_class,
            _f4(row.fraction_deposited),
            _f4(row.fraction_nondeposited),
            _f4(row.cpp_deposited),
            _f4(row.cpp_nondeposited),
        )
        for row in report.rows
    )
    return write_rows(path, COAUTHOR_HEADER, rows)


def link_table_tsv(table: LinkTable, corpus: Corpus, path: str | Path) -> Path:
    rows = (
        (
            link.preprint_id,
            link.article_id,
            link.method,
            _f4(link.score),
            str(link_lag_months(link, corpus)),
        )
        for link in table.links
    )
    return write_rows(path, LINKS_HEADER, rows)


def lag_estimate_json(estimate: LagEstimate, path: str | Path) -> Path:
    return write_json(
        path,
        {
            "lag_months": estimate.lag_months,
            "distance_at_min": estimate.distance_at_min,
            "search_range": list(estimate.search_range),
        },
    )


def linkage_stats_json(stats: LinkageStats, path: str | Path) -> Path:
    return write_json(
        path,
        {
            "n_preprints": stats.n_preprints,
            "n_linked": stats.n_linked,
            "linked_fraction": stats.linked_fraction,
            "median_lag_months": stats.median_lag_months,
            "per_method_counts": stats.per_method_counts,
        },
    )
