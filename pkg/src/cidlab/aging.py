"""Citation aging: monthly age curves, smoothing, translation, lag estimation.

A citation's age is the whole-month distance from the date of the cited
version (deposit date for preprint-version citations, index entry date for
journal-version citations) to the citing article's index date.  Curves are
normalized per paper so deposited and non-deposited sets of different sizes
compare directly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from cidlab.corpus import YearMonth, months_between
from cidlab.linkage import ResolvedCitations
from cidlab.metrics import CountingOptions, _event_counts

logger = logging.getLogger(__name__)

DEFAULT_HORIZON_MONTHS = 84
DEFAULT_LAG_SEARCH = range(0, 25)
DEFAULT_COMPARE_MONTHS = 24


@dataclass(frozen=True)
class CitationClass:
    """A total-citation-frequency band; upper=None means unbounded above."""

    lower: int
    upper: int | None

    def contains(self, n: int) -> bool:
        if n < self.lower:
            return False
        return self.upper is None or n <= self.upper

    @property
    def label(self) -> str:
        return f"{self.lower}-{self.upper}" if self.upper is not None else f">{self.lower - 1}"


DEFAULT_CLASSES = (
    CitationClass(1, 2),
    CitationClass(3, 6),
    CitationClass(7, 18),
    CitationClass(19, None),
)


def class_by_label(label: str, classes: tuple[CitationClass, ...] = DEFAULT_CLASSES) -> CitationClass:
    for c in classes:
        if c.label == label:
            return c
    raise ValueError(f"unknown citation class {label!r}; options: "
                     + ", ".join(c.label for c in classes))


def fully_observed_papers(
    paper_set: set[str],
    corpus,
    link_table,
    horizon_months: int = DEFAULT_HORIZON_MONTHS,
    options: CountingOptions | None = None,
) -> set[str]:
    """Papers whose availability date leaves >= horizon_months of observation
    before the corpus epoch ends.

    Age curves over a mixed-cohort corpus are right-truncated: papers
    available late can only ever show young citations, which both deforms the
    curve tail and couples a paper's observable citedness to its age.  Curve
    comparisons therefore restrict to the cohort old enough to be followed
    for the whole horizon.
    """
    from cidlab.metrics import cited_effective_date

    epoch_end = corpus.epoch[1] * 12 + 11
    return {
        p for p in paper_set
        if cited_effective_date(p, corpus, link_table, options).absolute()
        + horizon_months <= epoch_end
    }


def classify_by_citation_count(
    paper_set: set[str],
    resolved: ResolvedCitations,
    date_range: tuple[YearMonth, YearMonth] | None = None,
    options: CountingOptions | None = None,
    classes: tuple[CitationClass, ...] = DEFAULT_CLASSES,
) -> dict[str, CitationClass]:
    """Assign papers to citation-frequency classes by total qualifying citations.

    Counts citations dated within date_range (whole corpus epoch when None).
    Uncited papers are left out of the mapping entirely.
    """
    options = options or CountingOptions()
    if date_range is not None:
        lo, hi = date_range
        if lo > hi:
            raise ValueError("empty date range")
    assignment: dict[str, CitationClass] = {}
    for article_id in paper_set:
        n = 0
        for event in resolved.article_events.get(article_id, ()):
            if not _event_counts(event, options):
                continue
            if date_range is not None and not (lo <= event.citation_date <= hi):
                continue
            n += 1
        if n == 0:
            continue
        for c in classes:
            if c.contains(n):
                assignment[article_id] = c
                break
    return assignment


@dataclass
class AgeCurve:
    """Cites-per-paper by age month; values has exactly horizon entries."""

    values: list[float]
    n_papers: int
    label: str = ""
    dropped_beyond_horizon: int = 0
    dropped_negative_age: int = 0

    @property
    def horizon(self) -> int:
        return len(self.values)

    @property
    def total_mass(self) -> float:
        return sum(self.values)


def age_histogram(
    paper_set: set[str],
    resolved: ResolvedCitations,
    options: CountingOptions | None = None,
    horizon_months: int = DEFAULT_HORIZON_MONTHS,
    label: str = "",
) -> AgeCurve:
    """Per-paper monthly citation-age histogram over [0, horizon) months.

    Citations aged past the horizon (or, in dirty data, before the cited
    version's date) are dropped and tallied, never silently lost.
    """
    options = options or CountingOptions()
    if horizon_months < 1:
        raise ValueError("horizon_months must be >= 1")
    if not paper_set:
        raise ValueError("empty paper set")
    bins = [0] * horizon_months
    beyond = 0
    negative = 0
    for article_id in paper_set:
        for event in resolved.article_events.get(article_id, ()):
            if not _event_counts(event, options):
                continue
            age = months_between(event.citation_date, event.effective_cited_date)
            if age < 0:
                negative += 1
            elif age >= horizon_months:
                beyond += 1
            else:
                bins[age] += 1
    n = len(paper_set)
    return AgeCurve(
        values=[b / n for b in bins],
        n_papers=n,
        label=label,
        dropped_beyond_horizon=beyond,
        dropped_negative_age=negative,
    )


# ---------------------------------------------------------- curve algebra --


def moving_average(values: list[float], window: int = 3) -> list[float]:
    """Centered moving average; boundary windows shrink to what is available.

    [0, 3, 0] with window 3 -> [1.5, 1.0, 1.5]; window 1 is the identity.
    """
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be a positive odd integer")
    half = window // 2
    n = len(values)
    out: list[float] = []
    for i in range(n):
        lo = max(0, i - half)
        hi = min(n, i + half + 1)
        out.append(sum(values[lo:hi]) / (hi - lo))
    return out


def translate_curve(values: list[float], shift: int) -> list[float]:
    """Shift a curve right by whole months, zero-filling the opened prefix.

    Output keeps the input length (the tail truncates); index shift+i holds
    input index i.
    """
    if shift < 0:
        raise ValueError("shift must be >= 0")
    n = len(values)
    out = [0.0] * n
    for i in range(n - shift):
        out[i + shift] = values[i]
    return out


def curve_distance(
    a: list[float],
    b: list[float],
    compare_range: range | None = None,
    metric: str = "rms",
) -> float:
    """Pointwise curve distance over compare_range (full overlap when None)."""
    limit = min(len(a), len(b))
    indices = compare_range if compare_range is not None else range(limit)
    diffs = [a[i] - b[i] for i in indices if 0 <= i < limit]
    if not diffs:
        raise ValueError("empty comparison range")
    if metric == "rms":
        return math.sqrt(sum(d * d for d in diffs) / len(diffs))
    if metric == "mean_abs":
        return sum(abs(d) for d in diffs) / len(diffs)
    raise ValueError(f"unknown metric {metric!r}")


@dataclass(frozen=True)
class LagEstimate:
    lag_months: int
    distance_at_min: float
    search_range: tuple[int, int]  # inclusive bounds searched


def estimate_lag(
    deposited_curve: list[float],
    nondeposited_curve: list[float],
    search_range: range = DEFAULT_LAG_SEARCH,
    compare_months: int = DEFAULT_COMPARE_MONTHS,
    anchor: str = "post_shift",
    metric: str = "rms",
) -> LagEstimate:
    """Shift minimizing the distance between the translated deposited curve
    and the non-deposited curve; ties resolve to the smaller shift.

    anchor selects where the comparison window starts: at the shift itself
    ("post_shift", the default) or at month zero ("origin").
    """
    if sum(deposited_curve) == 0 or sum(nondeposited_curve) == 0:
        raise ValueError("cannot estimate lag from an all-zero curve")
    if anchor not in ("post_shift", "origin"):
        raise ValueError(f"unknown anchor {anchor!r}")
    limit = min(len(deposited_curve), len(nondeposited_curve))
    best_shift: int | None = None
    best_distance = math.inf
    for shift in search_range:
        if shift < 0:
            raise ValueError("search range must be non-negative")
        start = shift if anchor == "post_shift" else 0
        window = range(start, min(start + compare_months, limit))
        if not window:
            continue
        shifted = translate_curve(deposited_curve, shift)
        d = curve_distance(shifted, nondeposited_curve, window, metric)
        if d < best_distance:
            best_distance = d
            best_shift = shift
    if best_shift is None:
        raise ValueError("search range produced no valid comparison window")
    return LagEstimate(
        lag_months=best_shift,
        distance_at_min=best_distance,
        search_range=(min(search_range), max(search_range)),
    )
