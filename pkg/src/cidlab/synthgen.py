"""Seeded synthetic-corpus generator with ground-truth oracles.

The generative model, in draw order (the order is part of the determinism
contract: one seed, one byte-identical corpus):

* authors carry a latent quality score z ~ Normal(0, quality_spread),
  quality q = exp(z); prolific (lead) authorship is sampled with weight
  q**productivity_skew; coauthorship is assortative: each extra byline slot
  is filled from the lead's quality neighbourhood (a Gaussian in
  quality-rank space with std coauthor_homophily*pool), so research groups
  are quality-homogeneous and an author's coauthored papers carry nearly
  the same latent quality as the papers they lead;
* each paper's deposit decision is a logistic in the lead author's score:
  p = sigmoid(logit(base_deposit_rate) + deposit_bias*z_lead [+ trend]);
  deposited papers appear in the repository lag ~ round(N(lag_months,
  jitter)) months before their journal index date;
* citations arrive as a Poisson process with per-paper expected total
  base_citation_rate * q_lead * (1 + oa_boost if deposited) and gamma-shaped
  ages peaking near obsolescence_peak_month;
* early availability changes *when* a deposited paper's citations happen,
  never how many are drawn: ages below 36 months run on the deposit clock
  (the preprint is what early readers saw, so the young part of the age
  curve is the non-deposited curve shifted left by the lag), ages of 36
  months and beyond run on the journal index clock (by then the published
  version is what everyone cites, so years 4-6 are undistorted); most
  would-be pre-publication citers wait for the journal version
  (preprint_phase_rate keep their early date, the rest re-draw a
  post-publication age), and just enough of the beyond-72-month tail is
  re-timed into the months directly below the clock switch to keep the
  early block an exact translation (readers who would have found the paper
  very late found the preprint early instead);
* arrivals before the journal version exists cite the preprint match-key,
  later deposit-clock arrivals occasionally do, index-clock arrivals always
  cite the journal version;
* every citation is issued by a real corpus article indexed in the arrival
  month, so the citing-side referential invariants hold by construction;
  a small fraction is forced to share the cited lead author to exercise
  self-citation handling.

Changing only lag_months moves dates but reuses the same count draws, so the
per-paper citation totals in the ground truth are lag-invariant.
"""

from __future__ import annotations

import json
import logging
import math
import statistics
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from cidlab.corpus import YearMonth, normalize_author_name, write_jsonl
from cidlab.linkage import STOPWORDS

logger = logging.getLogger(__name__)

_PARTICLE_CHOICES = ("van ", "de ", "von ", "van der ", "van den ")
_STOP_FILLERS = ("of", "in", "for", "with", "and", "from")

# Age boundaries of the deposited papers' citation-timing model: deposit-clock
# below the switch, index-clock above it, tail re-timing beyond the tail mark.
_SWITCH_MONTHS = 36
_TAIL_MONTHS = 72


class GeneratorParamError(ValueError):
    """Invalid or infeasible generator configuration; names the parameter."""

    def __init__(self, param: str, message: str) -> None:
        super().__init__(f"{param}: {message}")
        self.param = param


@dataclass(frozen=True)
class GeneratorParams:
    """Configuration for one synthetic corpus; defaults give the standard
    quality-biased corpus (deposit_bias > 0, 6-month lead time, no access
    boost, ~75% of preprints published, ~40% journal_ref coverage)."""

    seed: int = 0
    n_journals: int = 4
    papers_per_journal: int = 5000
    author_pool_size: int | None = None
    papers_per_author_mean: float = 18.0
    authors_per_paper_mean: float = 4.0
    quality_spread: float = 0.6
    base_deposit_rate: float = 0.25
    deposit_bias: float = 1.2
    deposit_rate_trend: float = 0.0  # logit drift per epoch year, optional knob
    lag_months: int = 6
    lag_jitter_months: float = 2.0
    oa_boost: float = 0.0
    obsolescence_peak_month: int = 24
    obsolescence_decay_rate: float = 1.0 / 18.0
    preprint_phase_rate: float = 0.25
    base_citation_rate: float = 10.0
    journal_ref_coverage: float = 0.4
    title_noise: float = 0.05
    published_fraction: float = 0.75
    self_citation_rate: float = 0.02
    post_pub_preprint_cite_rate: float = 0.10
    home_journal_affinity: float = 0.7
    productivity_skew: float = 1.0
    coauthor_homophily: float = 0.03
    epoch: tuple[int, int] = (1992, 2005)

    def validate(self) -> None:
        if self.epoch[1] < self.epoch[0]:
            raise GeneratorParamError("epoch", f"end {self.epoch[1]} before start {self.epoch[0]}")
        span_months = (self.epoch[1] - self.epoch[0] + 1) * 12
        if span_months <= self.lag_months:
            raise GeneratorParamError(
                "lag_months",
                f"epoch spans {span_months} months, shorter than the {self.lag_months}-month deposit lead",
            )
        if self.lag_months < 0:
            raise GeneratorParamError("lag_months", "must be >= 0")
        if self.n_journals < 1:
            raise GeneratorParamError("n_journals", "must be >= 1")
        if self.papers_per_journal < 1:
            raise GeneratorParamError("papers_per_journal", "must be >= 1")
        if self.author_pool_size is not None and self.author_pool_size < 1:
            raise GeneratorParamError("author_pool_size", "must be >= 1 when set")
        if self.papers_per_author_mean <= 0:
            raise GeneratorParamError("papers_per_author_mean", "must be > 0")
        if self.authors_per_paper_mean < 1:
            raise GeneratorParamError("authors_per_paper_mean", "must be >= 1")
        if self.quality_spread <= 0:
            raise GeneratorParamError("quality_spread", "must be > 0")
        if not 0.0 < self.base_deposit_rate < 1.0:
            raise GeneratorParamError("base_deposit_rate", "must be in (0, 1)")
        if not 0.0 < self.published_fraction <= 1.0:
            raise GeneratorParamError("published_fraction", "must be in (0, 1]")
        for name in ("journal_ref_coverage", "title_noise", "self_citation_rate",
                     "post_pub_preprint_cite_rate", "home_journal_affinity",
                     "preprint_phase_rate"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise GeneratorParamError(name, "must be in [0, 1]")
        if self.oa_boost < 0:
            raise GeneratorParamError("oa_boost", "must be >= 0")
        if self.lag_jitter_months < 0:
            raise GeneratorParamError("lag_jitter_months", "must be >= 0")
        if self.obsolescence_peak_month < 1:
            raise GeneratorParamError("obsolescence_peak_month", "must be >= 1")
        if self.obsolescence_decay_rate <= 0:
            raise GeneratorParamError("obsolescence_decay_rate", "must be > 0")
        if self.base_citation_rate <= 0:
            raise GeneratorParamError("base_citation_rate", "must be > 0")
        if not 0.0 < self.coauthor_homophily <= 1.0:
            raise GeneratorParamError("coauthor_homophily", "must be in (0, 1]")

    @property
    def n_papers(self) -> int:
        return self.n_journals * self.papers_per_journal

    @property
    def pool_size(self) -> int:
        if self.author_pool_size is not None:
            return self.author_pool_size
        derived = round(self.n_papers * self.authors_per_paper_mean / self.papers_per_author_mean)
        return max(derived, 10)

    @property
    def month_bounds(self) -> tuple[int, int]:
        return self.epoch[0] * 12, self.epoch[1] * 12 + 11


@dataclass
class GroundTruth:
    """Everything the generator knows that the pipeline must recover."""

    params: dict
    authors: list[dict]       # author_index, surname_key, initials, quality, home_journal
    papers: list[dict]        # article_id, journal, lead, deposited, true_lag,
                              # preprint_id, n_citations_drawn
    unpublished: list[dict]   # preprint_id, lead, n_citations_drawn
    links: list[list[str]]    # [preprint_id, article_id]
    dropped_citations: int = 0

    def link_set(self) -> set[tuple[str, str]]:
        return {(p, a) for p, a in self.links}


@dataclass(frozen=True)
class GenerationResult:
    paths: dict[str, Path]
    ground_truth: GroundTruth


# ------------------------------------------------------------ vocabulary ---


def _make_words(rng: np.random.Generator, count: int, taken: set[str]) -> list[str]:
    consonants = "bcdfghklmnprstvz"
    vowels = "aeiou"
    syllables = [c + v for c in consonants for v in vowels]
    words: list[str] = []
    while len(words) < count:
        n_syl = int(rng.integers(2, 4))
        idx = rng.integers(0, len(syllables), n_syl)
        word = "".join(syllables[i] for i in idx)
        if word in taken:
            continue
        taken.add(word)
        words.append(word)
    return words


def _render_author(surname_display: str, initials: str, style: int) -> str:
    dotted = ".".join(initials.upper()) + "."
    if style == 0:
        return f"{surname_display}, {dotted}"
    if style == 1:
        return f"{surname_display.upper()} {initials.upper()}"
    return f"{dotted} {surname_display}"


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-x))


# ------------------------------------------------------------- generator ---


def generate_corpus(params: GeneratorParams, out_dir: str | Path) -> GenerationResult:
    """Generate the three corpus files plus ground_truth.json under out_dir.

    Same params (including seed) produce byte-identical files.  Raises
    GeneratorParamError before touching the filesystem when infeasible.
    """
    params.validate()
    rng = np.random.default_rng(params.seed)
    out = Path(out_dir)
    n_papers = params.n_papers
    pool = params.pool_size
    m0, m1 = params.month_bounds

    # --- vocabulary and author pool -------------------------------------
    taken: set[str] = set(STOPWORDS)
    vocab = _make_words(rng, 3000, taken)
    surnames = _make_words(rng, max(400, pool // 5), taken)

    surname_idx = rng.integers(0, len(surnames), pool)
    has_particle = rng.random(pool) < 0.08
    particle_idx = rng.integers(0, len(_PARTICLE_CHOICES), pool)
    initial_count = np.where(rng.random(pool) < 0.6, 2, 1)
    initial_letters = rng.integers(0, 26, (pool, 2))
    z = rng.normal(0.0, params.quality_spread, pool)
    quality = np.exp(z)
    home_journal = rng.integers(0, params.n_journals, pool)

    alphabet = "abcdefghijklmnopqrstuvwxyz"
    author_display: list[str] = []
    author_initials: list[str] = []
    author_surname_key: list[str] = []
    for i in range(pool):
        base = surnames[surname_idx[i]].capitalize()
        particle = _PARTICLE_CHOICES[particle_idx[i]] if has_particle[i] else ""
        display = particle + base
        initials = "".join(alphabet[initial_letters[i, j]] for j in range(initial_count[i]))
        author_display.append(display)
        author_initials.append(initials)
        author_surname_key.append(particle.replace(" ", "") + base.lower())

    journal_ids = [f"synj{j:02d}" for j in range(params.n_journals)]
    journal_ref_names = [f"SynJ{j:02d}" for j in range(params.n_journals)]

    # --- papers ----------------------------------------------------------
    lead_weights = quality ** params.productivity_skew
    lead_weights /= lead_weights.sum()

    leads = rng.choice(pool, n_papers, p=lead_weights)
    use_home = rng.random(n_papers) < params.home_journal_affinity
    random_journal = rng.integers(0, params.n_journals, n_papers)
    paper_journal = np.where(use_home, home_journal[leads], random_journal)
    index_month = rng.integers(m0, m1 + 1, n_papers)

    # Coauthors come from the lead's research group: a Gaussian neighbourhood
    # in quality-rank space, so bylines are quality-homogeneous.
    z_order = np.argsort(z, kind="stable")
    z_rank = np.empty(pool, dtype=int)
    z_rank[z_order] = np.arange(pool)
    extra_counts = rng.poisson(max(params.authors_per_paper_mean - 1.0, 0.0), n_papers)
    n_extras = int(extra_counts.sum())
    rank_offsets = np.rint(
        rng.normal(0.0, params.coauthor_homophily * pool, n_extras)
    ).astype(int)
    extra_ranks = np.abs(np.repeat(z_rank[leads], extra_counts) + rank_offsets)
    extra_ranks = np.where(extra_ranks >= pool, 2 * (pool - 1) - extra_ranks, extra_ranks)
    extras_flat = z_order[np.clip(extra_ranks, 0, pool - 1)]
    bylines: list[list[int]] = []
    cursor = 0
    for i in range(n_papers):
        members = [int(leads[i])]
        seen = {int(leads[i])}
        for a in extras_flat[cursor:cursor + extra_counts[i]]:
            a = int(a)
            if a not in seen:
                seen.add(a)
                members.append(a)
        cursor += extra_counts[i]
        bylines.append(members)

    base_logit = math.log(params.base_deposit_rate / (1.0 - params.base_deposit_rate))
    year_offset = index_month // 12 - params.epoch[0]
    deposit_logit = (
        base_logit
        + params.deposit_bias * z[leads]
        + params.deposit_rate_trend * year_offset
    )
    deposited = rng.random(n_papers) < _sigmoid(deposit_logit)

    lag_draws = np.clip(np.rint(rng.normal(params.lag_months, params.lag_jitter_months, n_papers)), 0, 24)
    true_lag = lag_draws.astype(int)
    deposit_month = index_month - true_lag

    rate = params.base_citation_rate * quality[leads] * np.where(deposited, 1.0 + params.oa_boost, 1.0)
    n_cites = rng.poisson(rate)

    # --- unpublished preprints (deposits that never reach a journal) -----
    n_deposited = int(deposited.sum())
    n_unpub = round(n_deposited * (1.0 - params.published_fraction) / params.published_fraction)
    unpub_leads = rng.choice(pool, n_unpub, p=lead_weights) if n_unpub else np.empty(0, dtype=int)
    unpub_month = rng.integers(m0, m1 + 1, n_unpub) if n_unpub else np.empty(0, dtype=int)
    unpub_rate = params.base_citation_rate * quality[unpub_leads] * (1.0 + params.oa_boost)
    unpub_cites = rng.poisson(unpub_rate) if n_unpub else np.empty(0, dtype=int)

    # --- citation arrivals ------------------------------------------------
    # Draw order is lag-independent: counts, ages, and rolls are consumed for
    # every event regardless of which clock or channel ends up using them.
    gamma_shape = 1.0 + params.obsolescence_peak_month * params.obsolescence_decay_rate
    gamma_scale = 1.0 / params.obsolescence_decay_rate
    all_counts = np.concatenate([n_cites, unpub_cites]).astype(int)
    deposit_anchor = np.concatenate([deposit_month, unpub_month])
    index_anchor = np.concatenate([index_month, unpub_month])
    lag_ext = np.concatenate([true_lag, np.zeros(n_unpub, dtype=int)])
    total_events = int(all_counts.sum())
    ev_entity = np.repeat(np.arange(len(all_counts)), all_counts)
    ev_age = np.floor(rng.gamma(gamma_shape, gamma_scale, total_events)).astype(int)
    ev_postpub_roll = rng.random(total_events)
    ev_self_roll = rng.random(total_events)
    ev_wait_roll = rng.random(total_events)
    ev_waitpos_roll = rng.random(total_events)
    ev_pull_roll = rng.random(total_events)
    ev_fill_roll = rng.random(total_events)

    dep_ext = np.concatenate([deposited, np.zeros(n_unpub, dtype=bool)])
    unpub_ev = ev_entity >= n_papers
    dep_article_ev = dep_ext[ev_entity] & ~unpub_ev
    ev_lag = lag_ext[ev_entity]

    # Re-timing works off the pooled empirical age distribution (drawn ages
    # are iid across events, so ranks into the sorted draw double as an
    # inverse-CDF); rank[m] counts drawn ages <= m.
    sorted_ages = np.sort(ev_age)
    max_lag = int(lag_ext.max(initial=0))
    last_early = _SWITCH_MONTHS - 1  # oldest deposit-clock age
    rank = np.searchsorted(sorted_ages, np.arange(last_early + max_lag + 2), side="right")
    below_switch = int(rank[last_early])
    tail_count = total_events - int(np.searchsorted(sorted_ages, _TAIL_MONTHS, side="right"))
    direct_share = 1.0 - params.post_pub_preprint_cite_rate
    last_index = max(total_events - 1, 0)  # np.where evaluates picks eagerly

    # Most readers who meet a preprint before the journal version exists
    # defer their citation to the published article: only preprint_phase_rate
    # of the pre-publication events keep their drawn age, the rest re-draw
    # an age from the distribution restricted to (lag, 36) and arrive as
    # ordinary post-publication citations.
    wait_lo = rank[np.minimum(ev_lag, last_early)]
    wait_span = np.maximum(below_switch - wait_lo, 1)
    ev_waiting = (
        dep_article_ev & (ev_age < ev_lag)
        & (ev_wait_roll >= params.preprint_phase_rate)
        & (wait_lo < below_switch)
    )
    wait_pick = wait_lo + np.minimum((ev_waitpos_roll * wait_span).astype(int), wait_span - 1)
    wait_pick = np.minimum(wait_pick, last_index)

    # Direct citations of a deposited article at drawn ages in (36-lag, 36)
    # would need to have been deposit-clocked (the observed early block is
    # the age curve shifted left by the lag), but drawn ages stop switching
    # clocks at 36 - so that band of the observed axis is fed by the far
    # tail instead: each beyond-72 event is re-timed, with a probability
    # chosen so the re-timed mass equals exactly what the band would hold,
    # to an age sampled from the distribution restricted to (35, 35+lag].
    # Either way dates move; per-paper counts never change.
    band_hi = rank[last_early + ev_lag]
    band_span = np.maximum(band_hi - below_switch, 1)
    ev_pulled = (
        dep_article_ev & (ev_age > _TAIL_MONTHS)
        & (ev_pull_roll < direct_share * (band_hi - below_switch) / max(tail_count, 1))
    )
    fill_pick = below_switch + np.minimum((ev_fill_roll * band_span).astype(int), band_span - 1)
    fill_pick = np.minimum(fill_pick, last_index)

    ev_age_eff = np.where(ev_waiting, sorted_ages[wait_pick], ev_age)
    ev_age_eff = np.where(ev_pulled, sorted_ages[fill_pick], ev_age_eff)
    ev_deposit_clock = unpub_ev | (dep_article_ev & (ev_pulled | (ev_age_eff < _SWITCH_MONTHS)))
    ev_arrival = np.where(ev_deposit_clock,
                          deposit_anchor[ev_entity],
                          index_anchor[ev_entity]) + ev_age_eff

    # --- titles -----------------------------------------------------------
    sig_counts = np.clip(4 + rng.poisson(2.5, n_papers + n_unpub), 3, 12)
    word_flat = rng.integers(0, len(vocab), int(sig_counts.sum()))
    filler_idx = rng.integers(0, len(_STOP_FILLERS), (n_papers + n_unpub, 2))

    def build_title(entity: int, word_cursor: int) -> tuple[str, list[str]]:
        words = [vocab[w] for w in word_flat[word_cursor:word_cursor + sig_counts[entity]]]
        parts = list(words)
        parts.insert(1, _STOP_FILLERS[filler_idx[entity, 0]])
        if len(words) > 3:
            parts.insert(4, _STOP_FILLERS[filler_idx[entity, 1]])
        return " ".join(parts).capitalize(), words

    preprint_titles: list[str] = []
    paper_words: list[list[str]] = []
    cursor = 0
    for i in range(n_papers + n_unpub):
        title, words = build_title(i, cursor)
        cursor += int(sig_counts[i])
        preprint_titles.append(title)
        paper_words.append(words)

    # Published versions of deposited papers get noisy titles.
    article_titles = list(preprint_titles[:n_papers])
    for i in range(n_papers):
        if not deposited[i]:
            continue
        words = list(paper_words[i])
        mutated = False
        for j in range(len(words)):
            if rng.random() < params.title_noise:
                words[j] = vocab[int(rng.integers(0, len(vocab)))]
                mutated = True
        if mutated:
            parts = list(words)
            parts.insert(1, _STOP_FILLERS[filler_idx[i, 0]])
            if len(words) > 3:
                parts.insert(4, _STOP_FILLERS[filler_idx[i, 1]])
            article_titles[i] = " ".join(parts).capitalize()

    # --- identifiers and byline rendering ---------------------------------
    article_ids = [f"W{i + 1:07d}" for i in range(n_papers)]
    style_draws = rng.integers(0, 3, (n_papers + n_unpub, 2))

    preprint_ids: list[str | None] = [None] * (n_papers + n_unpub)
    serial = 0
    for i in range(n_papers):
        if deposited[i]:
            ym = YearMonth.from_absolute(int(deposit_month[i]))
            preprint_ids[i] = f"sx/{ym.year % 100:02d}{ym.month:02d}{serial:05d}"
            serial += 1
    for u in range(n_unpub):
        ym = YearMonth.from_absolute(int(unpub_month[u]))
        preprint_ids[n_papers + u] = f"sx/{ym.year % 100:02d}{ym.month:02d}{serial:05d}"
        serial += 1

    def entity_lead(entity: int) -> int:
        return int(leads[entity]) if entity < n_papers else int(unpub_leads[entity - n_papers])

    # Match-keys are what a citing reference list would carry: derived from
    # the *rendered* first-author string, exactly as the resolver derives them.
    matchkeys: list[str | None] = []
    for i in range(n_papers + n_unpub):
        if preprint_ids[i] is None:
            matchkeys.append(None)
            continue
        lead = entity_lead(i)
        rendered = _render_author(author_display[lead], author_initials[lead],
                                  int(style_draws[i, 1]))
        matchkeys.append(f"{normalize_author_name(rendered).surname}:{preprint_ids[i]}")

    def rendered_byline(entity: int) -> list[str]:
        style = int(style_draws[entity, 0])
        members = bylines[entity] if entity < n_papers else [entity_lead(entity)]
        return [
            _render_author(author_display[a], author_initials[a], style)
            for a in members
        ]

    # journal_ref strings for deposited (published) papers
    ref_roll = rng.random(n_papers)
    ref_vol = rng.integers(1, 300, n_papers)
    ref_page = rng.integers(1, 2000, n_papers)
    journal_refs: list[str | None] = [None] * n_papers
    for i in range(n_papers):
        if not deposited[i]:
            continue
        if ref_roll[i] < params.journal_ref_coverage:
            name = journal_ref_names[paper_journal[i]]
            year = index_month[i] // 12
            journal_refs[i] = f"{name} {ref_vol[i]}, {ref_page[i]} ({year})"
        elif ref_roll[i] < params.journal_ref_coverage + 0.15:
            journal_refs[i] = "to appear"

    # --- assign citing articles (last RNG phase; see module docstring) ----
    articles_by_month: dict[int, np.ndarray] = {}
    month_order = np.argsort(index_month, kind="stable")
    for idx in month_order:
        articles_by_month.setdefault(int(index_month[idx]), []).append(int(idx))  # type: ignore[arg-type]
    articles_by_month = {m: np.array(v) for m, v in articles_by_month.items()}

    author_led_papers: dict[int, list[tuple[int, int]]] = {}
    for i in range(n_papers):
        author_led_papers.setdefault(int(leads[i]), []).append((int(index_month[i]), i))
    for papers in author_led_papers.values():
        papers.sort()

    keep = ev_arrival <= m1
    dropped = int(total_events - keep.sum())
    ev_entity_k = ev_entity[keep]
    ev_arrival_k = ev_arrival[keep]
    ev_postpub_k = ev_postpub_roll[keep]
    ev_self_k = ev_self_roll[keep]
    ev_depclock_k = ev_deposit_clock[keep]
    ev_pulled_k = ev_pulled[keep]

    order = np.argsort(ev_arrival_k, kind="stable")
    citations: list[dict] = []

    def nearest_bucket(month: int) -> tuple[int, np.ndarray] | None:
        for delta in (0, 1, -1, 2, -2, 3, -3):
            bucket = articles_by_month.get(month + delta)
            if bucket is not None and len(bucket):
                return month + delta, bucket
        return None

    def self_candidate(lead: int, month: int, cited_entity: int) -> tuple[int, int] | None:
        best: tuple[int, int, int] | None = None
        for paper_month, paper_idx in author_led_papers.get(lead, ()):
            if cited_entity < n_papers and paper_idx == cited_entity:
                continue
            gap = abs(paper_month - month)
            if gap > 3:
                continue
            key = (gap, paper_month, paper_idx)
            if best is None or key < best:
                best = key
        if best is None:
            return None
        return best[2], best[1]

    pos = 0
    while pos < len(order):
        month = int(ev_arrival_k[order[pos]])
        end = pos
        while end < len(order) and int(ev_arrival_k[order[end]]) == month:
            end += 1
        group = order[pos:end]
        pos = end
        found = nearest_bucket(month)
        if found is None:
            dropped += len(group)
            continue
        bucket_month, bucket = found
        picks = rng.integers(0, len(bucket), len(group))
        for g, event in enumerate(group):
            entity = int(ev_entity_k[event])
            citing = int(bucket[picks[g]])
            date_month = bucket_month
            if citing == entity:  # no self-targets; bump deterministically
                if len(bucket) == 1:
                    dropped += 1
                    continue
                citing = int(bucket[(picks[g] + 1) % len(bucket)])
            if ev_self_k[event] < params.self_citation_rate:
                candidate = self_candidate(entity_lead(entity), month, entity)
                if candidate is not None:
                    citing, date_month = candidate[0], candidate[1]
            # choose the cited version (based on the final citation date);
            # only deposit-clock readers ever cite the preprint post-publication,
            # and re-timed tail events always cite the journal version
            if entity >= n_papers:
                kind, target = "preprint_key", matchkeys[entity]
            elif deposited[entity]:
                before_pub = date_month < int(index_month[entity])
                post_pub_key = (ev_depclock_k[event] and not ev_pulled_k[event]
                                and ev_postpub_k[event] < params.post_pub_preprint_cite_rate)
                if before_pub or post_pub_key:
                    kind, target = "preprint_key", matchkeys[entity]
                else:
                    kind, target = "article", article_ids[entity]
            else:
                kind, target = "article", article_ids[entity]
            citations.append(
                {
                    "citing_article_id": article_ids[citing],
                    "target_kind": kind,
                    "target": target,
                    "citation_date": str(YearMonth.from_absolute(date_month)),
                }
            )

    # --- write files -------------------------------------------------------
    out.mkdir(parents=True, exist_ok=True)

    def article_record(i: int) -> dict:
        return {
            "article_id": article_ids[i],
            "journal_id": journal_ids[paper_journal[i]],
            "title": article_titles[i],
            "byline": rendered_byline(i),
            "pub_year": int(index_month[i] // 12),
            "index_entry_date": str(YearMonth.from_absolute(int(index_month[i]))),
        }

    def preprint_record(entity: int) -> dict:
        month = int(deposit_month[entity]) if entity < n_papers else int(unpub_month[entity - n_papers])
        lead = entity_lead(entity)
        style = int(style_draws[entity, 1])
        record = {
            "preprint_id": preprint_ids[entity],
            "title": preprint_titles[entity],
            "first_author": _render_author(author_display[lead], author_initials[lead], style),
            "deposit_date": str(YearMonth.from_absolute(month)),
        }
        if entity < n_papers and journal_refs[entity] is not None:
            record["journal_ref"] = journal_refs[entity]
        return record

    paths = {
        "articles": out / "articles.jsonl",
        "preprints": out / "preprints.jsonl",
        "citations": out / "citations.jsonl",
        "ground_truth": out / "ground_truth.json",
    }
    write_jsonl(paths["articles"], (article_record(i) for i in range(n_papers)))
    write_jsonl(
        paths["preprints"],
        (
            preprint_record(i)
            for i in sorted(
                (i for i in range(n_papers + n_unpub) if preprint_ids[i] is not None),
                key=lambda i: preprint_ids[i],
            )
        ),
    )
    write_jsonl(paths["citations"], citations)

    ground_truth = GroundTruth(
        params=asdict(params),
        authors=[
            {
                "author_index": i,
                "surname_key": author_surname_key[i],
                "initials": author_initials[i],
                "quality": float(quality[i]),
                "home_journal": journal_ids[home_journal[i]],
            }
            for i in range(pool)
        ],
        papers=[
            {
                "article_id": article_ids[i],
                "journal": journal_ids[paper_journal[i]],
                "lead": int(leads[i]),
                "deposited": bool(deposited[i]),
                "true_lag": int(true_lag[i]) if deposited[i] else None,
                "preprint_id": preprint_ids[i],
                "n_citations_drawn": int(n_cites[i]),
            }
            for i in range(n_papers)
        ],
        unpublished=[
            {
                "preprint_id": preprint_ids[n_papers + u],
                "lead": int(unpub_leads[u]),
                "n_citations_drawn": int(unpub_cites[u]),
            }
            for u in range(n_unpub)
        ],
        links=[
            [preprint_ids[i], article_ids[i]]
            for i in range(n_papers)
            if deposited[i]
        ],
        dropped_citations=dropped,
    )
    _write_ground_truth(ground_truth, paths["ground_truth"])
    logger.info(
        "generated corpus: %d articles, %d preprints (%d unpublished), %d citations (%d dropped)",
        n_papers, serial, n_unpub, len(citations), dropped,
    )
    return GenerationResult(paths=paths, ground_truth=ground_truth)


def _write_ground_truth(gt: GroundTruth, path: Path) -> None:
    tmp = path.with_name(path.name + ".tmp")
    payload = {
        "params": gt.params,
        "authors": gt.authors,
        "papers": gt.papers,
        "unpublished": gt.unpublished,
        "links": gt.links,
        "dropped_citations": gt.dropped_citations,
    }
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")
    tmp.replace(path)


def load_ground_truth(path: str | Path) -> GroundTruth:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    payload["params"]["epoch"] = tuple(payload["params"]["epoch"])
    return GroundTruth(
        params=payload["params"],
        authors=payload["authors"],
        papers=payload["papers"],
        unpublished=payload["unpublished"],
        links=[list(pair) for pair in payload["links"]],
        dropped_citations=payload["dropped_citations"],
    )


def ground_truth_report(gt: GroundTruth) -> dict:
    """Summary oracle values for validating pipeline recovery."""
    deposited = [p for p in gt.papers if p["deposited"]]
    lags = [p["true_lag"] for p in deposited]
    quality = {a["author_index"]: a["quality"] for a in gt.authors}
    dep_quality = [quality[p["lead"]] for p in deposited]
    nondep_quality = [quality[p["lead"]] for p in gt.papers if not p["deposited"]]
    n_preprints = len(deposited) + len(gt.unpublished)
    return {
        "n_articles": len(gt.papers),
        "n_preprints": n_preprints,
        "n_true_links": len(gt.links),
        "true_link_fraction": len(gt.links) / n_preprints if n_preprints else 0.0,
        "deposited_share": len(deposited) / len(gt.papers) if gt.papers else 0.0,
        "median_true_lag": statistics.median(lags) if lags else None,
        "mean_lead_quality_deposited": statistics.fmean(dep_quality) if dep_quality else None,
        "mean_lead_quality_nondeposited": statistics.fmean(nondep_quality) if nondep_quality else None,
        "injected": {
            "lag_months": gt.params["lag_months"],
            "deposit_bias": gt.params["deposit_bias"],
            "oa_boost": gt.params["oa_boost"],
        },
        "dropped_citations": gt.dropped_citations,
    }
