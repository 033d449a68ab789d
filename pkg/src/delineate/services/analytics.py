"""Descriptive statistics over a segmented corpus.

Every function is a pure function of (corpus, store, params). Tables are
written as CSV plus a JSON mirror, one file pair per figure or table.
"""

import logging
from collections import Counter, defaultdict
from collections.abc import Callable, Collection, Iterable, Mapping, Sequence
from pathlib import Path

import numpy as np
import pandas as pd

from delineate.errors import ParameterError
from delineate.models.analytics import (
    DisciplineDistribution,
    KeywordFrequency,
    SegmentCells,
    SegmentRow,
    SegmentStats,
    TimePoint,
    TimeSeries,
)
from delineate.models.corpus import CorpusEntry, Segment, SegmentedCorpus
from delineate.models.journals import UNKNOWN_JOURNAL
from delineate.models.pipeline import AnalyticsConfig, YearRanges
from delineate.models.records import YEAR_MAX, YEAR_MIN, BibRecord
from delineate.services.core_selector import division_name
from delineate.services.ingest import RecordStore
from delineate.services.segmenter import overlap_from_counts
from delineate.utils.calculations import articles_per_journal, average, percent_share, relative_frequency
from delineate.utils.io import write_table

logger = logging.getLogger(__name__)

OTHERS = "Others"
UNCLASSIFIED = "Unclassified"
SEGMENTS = (Segment.CORE, Segment.NOT_CORE)

_TRUTHY = {"1", "y", "yes", "true", "relevant"}
_FALSY = {"0", "n", "no", "false", "irrelevant"}


def _entries(corpus: SegmentedCorpus, segment: Segment) -> list[CorpusEntry]:
    return corpus.in_segment(Segment(segment))


def _record(store: RecordStore, doi: str) -> BibRecord:
    record = store.get(doi)
    if record is None:
        raise ParameterError(f"corpus entry {doi} is not in the store")
    return record


def _check_range(year_range: tuple[int, int]) -> tuple[int, int]:
    first, last = year_range
    if first > last:
        raise ParameterError(f"inverted year range {first}-{last}")
    if first < YEAR_MIN or last > YEAR_MAX:
        raise ParameterError(f"year range {first}-{last} outside [{YEAR_MIN}, {YEAR_MAX}]")
    return first, last


def _check_group(group: str, registry: Collection[str]) -> None:
    if group not in registry:
        raise ParameterError(f"unknown keyword group {group!r}")


def _registry(corpus: SegmentedCorpus, groups: Collection[str] | None) -> Collection[str]:
    """The given groups, or every group matched somewhere in the corpus when None.

    The fallback knows only groups with hits: pass the compiled keyword groups to
    accept a registered group that matched nothing.
    """
    if groups is not None:
        return groups
    return {g for e in corpus.entries for g in e.matched_groups}


# ---- composition table ----

def compose_segment_stats(cells: Mapping[str, SegmentCells]) -> SegmentStats:
    """Derive the composition table from raw cells.

    A Total row is added as the sum of the given segments unless supplied.
    Shares are percentages of the Total row at one decimal.

    Args:
        cells: Raw cells keyed by segment name

    Returns:
        SegmentStats with the given segments followed by Total
    """
    parts = {name: c for name, c in cells.items() if name != Segment.TOTAL}
    total = cells.get(Segment.TOTAL) or SegmentCells(
        articles=sum(c.articles for c in parts.values()),
        journals=sum(c.journals for c in parts.values()),
        citation_sum=sum(c.citation_sum for c in parts.values()),
    )
    rows = []
    for name, c in [*parts.items(), (Segment.TOTAL.value, total)]:
        rows.append(SegmentRow(
            segment=str(name),
            articles=c.articles,
            journals=c.journals,
            articles_per_journal=articles_per_journal(c.articles, c.journals),
            average_citations=average(c.citation_sum, c.articles),
            article_share=percent_share(c.articles, total.articles),
            journal_share=percent_share(c.journals, total.journals),
        ))
    return SegmentStats(rows=tuple(rows))


def segment_cells(corpus: SegmentedCorpus, store: RecordStore, segment: Segment) -> SegmentCells:
    records = [_record(store, e.doi) for e in _entries(corpus, segment)]
    return SegmentCells(
        articles=len(records),
        journals=len({r.journal_id or UNKNOWN_JOURNAL for r in records}),
        citation_sum=sum(r.citations for r in records),
    )


def segment_stats(corpus: SegmentedCorpus, store: RecordStore) -> SegmentStats:
    """Articles, journals, A/J, average citations and shares per segment."""
    cells = {s.value: segment_cells(corpus, store, s) for s in (*SEGMENTS, Segment.TOTAL)}
    return compose_segment_stats(cells)


# ---- yearly series ----

def _year_counts(years: Iterable[int], first: int, last: int) -> pd.Series:
    counts = pd.Series(list(years), dtype="int64").value_counts()
    return counts.reindex(range(first, last + 1), fill_value=0).astype("int64")


def yearly_counts(
    corpus: SegmentedCorpus,
    store: RecordStore,
    segment: Segment,
    year_range: tuple[int, int],
) -> TimeSeries:
    """Articles per year, zero-filled over the range."""
    first, last = _check_range(year_range)
    counts = _year_counts((_record(store, e.doi).year for e in _entries(corpus, segment)), first, last)
    return TimeSeries(
        segment=Segment(segment).value,
        points=tuple(
            TimePoint(year=int(year), count=n, denominator=n, relative_frequency=relative_frequency(n, n))
            for year, n in zip(counts.index.tolist(), counts.tolist())
        ),
    )


def _ratio_series(
    corpus: SegmentedCorpus,
    store: RecordStore,
    segment: Segment,
    year_range: tuple[int, int],
    hit: Callable[[CorpusEntry], bool],
    group: str,
) -> TimeSeries:
    first, last = _check_range(year_range)
    entries = _entries(corpus, segment)
    years = [_record(store, e.doi).year for e in entries]
    totals = _year_counts(years, first, last)
    hits = _year_counts((y for e, y in zip(entries, years) if hit(e)), first, last)
    return TimeSeries(
        segment=Segment(segment).value,
        group=group,
        points=tuple(
            TimePoint(
                year=int(year),
                count=int(hits[year]),
                denominator=int(totals[year]),
                relative_frequency=relative_frequency(int(hits[year]), int(totals[year])),
            )
            for year in totals.index
        ),
    )


def keyword_timeseries(
    corpus: SegmentedCorpus,
    store: RecordStore,
    group: str,
    segment: Segment,
    year_range: tuple[int, int],
    groups: Collection[str] | None = None,
) -> TimeSeries:
    """Per-year share of segment documents matching a group (None for empty years).

    Args:
        groups: Registered keyword groups; defaults to the groups matched in the corpus

    Raises:
        ParameterError: Unknown group or invalid year range
    """
    _check_group(group, _registry(corpus, groups))
    return _ratio_series(corpus, store, segment, year_range, lambda e: group in e.matched_groups, group)


def cooccurrence_timeseries(
    corpus: SegmentedCorpus,
    store: RecordStore,
    group_a: str,
    group_b: str,
    segment: Segment,
    year_range: tuple[int, int],
    groups: Collection[str] | None = None,
) -> TimeSeries:
    """Per-year share of segment documents matching both groups."""
    registry = _registry(corpus, groups)
    _check_group(group_a, registry)
    _check_group(group_b, registry)
    return _ratio_series(
        corpus, store, segment, year_range,
        lambda e: group_a in e.matched_groups and group_b in e.matched_groups,
        f"{group_a}+{group_b}",
    )


def crossover_years(series_a: TimeSeries, series_b: TimeSeries) -> list[int]:
    """Years where the sign of (a - b) flips from the previous defined year.

    Years where either frequency is undefined, or both are equal, are skipped.
    """
    b = {p.year: p.relative_frequency for p in series_b.points}
    crossings = []
    previous = 0.0
    for point in series_a.points:
        fa, fb = point.relative_frequency, b.get(point.year)
        if fa is None or fb is None:
            continue
        sign = float(np.sign(fa - fb))
        if sign == 0:
            continue
        if previous and sign != previous:
            crossings.append(point.year)
        previous = sign
    return crossings


# ---- disciplines ----

def _discipline_weights(records: Iterable[BibRecord], whole_count: bool) -> dict[str, float]:
    weights: dict[str, float] = defaultdict(float)
    for record in records:
        labels = sorted({division_name(d) for d in record.disciplines}) or [UNCLASSIFIED]
        unit = 1.0 if whole_count else 1.0 / len(labels)
        for label in labels:
            weights[label] += unit
    return weights


def discipline_distribution(
    corpus: SegmentedCorpus,
    store: RecordStore,
    threshold: float = 0.02,
    whole_count: bool = False,
) -> DisciplineDistribution:
    """Discipline shares for Core, NotCore and Total.

    Each record spreads one unit over its disciplines (or one unit to each with
    whole_count, shares then renormalized). Records without disciplines count as
    "Unclassified". Disciplines under threshold in both Core and NotCore are
    merged into "Others".
    """
    raw: dict[str, dict[str, float]] = {}
    for segment in (*SEGMENTS, Segment.TOTAL):
        weights = _discipline_weights((_record(store, e.doi) for e in _entries(corpus, segment)), whole_count)
        total = sum(weights.values())
        raw[segment.value] = {label: w / total for label, w in weights.items()} if total else {}

    labels = {label for shares in raw.values() for label in shares}
    minor = {
        label for label in labels
        if all(raw[s.value].get(label, 0.0) < threshold for s in SEGMENTS)
    }

    shares: dict[str, tuple[tuple[str, float], ...]] = {}
    for segment, segment_shares in raw.items():
        kept = [(label, share) for label, share in segment_shares.items() if label not in minor]
        kept.sort(key=lambda p: (-p[1], p[0]))
        others = sum(share for label, share in segment_shares.items() if label in minor)
        if others > 0:
            kept.append((OTHERS, others))
        shares[segment] = tuple(kept)
    return DisciplineDistribution(threshold=threshold, shares=shares)


# ---- keywords ----

def keyword_frequency(corpus: SegmentedCorpus, segment: Segment) -> list[KeywordFrequency]:
    """Documents per group over segment size, most frequent first."""
    entries = _entries(corpus, segment)
    counts = Counter(g for e in entries for g in set(e.matched_groups))
    frequencies = [
        KeywordFrequency(group=group, doc_count=n, relative_frequency=n / len(entries))
        for group, n in counts.items()
    ]
    frequencies.sort(key=lambda f: (-f.relative_frequency, f.group))
    return frequencies


def keyword_comparison(corpus: SegmentedCorpus) -> pd.DataFrame:
    """Core and NotCore relative frequencies side by side per group."""
    columns = {}
    for segment in SEGMENTS:
        for f in keyword_frequency(corpus, segment):
            row = columns.setdefault(f.group, {"group": f.group})
            row[f"{segment.value.lower()}_count"] = f.doc_count
            row[f"{segment.value.lower()}_frequency"] = f.relative_frequency
    frame = pd.DataFrame(
        list(columns.values()),
        columns=["group", "core_count", "core_frequency", "notcore_count", "notcore_frequency"],
    )
    frame = frame.fillna({"core_count": 0, "core_frequency": 0.0, "notcore_count": 0, "notcore_frequency": 0.0})
    frame = frame.astype({"core_count": "int64", "notcore_count": "int64"})
    return frame.sort_values(["core_frequency", "group"], ascending=[False, True], ignore_index=True)


# ---- precision audit ----

def in_discipline(code: str) -> Callable[[BibRecord], bool]:
    """Predicate for records classified under a discipline or group code."""
    def predicate(record: BibRecord) -> bool:
        return any(d == code or d.split(" ", 1)[0] == code for d in record.disciplines)
    return predicate


def precision_sample(
    store: RecordStore,
    n: int,
    seed: int,
    predicate: Callable[[BibRecord], bool] | None = None,
) -> list[BibRecord]:
    """Seeded uniform sample without replacement, returned in doi order.

    Raises:
        ParameterError: n is negative or larger than the filtered population
    """
    population = sorted((r for r in store if predicate is None or predicate(r)), key=lambda r: r.doi)
    if n < 0 or n > len(population):
        raise ParameterError(f"sample of {n} requested from a population of {len(population)}")
    rng = np.random.default_rng(seed)
    picks = np.sort(rng.choice(len(population), size=n, replace=False))
    return [population[int(i)] for i in picks]


def write_precision_sheet(records: Sequence[BibRecord], path: Path) -> None:
    """Annotation sheet: doi, title and an empty relevant column."""
    frame = pd.DataFrame(
        [{"doi": r.doi, "title": r.title, "relevant": ""} for r in records],
        columns=["doi", "title", "relevant"],
    )
    frame.to_csv(path, index=False, lineterminator="\n")


def score_precision_sheet(path: Path) -> tuple[int, int, float | None]:
    """Read an annotated sheet back.

    Returns:
        Tuple of (annotated rows, relevant rows, precision or None)

    Raises:
        ParameterError: A relevant cell holds an unrecognised value
    """
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    annotated = relevant = 0
    for row_no, value in enumerate(frame["relevant"], start=2):
        label = value.strip().lower()
        if not label:
            continue
        if label in _TRUTHY:
            relevant += 1
        elif label not in _FALSY:
            raise ParameterError(f"{path}:{row_no}: unrecognised relevance value {value!r}")
        annotated += 1
    return annotated, relevant, relative_frequency(relevant, annotated)


# ---- emission ----

def _series_rows(series: TimeSeries) -> list[dict]:
    return [
        {
            "segment": series.segment,
            "group": series.group,
            "year": p.year,
            "count": p.count,
            "denominator": p.denominator,
            "relative_frequency": p.relative_frequency,
        }
        for p in series.points
    ]


_SERIES_COLUMNS = ["segment", "group", "year", "count", "denominator", "relative_frequency"]


def emit_all(
    corpus: SegmentedCorpus,
    store: RecordStore,
    directory: Path,
    params: AnalyticsConfig | None = None,
    years: YearRanges | None = None,
    groups: Collection[str] | None = None,
) -> list[Path]:
    """Write every table and figure source into directory.

    Args:
        groups: Registered keyword groups; the pipeline passes the compiled list so
            series cover groups with no hits. Defaults to the groups matched in the corpus.

    Returns:
        Paths of the CSV files written
    """
    params = params or AnalyticsConfig()
    years = years or YearRanges()
    registry = _registry(corpus, groups)
    ranges = {Segment.CORE: years.core, Segment.NOT_CORE: years.notcore, Segment.TOTAL: years.total}
    written = []

    def emit(name: str, frame: pd.DataFrame) -> None:
        path = directory / f"{name}.csv"
        write_table(path, frame)
        written.append(path)

    stats = segment_stats(corpus, store)
    emit("table2", pd.DataFrame([r.model_dump() for r in stats.rows], columns=list(SegmentRow.model_fields)))

    summary = corpus.summary
    overlap, share = overlap_from_counts(summary.core_n, summary.overlap_n + summary.notcore_n, summary.notcore_n)
    emit("fig1_overlap", pd.DataFrame([{
        "core_n": summary.core_n,
        "notcore_n": summary.notcore_n,
        "overlap_n": overlap,
        "total_n": summary.total_n,
        "overlap_share_of_core": share,
    }]))

    yearly = [
        {"segment": s.segment, "year": p.year, "count": p.count}
        for segment in SEGMENTS
        for s in [yearly_counts(corpus, store, segment, ranges[segment])]
        for p in s.points
    ]
    emit("fig2_yearly", pd.DataFrame(yearly, columns=["segment", "year", "count"]))

    distribution = discipline_distribution(corpus, store, params.discipline_threshold, params.whole_count)
    emit("fig3_disciplines", pd.DataFrame(
        [
            {"segment": segment, "discipline": label, "share": share}
            for segment, shares in distribution.shares.items()
            for label, share in shares
        ],
        columns=["segment", "discipline", "share"],
    ))

    emit("fig4a_keywords", pd.DataFrame(
        [
            {"segment": segment.value, **f.model_dump()}
            for segment in (*SEGMENTS, Segment.TOTAL)
            for f in keyword_frequency(corpus, segment)
        ],
        columns=["segment", "group", "doc_count", "relative_frequency"],
    ))

    series_groups = [g for g in params.series_groups if g in registry]
    for missing in sorted(set(params.series_groups) - set(series_groups)):
        logger.warning("Series group %r is not a registered keyword group", missing)
    emit("fig4b_series", pd.DataFrame(
        [
            row
            for segment in SEGMENTS
            for group in series_groups
            for row in _series_rows(keyword_timeseries(corpus, store, group, segment, ranges[segment], registry))
        ],
        columns=_SERIES_COLUMNS,
    ))

    sex, gender = params.sex_group, params.gender_group
    pair = [g for g in (sex, gender) if g in registry]
    sexgender_rows = []
    for segment in SEGMENTS:
        series = {g: keyword_timeseries(corpus, store, g, segment, ranges[segment], registry) for g in pair}
        for s in series.values():
            sexgender_rows.extend(_series_rows(s))
        if len(series) == 2:
            logger.info("%s: %s/%s curves cross in %s", segment.value, sex, gender,
                        crossover_years(series[sex], series[gender]) or "no year")
    emit("fig5a_sexgender", pd.DataFrame(sexgender_rows, columns=_SERIES_COLUMNS))

    cooccurrence_rows = []
    if len(pair) == 2:
        for segment in SEGMENTS:
            cooccurrence_rows.extend(_series_rows(
                cooccurrence_timeseries(corpus, store, sex, gender, segment, ranges[segment], registry)
            ))
    emit("fig5b_cooccurrence", pd.DataFrame(cooccurrence_rows, columns=_SERIES_COLUMNS))

    logger.info("Wrote %d analytics tables to %s", len(written), directory)
    return written
