"""Stage 2: scan record titles against the compiled keyword list."""

import logging
import time
from collections import Counter
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from delineate.config import config
from delineate.errors import ParameterError
from delineate.models.corpus import LanguagePolicy, MatchResult, ScanReport
from delineate.models.keywords import KeywordSpec, Origin
from delineate.services.ingest import RecordStore
from delineate.services.matcher import CompiledMatcher
from delineate.utils.calculations import median_throughput
from delineate.utils.io import read_ndjson, write_ndjson

logger = logging.getLogger(__name__)

Row = tuple[str, str, str]

# Filler for synthetic titles; keyword literals are mixed in.
_FILLER_WORDS = (
    "analysis", "of", "the", "and", "in", "a", "study", "economic", "growth", "soil", "protein",
    "health", "work", "rights", "politics", "policy", "la", "de", "les", "des", "em", "evidence",
    "review", "survey", "outcomes", "maize", "photosynthesis", "network", "model", "children",
)
_LANGUAGES = ("en", "es", "fr", "pt")

_worker_matcher: CompiledMatcher | None = None


def _init_worker(specs: Sequence[KeywordSpec]) -> None:
    global _worker_matcher
    _worker_matcher = CompiledMatcher(specs)


def _scan_rows(
    matcher: CompiledMatcher,
    rows: Sequence[Row],
    policy: LanguagePolicy,
) -> tuple[list[MatchResult], ScanReport]:
    start = time.perf_counter()
    results = []
    counts: Counter[str] = Counter()
    for doi, title, language in rows:
        keyword_ids = matcher.match(title, language, policy)
        if keyword_ids:
            groups = matcher.groups(keyword_ids)
            results.append(MatchResult(doi=doi, matched_groups=groups, matched_keyword_ids=keyword_ids))
            counts.update(groups)
    report = ScanReport(
        titles_scanned=len(rows),
        titles_matched=len(results),
        group_counts=dict(counts),
        wall_time=time.perf_counter() - start,
    )
    return results, report


def _scan_shard(rows: Sequence[Row], policy: LanguagePolicy) -> tuple[list[MatchResult], ScanReport]:
    return _scan_rows(_worker_matcher, rows, policy)


def _rows(store: RecordStore) -> list[Row]:
    return [(r.doi, r.title, r.language.value) for r in store]


def scan(
    store: RecordStore,
    matcher: CompiledMatcher,
    language_policy: LanguagePolicy = LanguagePolicy.STRICT,
    shards: int = 1,
) -> tuple[list[MatchResult], ScanReport]:
    """Match every title in the store; abstracts are never read.

    Args:
        store: Ingested records
        matcher: Compiled keyword list
        language_policy: strict gates language-specific patterns by record
            language; permissive applies every pattern to every title
        shards: Worker processes (1 scans in-process)

    Returns:
        Tuple of (match results sorted by doi, scan report)
    """
    rows = _rows(store)
    start = time.perf_counter()
    if shards <= 1 or len(rows) < 2:
        results, report = _scan_rows(matcher, rows, language_policy)
    else:
        size = -(-len(rows) // shards)
        chunks = [rows[i:i + size] for i in range(0, len(rows), size)]
        results, report = [], ScanReport()
        with ProcessPoolExecutor(
            max_workers=len(chunks), initializer=_init_worker, initargs=(list(matcher.specs),)
        ) as pool:
            for shard_no, (shard_results, shard_report) in enumerate(
                pool.map(_scan_shard, chunks, [language_policy] * len(chunks))
            ):
                logger.debug("Shard %d: %d titles in %.3fs", shard_no, shard_report.titles_scanned,
                             shard_report.wall_time)
                results.extend(shard_results)
                report = report.merge(shard_report)
    report.wall_time = time.perf_counter() - start
    results.sort(key=lambda r: r.doi)
    logger.info("Scanned %d titles, %d matched (%.0f titles/s)",
                report.titles_scanned, report.titles_matched, report.throughput)
    return results, report


def _check_bench(titles: int, repetitions: int) -> None:
    if titles < config.BENCH_MIN_STORE:
        raise ParameterError(f"benchmark needs at least {config.BENCH_MIN_STORE} titles, got {titles}")
    if repetitions < 3:
        raise ParameterError(f"benchmark needs at least 3 repetitions, got {repetitions}")


def _bench_rows(
    rows: Sequence[Row],
    matcher: CompiledMatcher,
    repetitions: int,
    language_policy: LanguagePolicy,
) -> ScanReport:
    timings = []
    report = ScanReport()
    for _ in range(repetitions):
        _, report = _scan_rows(matcher, rows, language_policy)
        timings.append(report.wall_time)
    wall_time, throughput = median_throughput(timings, len(rows))
    report.wall_time = wall_time
    report.repetitions = repetitions
    logger.info("Benchmark: %d titles x %d runs, median %.3fs (%.0f titles/s)",
                len(rows), repetitions, wall_time, throughput)
    return report


def throughput_bench(
    store: RecordStore,
    matcher: CompiledMatcher,
    repetitions: int | None = None,
    language_policy: LanguagePolicy = LanguagePolicy.STRICT,
) -> ScanReport:
    """Median single-process scan time over repeated runs.

    Raises:
        ParameterError: Fewer than BENCH_MIN_STORE titles or repetitions below 3
    """
    repetitions = repetitions or config.BENCH_REPETITIONS
    _check_bench(len(store), repetitions)
    return _bench_rows(_rows(store), matcher, repetitions, language_policy)


def synthetic_rows(n: int, matcher: CompiledMatcher, seed: int = 0) -> list[Row]:
    """(doi, title, language) rows of 1-8 words drawn from filler and the matcher's literals."""
    rng = np.random.default_rng(seed)
    vocabulary = [*_FILLER_WORDS, *sorted({p.literal for p in matcher.patterns if p.literal})]
    sizes = rng.integers(1, 9, size=n).tolist()
    words = rng.integers(0, len(vocabulary), size=sum(sizes)).tolist()
    languages = rng.integers(0, len(_LANGUAGES), size=n).tolist()
    rows = []
    offset = 0
    for i, size in enumerate(sizes):
        title = " ".join(vocabulary[j] for j in words[offset:offset + size])
        rows.append((f"10.0/synthetic.{i}", title, _LANGUAGES[languages[i]]))
        offset += size
    return rows


def padding_specs(specs: Sequence[KeywordSpec], minimum: int) -> list[KeywordSpec]:
    """Filler specs raising the list to at least minimum distinct patterns."""
    missing = minimum - len({s.pattern for s in specs})
    return [
        KeywordSpec(
            keyword_id=f"bench.any.{i}",
            group="bench",
            language="any",
            pattern=f"zx{i:03d}q[a-z]*",
            origin=Origin.MANUAL_ADDED,
        )
        for i in range(max(0, missing))
    ]


def synthetic_bench(
    matcher: CompiledMatcher,
    n: int,
    repetitions: int | None = None,
    language_policy: LanguagePolicy = LanguagePolicy.STRICT,
    seed: int = 0,
) -> ScanReport:
    """throughput_bench over n generated titles instead of an ingested store.

    Raises:
        ParameterError: n below BENCH_MIN_STORE or repetitions below 3
    """
    repetitions = repetitions or config.BENCH_REPETITIONS
    _check_bench(n, repetitions)
    return _bench_rows(synthetic_rows(n, matcher, seed), matcher, repetitions, language_policy)


def write_matches(results: Sequence[MatchResult], path: Path) -> int:
    return write_ndjson(path, (r.to_json_dict() for r in results))


def read_matches(path: Path) -> list[MatchResult]:
    return [
        MatchResult(
            doi=row["doi"],
            matched_groups=frozenset(row["matched_groups"]),
            matched_keyword_ids=frozenset(row["matched_keyword_ids"]),
        )
        for row in read_ndjson(path)
    ]
