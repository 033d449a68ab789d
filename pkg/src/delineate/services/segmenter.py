"""Assemble the delineated corpus from core journals and keyword matches."""

import json
import logging
from collections.abc import Iterable
from pathlib import Path

from delineate.errors import ConsistencyError, CorpusFormatError, ParameterError
from delineate.models.corpus import CorpusEntry, CorpusSummary, MatchResult, Segment, SegmentedCorpus
from delineate.models.journals import UNKNOWN_JOURNAL
from delineate.services.ingest import RecordStore
from delineate.utils.calculations import percent_share
from delineate.utils.io import atomic_write_text, dumps, write_json

logger = logging.getLogger(__name__)

HEADER_PREFIX = "# summary: "


def segment(store: RecordStore, core_ids: Iterable[str], matches: Iterable[MatchResult]) -> SegmentedCorpus:
    """Label records Core (core journal) or NotCore (matched, outside the core).

    Core membership wins over keyword matching. Records that are neither are
    left out of the corpus.

    Args:
        store: Ingested records
        core_ids: Selected core journal ids
        matches: Scan output for the same store

    Returns:
        SegmentedCorpus with entries sorted by doi

    Raises:
        ConsistencyError: A match refers to a doi missing from the store
    """
    core = frozenset(core_ids)
    matched: dict[str, MatchResult] = {}
    for match in matches:
        if match.doi not in store:
            raise ConsistencyError(f"Match result for {match.doi} has no record in the store")
        matched[match.doi] = match

    entries = []
    overlap = 0
    for record in store:
        in_core = (record.journal_id or UNKNOWN_JOURNAL) in core
        match = matched.get(record.doi)
        if not in_core and match is None:
            continue
        if in_core and match is not None:
            overlap += 1
        entries.append(CorpusEntry(
            doi=record.doi,
            segment=Segment.CORE if in_core else Segment.NOT_CORE,
            in_core_journal=in_core,
            keyword_matched=match is not None,
            matched_groups=tuple(sorted(match.matched_groups)) if match else (),
        ))
    entries.sort(key=lambda e: e.doi)

    core_n = sum(1 for e in entries if e.segment is Segment.CORE)
    summary = CorpusSummary(
        core_n=core_n,
        notcore_n=len(entries) - core_n,
        overlap_n=overlap,
        total_n=len(entries),
    )
    logger.info("Corpus: core=%d notcore=%d overlap=%d total=%d",
                summary.core_n, summary.notcore_n, summary.overlap_n, summary.total_n)
    return SegmentedCorpus(entries=tuple(entries), summary=summary)


def overlap_from_counts(core_n: int, matched_n: int, new_n: int) -> tuple[int, float]:
    """Overlap implied by aggregate counts and its percentage of the core.

    Args:
        core_n: Core size
        matched_n: All keyword-matched documents
        new_n: Matched documents outside the core

    Returns:
        Tuple of (overlap, percent of core at one decimal)
    """
    overlap = matched_n - new_n
    if overlap < 0 or overlap > core_n:
        raise ParameterError(f"counts are inconsistent: matched={matched_n} new={new_n} core={core_n}")
    return overlap, percent_share(overlap, core_n)


def _entry_json(entry: CorpusEntry) -> str:
    return dumps(entry.model_dump(mode="json"))


def export(corpus: SegmentedCorpus, path: Path) -> None:
    """Write the summary header and one JSON line per entry, plus a summary sidecar."""
    lines = [HEADER_PREFIX + dumps(corpus.summary.model_dump())]
    lines.extend(_entry_json(e) for e in sorted(corpus.entries, key=lambda e: e.doi))
    atomic_write_text(path, "\n".join(lines) + "\n")
    write_json(path.with_suffix(".summary.json"), corpus.summary.model_dump())


def import_corpus(path: Path) -> SegmentedCorpus:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith(HEADER_PREFIX):
        raise CorpusFormatError(f"{path}: missing summary header")
    summary = CorpusSummary(**json.loads(lines[0][len(HEADER_PREFIX):]))
    entries = tuple(CorpusEntry(**json.loads(line)) for line in lines[1:] if line.strip())
    return SegmentedCorpus(entries=entries, summary=summary)
