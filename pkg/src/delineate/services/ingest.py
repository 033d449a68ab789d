"""Record ingest: parse, validate, normalize and deduplicate NDJSON exports."""

import json
import logging
from collections.abc import Iterable, Iterator
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from pydantic import ValidationError

from delineate.config import config
from delineate.errors import CorpusFormatError, InvalidRecordError, RecordParseError
from delineate.models.records import (
    YEAR_MAX,
    YEAR_MIN,
    BibRecord,
    IngestReport,
    Language,
    Rejection,
    normalize_doi,
)
from delineate.utils.io import read_ndjson, write_ndjson

logger = logging.getLogger(__name__)


def _text(value, field: str, line_no: int | None) -> str:
    if value is None:
        return ""
    if not isinstance(value, str):
        raise InvalidRecordError(f"{field} must be a string", line_no)
    return value


def parse_record(line: str, line_no: int | None = None, source_tag: str = "") -> BibRecord:
    """Parse one serialized record.

    Records in languages outside en/es/fr/pt parse fine with language OTHER;
    ingest decides admission.

    Args:
        line: One JSON object in the documented input schema
        line_no: Line number reported in errors
        source_tag: Input batch name, used when the record carries none

    Returns:
        The parsed BibRecord

    Raises:
        RecordParseError: The line is not a JSON object
        InvalidRecordError: A field violates its constraints (missing doi, bad year...)
    """
    try:
        data = json.loads(line)
    except json.JSONDecodeError as e:
        raise RecordParseError(f"malformed record ({e.msg})", line_no) from e
    if not isinstance(data, dict):
        raise RecordParseError("record is not a JSON object", line_no)

    doi = data.get("doi")
    if not isinstance(doi, str) or not normalize_doi(doi):
        raise InvalidRecordError("missing doi", line_no)

    year = data.get("year")
    if isinstance(year, bool) or not isinstance(year, (int, str)):
        raise InvalidRecordError(f"invalid year {year!r}", line_no)
    try:
        year = int(year)
    except ValueError as e:
        raise InvalidRecordError(f"invalid year {year!r}", line_no) from e
    if not YEAR_MIN <= year <= YEAR_MAX:
        raise InvalidRecordError(f"year {year} outside [{YEAR_MIN}, {YEAR_MAX}]", line_no)

    disciplines = data.get("disciplines") or []
    if not isinstance(disciplines, list) or not all(isinstance(d, str) for d in disciplines):
        raise InvalidRecordError("disciplines must be a list of strings", line_no)

    citations = data.get("citations") or 0
    if isinstance(citations, bool) or not isinstance(citations, int) or citations < 0:
        raise InvalidRecordError(f"invalid citation count {citations!r}", line_no)

    abstract = data.get("abstract")
    try:
        return BibRecord(
            doi=doi,
            title=_text(data.get("title"), "title", line_no),
            abstract=_text(abstract, "abstract", line_no) if abstract is not None else None,
            journal_id=_text(data.get("journal_id"), "journal_id", line_no).strip(),
            journal_name=_text(data.get("journal_name"), "journal_name", line_no),
            year=year,
            language=Language.coerce(data.get("language") if isinstance(data.get("language"), str) else None),
            disciplines=tuple(d.strip() for d in disciplines if d.strip()),
            citations=citations,
            source_tag=_text(data.get("source_tag"), "source_tag", line_no) or source_tag,
        )
    except ValidationError as e:
        raise InvalidRecordError(str(e.errors()[0]["msg"]), line_no) from e


class RecordStore:
    """Admitted records keyed by doi, in first-seen order."""

    def __init__(self, records: Iterable[BibRecord] = ()):
        self._records: dict[str, BibRecord] = {}
        for record in records:
            self.add(record)

    def add(self, record: BibRecord) -> bool:
        """Add a record unless its doi is already stored. Returns True if added."""
        if record.doi in self._records:
            return False
        self._records[record.doi] = record
        return True

    def get(self, doi: str) -> BibRecord | None:
        return self._records.get(doi)

    def __contains__(self, doi: object) -> bool:
        return doi in self._records

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[BibRecord]:
        return iter(self._records.values())

    @property
    def dois(self) -> list[str]:
        return list(self._records)

    def merge(self, other: "RecordStore") -> tuple["RecordStore", int]:
        """Merge two stores, left records winning on doi clashes.

        Returns:
            Tuple of (merged store, number of right-hand duplicates dropped)
        """
        merged = RecordStore(self)
        dropped = sum(0 if merged.add(record) else 1 for record in other)
        return merged, dropped

    def dump(self, path: Path) -> int:
        return write_ndjson(path, (record.to_json_dict() for record in self))

    @classmethod
    def load(cls, path: Path) -> "RecordStore":
        return cls(BibRecord(**row) for row in read_ndjson(path))


def ingest(
    lines: Iterable[str],
    source_tag: str = "",
    rejections: list[Rejection] | None = None,
    positions: dict[str, int] | None = None,
) -> tuple[RecordStore, IngestReport]:
    """Build a deduplicated record store from serialized records.

    Blank lines are skipped and not counted. Records outside the four admitted
    languages are counted as rejected_language; the first occurrence of a doi wins.

    Args:
        lines: Stream of NDJSON lines
        source_tag: Batch name stamped on records that carry none
        rejections: Optional list collecting one Rejection per dropped line
        positions: Optional map filled with the line number of each admitted doi

    Returns:
        Tuple of (store, report)

    Raises:
        CorpusFormatError: More than half of the lines failed to parse
    """
    store = RecordStore()
    report = IngestReport()

    def reject(line_no: int, reason: str, raw: str) -> None:
        if rejections is not None:
            rejections.append(Rejection(line_no=line_no, reason=reason, source_tag=source_tag, raw=raw))

    for line_no, line in enumerate(lines, start=1):
        raw = line.strip()
        if not raw:
            continue
        report.read += 1
        try:
            record = parse_record(raw, line_no, source_tag)
        except RecordParseError as e:
            report.rejected_invalid += 1
            reject(line_no, str(e), raw)
            continue
        if not record.admissible:
            report.rejected_language += 1
            reject(line_no, f"language not admitted: {record.doi}", raw)
        elif store.add(record):
            report.admitted += 1
            if positions is not None:
                positions[record.doi] = line_no
        else:
            report.duplicates_dropped += 1
            reject(line_no, f"duplicate doi {record.doi}", raw)

    if report.read and report.rejected_invalid / report.read > config.MAX_FAILURE_RATIO:
        raise CorpusFormatError(
            f"{report.rejected_invalid} of {report.read} lines failed to parse"
            + (f" in {source_tag}" if source_tag else "")
        )
    return store, report


def ingest_file(
    path: Path,
    rejections: list[Rejection] | None = None,
    positions: dict[str, int] | None = None,
) -> tuple[RecordStore, IngestReport]:
    """Ingest one NDJSON file; the file name becomes the source tag."""
    with Path(path).open("r", encoding="utf-8") as f:
        store, report = ingest(f, source_tag=Path(path).name, rejections=rejections, positions=positions)
    logger.info(
        "Ingested %s: read=%d admitted=%d language=%d invalid=%d duplicates=%d",
        path, report.read, report.admitted, report.rejected_language,
        report.rejected_invalid, report.duplicates_dropped,
    )
    return store, report


def ingest_files(
    paths: Iterable[Path],
    workers: int | None = None,
    rejections: list[Rejection] | None = None,
) -> tuple[RecordStore, IngestReport]:
    """Ingest several shard files concurrently and merge them in input order.

    Duplicates across shards are resolved first-wins in input order and moved
    from admitted to duplicates_dropped; their rejections carry the shard file
    and line.
    """
    paths = [Path(p) for p in paths]
    shard_rejections: list[list[Rejection]] = [[] for _ in paths]
    shard_positions: list[dict[str, int]] = [{} for _ in paths]
    with ThreadPoolExecutor(max_workers=workers or config.INGEST_WORKERS) as pool:
        results = list(pool.map(ingest_file, paths, shard_rejections, shard_positions))

    store, report = RecordStore(), IngestReport()
    for path, (shard_store, shard_report), shard_rejected, positions in zip(
        paths, results, shard_rejections, shard_positions
    ):
        store, dropped = store.merge(shard_store)
        report = report + shard_report
        report.admitted -= dropped
        report.duplicates_dropped += dropped
        if rejections is not None:
            rejections.extend(shard_rejected)
            if dropped:
                rejections.extend(
                    Rejection(
                        line_no=positions[r.doi],
                        reason=f"duplicate doi {r.doi} across shards",
                        source_tag=path.name,
                    )
                    for r in shard_store
                    if store.get(r.doi) is not r
                )
    return store, report
