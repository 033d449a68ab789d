"""Tests for record parsing and ingest."""

import json

import pytest

from delineate.errors import CorpusFormatError, InvalidRecordError, RecordParseError
from delineate.models.records import IngestReport, Language, Rejection
from delineate.services.ingest import RecordStore, ingest, ingest_files, parse_record
from tests.conftest import make_record, record_line


class TestParseRecord:
    """Tests for parse_record."""

    def test_direct_field_mapping(self):
        """Test a complete record maps field by field."""
        record = parse_record(record_line("10.1/x", title="Gender and work", year=1990, language="en"))

        assert record.doi == "10.1/x"
        assert record.title == "Gender and work"
        assert record.year == 1990
        assert record.language == Language.EN
        assert record.admissible

    def test_doi_normalized(self):
        """Test resolver prefixes and case are dropped from DOIs."""
        record = parse_record(record_line("https://doi.org/10.1/ABC "))

        assert record.doi == "10.1/abc"

    def test_year_out_of_range(self):
        """Test year 23 is rejected."""
        with pytest.raises(InvalidRecordError):
            parse_record(record_line(year=23))

    def test_missing_doi(self):
        """Test records without doi are invalid."""
        with pytest.raises(InvalidRecordError):
            parse_record(json.dumps({"title": "x", "year": 2000}), line_no=4)

    def test_malformed_line_carries_line_number(self):
        """Test JSON errors report the line number."""
        with pytest.raises(RecordParseError) as exc:
            parse_record("{not json", line_no=7)

        assert exc.value.line_no == 7
        assert "line 7" in str(exc.value)

    def test_non_admitted_language(self):
        """Test German records parse but are not admissible."""
        record = parse_record(record_line(language="de"))

        assert record.language == Language.OTHER
        assert not record.admissible

    def test_negative_citations(self):
        """Test negative citation counts are invalid."""
        with pytest.raises(InvalidRecordError):
            parse_record(record_line(citations=-1))

    def test_round_trip(self):
        """Test the serialized form parses back to an equal record."""
        record = make_record(
            "10.5/rt", title="Mujeres", abstract="texto", language=Language.ES,
            disciplines=("4405 Gender Studies",), citations=3, source_tag="a.jsonl",
        )

        assert parse_record(json.dumps(record.to_json_dict())) == record


class TestIngest:
    """Tests for ingest."""

    def test_duplicates_dropped(self):
        """Test the first record of a doi wins."""
        lines = [
            record_line("10.1/a", title="first"),
            record_line("10.1/b"),
            record_line("10.1/A", title="second"),
        ]

        store, report = ingest(lines)

        assert len(store) == 2
        assert report.duplicates_dropped == 1
        assert store.get("10.1/a").title == "first"

    def test_empty_stream(self):
        """Test empty input gives an empty store and zero counters."""
        store, report = ingest([])

        assert len(store) == 0
        assert report == IngestReport()

    def test_language_filter(self):
        """Test records in other languages are counted, not admitted."""
        lines = [record_line(f"10.1/{i}", language="other" if i < 4 else "en") for i in range(10)]

        store, report = ingest(lines)

        assert report.admitted == 6
        assert report.rejected_language == 4
        assert len(store) == 6

    def test_counters_balance(self):
        """Test read equals the sum of all outcomes."""
        lines = [
            record_line("10.1/a"),
            record_line("10.1/a"),
            record_line("10.1/b", language="de"),
            record_line("10.1/c", year=23),
            "",
            record_line("10.1/d"),
        ]
        rejections: list[Rejection] = []

        _, report = ingest(lines, rejections=rejections)

        assert report.read == 5
        assert report.balanced
        assert len(rejections) == 3
        assert rejections[-1].line_no == 4

    def test_mostly_malformed_aborts(self):
        """Test more than half unparseable lines abort ingest."""
        lines = ["{bad"] * 3 + [record_line("10.1/a"), record_line("10.1/b")]

        with pytest.raises(CorpusFormatError):
            ingest(lines)

    def test_half_malformed_tolerated(self):
        """Test exactly half unparseable lines still ingest."""
        lines = ["{bad", "{bad", record_line("10.1/a"), record_line("10.1/b")]

        store, report = ingest(lines)

        assert len(store) == 2
        assert report.rejected_invalid == 2


class TestIngestFiles:
    """Tests for sharded ingest."""

    def test_cross_shard_duplicates(self, tmp_path):
        """Test duplicates across shards resolve to the earlier shard."""
        first = tmp_path / "a.jsonl"
        second = tmp_path / "b.jsonl"
        first.write_text(record_line("10.1/a", title="from a") + "\n" + record_line("10.1/b") + "\n")
        second.write_text(record_line("10.1/a", title="from b") + "\n" + record_line("10.1/c") + "\n")

        store, report = ingest_files([first, second], workers=2)

        assert store.dois == ["10.1/a", "10.1/b", "10.1/c"]
        assert store.get("10.1/a").title == "from a"
        assert store.get("10.1/a").source_tag == "a.jsonl"
        assert report.admitted == 3
        assert report.duplicates_dropped == 1
        assert report.balanced

    def test_cross_shard_rejection_line(self, tmp_path):
        """Test a duplicate dropped across shards is reported at its shard line."""
        first = tmp_path / "a.jsonl"
        second = tmp_path / "b.jsonl"
        first.write_text(record_line("10.1/a") + "\n")
        second.write_text(record_line("10.1/c") + "\n\n" + record_line("10.1/a", source_tag="batch-7") + "\n")
        rejections: list[Rejection] = []

        ingest_files([first, second], workers=2, rejections=rejections)

        assert [(r.source_tag, r.line_no) for r in rejections] == [("b.jsonl", 3)]
        assert "across shards" in rejections[0].reason

    def test_store_dump_and_load(self, tmp_path):
        """Test a dumped store loads back equal."""
        store = RecordStore([make_record("10.1/a", title="Género"), make_record("10.1/b", year=1999)])
        path = tmp_path / "records.jsonl"

        assert store.dump(path) == 2
        loaded = RecordStore.load(path)

        assert loaded.dois == store.dois
        assert list(loaded) == list(store)
