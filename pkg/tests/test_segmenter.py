"""Tests for corpus segmentation."""

import numpy as np
import pytest

from delineate.errors import ConsistencyError, CorpusFormatError, ParameterError
from delineate.models.corpus import CorpusSummary, MatchResult, Segment, SegmentedCorpus
from delineate.services.ingest import RecordStore
from delineate.services.segmenter import export, import_corpus, overlap_from_counts, segment
from delineate.utils.io import read_json
from tests.conftest import make_record


def _match(doi: str, *groups: str) -> MatchResult:
    groups = groups or ("gender",)
    return MatchResult(doi=doi, matched_groups=frozenset(groups), matched_keyword_ids=frozenset(f"{g}.en.0" for g in groups))


@pytest.fixture
def small_corpus():
    """Four records covering every segmentation rule."""
    store = RecordStore([
        make_record("10.1/d", journal_id="jour.core"),
        make_record("10.1/c", journal_id="jour.core"),
        make_record("10.1/b", journal_id="jour.other"),
        make_record("10.1/a", journal_id="jour.other"),
    ])
    matches = [_match("10.1/c", "sex", "gender"), _match("10.1/b", "queer")]
    return store, segment(store, {"jour.core"}, matches)


class TestSegment:
    """Tests for segment."""

    def test_core_without_match(self, small_corpus):
        """Test core journal records are Core even without a keyword match."""
        _, corpus = small_corpus
        entry = next(e for e in corpus.entries if e.doi == "10.1/d")

        assert entry.segment is Segment.CORE
        assert not entry.keyword_matched

    def test_core_wins_over_match(self, small_corpus):
        """Test matched core records stay Core and count as overlap."""
        _, corpus = small_corpus
        entry = next(e for e in corpus.entries if e.doi == "10.1/c")

        assert entry.segment is Segment.CORE
        assert entry.keyword_matched
        assert entry.matched_groups == ("gender", "sex")
        assert corpus.summary.overlap_n == 1

    def test_matched_outside_core(self, small_corpus):
        """Test matched records outside the core are NotCore; others are dropped."""
        _, corpus = small_corpus

        assert [e.doi for e in corpus.entries] == ["10.1/b", "10.1/c", "10.1/d"]
        assert corpus.in_segment(Segment.NOT_CORE)[0].doi == "10.1/b"
        assert corpus.summary == CorpusSummary(core_n=2, notcore_n=1, overlap_n=1, total_n=3)

    def test_unknown_doi(self):
        """Test matches must refer to stored records."""
        store = RecordStore([make_record("10.1/a")])

        with pytest.raises(ConsistencyError):
            segment(store, set(), [_match("10.1/zzz")])

    def test_unknown_journal_sentinel(self):
        """Test records without a journal id use the UNKNOWN journal."""
        store = RecordStore([make_record("10.1/a", journal_id="")])

        corpus = segment(store, {"UNKNOWN"}, [])

        assert corpus.summary.core_n == 1

    def test_matches_set_computation(self):
        """Test segmentation equals set arithmetic over planted memberships."""
        rng = np.random.default_rng(99)
        journals = [f"jour.{j}" for j in range(20)]
        core = set(journals[:5])
        records = [make_record(f"10.3/{i:05d}", journal_id=journals[int(rng.integers(20))]) for i in range(5_000)]
        matched = {r.doi for r in records if rng.random() < 0.3}
        store = RecordStore(records)

        corpus = segment(store, core, [_match(doi) for doi in sorted(matched)])

        in_core = {r.doi for r in records if r.journal_id in core}
        assert {e.doi for e in corpus.in_segment(Segment.CORE)} == in_core
        assert {e.doi for e in corpus.in_segment(Segment.NOT_CORE)} == matched - in_core
        assert corpus.summary.overlap_n == len(in_core & matched)
        assert corpus.summary.total_n == len(in_core | matched)


class TestOverlapFromCounts:
    """Tests for aggregate overlap arithmetic."""

    def test_reference_counts(self):
        """Test more than half of the core overlaps with keyword matches."""
        assert overlap_from_counts(160_030, 1_894_425, 1_807_272) == (87_153, 54.5)

    def test_inconsistent_counts(self):
        """Test impossible counts are rejected."""
        with pytest.raises(ParameterError):
            overlap_from_counts(10, 5, 20)
        with pytest.raises(ParameterError):
            overlap_from_counts(10, 50, 20)


class TestExport:
    """Tests for corpus files."""

    def test_round_trip(self, small_corpus, tmp_path):
        """Test export then import gives an equal corpus."""
        _, corpus = small_corpus
        path = tmp_path / "corpus.jsonl"

        export(corpus, path)

        assert import_corpus(path) == corpus
        assert len(path.read_text(encoding="utf-8").splitlines()) == corpus.summary.total_n + 1
        assert read_json(tmp_path / "corpus.summary.json")["overlap_n"] == 1

    def test_empty_corpus(self, tmp_path):
        """Test an empty corpus is a header-only file."""
        corpus = SegmentedCorpus(entries=(), summary=CorpusSummary())
        path = tmp_path / "corpus.jsonl"

        export(corpus, path)

        lines = path.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 1
        assert lines[0].startswith("# summary: ")
        assert import_corpus(path) == corpus

    def test_missing_header(self, tmp_path):
        """Test files without the summary header are rejected."""
        path = tmp_path / "corpus.jsonl"
        path.write_text('{"doi": "10.1/a"}\n', encoding="utf-8")

        with pytest.raises(CorpusFormatError):
            import_corpus(path)
