"""Tests for utility functions."""

import pytest

from delineate.utils.calculations import (
    articles_per_journal,
    average,
    median_throughput,
    percent_share,
    relative_frequency,
    round_half_away,
)
from delineate.utils.io import atomic_directory, read_ndjson, sha256_params, write_ndjson
from delineate.utils.text import load_stopwords, normalize_text, words


class TestNormalizeText:
    """Tests for text normalization."""

    def test_folds_diacritics(self):
        """Test accented letters fold to their base letter."""
        assert normalize_text("Género y Sociedad") == "genero y sociedad"

    def test_collapses_case_and_whitespace(self):
        """Test case folding and whitespace collapsing."""
        assert normalize_text("  SEX   ROLES ") == "sex roles"

    def test_hyphens_become_spaces(self):
        """Test hyphenated phrases equal their spaced form."""
        assert normalize_text("Gender-based violence") == "gender based violence"
        assert normalize_text("non‐binary") == "non binary"

    def test_idempotent(self):
        """Test normalizing twice changes nothing."""
        for raw in ["Féministe", "  Mulheres   e   Política ", "LGBTQ+ Rights", "Ärzte—Frauen"]:
            once = normalize_text(raw)
            assert normalize_text(once) == once

    def test_latin_input_folds_to_ascii(self):
        """Test Latin-script text has no accented letters after folding."""
        result = normalize_text("Violência Doméstica, Niñas y Mujeres: l'égalité")
        assert result.isascii()

    @pytest.mark.parametrize(
        ("raw", "expected"),
        [
            ("Łódź", "lodz"),
            ("Søren Ærø", "soren aero"),
            ("Đorđe", "dorde"),
            ("Œuvre et sœur", "oeuvre et soeur"),
            ("Þórdís Straße", "thordis strasse"),
        ],
    )
    def test_undecomposable_letters(self, raw, expected):
        """Test letters without a combining-mark decomposition are transliterated."""
        result = normalize_text(raw)

        assert result == expected
        assert result.isascii()
        assert normalize_text(result) == result

    def test_empty_input(self):
        """Test None and empty strings normalize to empty."""
        assert normalize_text(None) == ""
        assert normalize_text("   ") == ""

    def test_words_split_on_punctuation(self):
        """Test word tokens drop punctuation."""
        assert words(normalize_text("Women's work: a review")) == ["women", "s", "work", "a", "review"]


class TestStopwords:
    """Tests for the shipped stopword lists."""

    def test_lists_per_language(self):
        """Test every admitted language has a list."""
        stopwords = load_stopwords()

        assert set(stopwords) == {"en", "es", "fr", "pt"}
        assert {"the", "of"} <= stopwords["en"]
        assert "en" in stopwords["es"]
        assert not any(line.startswith("#") for line in stopwords["en"])

    def test_missing_directory_files(self, tmp_path):
        """Test a directory without lists yields empty sets."""
        (tmp_path / "en.txt").write_text("# comment\nThe\n", encoding="utf-8")

        stopwords = load_stopwords(tmp_path)

        assert stopwords["en"] == frozenset({"the"})
        assert stopwords["pt"] == frozenset()


class TestRounding:
    """Tests for half-away-from-zero rounding."""

    def test_half_rounds_up(self):
        """Test 0.5 rounds away from zero unlike round()."""
        assert round_half_away(2.5) == 3.0
        assert round_half_away(0.125, 2) == 0.13
        assert round_half_away(-2.5) == -3.0

    def test_articles_per_journal(self):
        """Test A/J values from known cells."""
        assert articles_per_journal(160_030, 282) == 567
        assert articles_per_journal(1_807_272, 60_637) == 30
        assert articles_per_journal(1_967_302, 60_919) == 32
        assert articles_per_journal(5, 0) == 0

    def test_percent_share(self):
        """Test share of the core overlapping with keyword matches."""
        assert percent_share(87_153, 160_030) == 54.5
        assert percent_share(160_030, 1_967_302) == 8.1

    def test_average(self):
        """Test rounded averages."""
        assert average(7, 1) == 7.0
        assert average(1_408_264, 160_030) == 8.8
        assert average(10, 0) == 0.0


class TestRelativeFrequency:
    """Tests for relative frequency."""

    def test_zero_denominator_is_none(self):
        """Test undefined frequencies are None, not 0."""
        assert relative_frequency(0, 0) is None

    def test_ratio(self):
        """Test plain ratio."""
        assert relative_frequency(1, 4) == 0.25


class TestMedianThroughput:
    """Tests for benchmark aggregation."""

    def test_median_of_repetitions(self):
        """Test median wall time and items per second."""
        assert median_throughput([3.0, 1.0, 2.0], 10) == (2.0, 5.0)

    def test_no_timings(self):
        """Test empty timings."""
        assert median_throughput([], 10) == (0.0, 0.0)


class TestAtomicDirectory:
    """Tests for atomic stage output directories."""

    def test_replaces_target_on_success(self, tmp_path):
        """Test new contents replace the old directory."""
        target = tmp_path / "stage"
        target.mkdir()
        (target / "old.txt").write_text("old")

        with atomic_directory(target) as tmp:
            (tmp / "new.txt").write_text("new")

        assert (target / "new.txt").read_text() == "new"
        assert not (target / "old.txt").exists()
        assert [p.name for p in tmp_path.iterdir()] == ["stage"]

    def test_leaves_target_on_error(self, tmp_path):
        """Test a failing body keeps the previous output."""
        target = tmp_path / "stage"
        target.mkdir()
        (target / "old.txt").write_text("old")

        with pytest.raises(RuntimeError):
            with atomic_directory(target) as tmp:
                (tmp / "partial.txt").write_text("partial")
                raise RuntimeError("boom")

        assert (target / "old.txt").read_text() == "old"
        assert [p.name for p in tmp_path.iterdir()] == ["stage"]


class TestSerialization:
    """Tests for canonical JSON helpers."""

    def test_ndjson_round_trip(self, tmp_path):
        """Test rows survive write and read."""
        path = tmp_path / "rows.jsonl"
        rows = [{"b": 1, "a": "género"}, {"a": None}]

        assert write_ndjson(path, rows) == 2
        assert list(read_ndjson(path)) == rows
        assert path.read_text(encoding="utf-8").splitlines()[0] == '{"a": "género", "b": 1}'

    def test_param_digest_ignores_key_order(self):
        """Test digests use sorted keys."""
        assert sha256_params({"a": 1, "b": 2}) == sha256_params({"b": 2, "a": 1})
        assert sha256_params({"a": 1}) != sha256_params({"a": 2})
