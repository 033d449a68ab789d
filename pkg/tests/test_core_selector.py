"""Tests for core journal selection."""

from importlib import resources

import pandas as pd
import pytest
from pydantic import ValidationError

from delineate.models.journals import CorePolicy, Decision, JournalProfile, Reason
from delineate.services.core_selector import (
    division_name,
    load_policy,
    match_journal_name,
    profile_journals,
    read_core_ids,
    select_core,
    write_selection,
)
from delineate.services.ingest import RecordStore
from tests.conftest import make_record

MEDICAL = "11 Medical and Health Sciences"
PSYCHOLOGY = "17 Psychology and Cognitive Sciences"
HUMANITIES = "22 Philosophy and Religious Studies"
GENDER_STUDIES = "4405 Gender Studies"


def _profile(journal_id: str, name: str, shares: dict[str, float] | None = None, ratio=None):
    return JournalProfile(
        journal_id=journal_id,
        name=name,
        article_count=10,
        discipline_shares=shares or {},
        group_ratio=ratio,
    )


def _decision(selection, journal_id):
    return next(d for d in selection.trace if d.journal_id == journal_id)


class TestMatchJournalName:
    """Tests for seed matching on journal names."""

    def test_stem_at_word_start(self, seeds):
        """Test stem seeds match at the start of a word."""
        assert match_journal_name("Journal of Sex Research", seeds) == {"sex"}

    def test_stem_inside_word(self, seeds):
        """Test a stem inside a word does not match."""
        assert match_journal_name("Essex Review", seeds) == set()

    def test_multilingual_stem(self, seeds):
        """Test Spanish and Portuguese surfaces of a stem seed."""
        assert match_journal_name("Revista Estudios Feministas", seeds) == {"feminist"}

    def test_whole_word_plural(self, seeds):
        """Test whole-word seeds accept a plural s but no other suffix."""
        assert match_journal_name("Journal of Lesbian Studies", seeds) == {"lesbian"}
        assert match_journal_name("Lesbians in Europe", seeds) == {"lesbian"}
        assert match_journal_name("Girlhood Studies", seeds) == set()

    def test_hyphenated_and_accented(self, seeds):
        """Test names are normalized before matching."""
        assert match_journal_name("Cadernos de Gênero e Diversidade", seeds) == {"gender"}
        assert match_journal_name("LGBTQ-Policy Journal", seeds) == {"lgbt"}


class TestProfileJournals:
    """Tests for journal profiles."""

    def test_counts_per_journal(self):
        """Test one profile per journal with article counts."""
        store = RecordStore(
            make_record(f"10.1/{i}", journal_id="jour.a" if i < 3 else "jour.b") for i in range(5)
        )

        profiles = profile_journals(store)

        assert [(p.journal_id, p.article_count) for p in profiles] == [("jour.a", 3), ("jour.b", 2)]

    def test_group_ratio(self):
        """Test the share of articles in the classification group."""
        store = RecordStore(
            make_record(f"10.1/{i}", disciplines=(GENDER_STUDIES,) if i < 2 else (HUMANITIES,))
            for i in range(4)
        )

        [profile] = profile_journals(store)

        assert profile.group_ratio == 0.5

    def test_fractional_discipline_shares(self):
        """Test multi-discipline records split their weight."""
        store = RecordStore([
            make_record("10.1/a", disciplines=(PSYCHOLOGY, HUMANITIES)),
            make_record("10.1/b", disciplines=(PSYCHOLOGY,)),
        ])

        [profile] = profile_journals(store)

        assert profile.discipline_shares == {PSYCHOLOGY: 0.75, HUMANITIES: 0.25}

    def test_empty_journal_id(self):
        """Test records without a journal id group under UNKNOWN."""
        store = RecordStore([make_record("10.1/a", journal_id="")])

        [profile] = profile_journals(store)

        assert profile.journal_id == "UNKNOWN"

    def test_division_name(self):
        """Test numeric codes are stripped from division labels."""
        assert division_name(MEDICAL) == "Medical and Health Sciences"
        assert division_name("Gender Studies") == "Gender Studies"


class TestSelectCore:
    """Tests for select_core."""

    def test_exclusive_medical_journal_excluded(self, seeds):
        """Test a name match in an exclusively medical journal is excluded."""
        profiles = [_profile("jour.m", "Journal of Sexual Medicine", {MEDICAL: 1.0})]

        selection = select_core(profiles, seeds, CorePolicy())

        assert selection.core_ids == frozenset()
        decision = _decision(selection, "jour.m")
        assert decision.decision is Decision.EXCLUDE
        assert decision.reason is Reason.EXCLUDED_DIVISION

    def test_include_list_without_match(self, seeds):
        """Test include-listed journals enter the core without a seed match."""
        profiles = [_profile("jour.x", "Revista Latinoamericana de Estudios Sociales")]
        policy = CorePolicy(include_list=frozenset({"jour.x"}), include_sources={"jour.x": "latindex"})

        selection = select_core(profiles, seeds, policy)

        assert selection.core_ids == {"jour.x"}
        decision = _decision(selection, "jour.x")
        assert decision.reason is Reason.INCLUDE_LIST
        assert decision.source == "latindex"

    def test_mixed_disciplines_not_exclusive(self, seeds):
        """Test 60% psychology and 40% humanities stays in the core."""
        profiles = [_profile("jour.l", "Journal of LGBT Youth", {PSYCHOLOGY: 0.6, HUMANITIES: 0.4})]

        selection = select_core(profiles, seeds, CorePolicy())

        assert selection.core_ids == {"jour.l"}
        assert _decision(selection, "jour.l").reason is Reason.SEED_MATCH
        assert _decision(selection, "jour.l").matched_terms == ("lgbt",)

    def test_exclude_list_wins(self, seeds):
        """Test exclude-listed journals stay out despite a seed match."""
        profiles = [_profile("jour.w", "Women's Studies Quarterly")]
        policy = CorePolicy(exclude_list=frozenset({"jour.w"}))

        selection = select_core(profiles, seeds, policy)

        assert selection.core_ids == frozenset()
        assert _decision(selection, "jour.w").reason is Reason.EXCLUDE_LIST

    def test_group_ratio_flags_review(self, seeds):
        """Test unmatched journals dominated by the group are reviewed, not included."""
        profiles = [_profile("jour.g", "Estudos Sociais", {GENDER_STUDIES: 0.8}, ratio=0.8)]

        selection = select_core(profiles, seeds, CorePolicy())

        assert selection.core_ids == frozenset()
        assert _decision(selection, "jour.g").decision is Decision.REVIEW

    def test_unmatched_journal_not_traced(self, seeds):
        """Test journals with no signal leave no decision."""
        selection = select_core([_profile("jour.p", "Plant Physiology")], seeds, CorePolicy())

        assert selection.trace == ()

    def test_unknown_policy_ids(self, seeds):
        """Test policy ids without records are reported, not fatal."""
        policy = CorePolicy(include_list=frozenset({"jour.ghost"}))

        selection = select_core([_profile("jour.w", "Feminist Review")], seeds, policy)

        assert selection.unknown_policy_ids == ("jour.ghost",)
        assert selection.core_ids == {"jour.w", "jour.ghost"}
        assert selection.populated_count == 1

    def test_include_list_monotone(self, seeds):
        """Test growing the include list never shrinks the core."""
        profiles = [
            _profile("jour.a", "Gender and Society"),
            _profile("jour.b", "Economic Inquiry"),
            _profile("jour.c", "Sexual Medicine", {MEDICAL: 1.0}),
        ]

        small = select_core(profiles, seeds, CorePolicy())
        large = select_core(profiles, seeds, CorePolicy(include_list=frozenset({"jour.b", "jour.c"})))

        assert small.core_ids <= large.core_ids
        assert large.core_ids == {"jour.a", "jour.b", "jour.c"}

    def test_policy_lists_must_be_disjoint(self):
        """Test a journal cannot be both included and excluded."""
        with pytest.raises(ValidationError):
            CorePolicy(include_list=frozenset({"j"}), exclude_list=frozenset({"j"}))


class TestPolicyFiles:
    """Tests for policy and selection files."""

    def test_shipped_policy(self):
        """Test provenance tags are read from comments."""
        data = resources.files("delineate.data")
        with resources.as_file(data / "policy/include.txt") as include, \
                resources.as_file(data / "policy/exclude.txt") as exclude:
            policy = load_policy(include, exclude)

        assert policy.include_sources["jour.1002"] == "doaj"
        assert "jour.2001" in policy.exclude_list
        assert len(policy.include_list) == 4

    def test_write_and_read_selection(self, seeds, tmp_path):
        """Test the core list and trace are written."""
        profiles = [_profile("jour.b", "Masculinities Journal"), _profile("jour.a", "Gender & History")]
        selection = select_core(profiles, seeds, CorePolicy())

        write_selection(selection, tmp_path)

        assert read_core_ids(tmp_path) == {"jour.a", "jour.b"}
        assert (tmp_path / "core_journals.txt").read_text() == "jour.a\njour.b\n"
        trace = pd.read_csv(tmp_path / "core_trace.csv")
        assert list(trace["reason"]) == ["seed-match", "seed-match"]
        assert list(trace["matched_terms"]) == ["gender", "masculinities"]
