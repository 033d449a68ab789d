"""Journal-level types used to select the specialized core."""

from enum import StrEnum

from pydantic import BaseModel, ConfigDict, Field, model_validator

UNKNOWN_JOURNAL = "UNKNOWN"

# Minimum English seeds used to match journal names.
REQUIRED_SEEDS = frozenset({
    "gender", "sex", "woman", "women", "feminism", "feminist", "masculinities",
    "lgbt", "lesbian", "gay", "homosexual", "bisexual", "queer", "girl",
})

# Divisions a journal may not belong to exclusively and still be core.
DEFAULT_EXCLUDED_DIVISIONS = frozenset({
    "Medical and Health Sciences",
    "Biological Sciences",
    "Engineering",
    "Psychology and Cognitive Sciences",
})


class MatchMode(StrEnum):
    STEM = "stem"
    WHOLE_WORD = "whole-word"


class SeedTerm(BaseModel):
    model_config = ConfigDict(frozen=True)

    term_id: str
    mode: MatchMode
    surfaces: dict[str, tuple[str, ...]]
    group: str = ""

    @property
    def group_name(self) -> str:
        return self.group or self.term_id


class SeedTermSet(BaseModel):
    """Seed terms keyed by term id, with per-language surface forms."""

    model_config = ConfigDict(frozen=True)

    terms: tuple[SeedTerm, ...]

    @model_validator(mode="after")
    def _check_required(self) -> "SeedTermSet":
        missing = REQUIRED_SEEDS - {t.term_id for t in self.terms}
        if missing:
            raise ValueError(f"seed set lacks required terms: {sorted(missing)}")
        return self

    def get(self, term_id: str) -> SeedTerm | None:
        for term in self.terms:
            if term.term_id == term_id:
                return term
        return None


class JournalProfile(BaseModel):
    """Per-journal aggregate over the record store."""

    model_config = ConfigDict(frozen=True)

    journal_id: str
    name: str
    article_count: int = Field(..., ge=1)
    discipline_shares: dict[str, float] = Field(default_factory=dict)
    group_ratio: float | None = Field(None, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _check_shares(self) -> "JournalProfile":
        if sum(self.discipline_shares.values()) > 1.0 + 1e-9:
            raise ValueError(f"discipline shares of {self.journal_id} exceed 1")
        return self


class CorePolicy(BaseModel):
    """Curation overlays applied on top of seed matching."""

    model_config = ConfigDict(frozen=True)

    include_list: frozenset[str] = frozenset()
    exclude_list: frozenset[str] = frozenset()
    include_sources: dict[str, str] = Field(default_factory=dict)
    excluded_divisions: frozenset[str] = DEFAULT_EXCLUDED_DIVISIONS
    exclusivity_threshold: float = Field(1.0, gt=0.0, le=1.0)
    review_ratio: float = Field(0.5, gt=0.0, le=1.0)

    @model_validator(mode="after")
    def _check_disjoint(self) -> "CorePolicy":
        overlap = self.include_list & self.exclude_list
        if overlap:
            raise ValueError(f"journals both included and excluded: {sorted(overlap)}")
        return self


class Decision(StrEnum):
    INCLUDE = "include"
    EXCLUDE = "exclude"
    REVIEW = "review"


class Reason(StrEnum):
    SEED_MATCH = "seed-match"
    INCLUDE_LIST = "include-list"
    EXCLUDED_DIVISION = "excluded-division"
    EXCLUDE_LIST = "exclude-list"
    GROUP_RATIO = "group-ratio"


class JournalDecision(BaseModel):
    model_config = ConfigDict(frozen=True)

    journal_id: str
    name: str
    decision: Decision
    reason: Reason
    matched_terms: tuple[str, ...] = ()
    group_ratio: float | None = None
    source: str = ""


class CoreSelection(BaseModel):
    """Core journal ids plus the decision trace that produced them."""

    model_config = ConfigDict(frozen=True)

    core_ids: frozenset[str]
    trace: tuple[JournalDecision, ...]
    populated_count: int
    unknown_policy_ids: tuple[str, ...] = ()

    @property
    def selected_count(self) -> int:
        return len(self.core_ids)
