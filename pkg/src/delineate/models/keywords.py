"""Keyword list types."""

from enum import StrEnum

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

KEYWORD_LANGUAGES = ("en", "es", "fr", "pt", "any")
REQUIRED_LANGUAGES = ("en", "es", "fr", "pt")


class Origin(StrEnum):
    SEED = "seed"
    TOPIC_MINED = "topic-mined"
    MANUAL_ADDED = "manual-added"
    RECONFIGURED = "reconfigured"


class Action(StrEnum):
    ACCEPT = "accept"
    REJECT_GENERIC = "reject-generic"
    RECONFIGURE = "reconfigure"
    ADD = "add"


class KeywordSpec(BaseModel):
    """One retrieval keyword; pattern is a regex over normalized text."""

    model_config = ConfigDict(frozen=True)

    keyword_id: str
    group: str = Field(..., min_length=1)
    language: str
    pattern: str = Field(..., min_length=1)
    origin: Origin

    @field_validator("language")
    @classmethod
    def _check_language(cls, v: str) -> str:
        if v not in KEYWORD_LANGUAGES:
            raise ValueError(f"unsupported keyword language {v!r}")
        return v


class CurationDecision(BaseModel):
    model_config = ConfigDict(frozen=True)

    candidate: str = Field(..., min_length=1)
    action: Action
    replacements: tuple[str, ...] = ()
    note: str = ""

    @model_validator(mode="after")
    def _check_replacements(self) -> "CurationDecision":
        if self.action is Action.RECONFIGURE and not self.replacements:
            raise ValueError(f"reconfigure decision for {self.candidate!r} has no replacements")
        return self


class Candidate(BaseModel):
    """A topic-mined term with the topics that proposed it."""

    model_config = ConfigDict(frozen=True)

    term: str
    provenance: tuple[tuple[int, float], ...]

    @property
    def max_score(self) -> float:
        return max(score for _, score in self.provenance)

    @property
    def topic_ids(self) -> list[int]:
        return [topic_id for topic_id, _ in self.provenance]


class TermTrace(BaseModel):
    """What one curated or seed term contributed to the keyword list.

    duplicates holds the ids of earlier specs that already carried a pattern
    this term expanded to; those patterns are not repeated.
    """

    model_config = ConfigDict(frozen=True)

    term: str
    group: str
    origin: Origin
    expanded: int = Field(..., ge=0)
    kept: int = Field(..., ge=0)
    duplicates: tuple[str, ...] = ()

    @property
    def merged(self) -> bool:
        return self.expanded > 0 and self.kept == 0


class CurationAudit(BaseModel):
    """Terms per origin as decided, specs per origin as kept, and the per-term trace.

    accepted and added count decisions, reconfigured counts replacement
    phrases and seeds counts seed terms.
    """

    accepted: int = 0
    reconfigured: int = 0
    added: int = 0
    seeds: int = 0
    rejected: int = 0
    specs: dict[str, int] = Field(default_factory=dict)
    terms: list[TermTrace] = Field(default_factory=list)

    @property
    def total(self) -> int:
        """Specs accounted for by the trace."""
        return sum(t.kept for t in self.terms)

    @property
    def merged_terms(self) -> list[str]:
        return [t.term for t in self.terms if t.merged]


class CompileReport(BaseModel):
    spec_count: int
    pattern_count: int
    group_count: int
    groups: list[str]
    per_language: dict[str, int]
    literal_patterns: int
    residual_patterns: int
    warnings: list[str] = Field(default_factory=list)
    version: str | None = None
    declared: dict[str, int] = Field(default_factory=dict)

    @property
    def matches_declared(self) -> bool:
        checks = {"specs": self.spec_count, "groups": self.group_count, "patterns": self.pattern_count}
        return all(checks[key] == value for key, value in self.declared.items() if key in checks)


class KeywordTemplate(BaseModel):
    """A curated term before language expansion."""

    model_config = ConfigDict(frozen=True)

    term: str = Field(..., min_length=1)
    group: str = Field(..., min_length=1)
    origin: Origin
    whole_word: bool = False
    surfaces: dict[str, tuple[str, ...]] = Field(default_factory=dict)
