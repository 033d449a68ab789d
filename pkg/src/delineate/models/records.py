"""Bibliographic record types."""

from enum import StrEnum

from pydantic import BaseModel, ConfigDict, Field, field_validator

YEAR_MIN = 1400
YEAR_MAX = 2100

_DOI_PREFIXES = ("https://doi.org/", "http://doi.org/", "https://dx.doi.org/", "http://dx.doi.org/", "doi:")


class Language(StrEnum):
    EN = "en"
    ES = "es"
    FR = "fr"
    PT = "pt"
    OTHER = "other"

    @classmethod
    def coerce(cls, value: str | None) -> "Language":
        """Map any language tag onto the four admitted languages or OTHER."""
        tag = (value or "").strip().lower()
        try:
            return cls(tag)
        except ValueError:
            return cls.OTHER


ADMITTED_LANGUAGES = frozenset({Language.EN, Language.ES, Language.FR, Language.PT})


def normalize_doi(value: str) -> str:
    """Lowercase and trim a DOI, dropping resolver prefixes."""
    doi = value.strip().lower()
    for prefix in _DOI_PREFIXES:
        if doi.startswith(prefix):
            doi = doi[len(prefix):]
            break
    return doi.strip()


class BibRecord(BaseModel):
    """One bibliographic document."""

    model_config = ConfigDict(frozen=True)

    doi: str
    title: str = ""
    abstract: str | None = None
    journal_id: str = ""
    journal_name: str = ""
    year: int = Field(..., ge=YEAR_MIN, le=YEAR_MAX)
    language: Language = Language.OTHER
    disciplines: tuple[str, ...] = ()
    citations: int = Field(0, ge=0)
    source_tag: str = ""

    @field_validator("doi")
    @classmethod
    def _normalize_doi(cls, v: str) -> str:
        doi = normalize_doi(v)
        if not doi:
            raise ValueError("doi is empty")
        return doi

    @property
    def admissible(self) -> bool:
        return self.language in ADMITTED_LANGUAGES

    def to_json_dict(self) -> dict:
        """Serialize in the documented input schema (round-trips through parse_record)."""
        return {
            "doi": self.doi,
            "title": self.title,
            "abstract": self.abstract,
            "journal_id": self.journal_id,
            "journal_name": self.journal_name,
            "year": self.year,
            "language": self.language.value,
            "disciplines": list(self.disciplines),
            "citations": self.citations,
            "source_tag": self.source_tag,
        }


class Rejection(BaseModel):
    """A line that did not make it into the store."""

    model_config = ConfigDict(frozen=True)

    line_no: int
    reason: str
    source_tag: str = ""
    raw: str = ""


class IngestReport(BaseModel):
    """Ingest counters; read always equals the sum of the other four."""

    read: int = 0
    admitted: int = 0
    rejected_language: int = 0
    rejected_invalid: int = 0
    duplicates_dropped: int = 0

    @property
    def balanced(self) -> bool:
        return self.read == (
            self.admitted + self.rejected_language + self.rejected_invalid + self.duplicates_dropped
        )

    def __add__(self, other: "IngestReport") -> "IngestReport":
        return IngestReport(
            read=self.read + other.read,
            admitted=self.admitted + other.admitted,
            rejected_language=self.rejected_language + other.rejected_language,
            rejected_invalid=self.rejected_invalid + other.rejected_invalid,
            duplicates_dropped=self.duplicates_dropped + other.duplicates_dropped,
        )
