"""Pipeline configuration and stage manifest types."""

from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator, model_validator

from delineate.models.corpus import LanguagePolicy
from delineate.models.journals import DEFAULT_EXCLUDED_DIVISIONS
from delineate.models.topics import TopicParams


def _resolve(value: Path | None, info: ValidationInfo) -> Path | None:
    """Resolve a path against the config file directory and require it to exist."""
    if value is None:
        return None
    base = (info.context or {}).get("base_dir")
    path = Path(value)
    if not path.is_absolute() and base is not None:
        path = Path(base) / path
    if not path.exists():
        raise ValueError(f"path does not exist: {path}")
    return path


class CorePolicyConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    include: Path | None = None
    exclude: Path | None = None
    excluded_divisions: tuple[str, ...] = tuple(sorted(DEFAULT_EXCLUDED_DIVISIONS))
    exclusivity_threshold: float = Field(1.0, gt=0.0, le=1.0)
    review_ratio: float = Field(0.5, gt=0.0, le=1.0)
    group_code: str | None = "4405"

    @field_validator("include", "exclude")
    @classmethod
    def _exists(cls, v: Path | None, info: ValidationInfo) -> Path | None:
        return _resolve(v, info)


class YearRanges(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    core: tuple[int, int] = (1976, 2022)
    notcore: tuple[int, int] = (1950, 2022)
    total: tuple[int, int] = (1950, 2022)

    @field_validator("core", "notcore", "total")
    @classmethod
    def _ordered(cls, v: tuple[int, int]) -> tuple[int, int]:
        if v[0] > v[1]:
            raise ValueError(f"inverted year range {v[0]}-{v[1]}")
        return v


class AnalyticsConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    series_groups: tuple[str, ...] = ("women", "gender", "sex", "feminis", "queer", "masculinity")
    sex_group: str = "sex"
    gender_group: str = "gender"
    discipline_threshold: float = Field(0.02, ge=0.0, le=1.0)
    whole_count: bool = False


class PipelineConfig(BaseModel):
    """The single JSON document that drives every stage."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    inputs: tuple[Path, ...] = Field(..., min_length=1)
    output_dir: Path
    seed_terms: Path | None = None
    surface_table: Path | None = None
    stopwords_dir: Path | None = None
    core_policy: CorePolicyConfig = CorePolicyConfig()
    topics: TopicParams
    curation_file: Path
    keyword_file: Path | None = None
    language_policy: LanguagePolicy = LanguagePolicy.STRICT
    shards: int = Field(1, ge=1)
    years: YearRanges = YearRanges()
    analytics: AnalyticsConfig = AnalyticsConfig()
    sample_seed: int = 0

    @field_validator("inputs")
    @classmethod
    def _inputs_exist(cls, v: tuple[Path, ...], info: ValidationInfo) -> tuple[Path, ...]:
        return tuple(_resolve(p, info) for p in v)

    @field_validator("seed_terms", "surface_table", "stopwords_dir", "curation_file", "keyword_file")
    @classmethod
    def _exists(cls, v: Path | None, info: ValidationInfo) -> Path | None:
        return _resolve(v, info)

    @field_validator("output_dir")
    @classmethod
    def _output_dir(cls, v: Path, info: ValidationInfo) -> Path:
        base = (info.context or {}).get("base_dir")
        if not v.is_absolute() and base is not None:
            return Path(base) / v
        return v

    @model_validator(mode="after")
    def _check_groups(self) -> "PipelineConfig":
        if not self.analytics.sex_group or not self.analytics.gender_group:
            raise ValueError("analytics.sex_group and analytics.gender_group must be set")
        return self


class StageEntry(BaseModel):
    """Manifest row for one completed stage."""

    name: str
    input_digest: str
    param_digest: str
    output_path: str
    completed_at: float
