"""Topic mining types."""

from dataclasses import dataclass

from pydantic import BaseModel, ConfigDict, Field, model_validator

OUTLIER = -1
LABEL_TERMS = 4


@dataclass(frozen=True, slots=True)
class TokenizedDoc:
    doc_id: str
    tokens: tuple[str, ...]


class TopicSummary(BaseModel):
    """One mined topic and its ranked salient terms."""

    model_config = ConfigDict(frozen=True)

    topic_id: int = Field(..., ge=OUTLIER)
    size: int = Field(..., ge=0)
    top_terms: tuple[tuple[str, float], ...]
    label: str

    @model_validator(mode="after")
    def _check_order(self) -> "TopicSummary":
        keys = [(-score, term) for term, score in self.top_terms]
        if keys != sorted(keys):
            raise ValueError(f"top terms of topic {self.topic_id} are not ranked")
        return self

    @property
    def terms(self) -> list[str]:
        return [term for term, _ in self.top_terms]


def topic_label(topic_id: int, terms: list[str]) -> str:
    """Label in the "id_t1_t2_t3_t4" form."""
    return "_".join([str(topic_id), *terms[:LABEL_TERMS]])


class TopicParams(BaseModel):
    """Topic mining parameters; k None means ceil(N / 200)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    seed: int
    k: int | None = Field(None, ge=1)
    min_cluster_size: int = Field(50, ge=1)
    top_n: int = Field(10, ge=0)
    max_iter: int = Field(100, ge=1)
    tol: float = Field(1e-6, gt=0.0)
    docs_per_topic: int = Field(200, ge=1)
