"""Descriptive analytics result types."""

from pydantic import BaseModel, ConfigDict, Field


class SegmentCells(BaseModel):
    """Raw composition-table cells for one segment."""

    model_config = ConfigDict(frozen=True)

    articles: int = Field(..., ge=0)
    journals: int = Field(..., ge=0)
    citation_sum: int = Field(0, ge=0)


class SegmentRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    segment: str
    articles: int
    journals: int
    articles_per_journal: int
    average_citations: float
    article_share: float
    journal_share: float


class SegmentStats(BaseModel):
    model_config = ConfigDict(frozen=True)

    rows: tuple[SegmentRow, ...]

    def row(self, segment: str) -> SegmentRow:
        for row in self.rows:
            if row.segment == segment:
                return row
        raise KeyError(segment)


class TimePoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    year: int
    count: int
    denominator: int
    relative_frequency: float | None


class TimeSeries(BaseModel):
    model_config = ConfigDict(frozen=True)

    segment: str
    group: str | None = None
    points: tuple[TimePoint, ...]

    def frequency(self, year: int) -> float | None:
        for point in self.points:
            if point.year == year:
                return point.relative_frequency
        raise KeyError(year)


class DisciplineDistribution(BaseModel):
    """Discipline shares per segment; each segment sums to 1."""

    model_config = ConfigDict(frozen=True)

    threshold: float
    shares: dict[str, tuple[tuple[str, float], ...]]

    def share(self, segment: str, discipline: str) -> float:
        return dict(self.shares[segment]).get(discipline, 0.0)


class KeywordFrequency(BaseModel):
    model_config = ConfigDict(frozen=True)

    group: str
    doc_count: int
    relative_frequency: float
