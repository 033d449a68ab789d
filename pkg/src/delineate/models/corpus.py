"""Retrieval and segmentation types."""

from dataclasses import dataclass, field
from enum import StrEnum

from pydantic import BaseModel, ConfigDict, Field


class Segment(StrEnum):
    CORE = "Core"
    NOT_CORE = "NotCore"
    TOTAL = "Total"


class LanguagePolicy(StrEnum):
    STRICT = "strict"
    PERMISSIVE = "permissive"


@dataclass(frozen=True, slots=True)
class MatchResult:
    """Groups and keyword ids one title matched; never empty."""

    doi: str
    matched_groups: frozenset[str]
    matched_keyword_ids: frozenset[str]

    def to_json_dict(self) -> dict:
        return {
            "doi": self.doi,
            "matched_groups": sorted(self.matched_groups),
            "matched_keyword_ids": sorted(self.matched_keyword_ids),
        }


@dataclass
class ScanReport:
    titles_scanned: int = 0
    titles_matched: int = 0
    group_counts: dict[str, int] = field(default_factory=dict)
    wall_time: float = 0.0
    repetitions: int = 1

    @property
    def throughput(self) -> float:
        return self.titles_scanned / self.wall_time if self.wall_time > 0 else 0.0

    def merge(self, other: "ScanReport") -> "ScanReport":
        counts = dict(self.group_counts)
        for group, n in other.group_counts.items():
            counts[group] = counts.get(group, 0) + n
        return ScanReport(
            titles_scanned=self.titles_scanned + other.titles_scanned,
            titles_matched=self.titles_matched + other.titles_matched,
            group_counts=counts,
            wall_time=self.wall_time + other.wall_time,
            repetitions=self.repetitions,
        )

    def to_json_dict(self, include_timing: bool = True) -> dict:
        data = {
            "titles_scanned": self.titles_scanned,
            "titles_matched": self.titles_matched,
            "group_counts": dict(sorted(self.group_counts.items())),
        }
        if include_timing:
            data["wall_time"] = round(self.wall_time, 6)
            data["throughput"] = round(self.throughput, 1)
            data["repetitions"] = self.repetitions
        return data


class CorpusEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    doi: str
    segment: Segment
    in_core_journal: bool
    keyword_matched: bool
    matched_groups: tuple[str, ...] = ()


class CorpusSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    core_n: int = Field(0, ge=0)
    notcore_n: int = Field(0, ge=0)
    overlap_n: int = Field(0, ge=0)
    total_n: int = Field(0, ge=0)


class SegmentedCorpus(BaseModel):
    """Delineated corpus: entries sorted by doi plus summary counts."""

    model_config = ConfigDict(frozen=True)

    entries: tuple[CorpusEntry, ...]
    summary: CorpusSummary

    def in_segment(self, segment: Segment) -> list[CorpusEntry]:
        if segment is Segment.TOTAL:
            return list(self.entries)
        return [e for e in self.entries if e.segment is segment]
