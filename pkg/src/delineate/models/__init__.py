# Data models
from delineate.models.corpus import (
    CorpusEntry,
    CorpusSummary,
    LanguagePolicy,
    MatchResult,
    ScanReport,
    Segment,
    SegmentedCorpus,
)
from delineate.models.journals import (
    CorePolicy,
    CoreSelection,
    Decision,
    JournalDecision,
    JournalProfile,
    MatchMode,
    Reason,
    SeedTerm,
    SeedTermSet,
)
from delineate.models.keywords import (
    Action,
    Candidate,
    CompileReport,
    CurationDecision,
    KeywordSpec,
    Origin,
)
from delineate.models.records import BibRecord, IngestReport, Language, Rejection
from delineate.models.topics import TokenizedDoc, TopicParams, TopicSummary

__all__ = [
    "Action",
    "BibRecord",
    "Candidate",
    "CompileReport",
    "CorePolicy",
    "CoreSelection",
    "CorpusEntry",
    "CorpusSummary",
    "CurationDecision",
    "Decision",
    "IngestReport",
    "JournalDecision",
    "JournalProfile",
    "KeywordSpec",
    "Language",
    "LanguagePolicy",
    "MatchMode",
    "MatchResult",
    "Origin",
    "Reason",
    "Rejection",
    "ScanReport",
    "SeedTerm",
    "SeedTermSet",
    "Segment",
    "SegmentedCorpus",
    "TokenizedDoc",
    "TopicParams",
    "TopicSummary",
]
