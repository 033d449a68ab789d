"""Exception hierarchy shared by every stage."""


class DelineateError(Exception):
    """Base exception for delineation errors."""
    pass


class RecordParseError(DelineateError):
    """Raised when a line is not a valid serialized record."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        prefix = f"line {line_no}: " if line_no is not None else ""
        super().__init__(f"{prefix}{message}")


class InvalidRecordError(RecordParseError):
    """Raised when a record parses but violates a field constraint."""
    pass


class CorpusFormatError(DelineateError):
    """Raised when too many lines of an input fail to parse."""
    pass


class ParameterError(DelineateError):
    """Raised for out-of-range or inconsistent operation parameters."""
    pass


class VectorizationError(DelineateError):
    """Raised when documents cannot be turned into vectors."""
    pass


class CurationFileError(DelineateError):
    """Raised for malformed or inconsistent curation decisions."""
    pass


class PatternError(DelineateError):
    """Raised when a keyword pattern is invalid."""
    pass


class DuplicatePatternError(PatternError):
    """Raised when two keyword specs share a pattern and language."""

    def __init__(self, first_id: str, second_id: str, pattern: str, language: str):
        self.keyword_ids = (first_id, second_id)
        super().__init__(
            f"Duplicate pattern {pattern!r} ({language}) in keywords {first_id!r} and {second_id!r}"
        )


class ConsistencyError(DelineateError):
    """Raised when stage inputs do not come from the same run."""
    pass


class ConfigSchemaError(DelineateError):
    """Raised when the pipeline configuration fails validation."""

    def __init__(self, keys: list[str], details: list[str] | None = None):
        self.keys = keys
        self.details = details or []
        message = "Invalid configuration keys: " + ", ".join(keys)
        if self.details:
            message += " (" + "; ".join(self.details) + ")"
        super().__init__(message)


class DependencyError(DelineateError):
    """Raised when a stage runs before the stage it depends on."""

    def __init__(self, stage: str, missing: str):
        self.stage = stage
        self.missing = missing
        super().__init__(f"Stage {stage!r} requires stage {missing!r} to complete first")


class LockError(DelineateError):
    """Raised when another pipeline instance owns the output directory."""
    pass
