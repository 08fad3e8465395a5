"""Exception hierarchy shared across the pipeline."""


class PipelineError(Exception):
    """Base class for all errors raised by this package."""


class EmptyDocument(PipelineError):
    """Raised when a transcript or summary has no usable text."""


class EmptyCorpus(PipelineError):
    """Raised when no transcript/summary pairs could be loaded."""


class IoError(PipelineError):
    """Raised when a required file or directory is missing or unreadable."""


class DivisionDegenerate(PipelineError):
    """Raised when a ratio denominator is zero (e.g. summaries with no words)."""


class DegenerateVocabulary(PipelineError):
    """Raised when stop-word filtering leaves an empty vocabulary."""


class TooFewDocuments(PipelineError):
    """Raised when the topic count exceeds the number of usable questions."""


class EmptyBank(PipelineError):
    """Raised when an operation requires a non-empty question bank."""


class NoQuestions(PipelineError):
    """Raised when context construction is attempted with no questions."""


class NoTopicsDetected(PipelineError):
    """Raised when a test document matches no topic keywords."""


class ServiceUnavailable(PipelineError):
    """Raised when an external HTTP service cannot be reached or returns non-200."""


class MalformedResponse(PipelineError):
    """Raised when an external service responds with an unparseable payload."""


class EmptyGeneration(PipelineError):
    """Raised when the generation service returns no usable bullets."""


class MalformedPrompt(PipelineError):
    """Raised when a prompt lacks the instruction/context separator."""


class EmptyContext(PipelineError):
    """Raised when prompt construction is attempted on an empty context."""


class AlignmentError(PipelineError):
    """Raised when prediction/reference/source id sets do not match."""

    def __init__(self, message: str, offending_ids=()):
        super().__init__(message)
        self.offending_ids = sorted(offending_ids)


class MissingArtifact(PipelineError):
    """Raised when a pipeline stage's upstream output is absent."""


class ConfigInvalid(PipelineError):
    """Raised when pipeline configuration values are out of range."""
