"""Exception hierarchy shared across the pipeline.

Every error the CLI surfaces maps to a stable exit code: input problems
exit 2, generation-backend problems exit 3.
"""

from __future__ import annotations


class C3GenError(Exception):
    """Base class for all pipeline errors. Treated as an input error (exit 2)."""

    exit_code = 2


class UnsupportedLanguageError(C3GenError):
    """A language tag outside the configured set was requested."""


class RepoNotFoundError(C3GenError):
    """The repository root does not exist or is not a directory."""


class NotIndexedError(C3GenError):
    """A file was requested that is not present in the definition index."""


class DiffParseError(C3GenError):
    """A unified diff could not be parsed.

    ``offset`` is the byte offset of the offending line in the input text.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class ExtractionError(C3GenError):
    """A snippet could not be extracted; carries the triggering record."""

    def __init__(self, message: str, record=None):
        super().__init__(message)
        self.record = record


class PromptTooLargeError(C3GenError):
    """The rendered prompt exceeds the configured character ceiling."""


class CorpusError(C3GenError):
    """Corpus building, filtering, or splitting failed."""


class EmptyRunError(C3GenError):
    """An evaluation run was requested over zero items."""


class BackendError(C3GenError):
    """Base class for generation-backend failures (exit 3)."""

    exit_code = 3


class BackendAuthError(BackendError):
    """The backend rejected our credentials."""


class BackendTimeoutError(BackendError):
    """The backend did not answer within the configured budget, retries included."""


class BackendResponseError(BackendError):
    """The backend answered with something we cannot parse."""


class EmptyGenerationError(BackendError):
    """The backend produced an empty message."""
