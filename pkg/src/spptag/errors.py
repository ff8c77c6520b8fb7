"""Exception taxonomy shared across the package."""


class SpptagError(Exception):
    """Base class for all package errors."""


class ConfigError(SpptagError):
    """Invalid experiment configuration text.

    Carries the 1-based line number when the offending line is known.
    """

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class AnalysisError(SpptagError):
    """Correlation analysis cannot produce a defined result."""


class DomainError(SpptagError):
    """Requested evaluation outside a tabulated or physical domain."""


class FitError(SpptagError):
    """Parameter estimation failed to converge or is ill-posed."""


class TagFileError(SpptagError):
    """Base class for tag-file format errors."""


class TagFileMagicError(TagFileError):
    """File does not start with the expected magic bytes."""


class TagFileVersionError(TagFileError):
    """Unsupported format version."""


class TagFileTruncatedError(TagFileError):
    """Body ends mid-record or header is incomplete."""


class TagFileUnsortedError(TagFileError):
    """Record times decrease; reports the first offending byte offset."""

    def __init__(self, offset: int):
        self.offset = offset
        super().__init__(f"record at byte offset {offset} breaks time ordering")
