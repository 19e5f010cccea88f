"""Exception types shared across the package."""


class ConflictMetricsError(Exception):
    """Base class for all errors raised by this package."""


class FormulaParseError(ConflictMetricsError):
    """Syntax error in a formula; carries the 0-based offset in the input."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class KbParseError(ConflictMetricsError):
    """Syntax error in a knowledge-base file; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class GcnfFormatError(ConflictMetricsError):
    """Malformed GCNF/DIMACS input."""


class MusImportError(ConflictMetricsError):
    """One or more lines of an imported MUS list failed validation.

    ``failures`` is a list of (line_number, reason) pairs; nothing is
    silently dropped.
    """

    def __init__(self, failures):
        self.failures = list(failures)
        detail = "; ".join(f"line {ln}: {why}" for ln, why in self.failures)
        super().__init__(f"MUS list rejected: {detail}")


class ResourceLimitError(ConflictMetricsError):
    """A configured resource cap (oracle calls, instance size, variables) was hit."""
