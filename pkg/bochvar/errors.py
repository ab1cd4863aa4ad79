"""
errors.py — Exception hierarchy for the workbench.

Input and domain failures also derive from ValueError (or LookupError for
unknown names) so the CLI and the HTTP layer can map them uniformly.
Verdicts such as counterexamples or invalid derivation steps are returned
as values and never raised.
"""

from typing import Optional


class BochvarError(Exception):
    """Base class for every failure raised by the workbench."""


class TermSyntaxError(BochvarError, ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line   = line
        self.column = column


class FormatError(BochvarError, ValueError):
    """Malformed algebra, system or derivation file."""

    def __init__(self, message: str, source: str = "<text>", line: Optional[int] = None):
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")
        self.source = source
        self.line   = line


class UnknownNameError(BochvarError, LookupError):
    """Unknown built-in algebra, element label or claim id."""


class SignatureError(BochvarError, ValueError):
    pass


class ValuationError(BochvarError, ValueError):
    pass


class DirectSystemError(BochvarError, ValueError):
    """A semilattice direct system violates one of its defining conditions."""

    def __init__(self, condition: str, detail: str = ""):
        super().__init__(f"{condition}: {detail}" if detail else condition)
        self.condition = condition


class DecompositionError(BochvarError, ValueError):
    def __init__(self, condition: str, detail: str = ""):
        super().__init__(f"{condition}: {detail}" if detail else condition)
        self.condition = condition


class ClassificationError(BochvarError, ValueError):
    """Membership tests disagree, or the input is outside the class it must belong to."""


class RetractionError(BochvarError, ValueError):
    pass


class AmalgamationError(BochvarError, ValueError):
    pass


class SizeGuardError(BochvarError, ValueError):
    pass
