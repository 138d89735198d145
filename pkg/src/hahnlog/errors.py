"""Exception hierarchy shared by all hahnlog modules.

The split into four branches mirrors how callers (in particular the CLI)
react to failures: syntax problems, violated mathematical preconditions,
comparisons that interval refinement could not settle, and requests that
fall outside the closed-form integration catalogue.
"""

from __future__ import annotations


class HahnlogError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(HahnlogError):
    """Input text does not conform to one of the hahnlog-v1 grammars.

    ``span`` is a ``(start, end)`` character range into the offending source.
    """

    def __init__(self, message: str, span: tuple[int, int] | None = None):
        super().__init__(message)
        self.span = span

    def __str__(self) -> str:
        base = super().__str__()
        if self.span is not None:
            return f"{base} (at {self.span[0]}..{self.span[1]})"
        return base


class DomainError(HahnlogError):
    """A mathematical precondition of an operation is violated."""


class OutsideDomain(DomainError):
    """Argument lies outside the partial domain of the map."""


class NonRationalLeading(DomainError):
    """Leading coefficient has no logarithm in the scalar ring."""


class NonPositiveLeading(DomainError):
    """Positive leading coefficient required."""


class NonPositiveLog(DomainError):
    """Logarithm requested of a non-positive value."""


class NotInImage(DomainError):
    """Preimage requested for an element outside the logarithm's image."""


class GuardViolation(DomainError):
    """A guard attached to a division / power / piecewise node failed."""


class ZeroToPrecision(DomainError):
    """The value has no visible terms but is only known up to truncation."""


class NotRepresentable(DomainError):
    """The exact result exists but leaves the representable scalar ring."""


class DegenerateGroup(DomainError):
    """Generators fail rational independence, or required classes are empty."""


class UndecidedComparison(HahnlogError):
    """Interval refinement hit the width floor without separating signs.

    Sound but incomplete: the symbolic difference is nonzero, yet its
    enclosures kept straddling zero down to the configured minimum width.
    """


class CatalogueError(HahnlogError):
    """Base for integration requests the closed-form catalogue rejects."""


class OutOfCatalogue(CatalogueError):
    """An (intermediate) integrand is not a sum of log-power terms."""


class IndeterminateCancellation(CatalogueError):
    """Individually divergent terms of mixed sign could cancel."""
