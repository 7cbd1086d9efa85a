"""Exception taxonomy shared across the package.

Every error raised by library code derives from IqfLabError so the CLI can
map failures onto exit codes without string matching.  Size-guard errors
(CarrierTooLarge, BudgetExceeded, SearchBudgetExceeded) are distinct from
mathematical failures (NotBoolean, NotIQF, ...) which are in turn distinct
from input problems (ParseError, SchemaError, ValidationError).
"""

from __future__ import annotations


class IqfLabError(Exception):
    """Base class for all package errors."""


# -- size and search guards -------------------------------------------------

class CarrierTooLarge(IqfLabError):
    """A powerset carrier exceeds the configured bound."""


class BudgetExceeded(IqfLabError):
    """A construction would exceed a configured size bound."""


class SearchBudgetExceeded(IqfLabError):
    """An enumeration would exceed the configured candidate budget."""


# -- structural guards ------------------------------------------------------

class UnknownElement(IqfLabError):
    """An element index or label is not part of the structure."""


class NotClosed(IqfLabError):
    """A set that should be closed under an operation is not."""


class InvalidSpec(IqfLabError):
    """A build request names an unknown shape or carries bad data."""


class HypothesisViolated(IqfLabError):
    """A stated precondition of a promotion/derivation fails; carries a witness."""


class NotBoolean(IqfLabError):
    """The lattice of a quantale is not Boolean/atomic, so no groupoid exists."""


class NotIQF(IqfLabError):
    """A quantale fails the inverse-quantal-frame axioms."""


class NotPreimageMap(IqfLabError):
    """A map expected to be an arrow-preimage map is not one."""


class NotAGroup(IqfLabError):
    """A set of elements expected to form a group does not."""


class NotSetDerived(IqfLabError):
    """An operation needs point-level provenance the module does not carry."""


class AnchorsIncompatible(IqfLabError):
    """Two structures were paired over mismatched anchor maps."""


# -- input handling ---------------------------------------------------------

class ParseError(IqfLabError):
    """The input file is not valid JSON."""


class SchemaError(IqfLabError):
    """The JSON value does not have the shape required for its kind."""


class ValidationError(IqfLabError):
    """The parsed value violates the laws of its declared kind.

    ``location`` is a JSON-pointer-ish path into the offending document.
    """

    def __init__(self, message: str, location: str = "/"):
        super().__init__(message)
        self.location = location

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return f"{super().__str__()} (at {self.location})"
