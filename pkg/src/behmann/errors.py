"""Exception hierarchy shared by all modules."""


class BehmannError(Exception):
    """Base class for every error raised by this package."""


class CaptureError(BehmannError):
    """A substitution would bind a variable of the inserted term."""


class NoMatch(BehmannError):
    """A rewrite rule does not match the addressed subformula."""


class SideConditionViolated(BehmannError):
    """A rewrite rule matches but its side condition fails."""


class EntailmentReversed(BehmannError):
    """An entailment-only rule was requested right to left."""


class ShapeError(BehmannError):
    """The input does not have the syntactic shape an operation requires."""


class SizeLimitExceeded(BehmannError):
    """A normal form computation grew beyond the configured node ceiling."""


class ClassError(BehmannError):
    """The input lies outside the formula class an operation accepts."""


class BadCount(BehmannError):
    """A counting quantifier index is smaller than one."""


class BadArgs(BehmannError):
    """Arguments violate the documented preconditions."""


class EliminandOccurs(BehmannError):
    """The predicate to eliminate occurs where it must not."""


class PolarityViolation(BehmannError):
    """Occurrences of a predicate do not share the required polarity."""


class EliminandInDefiniens(BehmannError):
    """The predicate to eliminate occurs inside its own definiens."""


class NotFresh(BehmannError):
    """A symbol that must be fresh already occurs in the formula."""


class EligibilityError(BehmannError):
    """A subformula is not eligible for Quine's expansion."""


class MissingSymbol(BehmannError):
    """An interpretation lacks an entry for a symbol of the formula."""


class BudgetExceeded(BehmannError):
    """Exhaustive model enumeration would exceed its interpretation budget."""


class ParseError(BehmannError):
    """Surface syntax could not be parsed."""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ArityError(ParseError):
    """A predicate is used with two different arities."""
