"""Exception types shared across the engine."""


class GpdKitError(Exception):
    """Base class for all engine errors."""


class DomainMismatch(GpdKitError):
    """Morphisms or functors were composed/paired over unequal (co)domains."""


class BackendMismatch(GpdKitError):
    """Two values from different backends were mixed."""


class BackendUnsupported(GpdKitError):
    """The operation is only defined for the other backend."""


class CapExceeded(GpdKitError):
    """A constructed carrier would exceed the configured size cap."""


class NotARelation(GpdKitError):
    """An equivalence relation was required."""


class NotASplitEpiSquare(GpdKitError):
    """The provided sections do not witness split epimorphisms."""


class NotOrthogonal(GpdKitError):
    """No diagonal fill-in exists, or more than one does."""

    def __init__(self, message, count=None):
        super().__init__(message)
        self.count = count


class InternalDisagreement(GpdKitError):
    """Two routes that must agree by theorem returned different verdicts.

    This always signals an implementation bug, never bad input.
    """


class ActionNotWellDefined(GpdKitError):
    """A component-level action depended on the choice of representative."""


class GenerationFailed(GpdKitError):
    """The random generator exhausted its retry budget."""


class InvalidGroupSpec(GpdKitError):
    """A group description such as 'Z/1' was rejected."""


class ParseError(GpdKitError):
    """Document syntax error, with 1-based line/column position."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class UndefinedReference(ParseError):
    """A document referenced a name that was never defined."""


class DuplicateName(ParseError):
    """A document defined the same name twice."""
