"""Exception hierarchy shared by every ctacp module."""


class CtacpError(Exception):
    """Base class for all errors raised by the library."""


class SignatureError(CtacpError):
    """A formula mentions an atom that is not in the signature."""


class CapacityError(CtacpError):
    """An atom cap or valuation-expansion limit was exceeded."""


class BudgetError(CtacpError):
    """State exploration ran out of budget.

    ``frontier`` holds the term that could not be explored, when known.
    """

    def __init__(self, message, frontier=None):
        super().__init__(message)
        self.frontier = frontier


class SpecError(CtacpError):
    """A specification is malformed: unresolved names, bad tables, open terms."""

    def __init__(self, message, line=None, col=None):
        if line is not None:
            message = f"{line}:{col}: {message}"
        super().__init__(message)
        self.line = line
        self.col = col


class ParseError(SpecError):
    """Lexical or syntactic error in DSL text."""


class CommTableError(SpecError):
    """The communication function is not symmetric or not associative."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class GuardednessError(SpecError):
    """A recursive specification has an unguarded variable occurrence."""

    def __init__(self, message, variable=None, position=None):
        super().__init__(message)
        self.variable = variable
        self.position = position


class LinearizationError(SpecError):
    """A recursive specification cannot be brought into linear form."""

    def __init__(self, message, term=None):
        super().__init__(message)
        self.term = term
