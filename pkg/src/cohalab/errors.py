"""Exception hierarchy shared by the computational modules and the CLI."""


class CohalabError(Exception):
    """Base class for all errors raised by cohalab."""


class PreconditionError(CohalabError, ValueError):
    """Input violates an operation's stated precondition."""


class InfeasibleError(PreconditionError):
    """The requested enumeration exceeds the configured size bound."""


class ExpectationFailure(CohalabError):
    """A mathematical identity that was expected to hold did not."""
