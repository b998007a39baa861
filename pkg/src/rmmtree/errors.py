"""Exception types shared across the package.

Out-of-range positions raise the builtin ``IndexError``; malformed arguments
raise ``ValueError`` (or one of the subclasses below).
"""


class RmmError(Exception):
    """Base class for errors raised by this package."""


class ContractError(RmmError, ValueError):
    """A precondition on a constructor or configuration was violated."""


class BalanceError(RmmError, ValueError):
    """An edit would leave the parentheses sequence unbalanced."""


class NoParentError(RmmError, LookupError):
    """The node has no enclosing parenthesis (it is a root)."""
