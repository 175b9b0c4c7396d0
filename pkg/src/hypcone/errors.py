"""Exception bases shared across the package.

Two families matter to callers: precondition violations (bad input, the
operation was never attempted) and exhausted searches (the input may be fine
but the station/depth budget ran out).  The CLI maps them to exit codes 2
and 3 respectively.
"""


class HypconeError(Exception):
    pass


class PreconditionError(HypconeError):
    """Input violates a documented precondition."""


class SearchExhausted(HypconeError):
    """A bounded search ended without a witness; budgets may be raised."""
