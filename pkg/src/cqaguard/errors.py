"""Shared exception bases.

Concrete exceptions live next to the code that raises them; these bases
exist so callers (most importantly the CLI) can map whole classes of
failures to exit codes without enumerating every subtype.
"""


class CqaguardError(Exception):
    """Base for every error raised by this package."""


class DataContractError(CqaguardError):
    """Bad input data: malformed records, violated invariants, missing files."""


class InternalInvariantError(CqaguardError):
    """A state the implementation promises can never happen. Exit code 3 material."""
