"""Exception hierarchy shared by every module.

The CLI maps :class:`ParameterError` to exit code 1 and :class:`ResourceError`
to exit code 2.
"""


class GroupTensorError(Exception):
    """Base class for all library errors."""


class ParameterError(GroupTensorError, ValueError):
    """Invalid argument: bad prime, malformed descriptor, foreign element, ..."""


class ResourceError(GroupTensorError):
    """A configured size cap or guard would be exceeded."""


class ConsistencyError(GroupTensorError):
    """An internal cross-check failed. Always a bug or a violated precondition."""


class ContractError(GroupTensorError):
    """Caller broke a documented contract, e.g. passed a non-simple module."""


class InputError(GroupTensorError, ValueError):
    """Input data is structurally fine but mathematically wrong (not an ideal, not associative, ...)."""


class StructuralError(InputError):
    """Candidate object is malformed before any real check, e.g. duplicate list entries."""


class IrreducibilityError(GroupTensorError):
    """MeatAxe could not certify or split a block within its retry budget."""
