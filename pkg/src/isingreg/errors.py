"""Exception types shared across the package."""


class NumericalFailure(RuntimeError):
    """A numerical routine failed to converge or produced non-finite values."""


class EnumerationCapError(ValueError):
    """Exact enumeration was requested beyond the supported system size."""


class DataFormatError(ValueError):
    """Base class for malformed dataset inputs."""


class MalformedRowError(DataFormatError):
    """A nodes/edges file row could not be parsed."""


class DuplicateIdError(DataFormatError):
    """A node id appears more than once in a nodes file."""


class DanglingEdgeError(DataFormatError):
    """An edge references a node id outside the declared node set."""


class SplitError(DataFormatError):
    """Train/val/test splits overlap or fall outside the node set."""
