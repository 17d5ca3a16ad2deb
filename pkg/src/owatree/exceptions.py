class OwaTreeError(Exception):
    """Base class for package errors."""


class InputError(OwaTreeError, ValueError):
    """Malformed instance, weights, or arguments."""


class UsageError(OwaTreeError, ValueError):
    """An operation was called outside its validity domain (e.g. wrong weight class)."""


class InfeasibleError(OwaTreeError):
    """The edge coloring admits no spanning tree."""


class ValidationError(OwaTreeError, ValueError):
    """A reconstructed solution is not a spanning tree."""
