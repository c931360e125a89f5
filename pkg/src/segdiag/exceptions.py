class SegdiagError(Exception):
    """Base class for errors raised by segdiag."""


class ValidationError(SegdiagError, ValueError):
    """Input violates a documented precondition."""


class NotAlignedError(ValidationError):
    """Gold and predicted corpora do not describe the same sentences."""
