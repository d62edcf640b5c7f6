"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Raised when an operation's preconditions are violated."""


class MissingChannelError(InvalidInputError):
    """A required biomechanical channel is absent."""

    def __init__(self, channel, message=None):
        self.channel = channel
        super().__init__(message or f"missing channel: {channel}")


class MissingSideError(InvalidInputError):
    """A required body side is absent."""

    def __init__(self, side, message=None):
        self.side = side
        super().__init__(message or f"missing side: {side}")


class InvalidModelError(ValueError):
    """Model parameters are unusable (wrong shapes, non-finite values)."""


class DatasetFormatError(ValueError):
    """A dataset or checkpoint file does not match the documented schema.

    ``location`` points at the offending file and, when known, the path
    inside the document (e.g. ``patients[3].sides.left``).
    """

    def __init__(self, message, location=None):
        self.location = location
        super().__init__(f"{message} (at {location})" if location else message)
