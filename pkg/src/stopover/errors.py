"""Exception types shared across the package."""


class ConstraintError(ValueError):
    """A parameter or data object violates one of its constraints."""


class StructureError(ValueError):
    """A model-structure declaration is malformed or incompatible with a design."""


class ParseError(ValueError):
    """A file could not be parsed; carries the offending line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class PathSpaceError(ValueError):
    """The exhaustive enumeration was refused because the path space is too large."""
