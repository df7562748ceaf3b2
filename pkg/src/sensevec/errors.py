"""Exception types shared across the package."""


class FormatError(ValueError):
    """Raised when an input file violates its documented format.

    Carries the source name and 1-based line number when known, so parser
    errors point at the offending line.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}:"
        if line is not None:
            location = f"{location}{line}:"
        super().__init__(f"{location} {message}" if location else message)


class ConfigError(ValueError):
    """Raised for an inconsistent or incomplete run configuration."""
