"""Exception types shared across the package."""


class UavSearchError(Exception):
    """Base class for all package errors."""


class ValidationError(UavSearchError):
    """A scenario or configuration failed validation.

    Carries a list of field-addressed problem strings so callers can print
    one message per offending field.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class BoundsError(UavSearchError):
    """A grid cell index or world position lies outside the task area."""


class PackageDecodeError(UavSearchError):
    """A received message package is malformed and was dropped."""
