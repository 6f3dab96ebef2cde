"""Exception types shared across the package."""


class ShapeSensingError(Exception):
    """Base class for all errors raised by ofdrshape."""


class DomainError(ShapeSensingError, ValueError):
    """An input lies outside the domain of the operation."""


class InsufficientDataError(DomainError):
    """Too few samples to compute the requested quantity."""


class RankDeficiencyError(DomainError):
    """The least-squares design matrix does not have full column rank."""


class FormatError(DomainError):
    """A file could be read but its contents do not match the expected layout."""
