"""Exception types shared across the package."""


class PolymetError(Exception):
    pass


class DomainError(PolymetError, ValueError):
    """An argument lies outside the domain of an operation."""


class ParameterError(PolymetError, ValueError):
    """Group parameters (m, n, dimension) do not match."""


class PreconditionError(PolymetError, ValueError):
    pass


class FormatError(PolymetError, ValueError):
    pass


class ShapeError(PolymetError, ValueError):
    pass


class CapacityError(PolymetError, RuntimeError):
    """A configured size or work budget would be exceeded."""
