"""Exception types raised by the simulator."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class DegenerateNormalizationError(DomainError):
    """A vector with zero total cannot be turned into shares."""


class DegenerateCatalogError(DomainError):
    """A catalog whose ideal ERR is zero, so utility cannot be normalized."""


class CapacityError(ValueError):
    """The request exceeds what exhaustive enumeration can handle."""
