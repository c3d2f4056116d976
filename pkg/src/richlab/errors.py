"""Exception hierarchy shared across the package."""


class RichlabError(Exception):
    """Base class for all richlab errors."""


class ConfigurationError(RichlabError, ValueError):
    """A parameter combination violates a documented precondition."""


class DomainError(RichlabError, ValueError):
    """A site or region falls outside the domain it is used with."""


class ContractViolation(RichlabError, ValueError):
    """A caller broke an interface contract (non-canonical edge, empty input, ...)."""


class UnsupportedError(RichlabError, ValueError):
    """The requested operation is defined but not supported for these inputs."""
