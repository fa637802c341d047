"""Exception hierarchy for the polychoric package."""


class PolychoricError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(PolychoricError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class InvalidTheta(PolychoricError, ValueError):
    """A parameter vector violates the feasibility constraints."""


class EmptyTable(PolychoricError, ValueError):
    """A contingency table contains no observations."""


class EmptyCategory(PolychoricError, ValueError):
    """A marginal category has zero count, so thresholds cannot be anchored."""


class DegenerateMargin(PolychoricError, ValueError):
    """A variable is constant, so a product-moment correlation is undefined."""


class NoConvergence(PolychoricError, RuntimeError):
    """The optimizer hit its iteration cap without meeting the tolerance."""


class NearZeroCell(PolychoricError, ValueError):
    """A cell probability is below the numerical floor, so its score is undefined."""


class NotPositiveDefinite(PolychoricError, ValueError):
    """A matrix that must be positive definite is not."""


class ParseError(PolychoricError, ValueError):
    """An input file is malformed."""


class CodeError(PolychoricError, ValueError):
    """A data file contains a non-integer or out-of-range category code."""


class ConfigError(PolychoricError, ValueError):
    """A study configuration file contains an invalid or unknown entry."""
