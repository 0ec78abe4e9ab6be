"""Exception hierarchy.

Everything raised on purpose by the package derives from ``SchwarzlabError``
and also from ``ValueError`` (or ``ArithmeticError`` for integration
failures), so callers can catch either family.
"""


class SchwarzlabError(Exception):
    pass


class ParameterError(SchwarzlabError, ValueError):
    """Invalid dimension, mass, exponent or budget."""


class DomainError(SchwarzlabError, ValueError):
    """Argument outside the domain of an operation."""


class ProfileError(SchwarzlabError, ValueError):
    """A metric profile or profile function violates its invariants."""


class ConstructionError(SchwarzlabError, ValueError):
    pass


class HypothesisError(SchwarzlabError, ValueError):
    """A precondition of the perturbation theorem does not hold."""


class UnsupportedDimensionError(SchwarzlabError, ValueError):
    pass


class IntegrationError(SchwarzlabError, ArithmeticError):
    """ODE integration failed; ``diagnostics`` holds the last known state."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
