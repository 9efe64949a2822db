"""Exception hierarchy shared by all subpackages."""


class StekloffError(Exception):
    """Base class for errors raised by this package."""


class DomainError(StekloffError, ValueError):
    """An argument lies outside the domain of the operation."""


class PoleError(DomainError):
    """A dispersion relation is evaluated at (or too near) one of its poles."""

    def __init__(self, message, family=None, degree=None):
        super().__init__(message)
        self.family = family
        self.degree = degree


class ValidityError(DomainError):
    """A spectral parameter lies outside the region where a reduction is valid."""


class ModelInvariantError(StekloffError):
    """A discrete model violates one of its structural invariants."""

    def __init__(self, invariant, message):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class AssumptionError(StekloffError):
    """A non-degeneracy assumption needed by an operation does not hold."""

    def __init__(self, assumption, message):
        super().__init__(f"{assumption}: {message}")
        self.assumption = assumption


class SingularPencilError(StekloffError):
    """The pencil has a common kernel, so every complex number is an eigenvalue."""


class AssemblyError(StekloffError):
    """A Galerkin system could not be assembled or is singular."""
