"""Exception and warning types shared across the package."""


class ModelDomainError(ValueError):
    """A parameter point lies outside the domain of a model family."""


class DegeneracyError(ValueError):
    """An operation needs a nondegenerate level (or smooth eigenvectors) but got a degenerate one."""


class IntegrationError(ArithmeticError):
    """A quadrature integrand produced a non-finite value."""


class AccuracyWarning(UserWarning):
    """A result was computed, but with reduced accuracy (coarse grid, one-sided differences, ...)."""
