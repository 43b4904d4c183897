"""Exception types shared across the package."""


class VlabError(Exception):
    """Base class for all package-specific errors."""


class PoleError(VlabError):
    """A spectral point sits too close to a pole of a weight denominator."""

    def __init__(self, message, lam=None, denominator=None):
        super().__init__(message)
        self.lam = lam
        self.denominator = denominator


class DegenerateWeightError(VlabError):
    """A weight combination needed as a denominator vanished."""


class BudgetError(VlabError):
    """A requested dense object exceeds the configured dimension budget."""


class NoConvergenceError(VlabError):
    """An iterative solver stopped without reaching its tolerance."""

    def __init__(self, message, iterations=None, residual=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class SeedError(VlabError):
    """A root-finding seed is inconsistent with the requested state."""


class ComplexEnergyError(VlabError):
    """An energy that must be real came out with a large imaginary part."""


class ConfigError(VlabError):
    """Invalid run configuration (bad key, bad value, unparseable file)."""
