"""Exception types shared across the package."""


class UnipotentLabError(Exception):
    """Base class for all package-specific errors."""


class NoConvergence(UnipotentLabError):
    """Iterative solver failed to reach the requested residual."""


class ChartSingular(UnipotentLabError):
    """A coordinate chart is evaluated too close to its singular locus."""


class NotInChart(UnipotentLabError):
    """The requested factorization/decomposition does not exist."""


class OverflowGuard(UnipotentLabError):
    """A flow parameter exceeds the overflow guard."""


class RegimeViolation(UnipotentLabError):
    """A statistic was requested outside its validity regime."""


class BudgetExceeded(UnipotentLabError):
    """An enumeration exceeded its candidate budget."""


class QuadratureFailure(UnipotentLabError):
    """Adaptive quadrature could not certify the requested error."""


class CannotRegularize(UnipotentLabError):
    """No boundary-avoiding shift (or discard budget) for the dyadic decomposition."""


class InjectivityViolation(UnipotentLabError):
    """A local-orbit map is not injective at the requested scale."""


class CertificateMissing(UnipotentLabError):
    """A point cloud does not carry the certificate required by a scan."""


class MissingManifest(UnipotentLabError):
    """A run directory is missing manifest/summary files."""


class ParseError(UnipotentLabError):
    """A result file exists but cannot be parsed."""


class ConfigError(UnipotentLabError):
    """Invalid experiment configuration; lists every violated precondition."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
