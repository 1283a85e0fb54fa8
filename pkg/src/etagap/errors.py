"""Exception types shared across the package."""


class EtagapError(Exception):
    """Base class for all package errors."""


class EmptyDomain(EtagapError):
    """The mask leaves no interior node."""


class InvalidHalfPlane(EtagapError):
    """A hyperbolic box touches or crosses x_n <= 0."""


class OutOfDomain(EtagapError):
    """A point lies outside the metric model's domain."""


class OriginInsideDomain(EtagapError):
    """The reference origin lies inside the closed masked region."""


class NotPositiveDefinite(EtagapError):
    """A coefficient tensor failed the positive-definiteness check."""


class DerivativeUnavailable(EtagapError):
    """A required derivative evaluator is missing."""


class DimensionMismatch(EtagapError):
    """Vector/matrix dimensions do not agree."""


class NonFiniteValue(EtagapError):
    """A function produced NaN or infinity where a finite value is required."""


class ConvergenceFailure(EtagapError):
    """Eigensolver did not reach the requested residual tolerance."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class NonpositiveRadicand(EtagapError):
    """A gap-bound constant has a nonpositive expression under its square root."""


class NonpositiveUpsilon(EtagapError):
    """The shifted ground eigenvalue in the growth bound is nonpositive."""


class InsufficientSpectrum(EtagapError):
    """Fewer eigenvalues available than the requested check range needs."""


class InvalidInstance(EtagapError):
    """A sequence-inequality instance violates its structural invariants."""


class UnitGradientViolation(EtagapError):
    """A test function does not have unit metric gradient on the domain."""


class DegenerateGap(EtagapError):
    """Two consecutive eigenvalues coincide where strict inequality is required."""


class HypothesisViolated(EtagapError):
    """A check's hypothesis fails for the given inputs; the row is skipped."""


class ConfigError(EtagapError):
    """Scenario configuration is malformed or inconsistent."""
