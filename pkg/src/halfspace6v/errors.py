"""Exception types shared across the package."""


class HalfSpaceError(Exception):
    """Base class for all package-specific errors."""


class DivisionByZero(HalfSpaceError, ZeroDivisionError):
    """A weight or formula denominator vanished at the evaluation point."""


class NotSkewSymmetric(HalfSpaceError):
    """Matrix handed to the Pfaffian is not skew-symmetric (or has odd order)."""


class DegeneratePoint(HalfSpaceError):
    """Closed-form evaluation hit a removable coincidence (e.g. x_i = x_j).

    The caller is expected to regenerate the point rather than rely on a
    symbolic limit.
    """


class CapExceeded(HalfSpaceError):
    """Requested size is beyond the configured enumeration/arity cap."""


class GuardViolated(HalfSpaceError):
    """A convergence (rho) condition required by an identity fails."""


class TruncationTooSmall(HalfSpaceError):
    """State support does not fit inside the requested column truncation."""


class ContourInvalid(HalfSpaceError):
    """Contour family violates the nesting/exclusion constraints."""


class QuadratureNotConverged(HalfSpaceError):
    """Doubling the quadrature nodes moved the result more than the tolerance."""


class CutoffTooSmall(HalfSpaceError):
    """Truncation leakage bound exceeds the requested tolerance."""


class ArityError(HalfSpaceError):
    """Operation called with incompatible alphabet/configuration sizes."""
