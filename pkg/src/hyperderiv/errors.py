"""Exception types shared across the package."""


class HyperderivError(Exception):
    """Base class for all package-specific errors."""


class ExprSyntaxError(HyperderivError):
    """Malformed expression text; ``offset`` is the 0-based position of the error."""

    def __init__(self, message, offset, text=""):
        super().__init__(f"{message} (offset {offset})")
        self.message = message
        self.offset = offset
        self.text = text


class NotInSymDomain(HyperderivError):
    """Polynomial has a bidegree component outside the symmetrized-product span."""


class UnassignedSymbol(HyperderivError):
    """A polynomial letter has no matrix assigned to it."""


class ArityMismatch(HyperderivError):
    """Hyperoperator references a slot index beyond the supplied slot product."""


class UnknownIdentity(HyperderivError):
    """Requested identity/suite name is not in the catalog."""


class BadDimension(HyperderivError):
    """Fixture kind cannot be realized at the requested matrix dimension."""


class SpectrumOutOfDomain(HyperderivError):
    """Neither the eigendecomposition nor the series path of a matrix function converged."""


class QuadratureNotConverged(HyperderivError):
    """Doubling the quadrature nodes moved the result by more than the allowance."""
