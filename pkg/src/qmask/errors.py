"""Exception types raised by qmask."""


class QmaskError(ValueError):
    """Base class for all qmask input and consistency errors."""


class DimensionError(QmaskError):
    """Shapes or declared subsystem dimensions do not fit together."""


class NotHermitianError(QmaskError):
    pass


class NotPSDError(QmaskError):
    """An eigenvalue fell below the negative clamp floor."""


class NormalizationError(QmaskError):
    """A vector or density matrix is not normalized within tolerance."""


class DegenerateSuperpositionError(QmaskError):
    """A superposition (or linear image) collapsed to the zero vector."""


class DecompositionError(QmaskError):
    """An eigen- or singular-value decomposition failed to converge."""


class MaskerError(QmaskError):
    """A masker violates its structural invariants (unitarity, injectivity, ...)."""
