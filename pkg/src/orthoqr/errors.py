"""Exception types shared across the library."""


class OrthoError(Exception):
    """Base class for all library-specific errors."""


class DimensionError(OrthoError):
    """Operand shapes are inconsistent or outside an operation's domain."""


class NotHermitian(OrthoError):
    """A matrix required to be Hermitian is not, beyond tolerance."""


class NotPositiveDefinite(OrthoError):
    """A Cholesky pivot was non-positive."""


class ConvergenceError(OrthoError):
    """An iterative kernel (SVD) failed to converge."""


class SingularError(OrthoError):
    """A triangular solve hit a zero diagonal entry."""


class NormBoundError(OrthoError):
    """An input exceeded a required norm bound."""


class SingularTError(OrthoError):
    """The reflector's T factor is numerically singular."""


class OrthonormalityError(OrthoError):
    """An input required to have (B-)orthonormal columns does not."""


class IntraFailure(OrthoError):
    """An intra-block orthogonalization step broke down.

    `block` is the zero-based block index when the failure occurred inside
    a multi-block driver, else None.
    """

    def __init__(self, msg, block=None):
        super().__init__(msg)
        self.block = block


class BreakdownError(OrthoError):
    """A column became numerically zero during orthogonalization."""


class ConstructionError(OrthoError):
    """A generator's feasibility condition was violated."""


class ParameterError(OrthoError):
    """An argument is outside the accepted range."""


class IoError(OrthoError):
    """A matrix or CSV file could not be read or written."""
