"""Exception types shared across the package."""


class TorvolError(Exception):
    """Base class for all package errors."""


class ShapeError(TorvolError):
    """Matrix or basis dimensions do not match the required shape."""


class NumericError(TorvolError):
    """Non-finite input, or ranks/tolerances came out inconsistent."""


class IllConditionedError(TorvolError):
    """A basis or transition matrix is numerically singular."""


class NotInImageError(TorvolError):
    """Right-hand side does not lie in the column span of the map."""


class NotACocycleError(TorvolError):
    """A vector expected to be a cocycle has a nonzero coboundary."""


class NotExactError(TorvolError):
    """A sequence expected to be exact fails the exactness checks."""


class WordError(TorvolError):
    """Malformed group word (generator index out of range)."""


class UnsupportedSurfaceError(TorvolError):
    """Surface outside the supported family (genus >= 1, at most one boundary)."""


class InvalidRepresentationError(TorvolError):
    """Images fail the determinant or relator constraints."""


class SamplingError(TorvolError):
    """Random search (matrix sampling, commutator solving) did not converge."""


class GluingError(TorvolError):
    """A surface decomposition is inconsistent (snake construction,
    basis completion, or exactness of the glued sequence failed)."""
