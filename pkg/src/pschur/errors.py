"""Exception hierarchy shared by every pschur module."""


class PSchurError(Exception):
    """Base class for all library errors."""


class BackendError(PSchurError):
    """Exact and floating inputs were mixed, or the wrong backend was supplied."""


class HermitianError(PSchurError):
    """A matrix violates the Hermitian invariants (or carries NaN/Inf)."""


class RangeError(PSchurError, IndexError):
    """A matrix order is out of range for the supplied sequence."""


class DegenerateTolerance(PSchurError):
    """A floating eigenvalue sits within a decade of the zero threshold.

    The inertia cannot be certified in floating point; retry with exact input.
    """


class InexactDegenerate(PSchurError):
    """A governing determinant is numerically zero but the input is floating."""


class BadLeadingMoment(PSchurError):
    """The leading moment is not 1 where the coefficient bridge requires it."""


class PreconditionViolated(PSchurError):
    """A constructive step was called outside its case hypothesis."""


class NoRankPreservingExtension(PSchurError):
    """No next moment keeps the rank of the moment matrix unchanged."""


class NotSolvable(PSchurError):
    """The requested class admits no extension of the given data."""


class HorizonTooSmall(PSchurError):
    """The extension stabilizes only after the requested horizon."""


class PoleAtSamplePoint(PSchurError):
    """A rational function has a pole at a sample or divided-difference node."""


class IsometryResidualTooLarge(PSchurError):
    """The generated relation failed its isometry self-check."""


class DefectNotPositive(PSchurError):
    """A defect subspace of the relation is not a Hilbert space."""


class NumericallySingularCompletion(PSchurError):
    """The generator Gram matrix is too ill-conditioned to complete."""


class ExceptionalPoint(PSchurError):
    """The transfer function was evaluated where 1 - zT is singular."""


class KernelMismatch(PSchurError):
    """The two kernels of the two-kernel criterion differ in negative index."""


class InstanceParseError(PSchurError, ValueError):
    """An instance or record file is malformed or fails its schema."""
