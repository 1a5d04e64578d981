"""Exception and warning classes raised by schurpick."""


class InterpolationError(ValueError):
    """Base class for invalid data or inputs outside an operation's contract."""


class PoleAtPoint(InterpolationError):
    """A rational function was evaluated at (or numerically at) a pole."""


class PoleAtNode(PoleAtPoint):
    """A candidate function has a pole at an interpolation node."""


class ZeroOutsideDisk(InterpolationError):
    """A Blaschke factor was requested with a zero outside the open disk."""


class DegenerateDenominator(InterpolationError):
    """``1 - E s`` vanishes identically in the linear fractional map."""


class DuplicateNodes(InterpolationError):
    """Two interpolation nodes coincide (within the distinctness threshold)."""


class NonHermitianDiagonalBlock(InterpolationError):
    """A diagonal block of the Pick matrix is not Hermitian."""


class NonRealGamma(InterpolationError):
    """A jet produces a non-real bound, so it cannot come from a Schur function."""


class InconsistentJet(InterpolationError):
    """Both ``gamma`` and the top jet entry were given and they disagree."""


class NotUnimodularAtNode(InterpolationError):
    """The boundary value at a node does not have modulus one."""


class NotHermitian(InterpolationError):
    """A matrix expected to be Hermitian is not, beyond tolerance."""


class NotSchurClass(InterpolationError):
    """A function failed the Schur-class validation."""


class SingularPick(InterpolationError):
    """The operation needs a nonsingular Pick matrix."""


class NumericalFailure(ArithmeticError):
    """Base class for failures of the numerical machinery itself."""


class ResolventSingular(NumericalFailure):
    """``Ptilde - z P T`` is numerically singular at the requested point."""


class ReconstructionMismatch(NumericalFailure):
    """Rational reconstruction did not reproduce pointwise values."""


class RangeViolation(NumericalFailure):
    """The range-restricted solve of the singular case left the range of Ptilde."""


class UniqueSolutionWarning(UserWarning):
    """Emitted when a Schur parameter is ignored because the solution is unique."""
