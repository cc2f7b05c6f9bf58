"""Exception hierarchy shared by all modules."""


class EBTimesError(Exception):
    """Base class for every error raised by the package."""


class DimensionError(EBTimesError, ValueError):
    """Operands have incompatible shapes."""


class NotHermitianError(EBTimesError, ValueError):
    """A matrix required to be Hermitian is not, within tolerance."""


class NotPositiveError(EBTimesError, ValueError):
    """A matrix required to be positive (semi)definite is not."""


class NotAStateError(EBTimesError, ValueError):
    """A density matrix is not positive semidefinite with unit trace."""


class InvalidChannelError(EBTimesError, ValueError):
    """A map fails a required channel property (CP, TP, unital, faithful, ...)."""


class SingularChannelError(EBTimesError, ValueError):
    """The transfer matrix is not invertible."""


class ParameterError(EBTimesError, ValueError):
    """A gallery or bound parameter is outside its admissible range."""


class ConvergenceError(EBTimesError, ArithmeticError):
    """A numerical decomposition or search failed to converge."""


class SpectralSeparationError(ConvergenceError):
    """Peripheral eigenvalues are not separated from the bulk of the spectrum."""


class HypothesisError(EBTimesError, ValueError):
    """An irreducible-constructor hypothesis is violated.

    Attributes
    ----------
    hypothesis : str
        Label of the broken hypothesis, one of ``"1"``, ``"2"``, ``"3"``,
        ``"4a"``, ``"4b"``, ``"4c"``.
    residual : float
        Size of the violation.
    """

    def __init__(self, hypothesis, message, residual=float("nan")):
        super().__init__(f"hypothesis {hypothesis}: {message}")
        self.hypothesis = hypothesis
        self.residual = residual


class NonCommutingError(HypothesisError):
    """The invariant state does not commute with a cyclic projection."""
