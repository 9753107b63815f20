"""Exception hierarchy shared by all modules."""


class NHRMError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(NHRMError, ValueError):
    """Invalid model parameters or an invalid combination of options.

    ``field`` names the offending parameter so the CLI can report the flag.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class SizeGuardError(ParameterError):
    """Dense real-space matrix would exceed the desk-scale cap."""


class DegenerateParams(NHRMError):
    """Parameters sit on a line where the generic EP solver does not apply."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class Coalescent(NHRMError):
    """Biorthogonal frame degenerates (self-orthogonality at or near an EP)."""


class LoopThroughEP(NHRMError):
    """A winding loop passes through (or too close to) an exceptional point."""


class NonQuantized(NHRMError):
    """A winding number failed to come out as a half-integer."""


class SpectrumConvergenceError(NHRMError):
    """The dense eigensolver did not converge."""

    def __init__(self, message, matrix_hash):
        super().__init__(f"{message} (matrix sha256={matrix_hash})")
        self.matrix_hash = matrix_hash


class InvariantViolation(NHRMError):
    """An internal post-condition check failed."""
