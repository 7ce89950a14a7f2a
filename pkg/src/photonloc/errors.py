"""Exception hierarchy shared by all modules.

Each exception class carries the process exit code the CLI maps it to:
2 for input validation problems, 3 for numerical-invariant failures.
I/O failures are plain OSError and map to 4 in the CLI.
"""


class PhotonlocError(Exception):
    exit_code = 1


class ValidationError(PhotonlocError):
    """Invalid parameters, states, or configuration."""

    exit_code = 2


class NumericsError(PhotonlocError):
    """A numerical invariant or tolerance was violated."""

    exit_code = 3


class DegeneracyError(NumericsError):
    """Eigenvalue gaps too small for the partial-fraction closed form.

    Callers should switch to the matrix-exponential propagator.
    """

    def __init__(self, relative_gap, threshold):
        self.relative_gap = relative_gap
        self.threshold = threshold
        super().__init__(
            f"near-degenerate spectrum (relative gap {relative_gap:.3e} < "
            f"{threshold:.1e}); use the expm-based propagator"
        )


class IntegrationError(NumericsError):
    """Fixed-step integration drifted past a caller tolerance."""

    def __init__(self, time, drift, message=None):
        self.time = time
        self.drift = drift
        super().__init__(
            message
            or f"invariant drift {drift:.3e} exceeded tolerance at t={time:.6g}"
        )


class UndefinedCorrelationError(NumericsError):
    """Photon-correlation denominator vanished."""


class UnsupportedRegimeError(ValidationError):
    """Closed-form solution requested outside its validity regime."""


class DegenerateSteadyStateError(NumericsError):
    """Liouvillian kernel has more than one state; no canonical choice."""

    def __init__(self, dimension):
        self.dimension = dimension
        super().__init__(
            f"steady state is not unique (kernel dimension {dimension}); "
            "restrict to a photon-number sector or inspect the kernel"
        )
