"""Exception and warning types raised across the package."""


class VirLabError(Exception):
    """Base class for all package errors."""


class GridMismatch(VirLabError, ValueError):
    """Operands live on grids of different size."""


class MonotonicityLost(VirLabError, ValueError):
    """A circle map has f'(x) <= 0 at some grid node."""


class NonConvergence(VirLabError, RuntimeError):
    """An iterative solve did not reach its tolerance."""


class SingularInertia(VirLabError, ValueError):
    """Inertia multiplier vanishes on a mode carried by the input."""


class InvalidParams(VirLabError, ValueError):
    """Metric or equation parameters outside the admissible set."""


class NonSmoothState(VirLabError, FloatingPointError):
    """Non-finite values appeared during time evolution.

    ``state`` holds the last finite state and ``step`` the index of the step
    that failed (both may be ``None`` when raised outside ``evolve``).
    """

    def __init__(self, message, state=None, step=None):
        super().__init__(message)
        self.state = state
        self.step = step


class ShockReached(VirLabError, ValueError):
    """Requested time is at or beyond the gradient catastrophe."""


class PeriodMismatch(VirLabError, ValueError):
    """A scaling would not map the 2*pi period onto itself."""


class OrthogonalityLost(VirLabError, ValueError):
    """A matrix expected in SO(N) failed the orthogonality check."""


class NoNearIdentityBranch(VirLabError, RuntimeError):
    """Newton iteration for the discrete angular velocity failed."""


class ResidualTooLarge(VirLabError, RuntimeError):
    """A computed solution does not satisfy its defining equation."""


class ResonantODE(VirLabError, ArithmeticError):
    """The periodic linear ODE has no unique periodic solution."""


class SignViolation(VirLabError, ValueError):
    """A step left the admissible (positive derivative) set."""


class NoBracket(VirLabError, RuntimeError):
    """A root could not be bracketed."""


class PeriodicityDefect(VirLabError, ValueError):
    """Reconstructed map is not a lift of a circle diffeomorphism.

    ``diagnostics`` carries the step diagnostics including the defect.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class DescriptorInvalid(VirLabError, ValueError):
    """A run descriptor failed schema validation."""


class AliasingWarning(UserWarning):
    """Resampling discarded resolved Fourier content."""
