"""Exception hierarchy for magline."""


class MaglineError(Exception):
    """Base class for all library errors."""


class EllipticDomainError(MaglineError, ValueError):
    """Modulus or argument outside the real domain of the kernel."""


class EllipticDivergenceError(MaglineError, ArithmeticError):
    """F(phi, 1) requested at |phi| >= pi/2, where the integral diverges."""


class QuadratureDomainError(MaglineError, ValueError):
    """The integrand returned a non-finite value."""


class QuadratureAccuracyError(MaglineError, ArithmeticError):
    """Subdivision limit reached before the requested tolerance was met."""


class IntegrationError(MaglineError, RuntimeError):
    """The ODE integrator could not continue.

    Attributes
    ----------
    t_last : float
        Last time reached with an accepted step.
    """

    def __init__(self, message, t_last):
        super().__init__(f"{message} (last good t = {t_last!r})")
        self.t_last = t_last


class InconsistentICError(MaglineError, ValueError):
    """Initial condition incompatible with the requested case or contract."""


class ContractViolation(MaglineError, ValueError):
    """An operation was called outside its precondition."""


class NonExistentTrajectory(MaglineError):
    """The requested invariants admit no magnetic trajectory."""

    def __init__(self, reason):
        super().__init__(f"no magnetic trajectory exists: {reason}")
        self.reason = reason
