"""Exception hierarchy for csflab."""


class CSFError(Exception):
    """Base class for all csflab errors."""


class InvalidInputError(CSFError, ValueError):
    """An argument violates an operation's precondition."""


class DegenerateCurveError(CSFError):
    """The sampled curve is not an immersion (vanishing speed or spacing)."""


class StepFailure(CSFError):
    """A time step produced non-finite values or collapsed the mesh.

    When raised from :func:`csflab.flow.evolve` the partial trajectory is
    attached as ``trajectory``.
    """

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class InsufficientDataError(CSFError):
    """Not enough samples to form the requested tail window."""


class NonmonotoneError(CSFError):
    """The curvature tail is not increasing."""


class ProbeWindowError(CSFError):
    """A probe window was resampled or is otherwise unusable."""


class InflectionContaminationError(CSFError):
    """Curvature fell below the Frenet guard where torsion is required."""


class InvalidTimeError(CSFError, ValueError):
    """Rescaling requested at or past the estimated singular time."""


class DomainError(CSFError, ValueError):
    """Argument outside the domain of a formula (e.g. kappa <= 0)."""


class BlowupError(CSFError):
    """ODE solution left its admissible range."""


class NoRootError(CSFError):
    """A shooting function does not bracket its target."""


class InvalidParamsError(CSFError, ValueError):
    """Curve family parameters are invalid."""


class UnknownQuantityError(CSFError, KeyError):
    """Requested series quantity does not exist."""
