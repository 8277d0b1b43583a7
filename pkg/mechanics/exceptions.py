"""Error kinds of the toolkit.

Every class carries the exit status the command line reports for it.
"""


class CosseratError(Exception):
    exit_code = 3


class InvalidParameterError(CosseratError, ValueError):
    exit_code = 2


class InadmissibleFieldError(CosseratError, ValueError):
    pass


class ConstraintViolationError(CosseratError):
    def __init__(self, achieved_mean: float, theta: float):
        self.achieved_mean = achieved_mean
        self.theta = theta
        super().__init__(
            f"volume constraint violated: mean(alpha) = {achieved_mean:.12g}, theta = {theta:.12g}"
        )


class DivisionByZeroScaleError(CosseratError, ZeroDivisionError):
    pass


class NegativeDiscriminantError(CosseratError, ValueError):
    def __init__(self, z: float, radicand: float):
        self.z = z
        self.radicand = radicand
        super().__init__(f"negative discriminant {radicand:.6g} at z = {z:.6g} (no double well)")


class DomainError(CosseratError, ValueError):
    pass


class NegativePotentialError(CosseratError):
    def __init__(self, alpha: float, value: float):
        self.alpha = alpha
        self.value = value
        super().__init__(f"shifted potential V2 = {value:.3e} < 0 at alpha = {alpha:.10g}")


class WrongRegimeError(CosseratError):
    pass


class StalledProfileError(CosseratError):
    pass


class NoConvergenceError(CosseratError, RuntimeError):
    exit_code = 4
