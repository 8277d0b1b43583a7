"""Interfacial energy between rotation wells.

A transition between two wells alpha- < alpha+ of V2(gamma, .) costs
2 * integral of sqrt(V2) over [alpha-, alpha+]. The optimal profile solves
alpha' = sqrt(V2(gamma, alpha)) on the real line, starting at the midpoint.
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize

from config import settings
from mechanics import closed_form, model
from mechanics.exceptions import (
    InvalidParameterError,
    NegativePotentialError,
    StalledProfileError,
    WrongRegimeError,
)
from mechanics.model import MaterialParams

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
REDUCED_GRID = 4097


@dataclass(frozen=True)
class PiecewiseConstantRotation:
    breakpoints: tuple
    values: tuple

    def __post_init__(self):
        breakpoints = tuple(float(b) for b in self.breakpoints)
        values = tuple(float(v) for v in self.values)
        if len(values) != len(breakpoints) + 1:
            raise InvalidParameterError(
                f"need one value per interval ({len(breakpoints) + 1}), got {len(values)}"
            )
        if any(not 0 < b < 1 for b in breakpoints) or any(
            b >= c for b, c in zip(breakpoints, breakpoints[1:])
        ):
            raise InvalidParameterError("breakpoints must increase strictly inside (0, 1)")
        if any(not 0 <= v <= TWO_PI for v in values):
            raise InvalidParameterError("values must lie in [0, 2*pi]")
        if any(a == b for a, b in zip(values, values[1:])):
            raise InvalidParameterError("adjacent values must differ")
        object.__setattr__(self, "breakpoints", breakpoints)
        object.__setattr__(self, "values", values)

    @property
    def jump_set(self) -> list[tuple[float, float, float]]:
        """(position, left value, right value) per breakpoint."""
        return [
            (b, self.values[i], self.values[i + 1]) for i, b in enumerate(self.breakpoints)
        ]

    def evaluate(self, x) -> np.ndarray:
        index = np.searchsorted(np.asarray(self.breakpoints), np.asarray(x, dtype=float), side="right")
        return np.asarray(self.values)[index]


@dataclass(frozen=True, eq=False)
class TransitionProfile:
    y: np.ndarray
    alpha: np.ndarray
    alpha_minus: float
    alpha_plus: float

    @property
    def half_width(self) -> float:
        return float(self.y[-1])


def _check_angle(alpha: float) -> None:
    if not 0 <= alpha <= TWO_PI:
        raise InvalidParameterError(f"angle {alpha} outside [0, 2*pi]")


def _surface_integral(shifted, alpha_minus: float, alpha_plus: float) -> float:
    _check_angle(alpha_minus)
    _check_angle(alpha_plus)
    if alpha_minus == alpha_plus:
        return 0.0
    lo, hi = sorted((alpha_minus, alpha_plus))

    def root(s):
        value = float(shifted(s))
        if value < -settings.NEGATIVE_V2_TOL:
            raise NegativePotentialError(s, value)
        return math.sqrt(max(value, 0.0))

    # s = lo + t^2 and s = hi - t^2 remove the square-root endpoint behavior
    half = math.sqrt(0.5 * (hi - lo))
    options = {"epsabs": settings.QUAD_EPSABS, "limit": settings.QUAD_LIMIT}
    left, _ = integrate.quad(lambda t: 2.0 * t * root(lo + t * t), 0.0, half, **options)
    right, _ = integrate.quad(lambda t: 2.0 * t * root(hi - t * t), 0.0, half, **options)
    return 2.0 * (left + right)


def surface_energy(alpha_minus: float, alpha_plus: float, p: MaterialParams) -> float:
    return _surface_integral(lambda s: model.v2(p.gamma, s, p), alpha_minus, alpha_plus)


def surface_energy_closed_zero_couple(p: MaterialParams) -> float:
    if p.mu_c != 0:
        raise WrongRegimeError(f"closed-form surface energy needs mu_c = 0 (got {p.mu_c})")
    a = closed_form.well_set(p.gamma, p).angles[1]
    return math.sqrt(2.0 * p.mu) * (p.gamma * (1.0 - math.cos(a)) + 2.0 * math.sin(a) - 2.0 * a)


@lru_cache(maxsize=64)
def reduced_minimal_w(p: MaterialParams) -> float:
    """Minimum of the reduced potential over [0, 2*pi] at z = gamma."""
    if p.mu_c == 0:
        return 0.0
    grid = np.linspace(0.0, TWO_PI, REDUCED_GRID)
    values = model.potential_w_reduced(p.gamma, grid, p)
    i = int(np.argmin(values))
    bounds = (grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)])
    result = optimize.minimize_scalar(
        lambda a: float(model.potential_w_reduced(p.gamma, a, p)),
        bounds=bounds,
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(min(result.fun, values[i]))


def surface_energy_reduced(alpha_minus: float, alpha_plus: float, p: MaterialParams) -> float:
    shift = reduced_minimal_w(p)
    return _surface_integral(
        lambda s: model.potential_w_reduced(p.gamma, s, p) - shift, alpha_minus, alpha_plus
    )


def _integrate_profile(alpha_minus, alpha_plus, p, max_steps, step):
    """RK4 forward (toward alpha+) and backward (toward alpha-) from the midpoint.

    Returns the per-direction histories and the step count at which both
    directions were clamped (None if they never were).
    """
    targets = np.array([alpha_plus, alpha_minus])
    dy = np.array([step, -step])
    state = np.full(2, 0.5 * (alpha_minus + alpha_plus))
    clamped = np.zeros(2, dtype=bool)
    # V2 measured from the endpoint values, so the targets are exact roots
    floor = float(np.min(model.potential_w(p.gamma, targets, p)))

    def rhs(a):
        return np.sqrt(np.maximum(model.potential_w(p.gamma, a, p) - floor, 0.0))

    history = [state]
    for _ in range(max_steps):
        k1 = rhs(state)
        k2 = rhs(state + 0.5 * dy * k1)
        k3 = rhs(state + 0.5 * dy * k2)
        k4 = rhs(state + dy * k3)
        advanced = state + dy / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        # distance left to travel, signed along each direction
        clamped |= np.sign(dy) * (targets - advanced) <= settings.TOL_TAIL
        state = np.where(clamped, targets, advanced)
        history.append(state)
        if clamped.all():
            return np.asarray(history), len(history) - 1
    return np.asarray(history), None


def _assemble(history, n_steps, step, alpha_minus, alpha_plus) -> TransitionProfile:
    if len(history) < n_steps + 1:
        fill = np.tile(history[-1], (n_steps + 1 - len(history), 1))
        history = np.vstack([history, fill])
    history = history[: n_steps + 1]
    y_half = step * np.arange(n_steps + 1)
    y = np.concatenate((-y_half[:0:-1], y_half))
    alpha = np.concatenate((history[:0:-1, 1], history[:, 0]))
    return TransitionProfile(y, alpha, alpha_minus, alpha_plus)


def _check_profile_request(alpha_minus, alpha_plus, step):
    if not alpha_minus < alpha_plus:
        raise InvalidParameterError(f"need alpha_minus < alpha_plus (got {alpha_minus}, {alpha_plus})")
    if not step > 0:
        raise InvalidParameterError(f"step must be > 0 (got {step})")


def truncated_profile(
    alpha_minus: float, alpha_plus: float, p: MaterialParams, half_width: float, step: float = None
) -> TransitionProfile:
    """Optimal profile on [-half_width, half_width], wells reached or not."""
    step = settings.PROFILE_STEP if step is None else step
    _check_profile_request(alpha_minus, alpha_plus, step)
    n_steps = int(math.ceil(half_width / step))
    history, _ = _integrate_profile(alpha_minus, alpha_plus, p, n_steps, step)
    return _assemble(history, n_steps, step, alpha_minus, alpha_plus)


def optimal_profile(
    alpha_minus: float,
    alpha_plus: float,
    p: MaterialParams,
    half_width: float = None,
    step: float = None,
) -> TransitionProfile:
    """Optimal transition profile between two wells.

    Without ``half_width`` the window starts at PROFILE_HALF_WIDTH and doubles
    until both wells are reached.
    """
    step = settings.PROFILE_STEP if step is None else step
    _check_profile_request(alpha_minus, alpha_plus, step)
    if half_width is not None and not half_width > 0:
        raise InvalidParameterError(f"half_width must be > 0 (got {half_width})")
    limit = settings.PROFILE_MAX_HALF_WIDTH if half_width is None else half_width
    history, reached = _integrate_profile(
        alpha_minus, alpha_plus, p, int(math.ceil(limit / step)), step
    )
    if reached is None:
        raise StalledProfileError(
            f"profile did not reach the wells {alpha_minus:.6g}, {alpha_plus:.6g} "
            f"within half width {limit:g}"
        )
    if half_width is None:
        half_width = settings.PROFILE_HALF_WIDTH
        while half_width < reached * step:
            logger.debug("profile window %g too small, doubling", half_width)
            half_width *= 2.0
    return _assemble(history, int(math.ceil(half_width / step)), step, alpha_minus, alpha_plus)


def equipartition_residual(profile: TransitionProfile, p: MaterialParams, margin: float = 1e-3) -> float:
    """Max relative |alpha'^2 - V2| over samples at least ``margin`` from both wells."""
    slope = np.gradient(profile.alpha, profile.y)
    potential = model.v2(p.gamma, profile.alpha, p)
    inside = (profile.alpha - profile.alpha_minus >= margin) & (profile.alpha_plus - profile.alpha >= margin)
    inside[[0, -1]] = False
    if not inside.any():
        return 0.0
    return float(np.max(np.abs(slope[inside] ** 2 - potential[inside]) / potential[inside]))


def profile_energy(profile: TransitionProfile, p: MaterialParams) -> float:
    slope = np.gradient(profile.alpha, profile.y)
    density = slope**2 + model.v2(p.gamma, profile.alpha, p)
    return float(integrate.trapezoid(density, profile.y))


def f0(alpha: PiecewiseConstantRotation, u_is_homogeneous: bool, p: MaterialParams) -> float:
    """First-order limit energy; math.inf off the well set or for u != gamma * x."""
    if not u_is_homogeneous:
        return math.inf
    wells = closed_form.well_set(p.gamma, p).angles
    for value in alpha.values:
        if min(abs(value - w) for w in wells) > settings.WELL_TOL:
            return math.inf
    return float(sum(surface_energy(left, right, p) for _, left, right in alpha.jump_set))
