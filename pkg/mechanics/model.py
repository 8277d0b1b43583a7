"""Parameters, pointwise densities and discretized energy functionals.

Fields live on a uniform grid of [0, 1] with n cells. Strains u' and rotation
slopes alpha' are forward differences per cell; potential terms are evaluated
at the cell midpoints of the linear interpolant of alpha, so all integrals are
exact for the gradient terms of piecewise linear fields.
"""
import logging
import math
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from config import settings
from .exceptions import (
    ConstraintViolationError,
    DivisionByZeroScaleError,
    InadmissibleFieldError,
    InvalidParameterError,
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
_FIELD_TOL = 1e-12


@dataclass(frozen=True)
class MaterialParams:
    mu: float
    mu_c: float
    gamma: float
    theta: float = 0.0
    eps: float = 0.0

    def __post_init__(self):
        problems = []
        if not self.mu > 0:
            problems.append(f"mu must be > 0 (got {self.mu})")
        if not self.mu_c >= 0:
            problems.append(f"mu_c must be >= 0 (got {self.mu_c})")
        if not 0 < self.gamma < 2:
            problems.append(f"gamma must lie in the admissible range (0, 2) (got {self.gamma})")
        if not 0 <= self.theta <= TWO_PI:
            problems.append(f"theta must lie in [0, 2*pi] (got {self.theta})")
        if not self.eps >= 0:
            problems.append(f"eps must be >= 0 (got {self.eps})")
        if problems:
            raise InvalidParameterError("; ".join(problems))

    @cached_property
    def minimal_w(self) -> float:
        """Minimum of W(gamma, .) over the rotation angle."""
        from .closed_form import well_set

        return well_set(self.gamma, self).minimal_w

    def replace(self, **changes) -> "MaterialParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class EnergyBreakdown:
    curvature: float
    shear: float
    coupling: float
    total: float


@dataclass(frozen=True, eq=False)
class GridField:
    u: np.ndarray
    alpha: np.ndarray

    def __post_init__(self):
        u = np.array(self.u, dtype=float)
        alpha = np.array(self.alpha, dtype=float)
        if u.ndim != 1 or u.shape != alpha.shape:
            raise InadmissibleFieldError(
                f"u and alpha must be 1-d arrays of equal length (got {u.shape} and {alpha.shape})"
            )
        u.setflags(write=False)
        alpha.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def homogeneous(cls, n: int, p: MaterialParams, alpha=0.0) -> "GridField":
        """The homogeneous shear u = gamma * x with a given rotation.

        ``alpha`` may be a constant, an array of n + 1 nodal values or a
        callable evaluated on the nodes.
        """
        x = np.linspace(0.0, 1.0, n + 1)
        if callable(alpha):
            values = alpha(x)
        else:
            values = np.broadcast_to(np.asarray(alpha, dtype=float), x.shape)
        u = p.gamma * x
        u[-1] = p.gamma
        return cls(u, values)

    @property
    def n(self) -> int:
        return len(self.u) - 1

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n + 1)

    def strains(self) -> np.ndarray:
        return np.diff(self.u) / self.h

    def rotation_slopes(self) -> np.ndarray:
        return np.diff(self.alpha) / self.h

    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.alpha[:-1] + self.alpha[1:])

    def mean_rotation(self) -> float:
        # trapezoid rule, identical to the integral of the linear interpolant
        return float(self.h * np.sum(self.midpoints()))

    def admissibility_issues(self, p: MaterialParams, periodic: bool = True) -> list[str]:
        issues = []
        if self.n < 2:
            issues.append(f"need at least 2 cells (got {self.n})")
            return issues
        if abs(self.u[0]) > _FIELD_TOL:
            issues.append(f"u(0) = {self.u[0]:.6g} != 0")
        if abs(self.u[-1] - p.gamma) > _FIELD_TOL:
            issues.append(f"u(1) = {self.u[-1]:.6g} != gamma = {p.gamma:.6g}")
        if periodic and abs(self.alpha[0] - self.alpha[-1]) > _FIELD_TOL:
            issues.append(f"alpha(0) = {self.alpha[0]:.6g} != alpha(1) = {self.alpha[-1]:.6g}")
        if self.alpha.min() < -_FIELD_TOL or self.alpha.max() > TWO_PI + _FIELD_TOL:
            issues.append("alpha leaves [0, 2*pi]")
        return issues

    def require_admissible(self, p: MaterialParams, periodic: bool = True) -> None:
        issues = self.admissibility_issues(p, periodic=periodic)
        if issues:
            raise InadmissibleFieldError("field is not admissible: " + "; ".join(issues))


def construct_homogeneous(n: int, p: MaterialParams, alpha=0.0) -> GridField:
    """u = gamma * x on n cells with constant rotation alpha."""
    return GridField.homogeneous(n, p, alpha)


# Pointwise densities. All accept numpy arrays and broadcast.

def _shear_terms(z, alpha):
    s = np.sin(alpha)
    c = np.cos(alpha)
    a_term = s * z - 4.0 * np.sin(0.5 * alpha) ** 2
    b_term = c * z - 2.0 * s
    return s, c, a_term, b_term


def potential_w(z, alpha, p: MaterialParams):
    _, _, a_term, b_term = _shear_terms(z, alpha)
    return 0.5 * p.mu * a_term**2 + 0.5 * p.mu_c * b_term**2


def potential_w_derivatives(z, alpha, p: MaterialParams):
    """Return (W, dW/dz, dW/dalpha)."""
    s, c, a_term, b_term = _shear_terms(z, alpha)
    w = 0.5 * p.mu * a_term**2 + 0.5 * p.mu_c * b_term**2
    w_z = p.mu * a_term * s + p.mu_c * b_term * c
    # d(a_term)/dalpha = b_term, d(b_term)/dalpha = -(a_term + 2)
    w_alpha = p.mu * a_term * b_term - p.mu_c * b_term * (a_term + 2.0)
    return w, w_z, w_alpha


def potential_w_reduced(z, alpha, p: MaterialParams):
    """Polynomial (third-order) approximation of W."""
    quartic = (alpha * (alpha - z)) ** 2
    couple = (2.0 - alpha**2) / 2.0 * z - (6.0 * alpha - alpha**3) / 3.0
    return 0.5 * p.mu * quartic + 0.5 * p.mu_c * couple**2


def q(z, alpha, p: MaterialParams):
    return 0.5 * p.mu * np.square(z) + potential_w(z, alpha, p)


def v1(z, p: MaterialParams):
    return 0.5 * p.mu * np.abs(np.square(z) - p.gamma**2)


def v2(z, alpha, p: MaterialParams):
    return potential_w(z, alpha, p) - p.minimal_w


# Discretized functionals

def _require_cells(f: GridField) -> None:
    if f.n < 2:
        raise InadmissibleFieldError(f"need at least 2 cells (got {f.n})")


def energy_eps(f: GridField, p: MaterialParams) -> EnergyBreakdown:
    _require_cells(f)
    h = f.h
    z = f.strains()
    curvature = p.eps**2 * h * float(np.sum(f.rotation_slopes() ** 2))
    shear = 0.5 * p.mu * h * float(np.sum(z**2))
    coupling = h * float(np.sum(potential_w(z, f.midpoints(), p)))
    return EnergyBreakdown(curvature, shear, coupling, curvature + shear + coupling)


def check_volume_constraint(f: GridField, p: MaterialParams, tol: float = settings.TOL_VC) -> float:
    mean = f.mean_rotation()
    if abs(mean - p.theta) > tol:
        raise ConstraintViolationError(mean, p.theta)
    return mean


def energy_eps_theta(f: GridField, p: MaterialParams) -> EnergyBreakdown:
    f.require_admissible(p)
    check_volume_constraint(f, p)
    return energy_eps(f, p)


def energy_rescaled(f: GridField, p: MaterialParams) -> float:
    """First-order rescaled energy F_eps.

    The periodic trace is not required here: single-layer recovery fields
    connect two different wells.
    """
    if p.eps == 0:
        raise DivisionByZeroScaleError("the rescaled energy needs eps > 0")
    f.require_admissible(p, periodic=False)
    h = f.h
    z = f.strains()
    curvature = p.eps**2 * float(np.sum(f.rotation_slopes() ** 2))
    bulk = float(np.sum(v1(z, p) + v2(z, f.midpoints(), p)))
    return h * (curvature + bulk) / p.eps


def rotation_gradient(slopes: np.ndarray, cell_weights: np.ndarray, eps: float) -> np.ndarray:
    """Nodal gradient of eps^2 h sum(slopes^2) + sum(cell terms at midpoints).

    ``cell_weights`` holds the derivative of each cell term with respect to
    its midpoint rotation (already multiplied by h).
    """
    grad = np.zeros(len(slopes) + 1)
    flux = 2.0 * eps**2 * slopes
    grad[:-1] += 0.5 * cell_weights - flux
    grad[1:] += 0.5 * cell_weights + flux
    return grad


def energy_eps_gradient(f: GridField, p: MaterialParams) -> tuple[np.ndarray, np.ndarray]:
    """Gradient of the discrete E_eps with respect to every nodal value."""
    _require_cells(f)
    h = f.h
    z = f.strains()
    _, w_z, w_alpha = potential_w_derivatives(z, f.midpoints(), p)
    stress = p.mu * z + w_z
    grad_u = np.zeros(f.n + 1)
    grad_u[:-1] -= stress
    grad_u[1:] += stress
    grad_alpha = rotation_gradient(f.rotation_slopes(), h * w_alpha, p.eps)
    return grad_u, grad_alpha
