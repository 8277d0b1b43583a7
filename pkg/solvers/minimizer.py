"""Constrained minimization of the discretized energies.

The unknowns are n cell strains and the nodal rotations alpha_0..alpha_{n-1}
(alpha_n is tied to alpha_0). Strains are projected onto mean gamma, so
u(0) = 0 and u(1) = gamma hold by construction. The mean rotation constraint
is handled by an augmented Lagrangian; the box [0, 2*pi] on the rotations is
passed to the inner bound-constrained solver.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize

from config import settings
from mechanics import closed_form, model
from mechanics.exceptions import InvalidParameterError
from mechanics.model import GridField, MaterialParams
from relaxation import envelope

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
LBFGSB = "l-bfgs-b"
PROJECTED_GRADIENT = "projected-gradient"
METHODS = (LBFGSB, PROJECTED_GRADIENT)
TIE_TOL = 1e-12


@dataclass(frozen=True)
class BacktrackingRule:
    initial_step: float = 1.0
    shrink: float = 0.5
    armijo: float = 1e-4
    max_backtracks: int = 60


@dataclass(frozen=True)
class SolverConfig:
    n: int = settings.SOLVER_N
    max_iters: int = settings.SOLVER_MAX_ITERS
    grad_tol: float = settings.SOLVER_GRAD_TOL
    restarts: int = settings.SOLVER_RESTARTS
    penalty_weight: float = settings.SOLVER_PENALTY
    step_rule: BacktrackingRule = field(default_factory=BacktrackingRule)
    outer_iters: int = settings.SOLVER_OUTER_ITERS
    method: str = LBFGSB
    x_bar: float = 0.5

    def __post_init__(self):
        problems = []
        if self.n < 8:
            problems.append(f"n must be >= 8 (got {self.n})")
        if not self.grad_tol > 0:
            problems.append(f"grad_tol must be > 0 (got {self.grad_tol})")
        if not self.penalty_weight >= 0:
            problems.append(f"penalty_weight must be >= 0 (got {self.penalty_weight})")
        if self.restarts < 1 or self.max_iters < 1 or self.outer_iters < 1:
            problems.append("restarts, max_iters and outer_iters must be >= 1")
        if self.method not in METHODS:
            problems.append(f"method must be one of {', '.join(METHODS)} (got {self.method})")
        if not 0 < self.x_bar < 1:
            problems.append(f"x_bar must lie in (0, 1) (got {self.x_bar})")
        if problems:
            raise InvalidParameterError("; ".join(problems))


@dataclass(frozen=True, eq=False)
class SolveResult:
    field: GridField
    energy: float
    constraint_residual: float
    iterations: int
    converged: bool
    gradient_norm: float = math.nan
    start: str = ""


# density(z, alpha_mid) -> (value, d/dz, d/dalpha), all per cell
Density = Callable[[np.ndarray, np.ndarray], tuple]


def _eps_density(p: MaterialParams) -> Density:
    def density(z, alpha_mid):
        w, w_z, w_alpha = model.potential_w_derivatives(z, alpha_mid, p)
        return 0.5 * p.mu * z * z + w, p.mu * z + w_z, w_alpha

    return density


def _relaxed_density(p: MaterialParams) -> Density:
    def density(z, alpha_mid):
        d_z, d_alpha = envelope.q_envelope_derivatives(z, alpha_mid, p)
        return envelope.q_envelope(z, alpha_mid, p), d_z, d_alpha

    return density


class DiscreteProblem:
    """Energy, constraint and bounds in the reduced unknowns x = [w, a]."""

    def __init__(self, p: MaterialParams, n: int, density: Density, eps: float):
        self.p = p
        self.n = n
        self.h = 1.0 / n
        self.density = density
        self.eps = eps
        self.lower = np.concatenate((np.full(n, -np.inf), np.zeros(n)))
        self.upper = np.concatenate((np.full(n, np.inf), np.full(n, TWO_PI)))
        self.bounds = [(None, None)] * n + [(0.0, TWO_PI)] * n
        self.constraint_gradient = np.concatenate((np.zeros(n), np.full(n, 1.0 / n)))

    def split(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        w = x[: self.n]
        a = x[self.n :]
        return w - w.mean() + self.p.gamma, np.append(a, a[0])

    def pack(self, strains: np.ndarray, alpha_nodes: np.ndarray) -> np.ndarray:
        return np.concatenate((strains, alpha_nodes[: self.n]))

    def to_field(self, x: np.ndarray) -> GridField:
        z, alpha = self.split(x)
        u = np.concatenate(([0.0], np.cumsum(z) * self.h))
        u[-1] = self.p.gamma
        return GridField(u, alpha)

    def project(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)

    def constraint(self, x: np.ndarray) -> float:
        # trapezoid mean with periodic closure
        return float(x[self.n :].mean() - self.p.theta)

    def energy_and_gradient(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        z, alpha = self.split(x)
        h = self.h
        slopes = np.diff(alpha) / h
        value, d_z, d_alpha = self.density(z, 0.5 * (alpha[:-1] + alpha[1:]))
        energy = h * float(np.sum(value)) + self.eps**2 * h * float(np.sum(slopes**2))
        g_z = h * d_z
        g_alpha = model.rotation_gradient(slopes, h * d_alpha, self.eps)
        g_a = g_alpha[:-1].copy()
        g_a[0] += g_alpha[-1]
        return energy, np.concatenate((g_z - g_z.mean(), g_a))

    def projected_gradient_norm(self, x: np.ndarray, grad: np.ndarray) -> float:
        """Sup-norm of the projected gradient of the discrete energy."""
        step = x - self.project(x - grad)
        return float(np.max(np.abs(step)))


def _lbfgsb(fun, x0, problem: DiscreteProblem, cfg: SolverConfig):
    result = optimize.minimize(
        fun,
        x0,
        jac=True,
        method="L-BFGS-B",
        bounds=problem.bounds,
        options={
            "maxiter": cfg.max_iters,
            "maxfun": 2 * cfg.max_iters,
            "gtol": cfg.grad_tol,
            "ftol": 1e-15,
            "maxcor": 20,
        },
    )
    return result.x, int(result.nit)


def _projected_gradient(fun, x0, problem: DiscreteProblem, cfg: SolverConfig):
    rule = cfg.step_rule
    x = problem.project(x0)
    value, grad = fun(x)
    step = rule.initial_step
    for iteration in range(cfg.max_iters):
        if problem.projected_gradient_norm(x, grad) <= cfg.grad_tol:
            return x, iteration
        for _ in range(rule.max_backtracks):
            trial = problem.project(x - step * grad)
            trial_value, trial_grad = fun(trial)
            if trial_value <= value + rule.armijo * float(np.dot(grad, trial - x)):
                break
            step *= rule.shrink
        else:
            logger.debug("line search exhausted after %d backtracks", rule.max_backtracks)
            return x, iteration
        assert trial_value <= value
        x, value, grad = trial, trial_value, trial_grad
        step /= rule.shrink
    return x, cfg.max_iters


def _augmented_lagrangian(problem: DiscreteProblem, x0: np.ndarray, cfg: SolverConfig):
    """Returns (x, iterations, converged, projected gradient norm)."""
    inner = _projected_gradient if cfg.method == PROJECTED_GRADIENT else _lbfgsb
    c_grad = problem.constraint_gradient
    multiplier = 0.0
    rho = cfg.penalty_weight
    x = problem.project(x0)
    iterations = 0
    previous = math.inf
    norm = math.inf

    for outer in range(cfg.outer_iters):

        def lagrangian(y, lam=multiplier, rho=rho):
            energy, grad = problem.energy_and_gradient(y)
            c = problem.constraint(y)
            return energy + lam * c + 0.5 * rho * c * c, grad + (lam + rho * c) * c_grad

        x, count = inner(lagrangian, x, problem, cfg)
        iterations += count
        c = problem.constraint(x)
        multiplier += (rho if rho > 0 else 1.0) * c
        _, grad = problem.energy_and_gradient(x)
        norm = problem.projected_gradient_norm(x, grad + multiplier * c_grad)
        logger.debug(
            "outer %d: residual %.3e, gradient %.3e, penalty %.3g", outer, c, norm, rho
        )
        if abs(c) <= settings.TOL_VC and norm <= cfg.grad_tol:
            return x, iterations, True, norm
        if abs(c) > 0.25 * abs(previous):
            rho *= 10.0
        previous = c
    return x, iterations, False, norm


def _layer_ansatz(x: np.ndarray, wells: tuple, p: MaterialParams, cfg: SolverConfig) -> np.ndarray:
    """Periodic plateau at the upper well centred on x_bar, area matched to theta."""
    lower, upper = wells
    fraction = (p.theta - lower) / (upper - lower)
    width = max(p.eps, 2.0 / cfg.n)
    left = cfg.x_bar - 0.5 * fraction
    right = cfg.x_bar + 0.5 * fraction
    plateau = 0.5 * (np.tanh((x - left) / width) - np.tanh((x - right) / width))
    return np.clip(lower + (upper - lower) * plateau, 0.0, TWO_PI)


def _initial_rotations(p: MaterialParams, cfg: SolverConfig) -> list[tuple[str, np.ndarray]]:
    x = np.linspace(0.0, 1.0, cfg.n + 1)[:-1]
    wells = closed_form.well_set(p.gamma, p).angles
    theta_is_well = any(abs(p.theta - w) <= settings.WELL_TOL for w in wells)

    starts = []
    if len(wells) == 2 and wells[0] < p.theta < wells[1] and not theta_is_well:
        starts.append(("layer", _layer_ansatz(x, wells, p, cfg)))
    starts.append(("theta", np.full(cfg.n, p.theta)))
    for i, w in enumerate(wells):
        if abs(w - p.theta) > settings.WELL_TOL:
            starts.append((f"well-{i}", np.full(cfg.n, w)))
    return starts[: cfg.restarts]


def _select(results: list[SolveResult]) -> SolveResult:
    """Lowest energy; among near ties the earliest start wins."""
    best = min(r.energy for r in results)
    slack = TIE_TOL * max(1.0, abs(best))
    return next(r for r in results if r.energy <= best + slack)


def _solve(problem: DiscreteProblem, starts, evaluate, cfg: SolverConfig) -> SolveResult:
    strains = np.full(problem.n, problem.p.gamma)
    results = []
    for label, alpha_nodes in starts:
        x, iterations, converged, norm = _augmented_lagrangian(
            problem, problem.pack(strains, alpha_nodes), cfg
        )
        solution = problem.to_field(x)
        result = SolveResult(
            field=solution,
            energy=evaluate(solution),
            constraint_residual=abs(solution.mean_rotation() - problem.p.theta),
            iterations=iterations,
            converged=converged,
            gradient_norm=norm,
            start=label,
        )
        logger.info(
            "start %s: energy %.10g, residual %.2e, %d iterations%s",
            label,
            result.energy,
            result.constraint_residual,
            iterations,
            "" if converged else " (not converged)",
        )
        results.append(result)

    best = _select(results)
    if not best.converged:
        logger.warning(
            "solver did not converge (residual %.2e, gradient %.2e)",
            best.constraint_residual,
            best.gradient_norm,
        )
    return best


def minimize_eps_theta(p: MaterialParams, cfg: SolverConfig = None) -> SolveResult:
    """Best local minimizer of the constrained E_eps over the configured starts."""
    cfg = cfg or SolverConfig()
    if not p.eps > 0:
        raise InvalidParameterError("minimize_eps_theta needs eps > 0")
    problem = DiscreteProblem(p, cfg.n, _eps_density(p), p.eps)
    return _solve(
        problem, _initial_rotations(p, cfg), lambda f: model.energy_eps(f, p).total, cfg
    )


def minimize_relaxed(p: MaterialParams, cfg: SolverConfig = None) -> SolveResult:
    """Minimizer of the constrained relaxed energy; convex, so one start suffices."""
    cfg = cfg or SolverConfig()
    problem = DiscreteProblem(p, cfg.n, _relaxed_density(p), 0.0)
    starts = [("theta", np.full(cfg.n, p.theta))]
    return _solve(problem, starts, lambda f: envelope.energy_relaxed(f, p), cfg)
