"""Subcommand handlers. Each takes the parsed arguments and returns an exit code."""
import logging
from pathlib import Path

import numpy as np

from mechanics import closed_form, model
from mechanics.exceptions import ConstraintViolationError, InvalidParameterError, WrongRegimeError
from mechanics.model import MaterialParams
from relaxation import envelope, interface_energy
from solvers.minimizer import SolverConfig, minimize_eps_theta, minimize_relaxed
from solvers.sweep import gamma_sweep
from .output import Table, emit, read_field, write_field

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NO_CONVERGENCE = 4


def parse_float_list(raw: str) -> list[float]:
    try:
        return [float(x.strip()) for x in raw.split(",") if x.strip()]
    except ValueError:
        raise InvalidParameterError(f"not a comma separated list of numbers: {raw!r}") from None


def material_params(args, theta: float = 0.0) -> MaterialParams:
    return MaterialParams(
        mu=args.mu,
        mu_c=args.mu_c,
        gamma=args.gamma,
        theta=theta,
        eps=args.eps,
    )


def solver_config(args) -> SolverConfig:
    return SolverConfig(
        n=args.n,
        max_iters=args.max_iters,
        grad_tol=args.grad_tol,
        restarts=args.restarts,
        method=args.method,
    )


def _well_pair(args, p: MaterialParams) -> tuple[float, float]:
    """Transition endpoints from the flags, else the two wells at gamma."""
    if args.alpha_minus is not None and args.alpha_plus is not None:
        return args.alpha_minus, args.alpha_plus
    wells = closed_form.well_set(p.gamma, p)
    if len(wells.angles) < 2:
        raise WrongRegimeError(
            f"{wells.regime.tag.value} has a single well; pass --alpha-minus and --alpha-plus"
        )
    return wells.angles


def _default_theta(args) -> MaterialParams:
    """Constraint mean from --theta, else midway between the wells (or the single well)."""
    p = material_params(args, theta=0.0)
    if args.theta is not None:
        return p.replace(theta=args.theta)
    angles = closed_form.well_set(p.gamma, p).angles
    return p.replace(theta=0.5 * (angles[0] + angles[-1]))


def cmd_regime(args) -> int:
    """Regime, critical couple modulus and wells at gamma"""
    p = material_params(args, theta=0.0)
    wells = closed_form.well_set(p.gamma, p)
    emit(
        {
            "regime": wells.regime.tag.value,
            "mu_c_crit": wells.regime.mu_c_crit,
            "wells": list(wells.angles),
            "minimal_energy": wells.minimal_energy,
            "minimal_w": wells.minimal_w,
        },
        args.format,
        args.out,
    )
    return EXIT_OK


def cmd_table2(args) -> int:
    """Surface energies of the zero-couple model against gamma"""
    rows = []
    for gamma in parse_float_list(args.gammas):
        p = MaterialParams(mu=args.mu, mu_c=0.0, gamma=gamma)
        upper = closed_form.well_set(gamma, p).angles[1]
        rows.append(
            [
                gamma,
                upper,
                interface_energy.surface_energy(0.0, upper, p),
                interface_energy.surface_energy_reduced(0.0, gamma, p),
            ]
        )
    emit(Table(["gamma", "alpha1_plus", "c0", "c0_reduced"], rows), args.format, args.out)
    return EXIT_OK


def cmd_envelope(args) -> int:
    """Density, its envelope and the hull oracle over the rotation"""
    p = material_params(args, theta=0.0)
    z = p.gamma if args.z is None else args.z
    closed_form.well_set(z, p)
    sampled = envelope.envelope_bruteforce(z, p, args.samples)
    alpha = sampled.alpha
    shear = 0.5 * p.mu * z * z
    q_env = envelope.q_envelope(z, alpha, p)
    rows = [
        [a, w, w_env, w + shear, qe, hull]
        for a, w, w_env, qe, hull in zip(
            alpha, sampled.values, q_env - shear, q_env, sampled.hull
        )
    ]
    emit(Table(["alpha", "W", "W_envelope", "Q", "Q_envelope", "W_hull"], rows), args.format, args.out)
    return EXIT_OK


def cmd_energy(args) -> int:
    """All energy functionals of one field"""
    theta = 0.0 if args.theta is None else args.theta
    p = material_params(args, theta=theta)
    if args.field is not None:
        f = read_field(args.field)
    else:
        f = model.construct_homogeneous(args.n, p, alpha=theta)
    f.require_admissible(p, periodic=False)

    breakdown = model.energy_eps(f, p)
    report = {
        "n": f.n,
        "curvature": breakdown.curvature,
        "shear": breakdown.shear,
        "coupling": breakdown.coupling,
        "total": breakdown.total,
        "mean_alpha": f.mean_rotation(),
        "constrained_total": None,
        "rescaled": model.energy_rescaled(f, p) if p.eps > 0 else None,
        "relaxed": None,
        "condensed": closed_form.condensed_energy(f, p),
    }
    if not f.admissibility_issues(p):
        report["relaxed"] = envelope.energy_relaxed(f, p)
        try:
            report["constrained_total"] = model.energy_eps_theta(f, p).total
        except ConstraintViolationError as exc:
            logger.info("%s", exc)
    emit(report, args.format, args.out)
    return EXIT_OK


def cmd_surface(args) -> int:
    """Surface energy of a transition between two wells"""
    p = material_params(args, theta=0.0)
    alpha_minus, alpha_plus = _well_pair(args, p)
    report = {
        "gamma": p.gamma,
        "alpha_minus": alpha_minus,
        "alpha_plus": alpha_plus,
        "c0": interface_energy.surface_energy(alpha_minus, alpha_plus, p),
        "c0_closed_form": None,
        "c0_reduced": None,
    }
    if p.mu_c == 0:
        report["c0_closed_form"] = interface_energy.surface_energy_closed_zero_couple(p)
        report["c0_reduced"] = interface_energy.surface_energy_reduced(0.0, p.gamma, p)
    emit(report, args.format, args.out)
    return EXIT_OK


def cmd_profile(args) -> int:
    """Optimal transition profile samples"""
    p = material_params(args, theta=0.0)
    alpha_minus, alpha_plus = sorted(_well_pair(args, p))
    profile = interface_energy.optimal_profile(
        alpha_minus, alpha_plus, p, half_width=args.half_width, step=args.step
    )
    rows = [list(pair) for pair in zip(profile.y, profile.alpha)]
    emit(Table(["y", "alpha"], rows), args.format, args.out)
    return EXIT_OK


def cmd_relax(args) -> int:
    """Constrained minimizer of E_eps next to the relaxed minimum"""
    p = _default_theta(args)
    cfg = solver_config(args)
    relaxed = minimize_relaxed(p, cfg)
    report = {
        "theta": p.theta,
        "relaxed_energy": relaxed.energy,
        "energy": None,
        "gap": None,
        "constraint_residual": relaxed.constraint_residual,
        "iterations": relaxed.iterations,
        "start": relaxed.start,
        "converged": relaxed.converged,
    }
    result = relaxed
    if p.eps > 0:
        result = minimize_eps_theta(p, cfg)
        report.update(
            energy=result.energy,
            gap=result.energy - relaxed.energy,
            constraint_residual=result.constraint_residual,
            iterations=result.iterations,
            start=result.start,
            converged=result.converged and relaxed.converged,
        )
    emit(report, args.format, args.out)
    if args.field_out:
        write_field(args.field_out, result.field)
    return EXIT_OK if report["converged"] else EXIT_NO_CONVERGENCE


def cmd_gamma_sweep(args) -> int:
    """Gap between the constrained minima and the relaxed minimum per eps"""
    p = _default_theta(args)
    rows = gamma_sweep(p, parse_float_list(args.eps_list), solver_config(args), workers=args.workers)
    table = Table(
        ["eps", "energy", "relaxed_energy", "gap", "iterations", "converged", "error"],
        [[r.eps, r.energy, r.relaxed_energy, r.gap, r.iterations, r.converged, r.error] for r in rows],
    )
    emit(table, args.format, args.out)
    if args.field_dir:
        for i, row in enumerate(rows):
            if row.field is None:
                continue
            write_field(Path(args.field_dir) / f"field_{i:02d}_eps_{row.eps:g}.csv", row.field)
    return EXIT_OK if all(r.converged for r in rows) else EXIT_NO_CONVERGENCE


HANDLERS = {
    "regime": cmd_regime,
    "table2": cmd_table2,
    "envelope": cmd_envelope,
    "energy": cmd_energy,
    "surface": cmd_surface,
    "profile": cmd_profile,
    "relax": cmd_relax,
    "gamma-sweep": cmd_gamma_sweep,
}
