import argparse
import logging
import sys

from config import settings
from cli.commands import HANDLERS
from mechanics.exceptions import CosseratError
from solvers.minimizer import METHODS

logger = logging.getLogger("cosserat_shear")

DEFAULT_GAMMAS = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0"


def _add_material(parser, mu=2.0, mu_c=0.0):
    group = parser.add_argument_group("material")
    group.add_argument("--mu", type=float, default=mu, help="shear modulus, > 0 (default: %(default)s)")
    group.add_argument("--mu-c", type=float, default=mu_c, help="couple modulus, >= 0 (default: %(default)s)")
    group.add_argument(
        "--gamma", type=float, default=0.6, help="boundary shear, admissible range (0, 2) (default: %(default)s)"
    )
    group.add_argument("--eps", type=float, default=0.0, help="internal length scale, >= 0 (default: %(default)s)")
    group.add_argument(
        "--theta", type=float, default=None, help="prescribed mean rotation in [0, 2*pi] (default: between the wells)"
    )


def _add_output(parser, fmt):
    parser.add_argument("--out", default=None, metavar="PATH", help="output file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default=fmt, help="output format (default: %(default)s)")


def _add_wells(parser):
    parser.add_argument("--alpha-minus", type=float, default=None, help="left well (default: lower well at gamma)")
    parser.add_argument("--alpha-plus", type=float, default=None, help="right well (default: upper well at gamma)")


def _add_solver(parser, n=settings.SOLVER_N):
    group = parser.add_argument_group("solver")
    group.add_argument("--n", type=int, default=n, help="grid cells, >= 8 (default: %(default)s)")
    group.add_argument("--max-iters", type=int, default=settings.SOLVER_MAX_ITERS, help="(default: %(default)s)")
    group.add_argument("--grad-tol", type=float, default=settings.SOLVER_GRAD_TOL, help="(default: %(default)s)")
    group.add_argument("--restarts", type=int, default=settings.SOLVER_RESTARTS, help="(default: %(default)s)")
    group.add_argument("--method", choices=METHODS, default=METHODS[0], help="inner solver (default: %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cosserat-shear",
        description="Energies, relaxation, interface energies and solvers for 1D Cosserat simple shear.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    subparsers = parser.add_subparsers(dest="command", required=True)

    regime = subparsers.add_parser("regime", help="Classify the parameters and list the wells.")
    _add_material(regime, mu=1.0)
    _add_output(regime, "json")

    table2 = subparsers.add_parser("table2", help="Surface energies c0 and reduced c0 for mu_c = 0.")
    table2.add_argument("--mu", type=float, default=2.0, help="shear modulus (default: %(default)s)")
    table2.add_argument(
        "--gammas", default=DEFAULT_GAMMAS, help="comma separated shears (default: %(default)s)"
    )
    _add_output(table2, "csv")

    env = subparsers.add_parser("envelope", help="Dump W, Q and their convex envelopes over alpha.")
    _add_material(env, mu=1.0)
    env.add_argument("--z", type=float, default=None, help="strain (default: gamma)")
    env.add_argument("--samples", type=int, default=512, help="alpha samples, >= 16 (default: %(default)s)")
    _add_output(env, "csv")

    energy = subparsers.add_parser("energy", help="Evaluate the energy functionals of a field.")
    _add_material(energy)
    energy.add_argument("--field", default=None, metavar="CSV", help="x,u,alpha file (default: homogeneous field)")
    energy.add_argument("--n", type=int, default=settings.SOLVER_N, help="cells of the homogeneous field (default: %(default)s)")
    _add_output(energy, "json")

    surface = subparsers.add_parser("surface", help="Surface energy between two wells.")
    _add_material(surface)
    _add_wells(surface)
    _add_output(surface, "json")

    profile = subparsers.add_parser("profile", help="Optimal transition profile between two wells.")
    _add_material(profile)
    _add_wells(profile)
    profile.add_argument("--half-width", type=float, default=None, help="stretched half width (default: adaptive)")
    profile.add_argument("--step", type=float, default=settings.PROFILE_STEP, help="(default: %(default)s)")
    _add_output(profile, "csv")

    relax = subparsers.add_parser("relax", help="Minimize E_eps with the mean constraint and the relaxed energy.")
    _add_material(relax)
    _add_solver(relax)
    relax.add_argument("--field-out", default=None, metavar="CSV", help="write the minimizing field")
    _add_output(relax, "json")

    sweep = subparsers.add_parser("gamma-sweep", help="Gap to the relaxed minimum as eps decreases.")
    _add_material(sweep)
    _add_solver(sweep, n=1024)
    sweep.add_argument(
        "--eps-list", default="0.2,0.1,0.05,0.025", help="strictly decreasing eps values (default: %(default)s)"
    )
    sweep.add_argument("--workers", type=int, default=None, help="worker threads (default: COSSERAT_SWEEP_WORKERS)")
    sweep.add_argument("--field-dir", default=None, metavar="DIR", help="write one field file per eps")
    _add_output(sweep, "csv")

    return parser


def _configure_logging(verbose: int) -> None:
    level = settings.LOG_LEVEL
    if verbose == 1:
        level = "INFO"
    elif verbose > 1:
        level = "DEBUG"
    logging.basicConfig(
        stream=sys.stderr, level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s", force=True
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings.validate_config()
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    _configure_logging(args.verbose)

    try:
        return HANDLERS[args.command](args)
    except CosseratError as e:
        logger.debug("%s failed", args.command, exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
