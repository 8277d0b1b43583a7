import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from config import settings
from mechanics.exceptions import CosseratError, InvalidParameterError
from mechanics.model import GridField, MaterialParams
from .minimizer import SolverConfig, minimize_eps_theta, minimize_relaxed

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SweepRow:
    eps: float
    energy: float
    relaxed_energy: float
    gap: float
    iterations: int
    converged: bool
    field: GridField
    error: str = ""


def gamma_sweep(
    p: MaterialParams, eps_list, cfg: SolverConfig = None, workers: int = None
) -> list[SweepRow]:
    """Constrained minimum of E_eps per eps against the relaxed minimum.

    Rows come back in the order of ``eps_list`` whatever the worker count.
    A row whose solve raises is reported with ``converged`` false, NaN
    energies, no field and the reason in ``error``; the other rows still run.
    """
    cfg = cfg or SolverConfig()
    eps_list = [float(e) for e in eps_list]
    if any(e <= 0 for e in eps_list):
        raise InvalidParameterError("eps values must be positive")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise InvalidParameterError("eps values must be strictly decreasing")
    workers = settings.SWEEP_WORKERS if workers is None else workers

    relaxed = minimize_relaxed(p, cfg)
    logger.info("relaxed minimum %.10g", relaxed.energy)

    def run(eps: float) -> SweepRow:
        try:
            result = minimize_eps_theta(p.replace(eps=eps), cfg)
        except CosseratError as exc:
            logger.warning("eps %g failed: %s", eps, exc)
            return SweepRow(
                eps=eps,
                energy=math.nan,
                relaxed_energy=relaxed.energy,
                gap=math.nan,
                iterations=0,
                converged=False,
                field=None,
                error=str(exc),
            )
        gap = result.energy - relaxed.energy
        logger.info("eps %g: energy %.10g, gap %.4e", eps, result.energy, gap)
        return SweepRow(
            eps=eps,
            energy=result.energy,
            relaxed_energy=relaxed.energy,
            gap=gap,
            iterations=result.iterations,
            converged=result.converged and relaxed.converged,
            field=result.field,
        )

    if workers <= 1:
        return [run(eps) for eps in eps_list]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, eps_list))
