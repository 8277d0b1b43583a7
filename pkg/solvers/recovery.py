"""Recovery sequences: homogeneous shear with optimal-profile rotation layers."""
import logging

import numpy as np

from config import settings
from mechanics.exceptions import DivisionByZeroScaleError, InvalidParameterError
from mechanics.model import GridField, MaterialParams
from relaxation.interface_energy import PiecewiseConstantRotation, truncated_profile
from .minimizer import SolverConfig

logger = logging.getLogger(__name__)


def _layer(x, x_bar, alpha_minus, alpha_plus, p: MaterialParams, half_width: float) -> np.ndarray:
    """alpha_minus left of the layer, alpha_plus right of it, the stretched profile inside."""
    lo, hi = sorted((alpha_minus, alpha_plus))
    profile = truncated_profile(lo, hi, p, half_width)
    y, beta = profile.y, profile.alpha
    if alpha_minus > alpha_plus:
        y, beta = -y[::-1], beta[::-1]
    # rescale so the truncated ends hit the wells exactly
    start = np.interp(-half_width, y, beta)
    end = np.interp(half_width, y, beta)
    stretched = (x - x_bar) / p.eps
    inside = alpha_minus + (np.interp(stretched, y, beta) - start) * (alpha_plus - alpha_minus) / (end - start)
    return np.where(
        stretched <= -half_width, alpha_minus, np.where(stretched >= half_width, alpha_plus, inside)
    )


def _half_width(room: float, p: MaterialParams, half_width: float = None) -> float:
    """Stretched half-width of a layer that fits in ``room`` on either side."""
    limit = room / p.eps
    wanted = settings.RECOVERY_LAYER_WIDTH / p.eps if half_width is None else half_width
    if wanted > limit:
        logger.debug("layer half width %g capped at %g", wanted, limit)
    return min(wanted, limit)


def recovery_sequence(
    alpha_minus: float,
    alpha_plus: float,
    x_bar: float,
    p: MaterialParams,
    half_width: float = None,
    cfg: SolverConfig = None,
) -> GridField:
    """Single transition from alpha_minus to alpha_plus centred at x_bar."""
    if not p.eps > 0:
        raise DivisionByZeroScaleError("recovery sequences need eps > 0")
    if not 0 < x_bar < 1:
        raise InvalidParameterError(f"x_bar must lie in (0, 1) (got {x_bar})")
    if alpha_minus == alpha_plus:
        raise InvalidParameterError("a transition needs two different wells")
    cfg = cfg or SolverConfig()
    x = np.linspace(0.0, 1.0, cfg.n + 1)
    width = _half_width(min(x_bar, 1.0 - x_bar), p, half_width)
    alpha = _layer(x, x_bar, alpha_minus, alpha_plus, p, width)
    return GridField(p.gamma * x, alpha)


def recovery_sequence_multi(
    rotation: PiecewiseConstantRotation,
    p: MaterialParams,
    cfg: SolverConfig = None,
    half_width: float = None,
) -> GridField:
    """One optimal layer per jump of a piecewise constant rotation."""
    if not p.eps > 0:
        raise DivisionByZeroScaleError("recovery sequences need eps > 0")
    cfg = cfg or SolverConfig()
    x = np.linspace(0.0, 1.0, cfg.n + 1)
    alpha = rotation.evaluate(x).astype(float)
    edges = (0.0,) + rotation.breakpoints + (1.0,)
    for i, (position, left, right) in enumerate(rotation.jump_set):
        # neighbouring layers meet at most halfway
        room = min(position - edges[i], edges[i + 2] - position)
        if edges[i] > 0:
            room = min(room, 0.5 * (position - edges[i]))
        if edges[i + 2] < 1:
            room = min(room, 0.5 * (edges[i + 2] - position))
        width = _half_width(room, p, half_width)
        window = np.abs(x - position) < width * p.eps
        alpha[window] = _layer(x[window], position, left, right, p, width)
    return GridField(p.gamma * x, alpha)
