"""Closed-form minimization of the coupling potential over the rotation.

For fixed strain z the coupling potential W(z, .) has either a single well at
arctan(z / 2) or two wells placed symmetrically around it. Which case holds
depends only on mu, mu_c and z.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import optimize

from config import settings
from .exceptions import DomainError, NegativeDiscriminantError, NoConvergenceError
from .model import GridField, MaterialParams

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


class RegimeTag(str, Enum):
    EQUAL_MODULI = "EQUAL_MODULI"
    ZERO_COUPLE = "ZERO_COUPLE"
    ABOVE_CRITICAL = "ABOVE_CRITICAL"
    DOUBLE_WELL = "DOUBLE_WELL"


@dataclass(frozen=True)
class Regime:
    tag: RegimeTag
    mu_c_crit: float

    @property
    def is_double_well(self) -> bool:
        return self.tag in (RegimeTag.ZERO_COUPLE, RegimeTag.DOUBLE_WELL)


@dataclass(frozen=True)
class WellSet:
    angles: tuple
    minimal_energy: float
    minimal_w: float
    regime: Regime


def critical_couple_modulus(z, mu: float):
    return mu * (1.0 - 2.0 / np.sqrt(np.square(z) + 4.0))


def classify(p: MaterialParams, z: float = None) -> Regime:
    """Regime of W(z, .), by default at the prescribed mean strain."""
    z = p.gamma if z is None else z
    crit = float(critical_couple_modulus(z, p.mu))
    if p.mu == p.mu_c:
        tag = RegimeTag.EQUAL_MODULI
    elif p.mu_c == 0:
        tag = RegimeTag.ZERO_COUPLE
    elif p.mu_c > crit:
        tag = RegimeTag.ABOVE_CRITICAL
    else:
        tag = RegimeTag.DOUBLE_WELL
    return Regime(tag, crit)


def _radicand(z, p: MaterialParams):
    return (np.square(z) + 4.0) * (p.mu - p.mu_c) ** 2 - 4.0 * p.mu**2


def f_discriminant(z: float, p: MaterialParams) -> float:
    radicand = float(_radicand(z, p))
    if radicand < 0:
        # rounding exactly at the critical modulus
        if radicand > -1e-14 * p.mu**2:
            return 0.0
        raise NegativeDiscriminantError(z, radicand)
    return math.sqrt(radicand)


def _wrap(angle):
    return np.where(angle < 0, angle + TWO_PI, angle)


def well_bounds(z, p: MaterialParams):
    """Vectorized (lower well, upper well, minimal energy) per strain.

    Single-well strains report the same angle twice.
    """
    z = np.asarray(z, dtype=float)
    r = np.sqrt(np.square(z) + 4.0)
    single = np.arctan(z / 2.0)
    e_single = p.mu * (np.square(z) + 4.0 - 2.0 * r)
    if p.mu == p.mu_c:
        return single, single, e_single
    if p.mu_c == 0:
        upper = _wrap(np.arctan2(4.0 * z, 4.0 - np.square(z)))
        return np.zeros_like(z), upper, 0.5 * p.mu * np.square(z)

    double = p.mu_c <= critical_couple_modulus(z, p.mu)
    f = np.sqrt(np.maximum(_radicand(z, p), 0.0))
    lower = _wrap(np.arctan2(z * p.mu - f, 2.0 * p.mu + 0.5 * z * f))
    upper = _wrap(np.arctan2(z * p.mu + f, 2.0 * p.mu - 0.5 * z * f))
    e_double = 0.5 * (p.mu + p.mu_c) * np.square(z) - 2.0 * p.mu_c**2 / (p.mu - p.mu_c)
    return (
        np.where(double, lower, single),
        np.where(double, upper, single),
        np.where(double, e_double, e_single),
    )


def well_set(z: float, p: MaterialParams) -> WellSet:
    regime = classify(p, z)
    if regime.tag is RegimeTag.DOUBLE_WELL:
        f_discriminant(z, p)
    lower, upper, energy = (float(v) for v in well_bounds(z, p))
    angles = (lower, upper) if regime.is_double_well else (lower,)
    minimal_w = energy - 0.5 * p.mu * z * z
    logger.debug("wells at z=%.6g: %s (%s)", z, angles, regime.tag.value)
    return WellSet(angles, energy, minimal_w, regime)


def e_opt(z, p: MaterialParams):
    """Minimal Q(z, .) over the rotation, vectorized in z."""
    _, _, energy = well_bounds(z, p)
    return energy[()] if np.ndim(energy) == 0 else energy


def eta(alpha: float) -> float:
    s = math.sin(alpha)
    if abs(s) < 1e-15:
        raise DomainError(f"eta is undefined at alpha = {alpha:.10g} (sin alpha = 0)")
    return 4.0 * math.sin(0.5 * alpha) ** 2 / s


def eta_inverse(g: float) -> float:
    """Rotation in [0, pi) whose zero-couple well shear equals g."""
    if g == 0:
        return 0.0
    if not 0 < g < TWO_PI:
        raise DomainError(f"eta_inverse expects g in [0, 2*pi) (got {g})")
    lo, hi = settings.ETA_BRACKET
    if g <= eta(lo):
        # eta(alpha) = alpha to third order
        return g
    try:
        return optimize.bisect(
            lambda a: eta(a) - g, lo, hi, xtol=settings.ETA_XTOL, maxiter=settings.ETA_MAXITER
        )
    except RuntimeError as exc:
        raise NoConvergenceError(f"eta_inverse did not converge for g = {g}") from exc


def condensed_g(z):
    return np.square(z) + 4.0 - 2.0 * np.sqrt(np.square(z) + 4.0)


def condensed_g_second_derivative(z):
    cube = (np.square(z) + 4.0) ** 1.5
    return (2.0 * cube - 8.0) / cube


def condensed_energy(f: GridField, p: MaterialParams) -> float:
    """Energy after pointwise minimization of the rotation."""
    return float(f.h * np.sum(e_opt(f.strains(), p)))
