"""Convex envelope of the energy density in the rotation variable."""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from mechanics import closed_form, model
from mechanics.model import GridField, MaterialParams

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
FD_STEP = 1e-6


class BranchTag(str, Enum):
    CONVEX_REGION = "CONVEX_REGION"
    FLAT_BRIDGE = "FLAT_BRIDGE"
    LINEAR_TAIL = "LINEAR_TAIL"


@dataclass(frozen=True)
class EnvelopeBranch:
    tag: BranchTag
    alpha_lo: float
    alpha_hi: float
    value_at: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SampledEnvelope:
    alpha: np.ndarray
    values: np.ndarray
    hull: np.ndarray
    vertices: np.ndarray


def _tail(z, alpha, start, e_min, p: MaterialParams):
    # Q(z, 2*pi) = Q(z, 0) = (mu + mu_c) / 2 * z^2
    end = 0.5 * (p.mu + p.mu_c) * np.square(z)
    return (end - e_min) * (alpha - start) / (TWO_PI - start) + e_min


def q_envelope(z, alpha, p: MaterialParams):
    """Q** at (z, alpha), vectorized; each z is classified on its own."""
    z, alpha = np.broadcast_arrays(np.asarray(z, dtype=float), np.asarray(alpha, dtype=float))
    lower, upper, e_min = closed_form.well_bounds(z, p)
    out = np.where(
        alpha < lower,
        model.q(z, alpha, p),
        np.where(alpha < upper, e_min, _tail(z, alpha, upper, e_min, p)),
    )
    return out[()] if out.ndim == 0 else out


def q_envelope_derivatives(z, alpha, p: MaterialParams, step: float = FD_STEP):
    """Central differences of Q** in z and alpha."""
    d_z = (q_envelope(z + step, alpha, p) - q_envelope(z - step, alpha, p)) / (2.0 * step)
    d_alpha = (q_envelope(z, alpha + step, p) - q_envelope(z, alpha - step, p)) / (2.0 * step)
    return d_z, d_alpha


def envelope_branches(z: float, p: MaterialParams) -> list[EnvelopeBranch]:
    wells = closed_form.well_set(z, p)
    lower, upper = wells.angles[0], wells.angles[-1]
    e_min = wells.minimal_energy

    branches = []
    if lower > 0:
        branches.append(
            EnvelopeBranch(BranchTag.CONVEX_REGION, 0.0, lower, lambda a: model.q(z, a, p))
        )
    if upper > lower:
        branches.append(
            EnvelopeBranch(
                BranchTag.FLAT_BRIDGE, lower, upper, lambda a: np.full_like(np.asarray(a, dtype=float), e_min)
            )
        )
    branches.append(
        EnvelopeBranch(
            BranchTag.LINEAR_TAIL, upper, TWO_PI, lambda a: _tail(z, np.asarray(a, dtype=float), upper, e_min, p)
        )
    )
    return branches


def lower_convex_hull(x: np.ndarray, y: np.ndarray) -> list[int]:
    """Indices of the lower hull vertices of points sorted by x (monotone chain)."""
    lower = []
    push = lower.append
    pop = lower.pop
    for i in range(len(x)):
        while len(lower) > 1:
            i0 = lower[-2]
            i1 = lower[-1]
            if (x[i1] - x[i0]) * (y[i] - y[i0]) - (x[i] - x[i0]) * (y[i1] - y[i0]) <= 0.0:
                pop()
            else:
                break
        push(i)
    return lower


def envelope_bruteforce(z: float, p: MaterialParams, n_samples: int) -> SampledEnvelope:
    """Lower convex envelope of alpha -> W(z, alpha) sampled on [0, 2*pi]."""
    if n_samples < 16:
        raise ValueError(f"n_samples must be >= 16 (got {n_samples})")
    alpha = np.linspace(0.0, TWO_PI, n_samples)
    values = model.potential_w(z, alpha, p)
    vertices = np.asarray(lower_convex_hull(alpha, values))
    hull = np.interp(alpha, alpha[vertices], values[vertices])
    # interpolation may round a hair above a sample on the hull
    hull = np.minimum(hull, values)
    return SampledEnvelope(alpha, values, hull, vertices)


def energy_relaxed(f: GridField, p: MaterialParams, constrained: bool = False) -> float:
    """Relaxed energy E_0 (or E_0 with the mean constraint) of a field."""
    f.require_admissible(p)
    if constrained:
        model.check_volume_constraint(f, p)
    return float(f.h * np.sum(q_envelope(f.strains(), f.midpoints(), p)))
