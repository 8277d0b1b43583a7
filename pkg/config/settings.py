import math
import os
from dotenv import load_dotenv

load_dotenv()

# Runtime Configuration
LOG_LEVEL = os.getenv("COSSERAT_LOG_LEVEL", "WARNING").upper()
SWEEP_WORKERS = int(os.getenv("COSSERAT_SWEEP_WORKERS", "1"))

# Tolerances
TOL_VC = 1e-8  # absolute, on the discrete mean of alpha
TOL_TAIL = 1e-8  # profile clamping distance to a well
WELL_TOL = 1e-8
NEGATIVE_V2_TOL = 1e-10

# Quadrature
QUAD_EPSABS = 1e-10
QUAD_LIMIT = 200

# eta inverse by bisection
ETA_BRACKET = (1e-12, math.pi - 1e-12)
ETA_XTOL = 1e-12
ETA_MAXITER = 200

# Transition profiles
PROFILE_STEP = 1e-3
PROFILE_HALF_WIDTH = 8.0  # doubled until the wells are reached
PROFILE_MAX_HALF_WIDTH = 1024.0
RECOVERY_LAYER_WIDTH = 0.1  # in x, the stretched half-width is this over eps

# Solver defaults
SOLVER_N = 256
SOLVER_MAX_ITERS = 20000
SOLVER_GRAD_TOL = 1e-6
SOLVER_RESTARTS = 4
SOLVER_PENALTY = 100.0
SOLVER_OUTER_ITERS = 12

# Output
CSV_SIGNIFICANT_DIGITS = 6

VALID_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def validate_config():
    """Validate the environment driven part of the configuration"""
    problems = []

    if LOG_LEVEL not in VALID_LOG_LEVELS:
        problems.append(f"COSSERAT_LOG_LEVEL={LOG_LEVEL} (expected one of {', '.join(VALID_LOG_LEVELS)})")

    if SWEEP_WORKERS < 1:
        problems.append(f"COSSERAT_SWEEP_WORKERS={SWEEP_WORKERS} (expected >= 1)")

    if problems:
        raise ValueError(f"Invalid configuration: {'; '.join(problems)}")

    return True
