import math

import pytest

from mechanics.model import MaterialParams

# (gamma, alpha1_plus, c0, reduced c0) for mu = 2, mu_c = 0
ZERO_COUPLE_ROWS = [
    # arctan(0.4 / 3.99); 0.09917 in older listings is a digit slip
    (0.1, 0.09992, 0.000332, 0.000334),
    (0.2, 0.19934, 0.00265, 0.002666),
    (0.3, 0.29778, 0.00888, 0.009),
    (0.4, 0.39479, 0.020836, 0.021334),
    (0.5, 0.48996, 0.04017, 0.041666),
    (0.6, 0.58291, 0.068346, 0.072),
    (0.7, 0.67335, 0.106602, 0.114334),
    (0.8, 0.76101, 0.155948, 0.170666),
    (0.9, 0.84571, 0.217168, 0.243),
    (1.0, 0.9273, 0.29082, 0.333334),
]

C0 = 0.068346


@pytest.fixture
def zero_couple():
    return MaterialParams(mu=2.0, mu_c=0.0, gamma=0.6)


@pytest.fixture
def double_well():
    return MaterialParams(mu=1.0, mu_c=0.02, gamma=0.6)


@pytest.fixture
def above_critical():
    return MaterialParams(mu=1.0, mu_c=0.1, gamma=0.6)


@pytest.fixture
def equal_moduli():
    return MaterialParams(mu=1.0, mu_c=1.0, gamma=0.6)


@pytest.fixture
def alpha2():
    return math.atan(0.3)
