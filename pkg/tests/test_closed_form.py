import math

import numpy as np
import pytest

from mechanics import closed_form, model
from mechanics.closed_form import RegimeTag
from mechanics.exceptions import DomainError, NegativeDiscriminantError
from mechanics.model import MaterialParams


class TestClassify:
    def test_reference_parameters(self, above_critical, double_well):
        above = closed_form.classify(above_critical)
        assert above.tag is RegimeTag.ABOVE_CRITICAL
        assert above.mu_c_crit == pytest.approx(0.0422, abs=5e-4)
        assert closed_form.classify(double_well).tag is RegimeTag.DOUBLE_WELL

    def test_order_of_tests(self):
        assert closed_form.classify(MaterialParams(2.0, 0.0, 0.3)).tag is RegimeTag.ZERO_COUPLE
        assert closed_form.classify(MaterialParams(1.0, 1.0, 0.6)).tag is RegimeTag.EQUAL_MODULI
        assert closed_form.classify(MaterialParams(1.0, 3.0, 0.6)).tag is RegimeTag.ABOVE_CRITICAL

    def test_strain_replaces_gamma(self, above_critical):
        # crit(1.0) = 1 - 2 / sqrt(5) > 0.1
        assert closed_form.classify(above_critical, 1.0).tag is RegimeTag.DOUBLE_WELL


class TestDiscriminant:
    def test_examples(self):
        assert closed_form.f_discriminant(0.6, MaterialParams(1.0, 0.0, 0.6)) == pytest.approx(0.6, rel=1e-12)
        assert closed_form.f_discriminant(0.6, MaterialParams(1.0, 0.02, 0.6)) == pytest.approx(0.43283, abs=1e-5)

    def test_negative(self):
        with pytest.raises(NegativeDiscriminantError):
            closed_form.f_discriminant(0.6, MaterialParams(1.0, 0.5, 0.6))


class TestWellSet:
    def test_double_well(self, double_well):
        wells = closed_form.well_set(0.6, double_well)
        assert wells.angles == pytest.approx((0.0783, 0.5046), abs=5e-4)
        assert wells.minimal_w == pytest.approx(0.00278, abs=5e-5)
        assert wells.regime.is_double_well

    def test_above_critical(self, above_critical):
        wells = closed_form.well_set(0.6, above_critical)
        assert wells.angles == pytest.approx((0.2915,), abs=5e-4)
        assert wells.minimal_w == pytest.approx(0.003877, abs=5e-6)

    def test_zero_couple(self):
        wells = closed_form.well_set(0.6, MaterialParams(1.0, 0.0, 0.6))
        assert wells.angles[0] == 0.0
        assert wells.angles[1] == pytest.approx(0.5829, abs=1e-4)
        assert wells.minimal_w == 0.0

    @pytest.mark.parametrize("mu,mu_c", [(1.0, 0.02), (1.0, 0.0), (2.0, 0.3), (1.0, 1.0), (0.5, 0.1)])
    @pytest.mark.parametrize("z", [0.2, 0.6, 1.4])
    def test_wells_are_stationary_and_zero_v2(self, mu, mu_c, z):
        p = MaterialParams(mu, mu_c, z)
        for angle in closed_form.well_set(z, p).angles:
            _, _, w_alpha = model.potential_w_derivatives(z, angle, p)
            assert abs(w_alpha) <= 1e-6
            assert model.v2(z, angle, p) == pytest.approx(0.0, abs=1e-10)

    def test_continuity_toward_zero_couple(self):
        gamma = 0.6
        wells = closed_form.well_set(gamma, MaterialParams(1.0, 1e-6, gamma))
        assert wells.regime.tag is RegimeTag.DOUBLE_WELL
        assert wells.angles[0] == pytest.approx(0.0, abs=1e-4)
        assert wells.angles[1] == pytest.approx(math.atan(4 * gamma / (4 - gamma**2)), abs=1e-4)


class TestEta:
    def test_table_value(self):
        assert closed_form.eta_inverse(0.6) == pytest.approx(0.58291, abs=1e-5)
        assert closed_form.eta_inverse(0.6) == pytest.approx(math.atan(2.4 / 3.64), abs=1e-8)

    def test_inverse_identity(self):
        assert closed_form.eta(closed_form.eta_inverse(1.0)) == pytest.approx(1.0, abs=1e-10)
        assert closed_form.eta_inverse(0.0) == 0.0
        for alpha in np.linspace(0.05, 2.4, 25):
            assert closed_form.eta_inverse(closed_form.eta(alpha)) == pytest.approx(alpha, abs=1e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            closed_form.eta(math.pi)
        with pytest.raises(DomainError):
            closed_form.eta_inverse(7.0)


class TestCondensed:
    def test_e_opt_examples(self):
        assert closed_form.e_opt(0.6, MaterialParams(2.0, 0.0, 0.6)) == pytest.approx(0.36)
        assert closed_form.e_opt(0.6, MaterialParams(1.0, 1.0, 0.6)) == pytest.approx(0.18388, abs=1e-5)
        assert closed_form.e_opt(0.6, MaterialParams(1.0, 0.02, 0.6)) == pytest.approx(0.18278, abs=1e-5)

    def test_e_opt_matches_grid_minimum(self):
        rng = np.random.default_rng(11)
        alpha = np.linspace(0.0, 2 * math.pi, 100_000)
        for i in range(50):
            mu = rng.uniform(0.5, 3.0)
            gamma = rng.uniform(0.1, 1.5)
            crit = mu * (1 - 2 / math.sqrt(gamma**2 + 4))
            mu_c = [
                mu,
                0.0,
                crit * rng.uniform(0.1, 0.9),
                crit + (mu - crit) * rng.uniform(0.1, 0.9),
                mu * rng.uniform(1.1, 2.0),
            ][i % 5]
            p = MaterialParams(mu, mu_c, gamma)
            oracle = 0.5 * mu * gamma**2 + model.potential_w(gamma, alpha, p).min()
            assert closed_form.e_opt(gamma, p) == pytest.approx(oracle, abs=1e-6)

    def test_e_opt_vectorized(self, double_well):
        z = np.array([0.2, 0.6, 1.0])
        expected = [closed_form.well_set(v, double_well).minimal_energy for v in z]
        np.testing.assert_allclose(closed_form.e_opt(z, double_well), expected, rtol=1e-14)

    def test_g_is_convex(self):
        z = np.linspace(-5.0, 5.0, 1001)
        step = 1e-3
        g = closed_form.condensed_g
        second = (g(z + step) - 2 * g(z) + g(z - step)) / step**2
        assert np.all(second > 0)
        np.testing.assert_allclose(second, closed_form.condensed_g_second_derivative(z), atol=1e-6)
