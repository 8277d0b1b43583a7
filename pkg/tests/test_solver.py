import math

import numpy as np
import pytest

from conftest import C0
from mechanics import closed_form, model
from mechanics.exceptions import DivisionByZeroScaleError, InvalidParameterError, WrongRegimeError
from mechanics.model import MaterialParams
from relaxation import envelope, interface_energy
from relaxation.interface_energy import PiecewiseConstantRotation
from solvers import minimizer, recovery, sweep
from solvers.minimizer import DiscreteProblem, SolverConfig

# c0 scales with sqrt(mu)
C0_MU_200 = 0.68346


class TestSolverConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(n=4),
            dict(grad_tol=0.0),
            dict(penalty_weight=-1.0),
            dict(restarts=0),
            dict(method="newton"),
            dict(x_bar=1.0),
        ],
    )
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(InvalidParameterError):
            SolverConfig(**kwargs)

    def test_needs_positive_eps(self, zero_couple):
        with pytest.raises(InvalidParameterError):
            minimizer.minimize_eps_theta(zero_couple, SolverConfig(n=16))


class TestDiscreteProblem:
    def test_gradient_matches_central_differences(self, double_well):
        p = double_well.replace(eps=0.1, theta=0.3)
        problem = DiscreteProblem(p, 12, minimizer._eps_density(p), p.eps)
        rng = np.random.default_rng(5)
        x = np.concatenate((0.6 + 0.1 * rng.normal(size=12), 0.3 + 0.2 * rng.uniform(size=12)))
        _, grad = problem.energy_and_gradient(x)
        step = 1e-6
        numeric = np.empty_like(x)
        for k in range(len(x)):
            plus, minus = x.copy(), x.copy()
            plus[k] += step
            minus[k] -= step
            numeric[k] = (problem.energy_and_gradient(plus)[0] - problem.energy_and_gradient(minus)[0]) / (2 * step)
        assert np.linalg.norm(grad - numeric) <= 1e-6 * np.linalg.norm(grad)

    def test_field_is_admissible(self, double_well):
        p = double_well.replace(eps=0.1, theta=0.3)
        problem = DiscreteProblem(p, 16, minimizer._eps_density(p), p.eps)
        rng = np.random.default_rng(6)
        f = problem.to_field(np.concatenate((rng.normal(size=16), rng.uniform(0, 1, size=16))))
        assert f.admissibility_issues(p) == []

    def test_energy_matches_model(self, double_well):
        p = double_well.replace(eps=0.2)
        problem = DiscreteProblem(p, 16, minimizer._eps_density(p), p.eps)
        rng = np.random.default_rng(8)
        x = np.concatenate((0.6 + 0.05 * rng.normal(size=16), rng.uniform(0.1, 0.5, size=16)))
        energy, _ = problem.energy_and_gradient(x)
        assert energy == pytest.approx(model.energy_eps(problem.to_field(x), p).total, rel=1e-12)

    def test_projected_gradient_norm(self, double_well):
        p = double_well.replace(eps=0.1, theta=0.3)
        problem = DiscreteProblem(p, 8, minimizer._eps_density(p), p.eps)
        x = np.concatenate((np.full(8, 0.6), np.full(8, 1.0)))
        grad = np.linspace(-1e-3, 2e-3, 16)
        assert problem.projected_gradient_norm(x, grad) == pytest.approx(2e-3, rel=1e-12)
        # rotations held at 0 by an outward gradient do not count
        x[8:] = 0.0
        grad[8:] = 5e-2
        assert problem.projected_gradient_norm(x, grad) == pytest.approx(np.max(np.abs(grad[:8])), rel=1e-12)


class TestMinimizeEpsTheta:
    def test_equal_moduli_single_well(self, equal_moduli, alpha2):
        p = equal_moduli.replace(eps=0.1, theta=alpha2)
        result = minimizer.minimize_eps_theta(p, SolverConfig(n=32))
        assert result.converged
        assert result.energy == pytest.approx(closed_form.e_opt(0.6, p), abs=1e-8)
        assert result.constraint_residual <= 1e-8

    def test_zero_couple_at_well(self, zero_couple):
        p = zero_couple.replace(eps=0.1)
        result = minimizer.minimize_eps_theta(p, SolverConfig(n=32))
        assert result.energy == pytest.approx(0.36, abs=1e-8)
        assert result.constraint_residual <= 1e-8

    def test_layer_costs_two_interfaces(self):
        p = MaterialParams(200.0, 0.0, 0.6, theta=0.29, eps=0.05)
        result = minimizer.minimize_eps_theta(p, SolverConfig(n=1024))
        assert result.converged
        relaxed = 0.5 * 200.0 * 0.36
        ratio = (result.energy - relaxed) / (2 * p.eps * C0_MU_200)
        assert 0.9 <= ratio <= 1.1
        assert result.constraint_residual <= 1e-6
        assert result.start == "layer"

    def test_bounded_below_by_relaxed(self, double_well):
        p = double_well.replace(eps=0.1, theta=0.3)
        cfg = SolverConfig(n=64)
        result = minimizer.minimize_eps_theta(p, cfg)
        relaxed = minimizer.minimize_relaxed(p.replace(theta=result.field.mean_rotation()), cfg)
        assert result.energy >= relaxed.energy - 1e-8

    def test_methods_agree(self, above_critical):
        p = above_critical.replace(eps=0.1, theta=0.35)
        lbfgsb = minimizer.minimize_eps_theta(p, SolverConfig(n=16))
        projected = minimizer.minimize_eps_theta(p, SolverConfig(n=16, method=minimizer.PROJECTED_GRADIENT))
        assert projected.energy == pytest.approx(lbfgsb.energy, abs=1e-6)

    def test_rotations_stay_in_chart(self, double_well):
        p = double_well.replace(eps=0.05, theta=0.1)
        result = minimizer.minimize_eps_theta(p, SolverConfig(n=64))
        assert np.all(result.field.alpha >= 0.0)
        assert np.all(result.field.alpha <= 2 * math.pi)


class TestMinimizeRelaxed:
    def test_zero_couple(self, zero_couple):
        result = minimizer.minimize_relaxed(zero_couple.replace(theta=1.0), SolverConfig(n=16))
        assert result.energy == pytest.approx(0.36, abs=1e-8)

    def test_double_well_bridge(self, double_well):
        result = minimizer.minimize_relaxed(double_well.replace(theta=0.3), SolverConfig(n=16))
        assert result.energy == pytest.approx(0.182784, abs=1e-6)
        assert result.converged

    def test_homogeneous_is_optimal(self, above_critical):
        p = above_critical.replace(theta=0.35)
        result = minimizer.minimize_relaxed(p, SolverConfig(n=16))
        assert result.energy == pytest.approx(float(envelope.q_envelope(0.6, 0.35, p)), abs=1e-7)


class TestGammaSweep:
    def test_gap_shrinks_with_eps(self):
        p = MaterialParams(200.0, 0.0, 0.6, theta=0.29)
        rows = sweep.gamma_sweep(p, [0.2, 0.1, 0.05, 0.025], SolverConfig(n=4096, restarts=2), workers=1)
        assert all(row.converged for row in rows)
        gaps = [row.gap for row in rows]
        assert all(g > 0 for g in gaps)
        assert all(b < a for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] <= gaps[0] / 4

    def test_workers_keep_order(self, zero_couple):
        cfg = SolverConfig(n=16)
        serial = sweep.gamma_sweep(zero_couple, [0.3, 0.2, 0.1], cfg, workers=1)
        threaded = sweep.gamma_sweep(zero_couple, [0.3, 0.2, 0.1], cfg, workers=2)
        assert [row.eps for row in threaded] == [0.3, 0.2, 0.1]
        assert [row.energy for row in threaded] == pytest.approx([row.energy for row in serial], abs=1e-10)

    def test_failed_row_does_not_stop_others(self, zero_couple, monkeypatch):
        solve = sweep.minimize_eps_theta

        def flaky(p, cfg):
            if p.eps == 0.2:
                raise WrongRegimeError("no wells")
            return solve(p, cfg)

        monkeypatch.setattr(sweep, "minimize_eps_theta", flaky)
        rows = sweep.gamma_sweep(zero_couple, [0.3, 0.2, 0.1], SolverConfig(n=16), workers=2)
        assert [row.eps for row in rows] == [0.3, 0.2, 0.1]
        failed = rows[1]
        assert not failed.converged
        assert failed.field is None
        assert math.isnan(failed.gap)
        assert failed.error == "no wells"
        for row in (rows[0], rows[2]):
            assert row.converged
            assert row.error == ""
            assert row.energy == pytest.approx(0.36, abs=1e-8)

    @pytest.mark.parametrize("eps_list", [[0.1, 0.2], [0.1, 0.1], [0.1, 0.0]])
    def test_rejects_bad_eps_list(self, zero_couple, eps_list):
        with pytest.raises(InvalidParameterError):
            sweep.gamma_sweep(zero_couple, eps_list, SolverConfig(n=16))


class TestRecovery:
    @pytest.fixture
    def upper(self, zero_couple):
        return closed_form.well_set(0.6, zero_couple).angles[1]

    def test_rescaled_energy_approaches_c0(self, zero_couple, upper):
        c0 = interface_energy.surface_energy(0.0, upper, zero_couple)
        errors = []
        for eps in (1e-2, 1e-3):
            p = zero_couple.replace(eps=eps)
            f = recovery.recovery_sequence(0.0, upper, 0.5, p, cfg=SolverConfig(n=100_000))
            errors.append(model.energy_rescaled(f, p) - c0)
        assert all(abs(err) <= 1e-3 for err in errors)
        # at least a factor 3 per decade of eps
        assert abs(errors[0]) >= 3 * abs(errors[1])

    def test_wells_outside_layer(self, zero_couple, upper):
        p = zero_couple.replace(eps=0.01)
        f = recovery.recovery_sequence(0.0, upper, 0.5, p, cfg=SolverConfig(n=1000))
        x = f.x
        assert np.all(f.alpha[x < 0.39] == 0.0)
        assert np.all(f.alpha[x > 0.61] == upper)
        assert np.all(np.diff(f.alpha) >= 0)

    def test_reversed_transition(self, zero_couple, upper):
        p = zero_couple.replace(eps=0.01)
        f = recovery.recovery_sequence(upper, 0.0, 0.5, p, cfg=SolverConfig(n=1000))
        assert f.alpha[0] == upper
        assert f.alpha[-1] == 0.0
        assert np.all(np.diff(f.alpha) <= 0)

    def test_needs_positive_eps(self, zero_couple, upper):
        with pytest.raises(DivisionByZeroScaleError):
            recovery.recovery_sequence(0.0, upper, 0.5, zero_couple)

    def test_rejects_equal_wells(self, zero_couple):
        with pytest.raises(InvalidParameterError):
            recovery.recovery_sequence(0.2, 0.2, 0.5, zero_couple.replace(eps=0.1))

    def test_two_jumps(self, zero_couple, upper):
        p = zero_couple.replace(eps=0.01)
        rotation = PiecewiseConstantRotation((0.3, 0.7), (0.0, upper, 0.0))
        f = recovery.recovery_sequence_multi(rotation, p, SolverConfig(n=20_000))
        assert f.alpha[0] == f.alpha[-1] == 0.0
        assert model.energy_rescaled(f, p) == pytest.approx(2 * C0, abs=2e-3)
        constrained = model.energy_eps_theta(f, p.replace(theta=f.mean_rotation()))
        assert math.isfinite(constrained.total)
