"""Tests for energies, relative energies and the checks built on them."""

import numpy as np
import pytest

from lowmach.exceptions import GridError, TrajectoryError
from lowmach.numerics.grid import ScalarField, VectorField, make_grid
from lowmach.physics.compressible import chemical_potential_solve, run_compressible
from lowmach.physics.constitutive import PhysParams, PotentialSpec, PressureLaw
from lowmach.physics.energetics import (
    chain_rule_residual,
    dissipation_rates,
    energy_inequality_check,
    energy_inequality_series,
    gronwall_constant,
    norm_distances,
    relative_dissipation,
    relative_energy,
    total_energy,
    uniform_estimates_report,
    uniform_sample,
)
from lowmach.physics.model_h import mu_incompressible
from lowmach.physics.states import CompressibleState, IncompressibleState
from lowmach.physics.trajectory import Trajectory


@pytest.fixture
def unit_square():
    return make_grid(8, 8, 1.0, 1.0, "periodic")


@pytest.fixture
def quadratic_params():
    return PhysParams(pressure=PressureLaw(gamma=2.0, a=1.0), potential=PotentialSpec(kappa=1.0))


def compressible(grid, rho, v, c, eps=0.1, params=None):
    params = params or PhysParams()
    rho_f = ScalarField.constant(grid, rho) if np.isscalar(rho) else ScalarField(grid, rho)
    c_f = ScalarField.constant(grid, c) if np.isscalar(c) else ScalarField(grid, c)
    v_f = VectorField.constant(grid, v) if isinstance(v, tuple) else v
    mu = chemical_potential_solve(rho_f, c_f, params.potential)
    return CompressibleState.from_velocity(rho_f, v_f, c_f, mu, eps)


def incompressible(grid, v, c, params=None):
    params = params or PhysParams()
    c_f = ScalarField.constant(grid, c) if np.isscalar(c) else ScalarField(grid, c)
    v_f = VectorField.constant(grid, v) if isinstance(v, tuple) else v
    return IncompressibleState(v=v_f, p=ScalarField.zeros(grid), c=c_f, mu=mu_incompressible(c_f, params.potential))


class TestTotalEnergy:
    def test_ground_state(self, unit_square, quadratic_params):
        energy = total_energy(compressible(unit_square, 1.0, (0.0, 0.0), 1.0), quadratic_params)
        assert energy.total == pytest.approx(0.0, abs=1e-15)
        assert energy.dissipation_rate == 0.0

    def test_uniform_velocity(self, unit_square, quadratic_params):
        energy = total_energy(compressible(unit_square, 1.0, (0.2, 0.0), 1.0), quadratic_params)
        assert energy.kinetic == pytest.approx(0.02)
        assert energy.pressure_part == pytest.approx(0.0, abs=1e-15)
        assert energy.gradient_part == 0.0
        assert energy.potential_part == 0.0

    def test_pressure_part(self, unit_square, quadratic_params):
        energy = total_energy(compressible(unit_square, 1.1, (0.0, 0.0), 1.0, eps=0.1), quadratic_params)
        assert energy.pressure_part == pytest.approx(1.0)

    def test_total_is_sum_of_parts(self, any_grid_2d, rng, params):
        rho = 1.0 + 0.3 * rng.random(any_grid_2d.shape)
        v = VectorField(any_grid_2d, tuple(rng.standard_normal(any_grid_2d.shape) for _ in range(2)))
        state = compressible(any_grid_2d, rho, v, rng.uniform(-1, 1, any_grid_2d.shape), params=params)
        energy = total_energy(state, params)
        parts = energy.kinetic + energy.pressure_part + energy.gradient_part + energy.potential_part
        assert energy.total == pytest.approx(parts, rel=1e-14)
        assert energy.dissipation_rate >= energy.dissipation_rate_relative >= 0.0

    def test_kinetic_matches_cell_sum(self, any_grid_2d, rng, params):
        rho = 1.0 + 0.3 * rng.random(any_grid_2d.shape)
        v = VectorField(any_grid_2d, tuple(rng.standard_normal(any_grid_2d.shape) for _ in range(2)))
        state = compressible(any_grid_2d, rho, v, 0.0, params=params)
        brute = 0.0
        for j in range(any_grid_2d.ny):
            for i in range(any_grid_2d.nx):
                speed2 = v.components[0][j, i] ** 2 + v.components[1][j, i] ** 2
                brute += 0.5 * rho[j, i] * speed2 * any_grid_2d.cell_volume
        assert total_energy(state, params).kinetic == pytest.approx(brute, rel=1e-12)


class TestRelativeEnergy:
    def test_uniform_fields(self, unit_square, quadratic_params):
        comp = compressible(unit_square, 1.1, (0.2, 0.0), 0.5, eps=0.1, params=quadratic_params)
        ref = incompressible(unit_square, (0.0, 0.0), 0.0, quadratic_params)
        value = relative_energy(comp, ref, quadratic_params)
        assert value.kinetic_rel == pytest.approx(0.022)
        assert value.pressure_rel == pytest.approx(1.0)
        assert value.gradient_rel == 0.0
        assert value.potential_rel == pytest.approx(1.1 * (0.140625 - 0.25))
        assert value.convexify == pytest.approx(0.1375)
        assert value.value_Etilde == pytest.approx(value.value_E + value.convexify)

    def test_identical_states(self, any_grid_2d, rng, params):
        c = rng.uniform(-1, 1, any_grid_2d.shape)
        v = VectorField(any_grid_2d, tuple(rng.standard_normal(any_grid_2d.shape) for _ in range(2)))
        value = relative_energy(compressible(any_grid_2d, 1.0, v, c), incompressible(any_grid_2d, v, c), params)
        assert value.value_Etilde == pytest.approx(0.0, abs=1e-15)

    def test_halving_eps_quadruples_pressure_part(self, unit_square, rng, quadratic_params):
        rho = 1.0 + 0.2 * rng.random(unit_square.shape)
        ref = incompressible(unit_square, (0.0, 0.0), 0.0)
        coarse = relative_energy(compressible(unit_square, rho, (0.0, 0.0), 0.0, eps=0.2), ref, quadratic_params)
        fine = relative_energy(compressible(unit_square, rho, (0.0, 0.0), 0.0, eps=0.1), ref, quadratic_params)
        assert fine.pressure_rel == pytest.approx(4.0 * coarse.pressure_rel)

    def test_convexified_value_nonnegative(self, any_grid_2d, rng, params):
        for _ in range(5):
            rho = rng.uniform(1e-3, 3.0, any_grid_2d.shape)
            rho[0, 0] = 1e-3
            v = VectorField(any_grid_2d, tuple(rng.standard_normal(any_grid_2d.shape) for _ in range(2)))
            w = VectorField(any_grid_2d, tuple(rng.standard_normal(any_grid_2d.shape) for _ in range(2)))
            comp = compressible(any_grid_2d, rho, v, rng.uniform(-1.5, 1.5, any_grid_2d.shape))
            ref = incompressible(any_grid_2d, w, rng.uniform(-1.5, 1.5, any_grid_2d.shape))
            value = relative_energy(comp, ref, params)
            scale = 1.0 + abs(value.kinetic_rel) + abs(value.pressure_rel) + abs(value.potential_rel)
            assert value.value_Etilde >= -1e-12 * scale

    def test_grid_mismatch(self, unit_square):
        other = make_grid(8, 8, 1.0, 1.0, "walls")
        with pytest.raises(GridError):
            relative_energy(compressible(unit_square, 1.0, (0.0, 0.0), 0.0), incompressible(other, (0.0, 0.0), 0.0), PhysParams())


def test_relative_dissipation(unit_square, params):
    _, y = unit_square.cell_centers()
    v = VectorField(unit_square, (np.sin(2 * np.pi * y), np.zeros(unit_square.shape)))
    comp = compressible(unit_square, 1.0, v, 0.3, params=params)

    same = incompressible(unit_square, v, 0.3, params)
    assert relative_dissipation(comp, same, params) == pytest.approx(0.0, abs=1e-12)

    # constant c: only the shear part of the dissipation is left
    rest = incompressible(unit_square, (0.0, 0.0), 0.3, params)
    shear = dissipation_rates(comp.velocity, comp.c, comp.mu, params)[1]
    assert shear > 0
    assert relative_dissipation(comp, rest, params) == pytest.approx(shear, rel=1e-10)


class TestEnergyInequality:
    def test_decaying_series_passes(self):
        report = energy_inequality_series([1.0, 0.9, 0.85], [0.0, 0.08, 0.12], 1e-6)
        assert report.passed
        assert report.worst_violation == pytest.approx(-0.01)
        assert report.worst_pair == (1, 2)

    def test_growth_fails(self):
        report = energy_inequality_series([1.0, 1.1], [0.0, 0.0])
        assert not report.passed
        assert report.worst_violation == pytest.approx(0.1)

    def test_single_sample(self):
        report = energy_inequality_series([0.3], [0.0])
        assert report.passed
        assert report.samples == 1

    def test_times_of_worst_pair(self):
        report = energy_inequality_series([1.0, 1.0, 1.2], [0.0, 0.0, 0.0], times=[0.0, 0.5, 1.0])
        assert report.worst_times == (0.0, 1.0)

    def test_empty_trajectory(self):
        with pytest.raises(TrajectoryError):
            energy_inequality_check(Trajectory(kind="compressible"))

    def test_mismatched_series(self):
        with pytest.raises(TrajectoryError):
            energy_inequality_series([1.0, 0.9], [0.0])


class TestUniformEstimates:
    def test_interior_deviation(self, unit_square, params):
        eps = 0.1
        sample = uniform_sample(compressible(unit_square, 1.0 + eps / 2, (0.0, 0.0), 0.0, eps=eps), params)
        assert sample["interior_density"] == pytest.approx(0.25)
        assert sample["exterior_density"] == 0.0

    def test_exterior_density(self, unit_square, quadratic_params):
        sample = uniform_sample(compressible(unit_square, 3.0, (0.0, 0.0), 0.0), quadratic_params)
        assert sample["interior_density"] == 0.0
        assert sample["exterior_density"] == pytest.approx(10.0)

    def test_report_on_rest_state(self, grid_1d, params):
        state = compressible(grid_1d, 1.0, (0.0,), 0.2, eps=0.3)
        trajectory = run_compressible(state, params, 0.01, 0.005)
        report = uniform_estimates_report(trajectory, 0.3)
        assert report.eps == 0.3
        assert report.sup_interior_density == 0.0
        assert report.sup_exterior_density == 0.0
        assert report.sup_kinetic == 0.0
        assert report.int_grad_mu == 0.0


def test_chain_rule_residual_of_fixed_point(grid_1d, params):
    trajectory = run_compressible(compressible(grid_1d, 1.0, (0.0,), -0.4, eps=0.3), params, 0.01, 0.0025)
    result = chain_rule_residual(trajectory)
    assert result.residual == 0.0
    assert result.delta == pytest.approx(0.0025)
    assert result.h == grid_1d.hx


def test_chain_rule_needs_three_samples(grid_1d, params):
    trajectory = run_compressible(compressible(grid_1d, 1.0, (0.0,), 0.0), params, 0.005, 0.005)
    with pytest.raises(TrajectoryError):
        chain_rule_residual(trajectory)


class TestNormDistances:
    def test_identical(self, unit_square):
        d = norm_distances(compressible(unit_square, 1.0, (0.1, 0.2), 0.3), incompressible(unit_square, (0.1, 0.2), 0.3))
        assert (d.l1_rho, d.l2_v, d.h1_c) == (0.0, 0.0, 0.0)

    def test_density_distance(self, unit_square):
        d = norm_distances(compressible(unit_square, 1.05, (0.0, 0.0), 0.0), incompressible(unit_square, (0.0, 0.0), 0.0))
        assert d.l1_rho == pytest.approx(0.05)

    def test_h1_distance_of_cosine_mode(self):
        grid = make_grid(32, 1, 1.0, 1.0, "periodic")
        x = grid.cell_centers()[0]
        diff = 0.1 * np.cos(2 * np.pi * x)
        d = norm_distances(compressible(grid, 1.0, (0.0,), diff), incompressible(grid, (0.0,), 0.0))
        lam = (2.0 - 2.0 * np.cos(2 * np.pi * grid.hx)) / grid.hx ** 2
        assert d.h1_c ** 2 == pytest.approx(0.005 * (1.0 + lam), rel=1e-12)


def test_gronwall_constant():
    assert gronwall_constant([0.0, 1.0], [0.1, 0.2], 0.1) == pytest.approx(0.5)
    with pytest.raises(TrajectoryError):
        gronwall_constant([0.0, 1.0], [0.1], 0.1)
