"""Tests for well-prepared initial data."""

import numpy as np
import pytest

from lowmach.exceptions import DensityFloorError, ParameterError
from lowmach.harness.initial_data import (
    concentration_profile,
    density_profile,
    velocity_profile,
    well_prepared_initial_data,
)
from lowmach.numerics.grid import ScalarField, make_grid
from lowmach.numerics.operators import cell_gradient, divergence
from lowmach.numerics.quadrature import integrate, lp_norm
from lowmach.physics.compressible import capillary_mu_form, chemical_potential_solve, compressible_step
from lowmach.physics.constitutive import dpressure
from lowmach.physics.energetics import relative_energy
from lowmach.physics.model_h import momentum_convection
from lowmach.schemas.config import ICBlock, SimulationConfig


def make_config(grid=None, ic=None):
    return SimulationConfig.model_validate(
        {"grid": grid or {"nx": 32, "lx": 1.0}, "ic": ic or {}, "time": {"t_end": 0.1, "sample_every": 0.05}}
    )


def test_density_is_second_order_perturbation():
    config = make_config(ic={"density_profile": "sine", "density_amplitude": 1.0})
    comp, _ = well_prepared_initial_data(config, 0.1)
    x, _ = config.grid.build().cell_centers()
    assert np.allclose(comp.rho.values, 1.0 + 0.01 * np.sin(2 * np.pi * x))


def test_perturbation_sup_scales_with_eps():
    config = make_config(ic={"density_profile": "sine"})
    grid = config.grid.build()
    x, _ = grid.cell_centers()
    sup_g = np.max(np.abs(np.sin(2 * np.pi * x)))
    coarse = well_prepared_initial_data(config, 0.1)
    fine = well_prepared_initial_data(config, 0.05)
    assert coarse.density_perturbation_sup == pytest.approx(0.1 * sup_g)
    assert fine.density_perturbation_sup == pytest.approx(0.5 * coarse.density_perturbation_sup)


def test_states_share_velocity_and_concentration():
    config = make_config(grid={"nx": 16, "ny": 16, "bc_mode": "periodic"}, ic={"velocity_amplitude": 0.2})
    comp, inc = well_prepared_initial_data(config, 0.2)
    assert np.array_equal(comp.c.values, inc.c.values)
    for a, b in zip(comp.velocity.components, inc.v.components):
        assert np.allclose(a, b, rtol=1e-14, atol=1e-16)
    assert comp.t == inc.t == 0.0
    assert np.all(inc.p.values == 0.0)


def test_chemical_potential_is_consistent():
    config = make_config()
    comp, _ = well_prepared_initial_data(config, 0.2)
    expected = chemical_potential_solve(comp.rho, comp.c, config.potential_spec())
    assert np.array_equal(comp.mu.values, expected.values)


def test_initial_relative_energy():
    config = make_config()
    params = config.phys_params()
    values = []
    for eps in (0.2, 0.1):
        comp, inc = well_prepared_initial_data(config, eps)
        value = relative_energy(comp, inc, params)
        assert value.kinetic_rel == 0.0
        assert value.gradient_rel == 0.0
        assert value.potential_rel == 0.0
        values.append(value.pressure_rel)
    assert values[0] / values[1] == pytest.approx(4.0, rel=0.05)


def test_zero_profile_gives_zero_relative_energy():
    config = make_config(ic={"density_profile": "zero"})
    comp, inc = well_prepared_initial_data(config, 0.3)
    assert np.all(comp.rho.values == 1.0)
    assert relative_energy(comp, inc, config.phys_params()).value_Etilde == pytest.approx(0.0, abs=1e-15)


def test_hypothesis_bound():
    config = make_config(ic={"density_profile": "zero", "profile": "constant"})
    data = well_prepared_initial_data(config, 0.1)
    assert data.hypothesis_bound == 0.0


@pytest.mark.parametrize("bc", ["walls", "periodic"])
def test_velocity_is_divergence_free(bc):
    grid = make_grid(24, 24, 1.0, 1.0, bc)
    v = velocity_profile(ICBlock(velocity_amplitude=0.5), grid)
    assert lp_norm(v, 2) > 0.1
    assert lp_norm(divergence(v), 2) <= 1e-10


def test_velocity_on_1d_walls_is_rejected():
    with pytest.raises(ParameterError):
        velocity_profile(ICBlock(velocity_amplitude=0.1), make_grid(16, 1, 1.0, 1.0, "walls"))


@pytest.mark.parametrize("profile", ["tanh_stripe", "tanh_disk", "cosine", "constant"])
def test_concentration_stays_inside_wells(profile):
    grid = make_grid(32, 32, 1.0, 1.0, "walls")
    c = concentration_profile(ICBlock(profile=profile, amplitude=0.8, width=0.05), grid)
    assert np.max(np.abs(c.values)) <= 0.8 + 1e-15


def test_nonpositive_eps():
    with pytest.raises(ParameterError):
        well_prepared_initial_data(make_config(), 0.0)


def test_density_below_floor():
    config = make_config(ic={"density_profile": "cosine", "density_amplitude": 200.0})
    with pytest.raises(DensityFloorError):
        well_prepared_initial_data(config, 0.4)


def stripe_config(density_profile="balanced"):
    return make_config(grid={"nx": 128, "lx": 8.0}, ic={"density_profile": density_profile})


def initial_acceleration(config, eps, dt=1e-5):
    comp, _ = well_prepared_initial_data(config, eps)
    return lp_norm(compressible_step(comp, config.phys_params(), dt).mom, 2) / dt


class TestBalancedDensity:
    def test_is_the_default(self):
        assert ICBlock().density_profile == "balanced"

    def test_pressure_gradient_matches_forcing(self):
        config = stripe_config()
        comp, inc = well_prepared_initial_data(config, 0.1)
        spec = config.potential_spec()
        g = (comp.rho - 1.0) * (1.0 / 0.1 ** 2)
        forcing = capillary_mu_form(ScalarField.constant(comp.grid, 1.0), inc.mu, inc.c, spec)
        pressure_part = cell_gradient(g * float(dpressure(config.pressure_law(), 1.0)))
        residual = lp_norm(divergence(pressure_part - forcing), 2)
        assert lp_norm(g, 2) > 0.0
        assert residual <= 1e-8 * lp_norm(divergence(forcing), 2)

    def test_profile_is_independent_of_eps(self):
        config = stripe_config()
        coarse, _ = well_prepared_initial_data(config, 0.4)
        fine, _ = well_prepared_initial_data(config, 0.05)
        assert np.allclose((coarse.rho.values - 1.0) / 0.16, (fine.rho.values - 1.0) / 0.0025, rtol=1e-6, atol=1e-10)

    def test_mass_is_unperturbed(self):
        comp, _ = well_prepared_initial_data(stripe_config(), 0.2)
        assert integrate(comp.rho) == pytest.approx(8.0, abs=1e-12)

    def test_no_initial_acoustic_forcing(self):
        unbalanced = initial_acceleration(stripe_config("cosine"), 0.1)
        balanced = initial_acceleration(stripe_config(), 0.1)
        assert unbalanced > 1.0
        assert balanced <= 1e-2 * unbalanced

    def test_follows_the_initial_velocity(self):
        config = make_config(
            grid={"nx": 32, "ny": 32, "lx": 1.0, "bc_mode": "periodic"}, ic={"profile": "constant", "velocity_amplitude": 0.3}
        )
        comp, inc = well_prepared_initial_data(config, 0.2)
        g = (comp.rho - 1.0) * (1.0 / 0.2 ** 2)
        residual = cell_gradient(g * float(dpressure(config.pressure_law(), 1.0))) + momentum_convection(inc.v)
        assert lp_norm(g, 2) > 1e-3
        assert lp_norm(divergence(residual), 2) <= 1e-8 * lp_norm(divergence(momentum_convection(inc.v)), 2)

    def test_analytic_helper_refuses_balanced(self):
        with pytest.raises(ParameterError):
            density_profile(ICBlock(), make_grid(16, 1, 1.0, 1.0, "walls"))

    def test_analytic_profiles_keep_their_amplitude(self):
        g = density_profile(ICBlock(density_profile="cosine", density_amplitude=2.0), make_grid(16, 1, 1.0, 1.0, "walls"))
        assert np.max(np.abs(g.values)) == pytest.approx(2.0 * np.cos(np.pi / 16))
