"""Well-prepared initial data for the Mach-parameter sweep."""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..exceptions import DensityFloorError, ParameterError
from ..numerics.grid import Grid, ScalarField, VectorField
from ..numerics.linear_solvers import solve_pressure_poisson
from ..numerics.operators import divergence
from ..numerics.quadrature import h1_seminorm, lp_norm
from ..physics.compressible import capillary_mu_form, chemical_potential_solve
from ..physics.constitutive import PotentialSpec, PressureLaw, dpressure
from ..physics.model_h import momentum_convection, mu_incompressible, project_divergence_free
from ..physics.states import CompressibleState, IncompressibleState
from ..schemas.config import ICBlock, SimulationConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InitialData:
    """Matched compressible and limit initial states."""

    compressible: CompressibleState
    incompressible: IncompressibleState
    density_perturbation_sup: float
    hypothesis_bound: float

    def __iter__(self):
        yield self.compressible
        yield self.incompressible


def concentration_profile(ic: ICBlock, grid: Grid) -> ScalarField:
    """Smooth ``c_0`` with values inside ``(-1, 1)``."""
    a = ic.amplitude
    xc, yc = 0.5 * grid.lx, 0.5 * grid.ly
    radius = 0.5 * ic.stripe_fraction * grid.lx
    scale = np.sqrt(2.0) * ic.width

    def stripe(x, y):
        return a * np.tanh((radius - np.abs(x - xc)) / scale)

    def disk(x, y):
        r = np.sqrt((x - xc) ** 2 + (y - yc) ** 2) if grid.dim == 2 else np.abs(x - xc)
        return a * np.tanh((radius - r) / scale)

    def cosine(x, y):
        return a * np.cos(2.0 * np.pi * x / grid.lx)

    def constant(x, y):
        return np.full_like(x, a)

    profiles: dict[str, Callable] = {"tanh_stripe": stripe, "tanh_disk": disk, "cosine": cosine, "constant": constant}
    return ScalarField.from_function(grid, profiles[ic.profile])


def density_profile(ic: ICBlock, grid: Grid) -> ScalarField:
    """Bounded analytic profile ``g`` of the second-order density perturbation."""
    amp = ic.density_amplitude
    if ic.density_profile == "balanced":
        raise ParameterError("the balanced density profile depends on (c_0, v_0); use balanced_density_profile")
    if ic.density_profile == "zero" or amp == 0.0:
        return ScalarField.zeros(grid)
    wave = np.cos if ic.density_profile == "cosine" else np.sin
    return ScalarField.from_function(grid, lambda x, y: amp * wave(2.0 * np.pi * x / grid.lx))


def balanced_density_profile(
    c0: ScalarField, v0: VectorField, spec: PotentialSpec, law: PressureLaw, tol: float = 1e-12
) -> ScalarField:
    """Profile ``g`` whose pressure gradient balances the initial forcing.

    ``p'(1) grad g`` equals the gradient part of ``(mu - G'(c)) grad c - div(v (x) v)``
    at unit density, so the ``1/eps^2`` pressure starts without an O(1)
    acoustic imbalance. ``g`` has zero mean.
    """
    forcing = capillary_mu_form(ScalarField.constant(c0.grid, 1.0), mu_incompressible(c0, spec), c0, spec)
    if lp_norm(v0, 2) > 0.0:
        forcing = forcing - momentum_convection(v0)
    psi, _ = solve_pressure_poisson(divergence(forcing), tol=tol)
    return psi * (1.0 / float(dpressure(law, 1.0)))


def velocity_profile(ic: ICBlock, grid: Grid) -> VectorField:
    """Discretely divergence-free ``v_0`` from a streamfunction, then projected."""
    u = ic.velocity_amplitude
    if u == 0.0:
        return VectorField.zeros(grid)
    if grid.dim == 1:
        if not grid.periodic:
            raise ParameterError("a 1D walls grid only admits v_0 = 0")
        return VectorField.constant(grid, (u,))

    x, y = grid.cell_centers()
    lx, ly = grid.lx, grid.ly
    if grid.periodic:
        kx, ky = 2.0 * np.pi / lx, 2.0 * np.pi / ly
        vx = u * np.sin(kx * x) * np.cos(ky * y)
        vy = -u * (kx / ky) * np.cos(kx * x) * np.sin(ky * y)
    else:
        # psi = u sin^2(pi x / lx) sin^2(pi y / ly), v = (d_y psi, -d_x psi)
        sx, sy = np.sin(np.pi * x / lx), np.sin(np.pi * y / ly)
        vx = u * sx ** 2 * (np.pi / ly) * np.sin(2.0 * np.pi * y / ly)
        vy = -u * sy ** 2 * (np.pi / lx) * np.sin(2.0 * np.pi * x / lx)
    projected, _ = project_divergence_free(VectorField(grid, (vx, vy)))
    return projected


def well_prepared_initial_data(config: SimulationConfig, eps: float) -> InitialData:
    """Initial states with ``rho = 1 + eps^2 g`` and shared ``(v_0, c_0)``.

    The compressible density perturbation ``(rho - 1)/eps = eps g`` tends to
    zero in the sup norm with rate ``eps``.
    """
    if not eps > 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    grid = config.grid.build()
    spec = config.potential_spec()
    floor = config.physics.rho_floor

    c0 = concentration_profile(config.ic, grid)
    v0 = velocity_profile(config.ic, grid)
    if config.ic.density_profile == "balanced":
        g = balanced_density_profile(c0, v0, spec, config.pressure_law(), config.time.solver_tol)
    else:
        g = density_profile(config.ic, grid)
    rho = g.with_values(1.0 + eps ** 2 * g.values)
    if np.min(rho.values) < floor:
        raise DensityFloorError(
            f"initial density {np.min(rho.values):.3e} below floor {floor:.1e} at eps={eps}",
            time=0.0,
            min_density=float(np.min(rho.values)),
        )

    compressible = CompressibleState.from_velocity(rho, v0, c0, chemical_potential_solve(rho, c0, spec, floor), eps)
    incompressible = IncompressibleState(v=v0, p=ScalarField.zeros(grid), c=c0, mu=mu_incompressible(c0, spec))

    perturbation = eps * float(np.max(np.abs(g.values)))
    bound = perturbation + lp_norm(v0, 2) + h1_seminorm(c0)
    logger.debug(f"initial data eps={eps}: sup|rho1|={perturbation:.3e}, hypothesis bound {bound:.3e}")
    return InitialData(compressible, incompressible, perturbation, bound)
