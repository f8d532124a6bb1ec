"""
Time stepping for the scaled compressible Navier-Stokes/Cahn-Hilliard system.

One step is split into

1. a first-order Rusanov finite-volume update of ``(rho, rho v)`` for
   convection and the ``1/eps^2`` pressure,
2. explicit viscous stress and capillary force (``mu`` form),
3. upwind transport of ``rho c`` with the same mass fluxes, followed by a
   linearly implicit, stabilized Cahn-Hilliard correction that uses the
   transported density.

Mass and phase mass change only through telescoping face fluxes.
"""

import logging
from typing import Dict, Optional, Tuple

import numpy as np

from ..exceptions import DensityFloorError, ParameterError
from ..metrics import RunMetrics
from ..numerics.grid import ScalarField, TensorField, VectorField
from ..numerics.linear_solvers import solve_cahn_hilliard, solve_pressure_poisson
from ..numerics.operators import (
    EVEN,
    ODD,
    axis_slice,
    cell_gradient,
    divergence,
    laplacian,
    outer_traceless_capillary,
    pad_ghosts,
    sym_grad_traceless,
    tensor_divergence,
)
from ..numerics.quadrature import lp_norm
from .constitutive import PhysParams, PotentialSpec, dpressure, potential_G, pressure
from .energetics import compressible_diagnostics, dissipation_rates
from .states import CompressibleState
from .trajectory import Trajectory, march

logger = logging.getLogger(__name__)

MU_CONSISTENCY_TOL = 1e-8


# =====================================================================
# Chemical potential and capillary forces
# =====================================================================


def chemical_potential_solve(
    rho: ScalarField, c: ScalarField, spec: PotentialSpec, rho_floor: float = 1e-6
) -> ScalarField:
    """``mu = G'(c) - lap(c) / rho`` cellwise."""
    if np.min(rho.values) < rho_floor:
        raise DensityFloorError(
            f"density {np.min(rho.values):.3e} below floor {rho_floor:.1e}", min_density=float(np.min(rho.values))
        )
    return c.with_values(potential_G(spec, c.values).dG - laplacian(c).values / rho.values)


def capillary_div_form(c: ScalarField) -> VectorField:
    """``-div(grad c (x) grad c - |grad c|^2 / 2 I)`` with cell-centred gradients."""
    return tensor_divergence(outer_traceless_capillary(cell_gradient(c))).scaled(-1.0)


def capillary_mu_form(rho: ScalarField, mu: ScalarField, c: ScalarField, spec: PotentialSpec) -> VectorField:
    """``(rho mu - rho G'(c)) grad c``."""
    factor = rho.values * (mu.values - potential_G(spec, c.values).dG)
    return cell_gradient(c).scaled(c.with_values(factor))


def remove_gradient_part(w: VectorField, tol: float = 1e-12) -> VectorField:
    """Subtract the discrete gradient component of a cell vector field."""
    rhs = divergence(w)
    psi, _ = solve_pressure_poisson(rhs, tol=tol)
    return w - cell_gradient(psi)


def capillary_equivalence_residual(state: CompressibleState, spec: PotentialSpec) -> float:
    """L2 norm of the difference of the two capillary forms modulo discrete gradients."""
    expected = chemical_potential_solve(state.rho, state.c, spec)
    scale = 1.0 + float(np.max(np.abs(expected.values)))
    if np.max(np.abs(expected.values - state.mu.values)) > MU_CONSISTENCY_TOL * scale:
        raise ParameterError("state.mu is not consistent with (rho, c)")
    difference = capillary_div_form(state.c) - capillary_mu_form(state.rho, state.mu, state.c, spec)
    return lp_norm(remove_gradient_part(difference), 2)


# =====================================================================
# Time step
# =====================================================================


def stable_dt(state: CompressibleState, params: PhysParams, cfl: float) -> float:
    """Largest step allowed by the acoustic, viscous and (explicit) Cahn-Hilliard limits, times ``cfl``."""
    if not 0.0 < cfl <= 1.0:
        raise ParameterError(f"cfl must lie in (0, 1], got {cfl}")
    rho = state.rho.values
    v = state.velocity
    if not (np.all(np.isfinite(rho)) and all(np.all(np.isfinite(x)) for x in v.components)):
        raise ParameterError("stable_dt got non-finite fields")
    if np.min(rho) <= 0:
        raise ParameterError("stable_dt needs a positive density")

    grid = state.grid
    h = grid.h_min
    speed = np.sqrt(sum(x * x for x in v.components))
    sound = np.sqrt(np.asarray(dpressure(params.pressure, rho))) / state.eps
    bounds = [float(np.min(h / (speed + sound)))]

    visc = params.viscosity
    viscous_rate = 4.0 * visc.nu_sup + 2.0 * visc.eta0
    bounds.append(float(np.min(rho)) * h ** 2 / viscous_rate)

    if not params.ch_implicit:
        rho_min = float(np.min(rho))
        bounds.append(rho_min ** 2 * h ** 4 / (16.0 * params.mobility * grid.dim ** 2))
    return cfl * min(bounds)


# =====================================================================
# Step
# =====================================================================


def _relative_pressure(params: PhysParams, rho: np.ndarray, eps: float) -> np.ndarray:
    return (np.asarray(pressure(params.pressure, rho)) - pressure(params.pressure, 1.0)) / eps ** 2


def rusanov_fluxes(state: CompressibleState, params: PhysParams):
    """Face fluxes of mass and momentum per direction.

    Returns one ``(mass_flux, momentum_fluxes)`` pair per direction; arrays
    have one more entry than cells along the direction (every face).
    """
    grid = state.grid
    eps = state.eps
    rho = state.rho.values
    moms = state.mom.components
    out = []
    for k in range(grid.dim):
        ax = grid.axis(k)
        rp = pad_ghosts(grid, rho, ax, EVEN)
        mp = [pad_ghosts(grid, m, ax, ODD) for m in moms]
        left = axis_slice(ax, 0, -1)
        right = axis_slice(ax, 1, None)

        rl, rr = rp[left], rp[right]
        ml = [m[left] for m in mp]
        mr = [m[right] for m in mp]
        ul, ur = ml[k] / rl, mr[k] / rr
        cl = np.sqrt(np.asarray(dpressure(params.pressure, rl))) / eps
        cr = np.sqrt(np.asarray(dpressure(params.pressure, rr))) / eps
        alpha = np.maximum(np.abs(ul) + cl, np.abs(ur) + cr)

        mass_flux = 0.5 * (ml[k] + mr[k]) - 0.5 * alpha * (rr - rl)
        pl = _relative_pressure(params, rl, eps)
        pr = _relative_pressure(params, rr, eps)
        mom_fluxes = []
        for j in range(grid.dim):
            fl = ml[j] * ul + (pl if j == k else 0.0)
            fr = mr[j] * ur + (pr if j == k else 0.0)
            mom_fluxes.append(0.5 * (fl + fr) - 0.5 * alpha * (mr[j] - ml[j]))
        out.append((mass_flux, mom_fluxes))
    return out


def _flux_divergence(grid, flux: np.ndarray, component: int) -> np.ndarray:
    ax = grid.axis(component)
    return (flux[axis_slice(ax, 1, None)] - flux[axis_slice(ax, 0, -1)]) / grid.spacing[component]


def viscous_stress(v: VectorField, c: ScalarField, params: PhysParams) -> TensorField:
    """``2 nu(c) D v + eta(c) (div v) I`` with the traceless ``D``."""
    grid = v.grid
    d = grid.dim
    dev = sym_grad_traceless(v)
    nu = params.viscosity.nu(c.values)
    bulk = params.viscosity.eta(c.values) * divergence(v).values
    return TensorField(
        grid,
        tuple(
            tuple(2.0 * nu * dev.components[i][j] + (bulk if i == j else 0.0) for j in range(d))
            for i in range(d)
        ),
    )


def _ch_correction(
    rho: ScalarField, c_tilde: ScalarField, dt: float, params: PhysParams
) -> Tuple[ScalarField, int]:
    """Cahn-Hilliard substep at fixed density; returns the new concentration."""
    spec = params.potential
    m = params.mobility
    if params.ch_implicit:
        base = c_tilde.with_values(potential_G(spec, c_tilde.values).dG - laplacian(c_tilde).values / rho.values)
        rhs = m * laplacian(base)
        delta, info = solve_cahn_hilliard(
            rho, rhs, dt, m, spec.stabilization, tol=params.solver_tol, maxiter=params.solver_maxiter
        )
        iterations = info.iterations
        c_star = c_tilde + delta
        mu_star = base.values + spec.stabilization * delta.values - laplacian(delta).values / rho.values
    else:
        iterations = 0
        mu_star = potential_G(spec, c_tilde.values).dG - laplacian(c_tilde).values / rho.values
    # c is rebuilt from mu so that int rho c changes only by a telescoping sum
    c_new = c_tilde.values + dt * m * laplacian(c_tilde.with_values(mu_star)).values / rho.values
    return c_tilde.with_values(c_new), iterations


def _step(state: CompressibleState, params: PhysParams, dt: float) -> Tuple[CompressibleState, Dict[str, int]]:
    grid = state.grid
    fluxes = rusanov_fluxes(state, params)

    rho_new = state.rho.values.copy()
    mom_new = [m.copy() for m in state.mom.components]
    phase_new = state.rho.values * state.c.values
    for k, (mass_flux, mom_fluxes) in enumerate(fluxes):
        rho_new -= dt * _flux_divergence(grid, mass_flux, k)
        for j in range(grid.dim):
            mom_new[j] -= dt * _flux_divergence(grid, mom_fluxes[j], k)

        ax = grid.axis(k)
        cp = pad_ghosts(grid, state.c.values, ax, EVEN)
        upwind = np.where(mass_flux > 0, cp[axis_slice(ax, 0, -1)], cp[axis_slice(ax, 1, None)])
        phase_new -= dt * _flux_divergence(grid, mass_flux * upwind, k)

    min_rho = float(np.min(rho_new))
    if min_rho < params.rho_floor:
        raise DensityFloorError(
            f"density {min_rho:.3e} below floor {params.rho_floor:.1e} at t={state.t:.6g}",
            time=state.t,
            min_density=min_rho,
        )

    v = state.velocity
    viscous = tensor_divergence(viscous_stress(v, state.c, params))
    capillary = capillary_mu_form(state.rho, state.mu, state.c, params.potential)
    for j in range(grid.dim):
        mom_new[j] += dt * (viscous.components[j] + capillary.components[j])

    rho_field = state.rho.with_values(rho_new)
    c_tilde = state.c.with_values(phase_new / rho_new)
    c_new, iterations = _ch_correction(rho_field, c_tilde, dt, params)
    mu_new = chemical_potential_solve(rho_field, c_new, params.potential, params.rho_floor)

    new_state = CompressibleState(
        rho=rho_field,
        mom=state.mom.with_components(mom_new),
        c=c_new,
        mu=mu_new,
        eps=state.eps,
        t=state.t + dt,
    )
    return new_state, {"cahn_hilliard": iterations}


def compressible_step(state: CompressibleState, params: PhysParams, dt: float) -> CompressibleState:
    """Advance one time level."""
    if not dt > 0:
        raise ParameterError(f"dt must be positive, got {dt}")
    new_state, _ = _step(state, params, dt)
    return new_state


def run_compressible(
    initial: CompressibleState,
    params: PhysParams,
    t_end: float,
    sample_every: float,
    cfl: float = 0.4,
    metrics: Optional[RunMetrics] = None,
) -> Trajectory:
    """March ``initial`` to ``t_end`` with stable steps, sampling every ``sample_every``."""
    logger.info(f"compressible run: eps={initial.eps}, t=[{initial.t}, {t_end}], grid {initial.grid.shape}")
    trajectory = march(
        initial,
        t_end,
        sample_every,
        stable_dt=lambda s: stable_dt(s, params, cfl),
        step=lambda s, dt: _step(s, params, dt),
        dissipation_rate=lambda s: dissipation_rates(s.velocity, s.c, s.mu, params)[0],
        diagnostics=lambda s, cum, dt: compressible_diagnostics(s, params, cum, dt),
        kind="compressible",
        metrics=metrics,
    )
    logger.info(f"compressible run eps={initial.eps} finished: {trajectory.steps} steps, {len(trajectory)} samples")
    return trajectory
