"""
Solver for model H, the incompressible Navier-Stokes/Cahn-Hilliard system
with matched densities.

Each step first advances ``c`` with a linearly implicit, stabilized
Cahn-Hilliard update (upwind convection by the face velocity), then the
velocity with an incremental pressure projection whose Poisson operator is
``divergence . cell_gradient``, so the projected field is discretely
divergence free up to the solver tolerance.
"""

import logging
from typing import Dict, Optional, Tuple

import numpy as np

from ..exceptions import ParameterError
from ..metrics import RunMetrics
from ..numerics.grid import ScalarField, TensorField, VectorField
from ..numerics.linear_solvers import solve_cahn_hilliard, solve_pressure_poisson
from ..numerics.operators import (
    EVEN,
    ODD,
    axis_slice,
    cell_gradient,
    divergence,
    face_average,
    laplacian,
    pad_ghosts,
    sym_grad_traceless,
    tensor_divergence,
)
from .constitutive import PhysParams, PotentialSpec, potential_G
from .energetics import dissipation_rates, model_h_diagnostics
from .states import IncompressibleState
from .trajectory import Trajectory, march

logger = logging.getLogger(__name__)


def mu_incompressible(c: ScalarField, spec: PotentialSpec) -> ScalarField:
    """``-lap(c) + G'(c)``."""
    return c.with_values(potential_G(spec, c.values).dG - laplacian(c).values)


def _upwind_faces(grid, a: np.ndarray, face_velocity: np.ndarray, component: int, parity: str) -> np.ndarray:
    """Value of ``a`` upwinded on the faces normal to ``component``."""
    ax = grid.axis(component)
    if grid.periodic:
        left, right = np.roll(a, 1, axis=ax), a
    else:
        p = pad_ghosts(grid, a, ax, parity)
        left, right = p[axis_slice(ax, 0, -1)], p[axis_slice(ax, 1, None)]
    return np.where(face_velocity > 0, left, right)


def convective_flux_divergence(c: ScalarField, v: VectorField) -> ScalarField:
    """``div(v c)`` with first-order upwind face values and zero flux through walls."""
    grid = c.grid
    w = face_average(v)
    fluxes = tuple(
        w.components[k] * _upwind_faces(grid, c.values, w.components[k], k, EVEN) for k in range(grid.dim)
    )
    return divergence(VectorField(grid, fluxes, staggered=True))


def momentum_convection(v: VectorField) -> VectorField:
    """``div(v (x) v)`` row by row, upwinded by the face velocity."""
    grid = v.grid
    w = face_average(v)
    rows = []
    for comp in v.components:
        fluxes = tuple(w.components[k] * _upwind_faces(grid, comp, w.components[k], k, ODD) for k in range(grid.dim))
        rows.append(divergence(VectorField(grid, fluxes, staggered=True)).values)
    return v.with_components(rows)


def _ch_step(
    c: ScalarField, v: VectorField, dt: float, spec: PotentialSpec, mobility: float, tol: float, maxiter: int
) -> Tuple[ScalarField, ScalarField, int]:
    grid = c.grid
    mu0 = mu_incompressible(c, spec)
    transport = convective_flux_divergence(c, v)
    rhs = mobility * laplacian(mu0) - transport
    delta, info = solve_cahn_hilliard(
        ScalarField.constant(grid, 1.0), rhs, dt, mobility, spec.stabilization, tol=tol, maxiter=maxiter
    )
    mu_plus = mu0.values + spec.stabilization * delta.values - laplacian(delta).values
    c_next = c.values + dt * (mobility * laplacian(c.with_values(mu_plus)).values - transport.values)
    c_next = c.with_values(c_next)
    return c_next, mu_incompressible(c_next, spec), info.iterations


def ch_step(
    c: ScalarField,
    v: VectorField,
    dt: float,
    spec: PotentialSpec,
    mobility: float = 1.0,
    tol: float = 1e-10,
    maxiter: int = 500,
) -> Tuple[ScalarField, ScalarField]:
    """Stabilized semi-implicit Cahn-Hilliard step; returns ``(c_next, mu_next)``.

    Solves ``(c+ - c)/dt + div(v c) = m lap(mu+)`` with
    ``mu+ = -lap(c+) + G'(c) + s (c+ - c)``, ``s = L/2``.
    """
    c_next, mu_next, _ = _ch_step(c, v, dt, spec, mobility, tol, maxiter)
    return c_next, mu_next


def viscous_force(v: VectorField, c: ScalarField, params: PhysParams) -> VectorField:
    """``div(2 nu(c) D v)``."""
    grid = v.grid
    dev = sym_grad_traceless(v)
    nu = params.viscosity.nu(c.values)
    d = grid.dim
    stress = TensorField(grid, tuple(tuple(2.0 * nu * dev.components[i][j] for j in range(d)) for i in range(d)))
    return tensor_divergence(stress)


def capillary_force(c: ScalarField, mu: ScalarField, spec: PotentialSpec) -> VectorField:
    """``mu grad c - grad G(c)``."""
    g = c.with_values(potential_G(spec, c.values).G)
    return cell_gradient(c).scaled(mu) - cell_gradient(g)


def project_divergence_free(v: VectorField, tol: float = 1e-12, maxiter: int = 500) -> Tuple[VectorField, ScalarField]:
    """Remove the discrete gradient part of ``v``; returns ``(projected, psi)``."""
    psi, _ = solve_pressure_poisson(divergence(v), tol=tol, maxiter=maxiter)
    return v - cell_gradient(psi), psi


def _projection_step(
    v: VectorField, p: ScalarField, c: ScalarField, mu: ScalarField, dt: float, params: PhysParams
) -> Tuple[VectorField, ScalarField, int]:
    forcing = (
        viscous_force(v, c, params)
        + capillary_force(c, mu, params.potential)
        - momentum_convection(v)
        - cell_gradient(p)
    )
    v_star = v + forcing.scaled(dt)
    psi, info = solve_pressure_poisson(divergence(v_star), tol=params.solver_tol, maxiter=params.solver_maxiter)
    v_next = v_star - cell_gradient(psi)
    p_next = p.values + psi.values / dt
    p_next = p.with_values(p_next - np.mean(p_next))
    return v_next, p_next, info.iterations


def projection_step(
    v: VectorField, p: ScalarField, c: ScalarField, mu: ScalarField, dt: float, params: PhysParams
) -> Tuple[VectorField, ScalarField]:
    """Incremental pressure projection; returns ``(v_next, p_next)`` with mean-zero ``p_next``."""
    v_next, p_next, _ = _projection_step(v, p, c, mu, dt, params)
    return v_next, p_next


def model_h_stable_dt(state: IncompressibleState, params: PhysParams, cfl: float) -> float:
    """``cfl * min(h / |v|_max, h^2 / (4 nu_sup))``."""
    if not 0.0 < cfl <= 1.0:
        raise ParameterError(f"cfl must lie in (0, 1], got {cfl}")
    if not all(np.all(np.isfinite(x)) for x in state.v.components):
        raise ParameterError("model_h_stable_dt got a non-finite velocity")
    h = state.grid.h_min
    bounds = [h ** 2 / (4.0 * params.viscosity.nu_sup)]
    vmax = float(np.max(np.sqrt(sum(x * x for x in state.v.components))))
    if vmax > 0:
        bounds.append(h / vmax)
    return cfl * min(bounds)


def _step(state: IncompressibleState, params: PhysParams, dt: float) -> Tuple[IncompressibleState, Dict[str, int]]:
    c_next, mu_next, ch_iterations = _ch_step(
        state.c, state.v, dt, params.potential, params.mobility, params.solver_tol, params.solver_maxiter
    )
    v_next, p_next, poisson_iterations = _projection_step(state.v, state.p, c_next, mu_next, dt, params)
    new_state = IncompressibleState(v=v_next, p=p_next, c=c_next, mu=mu_next, t=state.t + dt)
    return new_state, {"cahn_hilliard": ch_iterations, "pressure_poisson": poisson_iterations}


def run_model_h(
    initial: IncompressibleState,
    params: PhysParams,
    t_end: float,
    sample_every: float,
    cfl: float = 0.4,
    max_dt: Optional[float] = None,
    metrics: Optional[RunMetrics] = None,
) -> Trajectory:
    """March model H from ``initial`` to ``t_end``; ``max_dt`` caps every step."""

    def dt_for(state: IncompressibleState) -> float:
        dt = model_h_stable_dt(state, params, cfl)
        return dt if max_dt is None else min(dt, max_dt)

    logger.info(f"model H run: t=[{initial.t}, {t_end}], grid {initial.grid.shape}")
    trajectory = march(
        initial,
        t_end,
        sample_every,
        stable_dt=dt_for,
        step=lambda s, dt: _step(s, params, dt),
        dissipation_rate=lambda s: dissipation_rates(s.v, s.c, s.mu, params)[0],
        diagnostics=lambda s, cum, dt: model_h_diagnostics(s, params, cum, dt),
        kind="model_h",
        metrics=metrics,
    )
    logger.info(f"model H run finished: {trajectory.steps} steps, {len(trajectory)} samples")
    return trajectory
