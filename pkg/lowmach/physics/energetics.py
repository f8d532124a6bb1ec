"""
Energy functionals and the checks built on them.

All quantities are midpoint sums over cells; gradient terms use the
face-staggered gradient with face quadrature, which is the quadrature under
which the discrete Laplacian is the exact negative adjoint of the gradient.
"""

import logging
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from ..exceptions import GridError, TrajectoryError
from ..numerics.grid import ScalarField, VectorField
from ..numerics.operators import divergence, gradient, sym_grad_traceless, velocity_jacobian
from ..numerics.quadrature import h1_norm, h1_seminorm, inner, integrate, lp_norm
from ..schemas.reports import (
    ChainRuleResidual,
    EnergyBreakdown,
    InequalityReport,
    NormDistances,
    RelativeEnergyValue,
    UniformEstimates,
)
from .constitutive import PhysParams, potential_G, rel_pressure_potential
from .states import CompressibleState, IncompressibleState
from .trajectory import Trajectory

logger = logging.getLogger(__name__)

INTERIOR_LOW = 0.5
INTERIOR_HIGH = 2.0


def _cells(values: np.ndarray, grid) -> float:
    return float(np.sum(values) * grid.cell_volume)


def dissipation_rates(v: VectorField, c: ScalarField, mu: ScalarField, params: PhysParams) -> Tuple[float, float]:
    """``(full, relative)`` dissipation rates.

    ``full`` is ``int 2 nu |Dv|^2 + eta (div v)^2 + m |grad mu|^2``; ``relative``
    drops the bulk term.
    """
    grid = c.grid
    dev = sym_grad_traceless(v)
    shear = _cells(2.0 * params.viscosity.nu(c.values) * dev.contract(dev).values, grid)
    div = divergence(v).values
    bulk = _cells(params.viscosity.eta(c.values) * div * div, grid)
    grad_mu = gradient(mu)
    diffusion = params.mobility * inner(grad_mu, grad_mu)
    return shear + bulk + diffusion, shear + diffusion


def total_energy(state: CompressibleState, params: PhysParams) -> EnergyBreakdown:
    """Kinetic, relative pressure, gradient and potential energy of a compressible state."""
    grid = state.grid
    rho = state.rho.values
    kinetic = _cells(sum(m * m for m in state.mom.components) / (2.0 * rho), grid)
    pressure_part = _cells(rel_pressure_potential(params.pressure, rho), grid) / state.eps ** 2
    gradient_part = 0.5 * h1_seminorm(state.c) ** 2
    potential_part = _cells(rho * potential_G(params.potential, state.c.values).G, grid)
    full, relative = dissipation_rates(state.velocity, state.c, state.mu, params)
    return EnergyBreakdown(
        kinetic=kinetic,
        pressure_part=pressure_part,
        gradient_part=gradient_part,
        potential_part=potential_part,
        dissipation_rate=full,
        dissipation_rate_relative=relative,
    )


def model_h_energy(state: IncompressibleState, params: PhysParams) -> EnergyBreakdown:
    """``int |v|^2/2 + |grad c|^2/2 + G(c)`` with dissipation ``int 2 nu |Dv|^2 + m |grad mu|^2``."""
    grid = state.grid
    kinetic = _cells(0.5 * sum(v * v for v in state.v.components), grid)
    full, relative = dissipation_rates(state.v, state.c, state.mu, params)
    return EnergyBreakdown(
        kinetic=kinetic,
        pressure_part=0.0,
        gradient_part=0.5 * h1_seminorm(state.c) ** 2,
        potential_part=_cells(potential_G(params.potential, state.c.values).G, grid),
        dissipation_rate=full,
        dissipation_rate_relative=relative,
    )


def _check_pair(comp: CompressibleState, ref: IncompressibleState) -> None:
    if comp.grid != ref.grid:
        raise GridError("relative quantities need both states on one grid")


def relative_energy(comp: CompressibleState, ref: IncompressibleState, params: PhysParams) -> RelativeEnergyValue:
    """Relative energy of ``comp`` with respect to ``(1, v, c)`` and its convexified modification."""
    _check_pair(comp, ref)
    if abs(comp.t - ref.t) > 1e-9 * max(1.0, abs(comp.t)):
        raise TrajectoryError(f"states at different times: {comp.t} vs {ref.t}")
    grid = comp.grid
    rho = comp.rho.values
    v_eps = comp.velocity
    dv = sum((a - b) ** 2 for a, b in zip(v_eps.components, ref.v.components))
    dc = comp.c.values - ref.c.values
    g_eps = potential_G(params.potential, comp.c.values)
    g_ref = potential_G(params.potential, ref.c.values)
    return RelativeEnergyValue(
        kinetic_rel=_cells(0.5 * rho * dv, grid),
        pressure_rel=_cells(rel_pressure_potential(params.pressure, rho), grid) / comp.eps ** 2,
        gradient_rel=0.5 * h1_seminorm(comp.c - ref.c) ** 2,
        potential_rel=_cells(rho * (g_eps.G - g_ref.dG * dc - g_ref.G), grid),
        convexify=_cells(0.5 * params.potential.kappa * rho * dc * dc, grid),
    )


def relative_dissipation(comp: CompressibleState, ref: IncompressibleState, params: PhysParams) -> float:
    """``int 2 nu(c_eps) |D v_eps - D v|^2 + m |grad mu_eps - grad mu|^2``."""
    _check_pair(comp, ref)
    grid = comp.grid
    d_eps = sym_grad_traceless(comp.velocity)
    d_ref = sym_grad_traceless(ref.v)
    d = grid.dim
    diff_sq = sum((d_eps.components[i][j] - d_ref.components[i][j]) ** 2 for i in range(d) for j in range(d))
    grad_diff = gradient(comp.mu - ref.mu)
    return _cells(2.0 * params.viscosity.nu(comp.c.values) * diff_sq, grid) + params.mobility * inner(grad_diff, grad_diff)


# =====================================================================
# Energy inequality
# =====================================================================


def energy_inequality_series(
    energies: Sequence[float],
    dissipation_cum: Sequence[float],
    tol_rel: float = 1e-6,
    times: Optional[Sequence[float]] = None,
) -> InequalityReport:
    """Worst ``E(t) + D(t) - D(s) - E(s)`` over sample pairs ``s < t``.

    With ``Q = E + D`` this is ``max_t (Q(t) - min_{s<t} Q(s))``, found in one pass.

    Example:
        >>> energy_inequality_series([1.0, 1.1], [0.0, 0.0]).passed
        False
    """
    e = np.asarray(energies, dtype=float)
    d = np.asarray(dissipation_cum, dtype=float)
    if e.size == 0:
        raise TrajectoryError("energy inequality check needs at least one sample")
    if e.shape != d.shape:
        raise TrajectoryError("energy and dissipation series differ in length")
    tolerance = tol_rel * abs(e[0])
    if e.size == 1:
        return InequalityReport(passed=True, worst_violation=0.0, tolerance=tolerance, samples=1)

    q = e + d
    previous_min = np.minimum.accumulate(q)[:-1]
    violations = q[1:] - previous_min
    t_idx = int(np.argmax(violations)) + 1
    s_idx = int(np.argmin(q[:t_idx]))
    worst = float(violations[t_idx - 1])
    worst_times = None
    if times is not None:
        worst_times = (float(times[s_idx]), float(times[t_idx]))
    return InequalityReport(
        passed=worst <= tolerance,
        worst_violation=worst,
        worst_pair=(s_idx, t_idx),
        worst_times=worst_times,
        tolerance=tolerance,
        samples=int(e.size),
    )


def energy_inequality_check(trajectory: Trajectory, tol_rel: float = 1e-6) -> InequalityReport:
    """Energy inequality over all sample pairs of a trajectory."""
    if len(trajectory) == 0:
        raise TrajectoryError("energy inequality check on an empty trajectory")
    return energy_inequality_series(
        trajectory.column("E_total"), trajectory.column("dissipation_cum"), tol_rel, trajectory.times
    )


# =====================================================================
# Uniform estimates
# =====================================================================


def uniform_sample(state: CompressibleState, params: PhysParams) -> Dict[str, float]:
    """Per-sample quantities behind the uniform estimates."""
    grid = state.grid
    rho = state.rho.values
    v = state.velocity
    inside = (rho >= INTERIOR_LOW) & (rho <= INTERIOR_HIGH)
    deviation = ((rho - 1.0) / state.eps) ** 2
    jac = velocity_jacobian(v)
    grad_mu = h1_seminorm(state.mu)
    g = potential_G(params.potential, state.c.values)
    return {
        "kinetic_norm": float(np.sqrt(_cells(rho * sum(x * x for x in v.components), grid))),
        "interior_density": _cells(np.where(inside, deviation, 0.0), grid),
        "exterior_density": _cells(np.where(inside, 0.0, 1.0 + rho ** params.pressure.gamma), grid),
        "grad_c_norm": h1_seminorm(state.c),
        "grad_mu_sq": grad_mu ** 2,
        "grad_v_sq": _cells(jac.contract(jac).values, grid),
        "c_h1": h1_norm(state.c),
        "mu_h1_sq": lp_norm(state.mu, 2) ** 2 + grad_mu ** 2,
        "mean_identity": abs(_cells(rho * state.mu.values, grid) - _cells(rho * g.dG, grid)),
    }


def uniform_estimates_report(trajectory: Trajectory, eps: float) -> UniformEstimates:
    """Sup-in-time and time-integrated bounds of one compressible trajectory."""
    if len(trajectory) == 0:
        raise TrajectoryError("uniform estimates on an empty trajectory")
    t = trajectory.times

    def sup(name: str) -> float:
        return float(np.max(trajectory.column(name)))

    def integral(name: str) -> float:
        return float(trapezoid(trajectory.column(name), t)) if len(t) > 1 else 0.0

    return UniformEstimates(
        eps=eps,
        sup_kinetic=sup("kinetic_norm"),
        sup_interior_density=sup("interior_density"),
        sup_exterior_density=sup("exterior_density"),
        sup_grad_c=sup("grad_c_norm"),
        int_grad_mu=integral("grad_mu_sq"),
        int_grad_v=integral("grad_v_sq"),
        sup_c_h1=sup("c_h1"),
        int_mu_h1=integral("mu_h1_sq"),
        mean_identity_residual=sup("mean_identity"),
    )


# =====================================================================
# Chain rule, distances, Gronwall envelope
# =====================================================================


def chain_rule_residual(trajectory: Trajectory, mobility: float = 1.0) -> ChainRuleResidual:
    """Residual of ``d/dt int rho c^2 / 2 = -m int grad mu . grad c`` at interior samples.

    The time derivative is the centred difference of the sampled functional.
    """
    states = trajectory.states
    if len(states) < 3:
        raise TrajectoryError(f"chain rule residual needs at least 3 samples, got {len(states)}")
    t = np.array([s.t for s in states])
    phase_energy = np.array([integrate(s.rho * s.c * s.c) * 0.5 for s in states])
    worst = 0.0
    for k in range(1, len(states) - 1):
        derivative = (phase_energy[k + 1] - phase_energy[k - 1]) / (t[k + 1] - t[k - 1])
        flux = mobility * inner(gradient(states[k].mu), gradient(states[k].c))
        worst = max(worst, abs(derivative + flux))
    return ChainRuleResidual(residual=worst, delta=float(np.max(np.diff(t))), h=states[0].grid.h_min)


def norm_distances(comp: CompressibleState, ref: IncompressibleState) -> NormDistances:
    """``(||rho - 1||_L1, ||v_eps - v||_L2, ||c_eps - c||_H1)``."""
    _check_pair(comp, ref)
    return NormDistances(
        l1_rho=lp_norm(comp.rho - 1.0, 1),
        l2_v=lp_norm(comp.velocity - ref.v, 2),
        h1_c=h1_norm(comp.c - ref.c),
    )


def gronwall_constant(times: Sequence[float], etilde: Sequence[float], eps: float) -> float:
    """Smallest ``C`` with ``Etilde(tau) <= C (Etilde(0) + eps) exp(tau)`` on the samples."""
    t = np.asarray(times, dtype=float)
    e = np.asarray(etilde, dtype=float)
    if t.size == 0 or t.shape != e.shape:
        raise TrajectoryError("gronwall_constant needs matching, non-empty series")
    envelope = (e[0] + eps) * np.exp(t - t[0])
    return float(np.max(e / envelope))


# =====================================================================
# Diagnostics rows
# =====================================================================


def compressible_diagnostics(
    state: CompressibleState, params: PhysParams, dissipation_cum: float, dt: float
) -> Dict[str, float]:
    """One diagnostics row of a compressible trajectory."""
    energy = total_energy(state, params)
    row = {
        "t": state.t,
        "mass": integrate(state.rho),
        "phase_mass": integrate(state.rho * state.c),
        "E_total": energy.total,
        "E_kinetic": energy.kinetic,
        "E_pressure": energy.pressure_part,
        "E_gradient": energy.gradient_part,
        "E_potential": energy.potential_part,
        "dissipation_cum": dissipation_cum,
        "dt": dt,
        "eps": state.eps,
        "dissipation_rate": energy.dissipation_rate,
        "dissipation_rate_relative": energy.dissipation_rate_relative,
    }
    row.update(uniform_sample(state, params))
    return row


def model_h_diagnostics(
    state: IncompressibleState, params: PhysParams, dissipation_cum: float, dt: float
) -> Dict[str, float]:
    """One diagnostics row of a model-H trajectory."""
    energy = model_h_energy(state, params)
    return {
        "t": state.t,
        "mass_c": integrate(state.c),
        "E_total": energy.total,
        "E_kinetic": energy.kinetic,
        "E_gradient": energy.gradient_part,
        "E_potential": energy.potential_part,
        "dissipation_cum": dissipation_cum,
        "divergence_l2": lp_norm(divergence(state.v), 2),
        "dt": dt,
        "dissipation_rate": energy.dissipation_rate,
    }
