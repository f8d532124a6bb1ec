"""
Constitutive laws: isentropic pressure, free-energy densities, the mixing
potential with its convex splitting, phase-dependent viscosities, and
sampled verification of the standing growth and Lipschitz assumptions.
"""

from enum import Enum
from fractions import Fraction
from typing import NamedTuple, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..exceptions import ParameterError
from ..schemas.reports import AssumptionCheck, AssumptionReport

ArrayLike = Union[float, np.ndarray]

GAMMA_MIN = 1.5
GAMMA_THEOREM = 12.0 / 5.0
GAMMA_THEOREM_CONVEX = 2.0
MIN_SAMPLES = 1000
ROUNDOFF = 1e-9


# =====================================================================
# Parameter records
# =====================================================================


class PotentialKind(str, Enum):
    DOUBLE_WELL = "double_well"
    CONVEX = "convex"


class PressureLaw(BaseModel):
    """``p_e(rho) = a rho^gamma``."""

    gamma: float = Field(default=GAMMA_THEOREM, gt=0)
    a: float = Field(default=1.0, gt=0)

    model_config = ConfigDict(frozen=True)


class PotentialSpec(BaseModel):
    """Mixing potential.

    ``double_well``: ``(c^2 - 1)^2 / 4`` on ``|c| <= c_t`` continued by its
    second-order Taylor polynomial (curvature frozen at ``3 c_t^2 - 1``).
    ``convex``: ``(c - c_shift)^2 / 2``.
    """

    kind: PotentialKind = PotentialKind.DOUBLE_WELL
    kappa: float = Field(default=1.0, ge=0)
    c_t: float = Field(default=2.0, gt=1)
    c_shift: float = 0.0

    model_config = ConfigDict(frozen=True)

    @property
    def lipschitz(self) -> float:
        """Global Lipschitz constant ``L`` of ``G'`` (the maximum of ``G''``)."""
        if self.kind is PotentialKind.CONVEX:
            return 1.0
        return 3.0 * self.c_t ** 2 - 1.0

    @property
    def stabilization(self) -> float:
        """``s = L/2`` used by the linearly implicit Cahn-Hilliard steps."""
        return 0.5 * self.lipschitz

    @property
    def gamma_threshold(self) -> float:
        return GAMMA_THEOREM_CONVEX if self.kind is PotentialKind.CONVEX else GAMMA_THEOREM


class ViscosityLaw(BaseModel):
    """``nu(c) = nu0 + nu1 clip(c, -1, 1)``, ``eta(c) = eta0``."""

    nu0: float = Field(default=0.1, gt=0)
    nu1: float = 0.0
    eta0: float = Field(default=0.0, ge=0)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_bounds(self) -> "ViscosityLaw":
        if not self.nu0 > abs(self.nu1):
            raise ValueError(f"nu0 must exceed |nu1| (got nu0={self.nu0}, nu1={self.nu1})")
        return self

    @property
    def nu_star(self) -> float:
        return self.nu0 - abs(self.nu1)

    @property
    def nu_sup(self) -> float:
        return self.nu0 + abs(self.nu1)

    def nu(self, c: ArrayLike) -> np.ndarray:
        return self.nu0 + self.nu1 * np.clip(c, -1.0, 1.0)

    def eta(self, c: ArrayLike) -> np.ndarray:
        return np.full(np.shape(c), self.eta0, dtype=float)


class PhysParams(BaseModel):
    """Everything the time steppers need besides the grid and the Mach parameter."""

    pressure: PressureLaw = Field(default_factory=PressureLaw)
    potential: PotentialSpec = Field(default_factory=PotentialSpec)
    viscosity: ViscosityLaw = Field(default_factory=ViscosityLaw)
    mobility: float = Field(default=1.0, gt=0)
    rho_floor: float = Field(default=1e-6, gt=0)
    ch_implicit: bool = True
    solver_tol: float = Field(default=1e-10, gt=0)
    solver_maxiter: int = Field(default=500, ge=1)

    model_config = ConfigDict(frozen=True)


# =====================================================================
# Pressure and Helmholtz energy
# =====================================================================


def _density(rho: ArrayLike) -> np.ndarray:
    r = np.asarray(rho, dtype=float)
    if np.any(r < 0):
        raise ParameterError(f"density must be non-negative, got min {float(np.min(r))}")
    return r


def _out(x: np.ndarray, like: ArrayLike):
    return float(x) if np.ndim(like) == 0 else x


def pressure(law: PressureLaw, rho: ArrayLike) -> ArrayLike:
    """``a rho^gamma``."""
    r = _density(rho)
    return _out(law.a * r ** law.gamma, rho)


def dpressure(law: PressureLaw, rho: ArrayLike) -> ArrayLike:
    """``a gamma rho^(gamma-1)``."""
    r = _density(rho)
    return _out(law.a * law.gamma * r ** (law.gamma - 1.0), rho)


def helmholtz_F(law: PressureLaw, rho: ArrayLike) -> ArrayLike:
    """``F_e(rho) = rho f_e(rho)`` with ``f_e(rho) = int_1^rho p_e(z)/z^2 dz``."""
    if law.gamma == 1.0:
        raise ParameterError("gamma = 1 makes the Helmholtz energy logarithmic; not supported")
    r = _density(rho)
    return _out(law.a * r * (r ** (law.gamma - 1.0) - 1.0) / (law.gamma - 1.0), rho)


def rel_pressure_potential(law: PressureLaw, rho: ArrayLike) -> ArrayLike:
    """``H(rho) = F_e(rho) - F_e'(1)(rho - 1) - F_e(1)``; ``F_e'(1) = a`` and ``F_e(1) = 0``."""
    r = _density(rho)
    return _out(np.asarray(helmholtz_F(law, r)) - law.a * (r - 1.0), rho)


# =====================================================================
# Mixing potential
# =====================================================================


class PotentialValues(NamedTuple):
    G: ArrayLike
    dG: ArrayLike
    d2G: ArrayLike


class SplitPotential(NamedTuple):
    G0: ArrayLike
    dG0: ArrayLike
    d2G0: ArrayLike
    G1: ArrayLike
    dG1: ArrayLike
    d2G1: ArrayLike


def _quartic(c: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    return 0.25 * (c * c - 1.0) ** 2, c ** 3 - c, 3.0 * c * c - 1.0


def potential_G(spec: PotentialSpec, c: ArrayLike) -> PotentialValues:
    """``(G, G', G'')`` evaluated pointwise."""
    x = np.asarray(c, dtype=float)
    if spec.kind is PotentialKind.CONVEX:
        d = x - spec.c_shift
        g, dg, d2g = 0.5 * d * d, d, np.ones_like(x)
    else:
        g, dg, d2g = _quartic(x)
        outside = np.abs(x) > spec.c_t
        if np.any(outside):
            edge = np.sign(x) * spec.c_t
            ge, dge, _ = _quartic(edge)
            lip = spec.lipschitz
            d = x - edge
            g = np.where(outside, ge + dge * d + 0.5 * lip * d * d, g)
            dg = np.where(outside, dge + lip * d, dg)
            d2g = np.where(outside, lip, d2g)
    return PotentialValues(_out(g, c), _out(dg, c), _out(d2g, c))


def split_G(spec: PotentialSpec, c: ArrayLike) -> SplitPotential:
    """``G = G0 + G1`` with concave ``G1 = -kappa c^2 / 2`` and convex ``G0``."""
    x = np.asarray(c, dtype=float)
    g, dg, d2g = potential_G(spec, x)
    g1 = -0.5 * spec.kappa * x * x
    dg1 = -spec.kappa * x
    d2g1 = np.full_like(x, -spec.kappa)
    return SplitPotential(
        _out(g - g1, c), _out(dg - dg1, c), _out(d2g - d2g1, c),
        _out(g1, c), _out(dg1, c), _out(d2g1, c),
    )


# =====================================================================
# Assumption verification
# =====================================================================


def _check(name: str, lhs: np.ndarray, rhs: np.ndarray, detail: str) -> AssumptionCheck:
    """Sampled check of ``lhs <= rhs``; margins within round-off of zero pass."""
    diff = rhs - lhs
    margin = float(np.min(diff))
    scale = max(1.0, float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))))
    return AssumptionCheck(name=name, margin=margin, passed=margin >= -ROUNDOFF * scale, detail=detail)


def _growth_constants(spec: PotentialSpec) -> Tuple[float, float, float, float]:
    """``(G_low1, G_low2, G_bar, G''-Lipschitz)`` for the configured potential."""
    if spec.kind is PotentialKind.CONVEX:
        return 1.0, spec.c_shift, max(1.0, abs(spec.c_shift)), 0.0
    return spec.lipschitz, 2.0 * spec.c_t ** 3, spec.lipschitz, 6.0 * spec.c_t


def verify_assumptions(
    law: PressureLaw,
    spec: PotentialSpec,
    rho_range: Tuple[float, float] = (0.0, 10.0),
    c_range: Tuple[float, float] = (-5.0, 5.0),
    samples: int = 4001,
) -> AssumptionReport:
    """Check the pressure-law and potential hypotheses by dense sampling.

    Example:
        >>> verify_assumptions(PressureLaw(gamma=2.0, a=1.0), PotentialSpec()).passed
        True
    """
    if samples < MIN_SAMPLES:
        raise ParameterError(f"need at least {MIN_SAMPLES} samples, got {samples}")
    for label, (lo, hi) in (("rho_range", rho_range), ("c_range", c_range)):
        if not (np.isfinite(lo) and np.isfinite(hi)) or not hi > lo:
            raise ParameterError(f"{label} must be a non-empty finite interval, got ({lo}, {hi})")
    if rho_range[0] < 0:
        raise ParameterError(f"rho_range must lie in [0, inf), got {rho_range}")

    checks = [
        AssumptionCheck(
            name="gamma_above_three_halves",
            margin=law.gamma - GAMMA_MIN,
            passed=law.gamma > GAMMA_MIN,
            detail=f"gamma={law.gamma} must exceed 3/2",
        ),
        AssumptionCheck(
            name="gamma_convergence_threshold",
            margin=law.gamma - spec.gamma_threshold,
            passed=law.gamma >= spec.gamma_threshold,
            informational=True,
            detail=f"low Mach convergence is proved for gamma >= {spec.gamma_threshold:g}",
        ),
    ]

    rho = np.linspace(rho_range[0], rho_range[1], samples)
    p_low1 = law.a * law.gamma
    p_bar = law.a * law.gamma
    dp = np.asarray(dpressure(law, rho))
    pw = rho ** (law.gamma - 1.0)
    p0 = float(pressure(law, 0.0))
    checks.append(AssumptionCheck(name="pressure_vanishes_at_zero", margin=-abs(p0), passed=p0 == 0.0, detail="p_e(0) = 0"))
    checks.append(_check("pressure_derivative_lower", p_low1 * pw, dp, f"{p_low1:g} rho^(gamma-1) <= p_e'"))
    checks.append(_check("pressure_derivative_upper", dp, p_bar * (1.0 + pw), f"p_e' <= {p_bar:g} (1 + rho^(gamma-1))"))

    c = np.linspace(c_range[0], c_range[1], samples)
    g, dg, d2g = potential_G(spec, c)
    g_low1, g_low2, g_bar, g2_lip = _growth_constants(spec)
    dc = np.diff(c)
    checks.append(_check("potential_semiconvex", np.full_like(c, -spec.kappa), d2g, f"G'' >= -{spec.kappa:g}"))
    checks.append(_check("potential_lower_growth", g_low1 * c - g_low2, dg, f"{g_low1:g} c - {g_low2:g} <= G'"))
    checks.append(_check("potential_upper_growth", np.abs(dg), g_bar * (1.0 + np.abs(c)), f"|G'| <= {g_bar:g} (1 + |c|)"))
    checks.append(
        _check("potential_derivative_lipschitz", np.abs(np.diff(dg)) / dc, np.full_like(dc, g_bar), f"Lip(G') <= {g_bar:g}")
    )
    checks.append(
        _check("potential_curvature_lipschitz", np.abs(np.diff(d2g)) / dc, np.full_like(dc, g2_lip), f"Lip(G'') <= {g2_lip:g}")
    )

    split = split_G(spec, c)
    checks.append(_check("convex_part_convex", np.zeros_like(c), split.d2G0, "G0'' >= 0"))
    return AssumptionReport(checks=checks)


def analysis_exponents(gamma: float) -> Tuple[float, float]:
    """``(p, q)`` with ``1/p = 1/gamma - 1/6`` and ``1/q = 1/gamma + 1/6``.

    Example:
        >>> analysis_exponents(12 / 5)
        (4.0, 1.7142857142857142)
    """
    if not GAMMA_MIN < gamma < 6.0:
        raise ParameterError(f"gamma must lie in (3/2, 6) for finite exponents, got {gamma}")
    g = Fraction(gamma).limit_denominator(10 ** 6)
    p = 1 / (1 / g - Fraction(1, 6))
    q = 1 / (1 / g + Fraction(1, 6))
    return float(p), float(q)
