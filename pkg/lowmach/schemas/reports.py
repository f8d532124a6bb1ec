"""
Report schemas for energetics, assumption checks and sweeps.

Every diagnostic the lab produces is one of these models, so the CLI, the
CSV writers and the tests all read the same fields.
"""

from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, computed_field

# =====================================================================
# Constitutive assumptions
# =====================================================================


class AssumptionCheck(BaseModel):
    """One sampled inequality with its worst-case margin."""

    name: str
    margin: float
    passed: bool
    informational: bool = False
    detail: str = ""

    model_config = ConfigDict(frozen=True)


class AssumptionReport(BaseModel):
    """Outcome of the pressure-law and potential checks."""

    checks: List[AssumptionCheck] = Field(default_factory=list)

    model_config = ConfigDict(frozen=True)

    @computed_field
    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.informational)

    def failures(self) -> List[AssumptionCheck]:
        return [c for c in self.checks if not c.passed and not c.informational]

    def get(self, name: str) -> AssumptionCheck:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def summary_lines(self) -> List[str]:
        lines = []
        for c in self.checks:
            status = "ok" if c.passed else ("note" if c.informational else "FAIL")
            lines.append(f"{status:>4}  {c.name:<34} margin={c.margin:+.3e}  {c.detail}")
        return lines


# =====================================================================
# Energies
# =====================================================================


class EnergyBreakdown(BaseModel):
    """Energy components of a compressible state.

    ``dissipation_rate`` includes the bulk-viscosity term;
    ``dissipation_rate_relative`` keeps only ``2 nu |Dv|^2 + |grad mu|^2``.
    """

    kinetic: float
    pressure_part: float
    gradient_part: float
    potential_part: float
    dissipation_rate: float = 0.0
    dissipation_rate_relative: float = 0.0

    model_config = ConfigDict(frozen=True)

    @computed_field
    @property
    def total(self) -> float:
        return self.kinetic + self.pressure_part + self.gradient_part + self.potential_part


class RelativeEnergyValue(BaseModel):
    """Relative energy of a compressible state with respect to a model-H state."""

    kinetic_rel: float
    pressure_rel: float
    gradient_rel: float
    potential_rel: float
    convexify: float

    model_config = ConfigDict(frozen=True)

    @computed_field
    @property
    def value_E(self) -> float:
        return self.kinetic_rel + self.pressure_rel + self.gradient_rel + self.potential_rel

    @computed_field
    @property
    def value_Etilde(self) -> float:
        return self.value_E + self.convexify


# =====================================================================
# Checks over trajectories
# =====================================================================


class InequalityReport(BaseModel):
    """Worst violation of ``E(t) + D(t) - D(s) <= E(s)`` over sample pairs."""

    passed: bool
    worst_violation: float
    worst_pair: Optional[Tuple[int, int]] = None
    worst_times: Optional[Tuple[float, float]] = None
    tolerance: float
    samples: int

    model_config = ConfigDict(frozen=True)


class UniformEstimates(BaseModel):
    """Bounds over one compressible trajectory, each uniform in the Mach parameter in theory."""

    eps: float
    sup_kinetic: float
    sup_interior_density: float
    sup_exterior_density: float
    sup_grad_c: float
    int_grad_mu: float
    int_grad_v: float
    sup_c_h1: float
    int_mu_h1: float
    mean_identity_residual: float

    model_config = ConfigDict(frozen=True)

    def bounded_quantities(self) -> Dict[str, float]:
        """Quantities compared across a sweep for uniform boundedness."""
        return {
            "sup_kinetic": self.sup_kinetic,
            "sup_interior_density": self.sup_interior_density,
            "sup_grad_c": self.sup_grad_c,
            "int_grad_mu": self.int_grad_mu,
            "int_grad_v": self.int_grad_v,
        }


class UniformBoundCheck(BaseModel):
    """Sweep-level verdict on the uniform estimates."""

    ratios: Dict[str, float]
    spreads: Dict[str, float] = Field(default_factory=dict)
    factor: float
    exterior_exponent: Optional[float] = None
    exterior_vacuous: bool = False
    exponent_threshold: float = 1.8
    passed: bool

    model_config = ConfigDict(frozen=True)


class ChainRuleResidual(BaseModel):
    """Residual of ``d/dt int rho c^2/2 + int grad mu . grad c`` with its resolution."""

    residual: float
    delta: float
    h: float

    model_config = ConfigDict(frozen=True)


class NormDistances(BaseModel):
    """Distances between a compressible state and the limit state."""

    l1_rho: float
    l2_v: float
    h1_c: float

    model_config = ConfigDict(frozen=True)


# =====================================================================
# Sweep
# =====================================================================


class EpsilonRecord(BaseModel):
    """Result of one compressible run of a sweep."""

    eps: float
    ok: bool = True
    error: Optional[str] = None
    sup_etilde: Optional[float] = None
    etilde_initial: Optional[float] = None
    final_distances: Optional[NormDistances] = None
    uniform: Optional[UniformEstimates] = None
    energy_violation: Optional[float] = None
    relative_dissipation_integral: Optional[float] = None
    gronwall_constant: Optional[float] = None
    initial_data_bound: Optional[float] = None
    diagnostics_file: Optional[str] = None

    model_config = ConfigDict(frozen=True)


class SweepResult(BaseModel):
    """All per-epsilon records, in the order of the configured epsilons."""

    records: List[EpsilonRecord]
    fitted_order: float
    uniform_check: Optional[UniformBoundCheck] = None
    reference: Dict[str, float] = Field(default_factory=dict)

    model_config = ConfigDict(frozen=True)

    def survivors(self) -> List[EpsilonRecord]:
        return [r for r in self.records if r.ok]
