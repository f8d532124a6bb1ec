"""
Simulation configuration schema.

This is the single description of a run: the grid, the physical parameters,
time stepping, the Mach-parameter sweep, initial data and outputs. Files are
parsed by :mod:`lowmach.harness.config_loader`; everything here is
validation.
"""

import logging
import warnings
from pathlib import Path
from typing import List, Literal, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..exceptions import ConfigError
from ..numerics.grid import Grid, make_grid
from ..physics.constitutive import (
    PhysParams,
    PotentialKind,
    PotentialSpec,
    PressureLaw,
    ViscosityLaw,
)

logger = logging.getLogger(__name__)

_FROZEN = ConfigDict(extra="forbid", frozen=True)

# =====================================================================
# Blocks
# =====================================================================


class GridBlock(BaseModel):
    """Grid block."""

    nx: int = Field(default=128, ge=4)
    ny: int = Field(default=1, ge=1)
    lx: float = Field(default=8.0, gt=0)
    ly: float = Field(default=1.0, gt=0)
    bc_mode: Literal["walls", "periodic"] = "walls"

    model_config = _FROZEN

    def build(self) -> Grid:
        return make_grid(self.nx, self.ny, self.lx, self.ly, self.bc_mode)


class PhysicsBlock(BaseModel):
    """Physics block: pressure law, potential, viscosities, mobility."""

    gamma: float = Field(default=2.4, gt=1.5)
    a: float = Field(default=1.0, gt=0)
    potential: PotentialKind = PotentialKind.DOUBLE_WELL
    kappa: float = Field(default=1.0, ge=0)
    c_t: float = Field(default=2.0, gt=1)
    c_shift: float = 0.0
    nu0: float = Field(default=0.1, gt=0)
    nu1: float = 0.0
    eta0: float = Field(default=0.0, ge=0)
    mobility: float = Field(default=1.0, gt=0)
    rho_floor: float = Field(default=1e-6, gt=0)
    ch_implicit: bool = True

    model_config = _FROZEN

    @model_validator(mode="after")
    def _check_viscosity(self) -> "PhysicsBlock":
        if not self.nu0 > abs(self.nu1):
            raise ValueError(f"nu0 must exceed |nu1| (nu0={self.nu0}, nu1={self.nu1})")
        return self


class TimeBlock(BaseModel):
    """Time block."""

    t_end: float = Field(default=0.5, gt=0)
    cfl: float = Field(default=0.4, gt=0, le=1)
    sample_every: float = Field(default=0.025, gt=0)
    solver_tol: float = Field(default=1e-10, gt=0, lt=1)
    solver_maxiter: int = Field(default=500, ge=1)
    reference_dt_factor: float = Field(default=0.5, gt=0, le=1)

    model_config = _FROZEN

    @model_validator(mode="after")
    def _check_sampling(self) -> "TimeBlock":
        if self.sample_every > self.t_end:
            raise ValueError(f"sample_every={self.sample_every} exceeds t_end={self.t_end}")
        return self


class SweepBlock(BaseModel):
    """Sweep block."""

    epsilons: List[float] = Field(default_factory=lambda: [0.4, 0.2, 0.1, 0.05])
    fit_threshold: float = 0.8
    energy_tol: float = Field(default=1e-6, ge=0)
    uniform_factor: float = Field(default=3.0, gt=1)
    exterior_exponent_threshold: float = 1.8

    model_config = _FROZEN

    @field_validator("epsilons")
    @classmethod
    def validate_epsilons(cls, v: List[float]) -> List[float]:
        """Epsilons: at least three, positive, strictly decreasing."""
        if len(v) < 3:
            raise ValueError(f"epsilons needs at least 3 entries, got {len(v)}")
        if any(e <= 0 for e in v):
            raise ValueError("epsilons must be strictly positive")
        if any(b >= a for a, b in zip(v, v[1:])):
            raise ValueError("epsilons must be strictly decreasing")
        return v


class ICBlock(BaseModel):
    """Initial data block."""

    profile: Literal["tanh_stripe", "tanh_disk", "cosine", "constant"] = "tanh_stripe"
    amplitude: float = Field(default=0.8, gt=-1, lt=1)
    width: float = Field(default=1.0, gt=0)
    stripe_fraction: float = Field(default=0.5, gt=0, lt=1)
    density_profile: Literal["balanced", "cosine", "sine", "zero"] = "balanced"
    density_amplitude: float = 1.0
    velocity_amplitude: float = 0.0

    model_config = _FROZEN


class OutputBlock(BaseModel):
    """Output block."""

    directory: str = "output"
    emit_fields: bool = False
    emit_plots: bool = True

    model_config = _FROZEN


# =====================================================================
# Top level
# =====================================================================


class SimulationConfig(BaseModel):
    """A complete, validated run configuration."""

    grid: GridBlock = Field(default_factory=GridBlock)
    physics: PhysicsBlock = Field(default_factory=PhysicsBlock)
    time: TimeBlock = Field(default_factory=TimeBlock)
    sweep: SweepBlock = Field(default_factory=SweepBlock)
    ic: ICBlock = Field(default_factory=ICBlock)
    output: OutputBlock = Field(default_factory=OutputBlock)

    model_config = _FROZEN

    @model_validator(mode="after")
    def _warn_gamma(self) -> "SimulationConfig":
        threshold = self.potential_spec().gamma_threshold
        if self.physics.gamma < threshold:
            message = (
                f"gamma={self.physics.gamma} is below {threshold:g}; "
                "the low Mach convergence result does not cover this case"
            )
            logger.warning(message)
            warnings.warn(message, UserWarning, stacklevel=2)
        return self

    def pressure_law(self) -> PressureLaw:
        return PressureLaw(gamma=self.physics.gamma, a=self.physics.a)

    def potential_spec(self) -> PotentialSpec:
        p = self.physics
        return PotentialSpec(kind=p.potential, kappa=p.kappa, c_t=p.c_t, c_shift=p.c_shift)

    def phys_params(self) -> PhysParams:
        p = self.physics
        return PhysParams(
            pressure=self.pressure_law(),
            potential=self.potential_spec(),
            viscosity=ViscosityLaw(nu0=p.nu0, nu1=p.nu1, eta0=p.eta0),
            mobility=p.mobility,
            rho_floor=p.rho_floor,
            ch_implicit=p.ch_implicit,
            solver_tol=self.time.solver_tol,
            solver_maxiter=self.time.solver_maxiter,
        )

    def to_file(self, path: Union[str, Path]) -> Path:
        """Write the normalized configuration (YAML for ``.yaml``/``.yml``, else key = value)."""
        path = Path(path)
        data = self.model_dump(mode="json")
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", newline="\n") as f:
                if path.suffix in (".yaml", ".yml"):
                    yaml.safe_dump(data, f, default_flow_style=False, sort_keys=False)
                else:
                    for section, block in data.items():
                        for key, value in block.items():
                            if isinstance(value, list):
                                value = ", ".join(repr(x) for x in value)
                            elif isinstance(value, bool):
                                value = "true" if value else "false"
                            f.write(f"{section}.{key} = {value}\n")
        except OSError as e:
            raise ConfigError(f"Failed to save config to {path}: {e}") from e
        return path
