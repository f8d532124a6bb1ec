"""Immutable state records of the two solvers."""

from dataclasses import dataclass, replace

import numpy as np

from ..exceptions import GridError, ParameterError
from ..numerics.grid import Grid, ScalarField, VectorField


def _same_grid(grid: Grid, *fields) -> None:
    for f in fields:
        if f.grid != grid:
            raise GridError("state fields live on different grids")
        if isinstance(f, VectorField) and f.staggered:
            raise GridError("state vectors must be cell-centred")


@dataclass(frozen=True)
class CompressibleState:
    """``(rho, rho v, c, mu)`` of the scaled compressible system at time ``t``."""

    rho: ScalarField
    mom: VectorField
    c: ScalarField
    mu: ScalarField
    eps: float
    t: float = 0.0

    def __post_init__(self) -> None:
        _same_grid(self.rho.grid, self.mom, self.c, self.mu)
        if not self.eps > 0:
            raise ParameterError(f"Mach parameter eps must be positive, got {self.eps}")

    @property
    def grid(self) -> Grid:
        return self.rho.grid

    @property
    def velocity(self) -> VectorField:
        return self.mom.with_components(m / self.rho.values for m in self.mom.components)

    def replace(self, **changes) -> "CompressibleState":
        return replace(self, **changes)

    @classmethod
    def from_velocity(cls, rho: ScalarField, v: VectorField, c: ScalarField, mu: ScalarField, eps: float, t: float = 0.0):
        return cls(rho, v.scaled(rho), c, mu, eps, t)


@dataclass(frozen=True)
class IncompressibleState:
    """``(v, p, c, mu)`` of model H at time ``t``; ``p`` has zero mean."""

    v: VectorField
    p: ScalarField
    c: ScalarField
    mu: ScalarField
    t: float = 0.0

    def __post_init__(self) -> None:
        _same_grid(self.c.grid, self.v, self.p, self.mu)

    @property
    def grid(self) -> Grid:
        return self.c.grid

    def replace(self, **changes) -> "IncompressibleState":
        return replace(self, **changes)


def lerp_states(a: IncompressibleState, b: IncompressibleState, t: float) -> IncompressibleState:
    """Linear interpolation in time between two model-H samples."""
    if b.t == a.t:
        return a.replace(t=t)
    w = (t - a.t) / (b.t - a.t)

    def mix(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return (1.0 - w) * x + w * y

    return IncompressibleState(
        v=a.v.with_components(mix(x, y) for x, y in zip(a.v.components, b.v.components)),
        p=a.p.with_values(mix(a.p.values, b.p.values)),
        c=a.c.with_values(mix(a.c.values, b.c.values)),
        mu=a.mu.with_values(mix(a.mu.values, b.mu.values)),
        t=t,
    )
