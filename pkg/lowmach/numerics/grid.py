"""
Structured-grid field containers.

All fields are cell-centred on a rectangle ``[0, lx] x [0, ly]`` split into
``nx x ny`` cells. Arrays are stored with shape ``(ny, nx)`` so that numpy
axis 1 runs along x and axis 0 along y; ``ny == 1`` selects 1D mode.

A :class:`VectorField` is either cell-centred (velocities, momenta, forces)
or face-staggered (``staggered=True``): component ``k`` then lives on the
faces normal to direction ``k``. In walls mode a staggered component has one
more entry than cells along its direction (both boundary faces are stored);
in periodic mode face ``i`` is the left face of cell ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Tuple

import numpy as np

from ..exceptions import GridError

MIN_CELLS = 4


class BCMode(str, Enum):
    """Boundary-condition families for a grid."""
    WALLS = "walls"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class Grid:
    """Rectangular cell-centred grid."""

    nx: int
    ny: int
    lx: float
    ly: float
    bc_mode: BCMode = BCMode.WALLS

    def __post_init__(self) -> None:
        object.__setattr__(self, "bc_mode", BCMode(self.bc_mode))
        if self.nx < MIN_CELLS:
            raise GridError(f"nx must be at least {MIN_CELLS} (stencils need 3 interior points), got {self.nx}")
        if self.ny < 1:
            raise GridError(f"ny must be at least 1, got {self.ny}")
        if not self.lx > 0:
            raise GridError(f"lx must be positive, got {self.lx}")
        if not self.ly > 0:
            raise GridError(f"ly must be positive, got {self.ly}")

    @property
    def dim(self) -> int:
        return 1 if self.ny == 1 else 2

    @property
    def hx(self) -> float:
        return self.lx / self.nx

    @property
    def hy(self) -> float:
        return self.ly / self.ny

    @property
    def spacing(self) -> Tuple[float, ...]:
        """Cell size per direction, indexed by vector component."""
        return (self.hx,) if self.dim == 1 else (self.hx, self.hy)

    @property
    def h_min(self) -> float:
        return min(self.spacing)

    @property
    def cell_volume(self) -> float:
        return self.hx * self.hy

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def size(self) -> int:
        return self.nx * self.ny

    @property
    def periodic(self) -> bool:
        return self.bc_mode is BCMode.PERIODIC

    @property
    def volume(self) -> float:
        return self.lx * self.ly

    @staticmethod
    def axis(component: int) -> int:
        """Numpy axis that vector component ``component`` differentiates along."""
        return 1 - component

    def face_shape(self, component: int) -> Tuple[int, int]:
        """Array shape of staggered component ``component``."""
        if self.periodic:
            return self.shape
        if component == 0:
            return (self.ny, self.nx + 1)
        return (self.ny + 1, self.nx)

    def face_weights(self, component: int) -> np.ndarray:
        """Quadrature weights (area fractions) of staggered faces; boundary faces count half."""
        weights = np.ones(self.face_shape(component))
        if not self.periodic:
            ax = self.axis(component)
            index = [slice(None), slice(None)]
            index[ax] = 0
            weights[tuple(index)] = 0.5
            index[ax] = -1
            weights[tuple(index)] = 0.5
        return weights

    def cell_centers(self) -> Tuple[np.ndarray, np.ndarray]:
        """Cell-centre coordinates ``(X, Y)`` as arrays of shape ``(ny, nx)``."""
        x = (np.arange(self.nx) + 0.5) * self.hx
        y = (np.arange(self.ny) + 0.5) * self.hy
        return np.meshgrid(x, y)

    def header(self) -> dict:
        return {
            "nx": self.nx,
            "ny": self.ny,
            "lx": self.lx,
            "ly": self.ly,
            "bc_mode": self.bc_mode.value,
        }


def make_grid(nx: int, ny: int, lx: float, ly: float, bc_mode: BCMode | str = BCMode.WALLS) -> Grid:
    """Build a validated grid.

    Example:
        >>> make_grid(64, 64, 1.0, 1.0, "walls").hx
        0.015625
    """
    try:
        mode = BCMode(bc_mode)
    except ValueError as e:
        raise GridError(f"Unknown bc_mode: {bc_mode}") from e
    return Grid(int(nx), int(ny), float(lx), float(ly), mode)


def _check_array(grid: Grid, values: np.ndarray, shape: Tuple[int, int], what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != shape:
        if arr.size == shape[0] * shape[1]:
            arr = arr.reshape(shape)
        else:
            raise GridError(f"{what} has shape {arr.shape}, grid expects {shape}")
    if not np.all(np.isfinite(arr)):
        raise GridError(f"{what} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class ScalarField:
    """One real per cell."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _check_array(self.grid, self.values, self.grid.shape, "ScalarField"))

    @classmethod
    def zeros(cls, grid: Grid) -> "ScalarField":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "ScalarField":
        return cls(grid, np.full(grid.shape, float(value)))

    @classmethod
    def from_function(cls, grid: Grid, func: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> "ScalarField":
        """Sample ``func(x, y)`` at cell centres."""
        x, y = grid.cell_centers()
        return cls(grid, np.broadcast_to(func(x, y), grid.shape).astype(float))

    @property
    def flat(self) -> np.ndarray:
        """Row-major view of the values."""
        return self.values.reshape(-1)

    def with_values(self, values: np.ndarray) -> "ScalarField":
        return ScalarField(self.grid, values)

    def __add__(self, other: "ScalarField | float") -> "ScalarField":
        return self.with_values(self.values + _raw(other))

    def __sub__(self, other: "ScalarField | float") -> "ScalarField":
        return self.with_values(self.values - _raw(other))

    def __mul__(self, other: "ScalarField | float") -> "ScalarField":
        return self.with_values(self.values * _raw(other))

    __rmul__ = __mul__


def _raw(other):
    return other.values if isinstance(other, ScalarField) else other


@dataclass(frozen=True)
class VectorField:
    """``d`` real arrays, cell-centred or face-staggered."""

    grid: Grid
    components: Tuple[np.ndarray, ...]
    staggered: bool = False

    def __post_init__(self) -> None:
        if len(self.components) != self.grid.dim:
            raise GridError(f"VectorField needs {self.grid.dim} components, got {len(self.components)}")
        checked = []
        for k, comp in enumerate(self.components):
            shape = self.grid.face_shape(k) if self.staggered else self.grid.shape
            checked.append(_check_array(self.grid, comp, shape, f"VectorField component {k}"))
        object.__setattr__(self, "components", tuple(checked))

    @classmethod
    def zeros(cls, grid: Grid, staggered: bool = False) -> "VectorField":
        if staggered:
            return cls(grid, tuple(np.zeros(grid.face_shape(k)) for k in range(grid.dim)), True)
        return cls(grid, tuple(np.zeros(grid.shape) for _ in range(grid.dim)))

    @classmethod
    def constant(cls, grid: Grid, value: Tuple[float, ...]) -> "VectorField":
        return cls(grid, tuple(np.full(grid.shape, float(value[k])) for k in range(grid.dim)))

    @property
    def dim(self) -> int:
        return self.grid.dim

    def with_components(self, components) -> "VectorField":
        return VectorField(self.grid, tuple(components), self.staggered)

    def scaled(self, factor: "ScalarField | float") -> "VectorField":
        """Multiply every component by a scalar or a cell field."""
        if self.staggered and isinstance(factor, ScalarField):
            raise GridError("cannot scale a staggered field by a cell field")
        f = _raw(factor)
        return self.with_components(comp * f for comp in self.components)

    def __add__(self, other: "VectorField") -> "VectorField":
        _match(self, other)
        return self.with_components(a + b for a, b in zip(self.components, other.components))

    def __sub__(self, other: "VectorField") -> "VectorField":
        _match(self, other)
        return self.with_components(a - b for a, b in zip(self.components, other.components))

    def magnitude_squared(self) -> ScalarField:
        if self.staggered:
            raise GridError("pointwise magnitude needs a cell-centred field")
        return ScalarField(self.grid, sum(comp ** 2 for comp in self.components))


def _match(a: VectorField, b: VectorField) -> None:
    if a.grid != b.grid or a.staggered != b.staggered:
        raise GridError("vector fields live on different grids or locations")


@dataclass(frozen=True)
class TensorField:
    """``d x d`` cell-centred real arrays; ``components[i][j]``."""

    grid: Grid
    components: Tuple[Tuple[np.ndarray, ...], ...] = field(default=())

    def __post_init__(self) -> None:
        d = self.grid.dim
        if len(self.components) != d or any(len(row) != d for row in self.components):
            raise GridError(f"TensorField needs {d}x{d} components")
        rows = tuple(
            tuple(_check_array(self.grid, c, self.grid.shape, f"TensorField entry ({i},{j})") for j, c in enumerate(row))
            for i, row in enumerate(self.components)
        )
        object.__setattr__(self, "components", rows)

    def trace(self) -> ScalarField:
        return ScalarField(self.grid, sum(self.components[i][i] for i in range(self.grid.dim)))

    def contract(self, other: "TensorField") -> ScalarField:
        """Pointwise double contraction ``A : B``."""
        d = self.grid.dim
        return ScalarField(
            self.grid,
            sum(self.components[i][j] * other.components[i][j] for i in range(d) for j in range(d)),
        )
