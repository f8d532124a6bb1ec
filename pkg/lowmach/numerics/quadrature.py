"""Midpoint quadrature, discrete norms and inner products."""

from typing import Union

import numpy as np

from ..exceptions import GridError, ParameterError
from .grid import ScalarField, VectorField
from .operators import gradient

Field = Union[ScalarField, VectorField]


def integrate(f: ScalarField) -> float:
    """Sum of cell values times cell area."""
    return float(np.sum(f.values) * f.grid.cell_volume)


def inner(a: VectorField, b: VectorField) -> float:
    """Discrete L2 inner product of two vector fields at the same location.

    Staggered fields use face quadrature, with wall faces weighted by one half.
    """
    if a.grid != b.grid or a.staggered != b.staggered:
        raise GridError("inner product of fields on different grids or locations")
    grid = a.grid
    total = 0.0
    for k, (x, y) in enumerate(zip(a.components, b.components)):
        if a.staggered:
            total += float(np.sum(grid.face_weights(k) * x * y))
        else:
            total += float(np.sum(x * y))
    return total * grid.cell_volume


def _parse_exponent(p) -> float:
    if isinstance(p, str):
        p = p.strip().lower()
        if p in ("inf", "infinity", "max"):
            return np.inf
        try:
            p = float(p)
        except ValueError as e:
            raise ParameterError(f"Unsupported norm exponent: {p}") from e
    if p in (1, 2) or p == np.inf:
        return float(p)
    raise ParameterError(f"Unsupported norm exponent: {p} (use 1, 2 or inf)")


def lp_norm(f: Field, p=2) -> float:
    """``L^p`` norm for ``p`` in ``{1, 2, inf}``.

    Vector fields use the pointwise Euclidean magnitude when cell-centred
    and component-wise face quadrature when staggered.
    """
    p = _parse_exponent(p)
    if isinstance(f, ScalarField):
        a = np.abs(f.values)
        if p == np.inf:
            return float(np.max(a))
        if p == 1:
            return float(np.sum(a) * f.grid.cell_volume)
        return float(np.sqrt(np.sum(a * a) * f.grid.cell_volume))

    if f.staggered:
        if p == 2:
            return float(np.sqrt(inner(f, f)))
        if p == np.inf:
            return float(max(np.max(np.abs(c)) for c in f.components))
        return float(
            sum(np.sum(f.grid.face_weights(k) * np.abs(c)) for k, c in enumerate(f.components)) * f.grid.cell_volume
        )

    magnitude = np.sqrt(sum(c * c for c in f.components))
    if p == np.inf:
        return float(np.max(magnitude))
    if p == 1:
        return float(np.sum(magnitude) * f.grid.cell_volume)
    return float(np.sqrt(np.sum(magnitude * magnitude) * f.grid.cell_volume))


def h1_seminorm(f: ScalarField) -> float:
    """``||grad f||_{L2}`` with the face gradient."""
    return lp_norm(gradient(f), 2)


def h1_norm(f: ScalarField) -> float:
    return float(np.sqrt(lp_norm(f, 2) ** 2 + h1_seminorm(f) ** 2))
