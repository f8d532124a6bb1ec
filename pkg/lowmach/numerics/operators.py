"""
Second-order discrete differential operators on a :class:`~lowmach.numerics.grid.Grid`.

Scalars (c, mu, pressure) use homogeneous Neumann conditions realised by
mirror ghost cells; velocities use no-slip conditions realised by odd ghost
cells; periodic grids wrap. The scalar gradient is face-staggered, which
makes ``laplacian == divergence(gradient(.))`` an identity of the stencils
and gives the compact three-point Laplacian. Cell-centred derivatives of
velocities are centred differences; the cell divergence equals the face
divergence of :func:`face_average` and the trace of :func:`velocity_jacobian`.
"""

from typing import Tuple

import numpy as np

from ..exceptions import GridError
from .grid import Grid, ScalarField, TensorField, VectorField

EVEN = "even"
ODD = "odd"


def pad_ghosts(grid: Grid, a: np.ndarray, axis: int, parity: str) -> np.ndarray:
    """Add one ghost layer on both sides of ``axis``."""
    width = [(0, 0), (0, 0)]
    width[axis] = (1, 1)
    if grid.periodic:
        return np.pad(a, width, mode="wrap")
    padded = np.pad(a, width, mode="edge")
    if parity == ODD:
        lo = [slice(None), slice(None)]
        hi = [slice(None), slice(None)]
        lo[axis] = 0
        hi[axis] = -1
        padded[tuple(lo)] *= -1.0
        padded[tuple(hi)] *= -1.0
    return padded


def axis_slice(axis: int, start: int, stop) -> Tuple[slice, slice]:
    index = [slice(None), slice(None)]
    index[axis] = slice(start, stop)
    return tuple(index)


def centered_difference(grid: Grid, a: np.ndarray, component: int, parity: str) -> np.ndarray:
    """Centred first derivative along direction ``component`` with the given ghost parity."""
    ax = grid.axis(component)
    h = grid.spacing[component]
    p = pad_ghosts(grid, a, ax, parity)
    return (p[axis_slice(ax, 2, None)] - p[axis_slice(ax, 0, -2)]) / (2.0 * h)


def gradient(f: ScalarField) -> VectorField:
    """Compact face gradient with zero normal derivative on wall faces."""
    grid = f.grid
    comps = []
    for k in range(grid.dim):
        ax = grid.axis(k)
        h = grid.spacing[k]
        if grid.periodic:
            comps.append((f.values - np.roll(f.values, 1, axis=ax)) / h)
        else:
            d = np.diff(f.values, axis=ax) / h
            width = [(0, 0), (0, 0)]
            width[ax] = (1, 1)
            comps.append(np.pad(d, width, mode="constant"))
    return VectorField(grid, tuple(comps), staggered=True)


def face_average(v: VectorField) -> VectorField:
    """Interpolate a cell vector to normal faces; wall faces carry zero normal velocity."""
    if v.staggered:
        return v
    grid = v.grid
    comps = []
    for k, c in enumerate(v.components):
        ax = grid.axis(k)
        if grid.periodic:
            comps.append(0.5 * (c + np.roll(c, 1, axis=ax)))
        else:
            mid = 0.5 * (c[axis_slice(ax, 0, -1)] + c[axis_slice(ax, 1, None)])
            width = [(0, 0), (0, 0)]
            width[ax] = (1, 1)
            comps.append(np.pad(mid, width, mode="constant"))
    return VectorField(grid, tuple(comps), staggered=True)


def cell_average(w: VectorField) -> VectorField:
    """Average a staggered vector back to cell centres."""
    if not w.staggered:
        return w
    grid = w.grid
    comps = []
    for k, c in enumerate(w.components):
        ax = grid.axis(k)
        if grid.periodic:
            comps.append(0.5 * (c + np.roll(c, -1, axis=ax)))
        else:
            comps.append(0.5 * (c[axis_slice(ax, 0, -1)] + c[axis_slice(ax, 1, None)]))
    return VectorField(grid, tuple(comps), staggered=False)


def divergence(w: VectorField) -> ScalarField:
    """Discrete divergence; cell vectors are first averaged to faces."""
    grid = w.grid
    if not w.staggered:
        w = face_average(w)
    total = np.zeros(grid.shape)
    for k, c in enumerate(w.components):
        ax = grid.axis(k)
        h = grid.spacing[k]
        if grid.periodic:
            total += (np.roll(c, -1, axis=ax) - c) / h
        else:
            total += np.diff(c, axis=ax) / h
    return ScalarField(grid, total)


def laplacian(f: ScalarField) -> ScalarField:
    """Compact (2d+1)-point Laplacian with Neumann or periodic conditions."""
    return divergence(gradient(f))


def cell_gradient(f: ScalarField) -> VectorField:
    """Cell-centred gradient: centred differences with mirror ghosts."""
    return cell_average(gradient(f))


def velocity_jacobian(v: VectorField) -> TensorField:
    """``J[i][j] = d v_i / d x_j`` by centred differences with no-slip ghosts."""
    if v.staggered:
        raise GridError("velocity_jacobian needs a cell-centred field")
    grid = v.grid
    d = grid.dim
    return TensorField(
        grid,
        tuple(tuple(centered_difference(grid, v.components[i], j, ODD) for j in range(d)) for i in range(d)),
    )


def sym_grad_traceless(v: VectorField) -> TensorField:
    """``1/2 (grad v + grad v^T) - (1/d) div v I``."""
    jac = velocity_jacobian(v)
    d = v.grid.dim
    trace = jac.trace().values
    rows = []
    for i in range(d):
        row = []
        for j in range(d):
            entry = 0.5 * (jac.components[i][j] + jac.components[j][i])
            if i == j:
                entry = entry - trace / d
            row.append(entry)
        rows.append(tuple(row))
    return TensorField(v.grid, tuple(rows))


def tensor_divergence(t: TensorField) -> VectorField:
    """Row-wise divergence ``sum_j d T_ij / d x_j`` with mirror ghosts on the tensor."""
    grid = t.grid
    d = grid.dim
    return VectorField(
        grid,
        tuple(sum(centered_difference(grid, t.components[i][j], j, EVEN) for j in range(d)) for i in range(d)),
    )


def outer_traceless_capillary(g: VectorField) -> TensorField:
    """``g (x) g - |g|^2 / 2 I`` for a cell-centred vector ``g``."""
    if g.staggered:
        raise GridError("capillary tensor needs a cell-centred gradient")
    d = g.grid.dim
    half_sq = 0.5 * sum(c ** 2 for c in g.components)
    return TensorField(
        g.grid,
        tuple(
            tuple(g.components[i] * g.components[j] - (half_sq if i == j else 0.0) for j in range(d))
            for i in range(d)
        ),
    )
