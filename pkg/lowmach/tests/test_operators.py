"""Tests for the discrete differential operators."""

import numpy as np
import pytest

from lowmach.exceptions import GridError
from lowmach.numerics.grid import ScalarField, VectorField, make_grid
from lowmach.numerics.operators import (
    cell_gradient,
    divergence,
    face_average,
    gradient,
    laplacian,
    sym_grad_traceless,
    tensor_divergence,
    velocity_jacobian,
)
from lowmach.numerics.quadrature import inner, integrate
from lowmach.tests.conftest import smooth_profile


def test_laplacian_of_constant_is_zero(any_grid_2d):
    f = ScalarField.constant(any_grid_2d, 3.7)
    assert np.max(np.abs(laplacian(f).values)) == 0.0


def test_periodic_cosine_is_eigenfunction():
    """cos(2 pi x) has the exact symbol -(2 - 2 cos(2 pi h)) / h^2."""
    grid = make_grid(64, 1, 1.0, 1.0, "periodic")
    h = grid.hx
    f = ScalarField.from_function(grid, lambda x, y: np.cos(2 * np.pi * x))
    expected = -(2.0 - 2.0 * np.cos(2 * np.pi * h)) / h ** 2
    assert laplacian(f).values == pytest.approx(expected * f.values, abs=1e-9)


def test_constant_velocity_has_no_deformation():
    grid = make_grid(16, 16, 1.0, 1.0, "periodic")
    v = VectorField.constant(grid, (0.3, -1.2))
    d = sym_grad_traceless(v)
    assert all(np.max(np.abs(c)) < 1e-12 for row in d.components for c in row)
    assert np.max(np.abs(divergence(v).values)) < 1e-12


def test_sym_grad_traceless_is_traceless_and_symmetric(any_grid_2d, rng):
    v = VectorField(any_grid_2d, tuple(rng.standard_normal(any_grid_2d.shape) for _ in range(2)))
    d = sym_grad_traceless(v)
    assert np.max(np.abs(d.trace().values)) < 1e-10
    assert np.array_equal(d.components[0][1], d.components[1][0])


def test_laplacian_is_divergence_of_gradient(any_grid_2d, rng):
    f = ScalarField(any_grid_2d, rng.standard_normal(any_grid_2d.shape))
    direct = laplacian(f).values
    composed = divergence(gradient(f)).values
    assert np.max(np.abs(direct - composed)) <= 1e-12 * np.max(np.abs(direct))


@pytest.mark.parametrize("n", [32, 64, 128])
def test_summation_by_parts(n, rng):
    """integrate(f div w) + <grad f, w> = 0 with w normal to walls vanishing."""
    grid = make_grid(n, n, 1.0, 1.0, "walls")
    f = ScalarField(grid, rng.standard_normal(grid.shape))
    g = ScalarField(grid, rng.standard_normal(grid.shape))
    w = gradient(g)
    lhs = integrate(f * divergence(w))
    rhs = inner(gradient(f), w)
    assert abs(lhs + rhs) <= 1e-12 * max(abs(lhs), abs(rhs), 1.0) * n


def test_periodic_summation_by_parts(rng):
    grid = make_grid(32, 32, 1.0, 1.0, "periodic")
    f = ScalarField(grid, rng.standard_normal(grid.shape))
    w = VectorField(grid, tuple(rng.standard_normal(grid.shape) for _ in range(2)), staggered=True)
    lhs = integrate(f * divergence(w))
    rhs = inner(gradient(f), w)
    assert abs(lhs + rhs) <= 1e-11 * max(abs(lhs), 1.0)


def test_operators_are_linear(any_grid_2d, rng):
    f = ScalarField(any_grid_2d, rng.standard_normal(any_grid_2d.shape))
    g = ScalarField(any_grid_2d, rng.standard_normal(any_grid_2d.shape))
    a, b = 1.7, -0.4
    combined = laplacian(a * f + b * g).values
    separate = a * laplacian(f).values + b * laplacian(g).values
    assert np.max(np.abs(combined - separate)) < 1e-9


def test_cell_divergence_matches_jacobian_trace(any_grid_2d, rng):
    v = VectorField(any_grid_2d, tuple(rng.standard_normal(any_grid_2d.shape) for _ in range(2)))
    trace = velocity_jacobian(v).trace().values
    assert np.max(np.abs(divergence(v).values - trace)) < 1e-10


def test_tensor_divergence_is_adjoint_of_jacobian(any_grid_2d, rng):
    """sum T : grad v = - sum div(T) . v cell by cell."""
    grid = any_grid_2d
    v = VectorField(grid, tuple(rng.standard_normal(grid.shape) for _ in range(2)))
    t = sym_grad_traceless(VectorField(grid, tuple(rng.standard_normal(grid.shape) for _ in range(2))))
    lhs = integrate(t.contract(velocity_jacobian(v)))
    rhs = inner(tensor_divergence(t), v)
    assert abs(lhs + rhs) < 1e-10 * max(abs(lhs), 1.0)


def test_face_average_zero_on_walls(grid_2d):
    v = VectorField.constant(grid_2d, (1.0, 2.0))
    w = face_average(v)
    assert np.all(w.components[0][:, 0] == 0.0)
    assert np.all(w.components[0][:, -1] == 0.0)
    assert np.all(w.components[1][0, :] == 0.0)
    assert np.all(w.components[0][:, 1:-1] == 1.0)


def test_cell_gradient_of_linear_profile_interior(grid_1d):
    f = ScalarField.from_function(grid_1d, lambda x, y: 3.0 * x)
    g = cell_gradient(f).components[0][0]
    assert g[1:-1] == pytest.approx(np.full(62, 3.0))


def test_jacobian_rejects_staggered(grid_2d):
    with pytest.raises(GridError):
        velocity_jacobian(VectorField.zeros(grid_2d, staggered=True))


def test_laplacian_refinement_order():
    """Compact Laplacian of a Neumann-compatible profile converges at second order."""
    errors = []
    hs = []
    for n in (32, 64, 128):
        grid = make_grid(n, 1, 1.0, 1.0, "walls")
        f = ScalarField.from_function(grid, lambda x, y: np.cos(np.pi * x))
        exact = -np.pi ** 2 * f.values
        errors.append(np.max(np.abs(laplacian(f).values - exact)))
        hs.append(grid.hx)
    orders = np.diff(np.log(errors)) / np.diff(np.log(hs))
    assert np.all(orders >= 1.9)


def test_smooth_profile_gradient_is_zero_on_wall_faces(grid_2d):
    w = gradient(smooth_profile(grid_2d))
    assert np.all(w.components[0][:, [0, -1]] == 0.0)
    assert np.all(w.components[1][[0, -1], :] == 0.0)
