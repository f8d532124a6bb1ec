"""
Matrix-free Krylov solvers with spectral preconditioning.

Both elliptic problems of the time steppers are symmetric positive
(semi-)definite on the cell grid and solved with scipy's preconditioned
conjugate gradient. The constant-coefficient parts of the operators are
diagonal in the DCT-II basis (walls) or the Fourier basis (periodic), which
gives the preconditioners.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np
from scipy import fft
from scipy.sparse.linalg import LinearOperator, cg

from ..exceptions import SolverConvergenceError
from .grid import Grid, ScalarField
from .operators import cell_gradient, divergence, laplacian

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_MAXITER = 500
_NULL_TOL = 1e-20


@dataclass(frozen=True)
class SolveInfo:
    """Outcome of one Krylov solve."""

    iterations: int
    residual: float


def _angles(grid: Grid, component: int) -> np.ndarray:
    n = grid.nx if component == 0 else grid.ny
    k = np.arange(n)
    return (2.0 * np.pi * k / n) if grid.periodic else (np.pi * k / n)


def _per_axis(grid: Grid, kind: str):
    """Per-direction symbol factors, broadcastable to the grid shape."""
    factors = []
    for comp in range(grid.dim):
        theta = _angles(grid, comp)
        h = grid.spacing[comp]
        if kind == "compact":
            s = (2.0 - 2.0 * np.cos(theta)) / h ** 2
        else:
            s = np.sin(theta) ** 2 / h ** 2
        factors.append(s[None, :] if comp == 0 else s[:, None])
    return factors


def symbol(grid: Grid, kind: str = "compact") -> np.ndarray:
    """Eigenvalues (non-positive) of the compact Laplacian or of ``divergence . cell_gradient``."""
    factors = _per_axis(grid, kind)
    total = np.zeros(grid.shape)
    for s in factors:
        total = total - s
    return total


def null_mask(grid: Grid, kind: str = "compact") -> np.ndarray:
    """Modes annihilated by the operator of ``kind``."""
    mask = np.ones(grid.shape, dtype=bool)
    for s in _per_axis(grid, kind):
        mask = mask & (s * grid.h_min ** 2 < _NULL_TOL)
    return mask


def forward(grid: Grid, a: np.ndarray) -> np.ndarray:
    if grid.periodic:
        return fft.fftn(a)
    return fft.dctn(a, type=2, norm="ortho")


def inverse(grid: Grid, a: np.ndarray) -> np.ndarray:
    if grid.periodic:
        return np.real(fft.ifftn(a))
    return fft.idctn(a, type=2, norm="ortho")


def apply_spectral(grid: Grid, a: np.ndarray, multiplier: np.ndarray) -> np.ndarray:
    """Multiply ``a`` mode-wise by ``multiplier`` in the grid's eigenbasis."""
    return inverse(grid, forward(grid, a) * multiplier)


def pcg(
    grid: Grid,
    matvec: Callable[[np.ndarray], np.ndarray],
    rhs: np.ndarray,
    precond: Callable[[np.ndarray], np.ndarray],
    tol: float,
    maxiter: int,
    label: str,
) -> Tuple[np.ndarray, SolveInfo]:
    """Preconditioned CG on flattened cell arrays; raises on non-convergence."""
    n = grid.size
    b = rhs.reshape(-1)
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        return np.zeros(grid.shape), SolveInfo(0, 0.0)

    op = LinearOperator((n, n), matvec=lambda x: matvec(x.reshape(grid.shape)).reshape(-1), dtype=float)
    prec = LinearOperator((n, n), matvec=lambda x: precond(x.reshape(grid.shape)).reshape(-1), dtype=float)

    counter = {"iterations": 0}

    def _count(_xk):
        counter["iterations"] += 1

    x, info = cg(op, b, rtol=tol, atol=0.0, maxiter=maxiter, M=prec, callback=_count)
    residual = float(np.linalg.norm(b - op.matvec(x)) / b_norm)
    if info != 0:
        raise SolverConvergenceError(
            f"{label}: conjugate gradient did not converge (info={info})",
            iterations=counter["iterations"],
            residual=residual,
        )
    logger.debug(f"{label}: {counter['iterations']} iterations, relative residual {residual:.2e}")
    return x.reshape(grid.shape), SolveInfo(counter["iterations"], residual)


def projection_operator(psi: ScalarField) -> ScalarField:
    """``divergence(cell_gradient(psi))``, the operator the projection inverts."""
    return divergence(cell_gradient(psi))


def solve_pressure_poisson(
    rhs: ScalarField, tol: float = DEFAULT_TOL, maxiter: int = DEFAULT_MAXITER
) -> Tuple[ScalarField, SolveInfo]:
    """Solve ``divergence(cell_gradient(psi)) = rhs`` up to the operator's null space.

    The right side is projected off the null modes first; the returned
    ``psi`` has no null-mode content (in particular zero mean).
    """
    grid = rhs.grid
    lam = symbol(grid, "centered")
    null = null_mask(grid, "centered")
    keep = np.where(null, 0.0, 1.0)
    inv = np.where(null, 0.0, -1.0 / np.where(null, 1.0, lam))

    b = -apply_spectral(grid, rhs.values, keep)

    def matvec(x: np.ndarray) -> np.ndarray:
        return -projection_operator(ScalarField(grid, x)).values

    x, info = pcg(grid, matvec, b, lambda r: apply_spectral(grid, r, inv), tol, maxiter, "pressure_poisson")
    x = apply_spectral(grid, x, keep)
    return ScalarField(grid, x), info


def solve_cahn_hilliard(
    rho: ScalarField,
    rhs: ScalarField,
    dt: float,
    mobility: float,
    stabilization: float,
    tol: float = DEFAULT_TOL,
    maxiter: int = DEFAULT_MAXITER,
) -> Tuple[ScalarField, SolveInfo]:
    """Solve ``rho d / dt - m s lap(d) + m lap(lap(d) / rho) = rhs`` for the increment ``d``.

    With ``rho == 1`` this is the constant-coefficient stabilized CH operator
    and the preconditioner is its exact inverse.
    """
    grid = rho.grid
    inv_rho = 1.0 / rho.values
    rho_bar = float(np.mean(rho.values))
    lam = symbol(grid, "compact")
    inv = 1.0 / (rho_bar / dt + mobility * (-stabilization * lam + lam * lam / rho_bar))

    def matvec(x: np.ndarray) -> np.ndarray:
        d = ScalarField(grid, x)
        lap_d = laplacian(d)
        return (
            rho.values * x / dt
            - mobility * stabilization * lap_d.values
            + mobility * laplacian(ScalarField(grid, lap_d.values * inv_rho)).values
        )

    x, info = pcg(grid, matvec, rhs.values, lambda r: apply_spectral(grid, r, inv), tol, maxiter, "cahn_hilliard")
    return ScalarField(grid, x), info
