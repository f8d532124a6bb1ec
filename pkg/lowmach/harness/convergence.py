"""Measured convergence orders and the sweep-level uniform-bound verdict."""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import ParameterError
from ..schemas.reports import UniformBoundCheck, UniformEstimates

logger = logging.getLogger(__name__)

MIN_PAIRS = 3


def _validated_logs(pairs: Sequence[Tuple[float, float]], minimum: int) -> Tuple[np.ndarray, np.ndarray]:
    if len(pairs) < minimum:
        raise ParameterError(f"need at least {minimum} (eps, value) pairs, got {len(pairs)}")
    data = np.asarray(pairs, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ParameterError("pairs must be (eps, value) tuples")
    if not np.all(np.isfinite(data)) or np.any(data <= 0):
        raise ParameterError(f"convergence pairs must be finite and positive, got {pairs!r}")
    return np.log(data[:, 0]), np.log(data[:, 1])


def fit_convergence_order(pairs: Sequence[Tuple[float, float]]) -> float:
    """Least-squares slope of ``log(value)`` against ``log(eps)``."""
    x, y = _validated_logs(pairs, MIN_PAIRS)
    if np.ptp(x) == 0:
        raise ParameterError("eps values must not all be equal")
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def running_orders(pairs: Sequence[Tuple[float, float]]) -> List[Optional[float]]:
    """Order between each pair and its predecessor; ``None`` for the first entry or non-positive data."""
    orders: List[Optional[float]] = [None]
    for (e0, v0), (e1, v1) in zip(pairs, pairs[1:]):
        if min(e0, v0, e1, v1) <= 0 or e0 == e1:
            orders.append(None)
        else:
            orders.append(float(np.log(v1 / v0) / np.log(e1 / e0)))
    return orders


def _growth_ratio(values: np.ndarray) -> float:
    """Largest ``values[j] / values[i]`` with ``i < j``, floored at 1."""
    worst = 1.0
    for i, earlier in enumerate(values[:-1]):
        later = float(np.max(values[i + 1 :]))
        if earlier > 0:
            worst = max(worst, later / earlier)
        elif later > 0:
            return float("inf")
    return worst


def _spread(values: np.ndarray) -> float:
    low, high = float(np.min(values)), float(np.max(values))
    if low > 0:
        return high / low
    return 1.0 if high <= 0 else float("inf")


def uniform_bound_check(
    estimates: Sequence[UniformEstimates], factor: float = 3.0, exponent_threshold: float = 1.8
) -> UniformBoundCheck:
    """Compare the bounded quantities across a sweep ordered by decreasing eps.

    A quantity passes when no value grows by ``factor`` or more over any
    value at a larger eps. Quantities that decay with eps are bounded and
    pass; the plain max/min spread is reported alongside. The exterior-set
    integral must scale like ``eps^k`` with fitted ``k >= exponent_threshold``;
    with fewer than two nonzero exterior integrals there is nothing to fit
    and that part passes.
    """
    if len(estimates) < 2:
        raise ParameterError(f"uniform bound check needs at least 2 runs, got {len(estimates)}")
    names = list(estimates[0].bounded_quantities())
    series = {name: np.array([e.bounded_quantities()[name] for e in estimates]) for name in names}
    ratios = {name: _growth_ratio(values) for name, values in series.items()}
    spreads = {name: _spread(values) for name, values in series.items()}
    passed = all(r < factor for r in ratios.values())

    exterior = [(e.eps, e.sup_exterior_density) for e in estimates if e.sup_exterior_density > 0]
    exponent = None
    vacuous = len(exterior) < 2
    if not vacuous:
        x, y = _validated_logs(exterior, 2)
        exponent = float(np.polyfit(x, y, 1)[0])
        passed = passed and exponent >= exponent_threshold

    for name, ratio in ratios.items():
        if ratio >= factor:
            logger.warning(f"uniform estimate {name} grew by {ratio:.3g} (factor {factor:g})")
    return UniformBoundCheck(
        ratios=ratios,
        spreads=spreads,
        factor=factor,
        exterior_exponent=exponent,
        exterior_vacuous=vacuous,
        exponent_threshold=exponent_threshold,
        passed=passed,
    )


def strictly_decreasing(values: Sequence[float]) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


def sweep_failures(
    eps: Sequence[float],
    sup_etilde: Sequence[float],
    final_norms: Dict[str, Sequence[float]],
    fitted_order: float,
    fit_threshold: float,
) -> List[str]:
    """Reasons a sweep misses the low Mach acceptance criteria; empty when it passes."""
    failures = []
    if not strictly_decreasing(sup_etilde):
        failures.append(f"sup Etilde is not strictly decreasing along eps={list(eps)}")
    if not fitted_order >= fit_threshold:
        failures.append(f"fitted order {fitted_order:.3f} below {fit_threshold:g}")
    for name, values in final_norms.items():
        if not strictly_decreasing(values):
            failures.append(f"final {name} is not strictly decreasing")
    return failures
