"""Closed-form bounds for random-walk insertion at load ``1 - epsilon``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional


def _check_epsilon(epsilon: float) -> None:
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")


def _check_d(d: int) -> None:
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")


def _check_theta(theta: float) -> None:
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")


def gamma(epsilon: float, d: int) -> float:
    """``5 (1 - epsilon)^(d/2)``, evaluated in log space so odd d is exact."""
    _check_epsilon(epsilon)
    _check_d(d)
    return 5.0 * math.exp(0.5 * d * math.log1p(-epsilon))


@dataclass(frozen=True)
class BoundParams:
    epsilon: float
    d: int
    theta: float
    m: Optional[int] = None
    gamma: float = field(init=False)
    n: Optional[int] = field(init=False)

    def __post_init__(self):
        _check_theta(self.theta)
        object.__setattr__(self, "gamma", gamma(self.epsilon, self.d))
        n = None
        if self.m is not None:
            n = items_for_load(self.m, self.epsilon)
            if n >= self.m:
                raise ValueError(f"n={n} must be below m={self.m}")
        object.__setattr__(self, "n", n)


def items_for_load(m: int, epsilon: float) -> int:
    """``round((1 - epsilon) m)`` with halves rounded up."""
    return int(math.floor((1.0 - epsilon) * m + 0.5))


def feasible(params: BoundParams) -> bool:
    """The large-d condition ``d^2 gamma <= (1 - theta)(d - 1)``."""
    d = params.d
    return d * d * params.gamma <= (1.0 - params.theta) * (d - 1)


def largest_feasible_theta(epsilon: float, d: int, tol: float = 1e-9) -> Optional[float]:
    """Largest theta in (0, 1) for which the condition holds, by bisection.

    Returns None when no theta in (0, 1) is feasible.
    """
    g = gamma(epsilon, d)

    def ok(theta: float) -> bool:
        return d * d * g <= (1.0 - theta) * (d - 1)

    if not ok(tol / 2):
        return None
    lo, hi = tol / 2, 1.0
    while hi - lo > tol / 4:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def upper_bound_expected_path(theta: float) -> float:
    """``1 + 2/theta``; theta = 1 is accepted as the boundary value."""
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")
    return 1.0 + 2.0 / theta


def lower_bound_expected_path(epsilon: float, d: int) -> float:
    """``2 / (1 - (1 - epsilon)^d)``."""
    _check_epsilon(epsilon)
    _check_d(d)
    return 2.0 / -math.expm1(d * math.log1p(-epsilon))


def nu_expectation_bound(params: BoundParams, k: int, ell: int) -> float:
    """``(1 + theta) k gamma (d^2 gamma)^(ell - 1)``."""
    if k < 1 or ell < 1:
        raise ValueError(f"need k >= 1 and ell >= 1, got k={k}, ell={ell}")
    g = params.gamma
    return (1.0 + params.theta) * k * g * (params.d**2 * g) ** (ell - 1)


def geometric_tail_bound(theta: float, ell_max: Optional[int] = None) -> float:
    """``(1 + theta) * sum_{ell=2}^{ell_max} (1 - theta)^(ell - 1)``.

    ``ell_max=None`` gives the limit ``(1 - theta^2) / theta``.
    """
    _check_theta(theta)
    q = 1.0 - theta
    if ell_max is None:
        return (1.0 - theta * theta) / theta
    if ell_max < 2:
        return 0.0
    # q + q^2 + ... + q^(ell_max - 1), without cancellation for small theta
    return (1.0 + theta) * q * -math.expm1((ell_max - 1) * math.log1p(-theta)) / theta


def min_feasible_d(epsilon: float, theta: float, d_max: int = 100_000) -> Optional[int]:
    """Least d >= 2 satisfying the condition, by linear scan."""
    for d in range(2, d_max + 1):
        if feasible(BoundParams(epsilon, d, theta)):
            return d
    return None
