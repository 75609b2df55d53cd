"""Product-trapezoidal memory weights for the fractional history integral.

For samples on the uniform grid tau_j = j * dtau, the weights c[j] satisfy

    sum_j c[j] * f(tau_j)  ==  integral_0^{tau_{k+1}} (tau_{k+1} - xi)**(alpha-1) f(xi) dxi

exactly whenever f is piecewise linear on the grid.  That exactness is
the property the implicit stepping scheme leans on, and the test suite
checks it against independent per-interval analytic integration.

The closed-form weight expressions are second differences of lag**(alpha+1)
and cancel catastrophically for large lags; evaluation switches to a
binomial series once the estimated cancellation crosses 1e-9 relative.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, LengthMismatchError

__all__ = ["MemoryWeights", "history_sum", "trap_weights"]

# Relative cancellation of the naive second difference grows like
# lag**2 * eps; 1415 is the smallest lag where lag**2 * 5e-16 > 1e-9.
SERIES_LAG = 1415


@dataclass(frozen=True)
class MemoryWeights:
    """Weights c[j], j = 0..k+1, targeting time level k+1."""

    k: int
    alpha: float
    dtau: float
    c: np.ndarray = field(repr=False)

    @property
    def target_time(self) -> float:
        return (self.k + 1) * self.dtau


def _interior_factor(lag: np.ndarray, alpha: float) -> np.ndarray:
    """(lag+1)**(alpha+1) + (lag-1)**(alpha+1) - 2*lag**(alpha+1), stably."""
    lag = np.asarray(lag, dtype=np.float64)
    ap1 = alpha + 1.0
    out = np.empty_like(lag)
    direct = lag < SERIES_LAG
    if direct.any():
        s = lag[direct]
        out[direct] = (s + 1.0) ** ap1 + (s - 1.0) ** ap1 - 2.0 * s ** ap1
    if not direct.all():
        big = lag[~direct]
        h2 = 1.0 / (big * big)
        # 2 * sum_{m>=1} binom(alpha+1, 2m) h**(2m); h <= 1/SERIES_LAG so
        # five terms leave the tail far below double precision.
        coef = ap1 * alpha / 2.0
        acc = coef * h2
        hpow = h2
        for m in range(2, 6):
            coef *= (ap1 - 2.0 * m + 2.0) * (ap1 - 2.0 * m + 1.0) / ((2.0 * m - 1.0) * 2.0 * m)
            hpow = hpow * h2
            acc = acc + coef * hpow
        out[~direct] = big ** ap1 * (2.0 * acc)
    return out


def _first_factor(k: int, alpha: float) -> float:
    """k**(alpha+1) - (k - alpha)*(k+1)**alpha, stably."""
    if k == 0:
        return alpha
    ap1 = alpha + 1.0
    if k < SERIES_LAG:
        return k ** ap1 - (k - alpha) * (k + 1.0) ** alpha
    # With K = k+1 and h = 1/K the expression equals
    # K**(alpha+1) * sum_{m>=2} binom(alpha+1, m) (-h)**m.
    K = k + 1.0
    h = 1.0 / K
    coef = ap1 * alpha / 2.0
    acc = coef * h * h
    hpow = h * h
    for m in range(3, 10):
        coef *= -(ap1 - m + 1.0) / m
        hpow = hpow * h
        acc = acc + coef * hpow
    return K ** ap1 * acc


def trap_weights(k: int, alpha: float, dtau: float) -> MemoryWeights:
    """Memory weights c[j], j = 0..k+1, for the step targeting level k+1."""
    if not 0.0 < alpha <= 1.0:
        raise InvalidInputError(f"alpha must be in (0, 1], got {alpha}")
    if not dtau > 0.0:
        raise InvalidInputError(f"dtau must be > 0, got {dtau}")
    if k < 0:
        raise InvalidInputError(f"k must be >= 0, got {k}")
    pref = dtau ** alpha / (alpha * (alpha + 1.0))
    c = np.empty(k + 2)
    c[0] = pref * _first_factor(k, alpha)
    if k >= 1:
        lag = np.arange(k, 0, -1, dtype=np.float64)  # k - j + 1 for j = 1..k
        c[1:k + 1] = pref * _interior_factor(lag, alpha)
    c[k + 1] = pref
    return MemoryWeights(k=k, alpha=alpha, dtau=dtau, c=c)


def history_sum(values, weights: MemoryWeights, upto: int | None = None) -> float:
    """sum_{j=0}^{upto} c[j] * values[j] (upto defaults to k+1)."""
    c = weights.c
    if upto is None:
        upto = len(c) - 1
    if upto < 0 or upto > len(c) - 1:
        raise InvalidInputError(f"upto must lie in [0, {len(c) - 1}], got {upto}")
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1:
        raise InvalidInputError(f"values must be one-dimensional, got shape {v.shape}")
    if v.shape[0] < upto + 1:
        raise LengthMismatchError(
            f"need at least {upto + 1} values for upto={upto}, got {v.shape[0]}"
        )
    return float(np.dot(c[:upto + 1], v[:upto + 1]))
