"""Spherical Bessel functions of the first kind.

Small arguments (``x < max(1, n/2)``) use the power series, everything else
uses Miller's downward recurrence normalised with the identity
``sum_k (2k+1) j_k(x)**2 == 1``.  The normalisation stays well conditioned at
zeros of ``j_0`` where the classical ``j_0``-normalisation breaks down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = ["BesselEval", "sph_bessel", "sph_bessel_table", "double_factorial"]


@dataclass(frozen=True)
class BesselEval:
    order: int
    argument: float
    value: float
    derivative: float


def double_factorial(k: int) -> float:
    """Return ``k!!`` for odd ``k >= -1`` as a float."""
    out = 1.0
    while k > 1:
        out *= k
        k -= 2
    return out


def _series(n: int, x: float) -> tuple[float, float]:
    # j_n(x) = x^n/(2n+1)!! * sum_k (-x^2/2)^k / (k! (2n+3)(2n+5)...(2n+2k+1))
    if x == 0.0:
        return (1.0 if n == 0 else 0.0), (1.0 / 3.0 if n == 1 else 0.0)
    half = -0.5 * x * x
    term = 1.0
    s = 1.0
    ds = 0.0  # sum of 2k * c_k x^(2k-1), derivative of the bracket
    k = 0
    while True:
        k += 1
        term *= half / (k * (2 * n + 2 * k + 1))
        s += term
        ds += 2 * k * term / x
        if abs(term) <= 1e-17 * abs(s):
            break
    lead = x**n / double_factorial(2 * n + 1)
    value = lead * s
    # d/dx [x^n * S] = n x^(n-1) S + x^n S'
    dlead = n * x ** (n - 1) / double_factorial(2 * n + 1) if n > 0 else 0.0
    return value, dlead * s + lead * ds


def _miller(n_top: int, x: float) -> np.ndarray:
    """Values j_0..j_{n_top}(x) by normalised downward recurrence."""
    start = int(max(n_top, x) + 20 + 2.0 * math.sqrt(max(n_top, x) * 12.0))
    start += start % 2
    vals = np.zeros(start + 2)
    vals[start] = 1.0
    for k in range(start, 0, -1):
        vals[k - 1] = (2 * k + 1) / x * vals[k] - vals[k + 1]
        if abs(vals[k - 1]) > 1e100:
            vals[k - 1 :] *= 1e-100
    total = math.fsum((2 * k + 1) * vals[k] ** 2 for k in range(start + 1))
    norm = 1.0 / math.sqrt(total)
    # sign fixed by whichever of j_0, j_1 is better resolved
    j0 = math.sin(x) / x
    j1 = math.sin(x) / x**2 - math.cos(x) / x
    ref, mine = (j0, vals[0]) if abs(j0) >= abs(j1) else (j1, vals[1])
    if ref * mine < 0:
        norm = -norm
    return vals[: n_top + 1] * norm


def sph_bessel(n: int, x: float) -> BesselEval:
    """Return ``j_n(x)`` and ``j_n'(x)`` for integer ``n >= 0`` and real ``x >= 0``."""
    if int(n) != n or n < 0:
        raise DomainError(f"order must be a non-negative integer, got {n!r}")
    if not (x >= 0.0) or not math.isfinite(x):
        raise DomainError(f"argument must be finite and non-negative, got {x!r}")
    n = int(n)
    x = float(x)
    if x < max(1.0, n / 2.0):
        value, deriv = _series(n, x)
        return BesselEval(n, x, value, deriv)
    vals = _miller(n + 1, x)
    value = float(vals[n])
    if n == 0:
        deriv = -float(vals[1])
    else:
        deriv = float(vals[n - 1]) - (n + 1) * value / x
    return BesselEval(n, x, value, deriv)


def sph_bessel_table(n_max: int, x: float) -> np.ndarray:
    """Array ``[j_0(x), ..., j_{n_max}(x)]``."""
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    if x < max(1.0, n_max / 2.0):
        return np.array([sph_bessel(k, x).value for k in range(n_max + 1)])
    return _miller(n_max, x)
