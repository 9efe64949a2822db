"""Per-degree radial Galerkin discretizations on the unit ball.

Every separated problem here reduces to a symmetric form A on radial
profiles plus a single boundary functional b, so the pencil A - lam b b^T
has exactly one finite eigenvalue, lam = 1 / (b^T A^{-1} b).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.polynomial import legendre as npleg
from scipy import linalg, special

from .errors import AssemblyError, DomainError

__all__ = [
    "Problem",
    "RadialBasis",
    "ModifiedSpectrumResult",
    "gauss_points",
    "scalar_lb_solve",
    "te_radial_solve",
    "s_projection_solve",
    "s_projection_forms",
    "cross_degree_coupling",
]


class Problem(str, Enum):
    SCALAR_LB = "ScalarLB"
    S_PROJECTION = "SProjection"


def gauss_points(max_degree: int) -> int:
    """Gauss-Legendre points exact for products of two polynomials of degree max_degree."""
    return math.ceil((2 * max_degree + 2) / 2)


@dataclass(frozen=True)
class RadialBasis:
    """Profiles r^power (1 - r)^vanish p_k(2r - 1), k < size, with p_k Jacobi polynomials.

    The Jacobi parameters make the profiles orthogonal in the radial mass
    weight, which keeps the Gram matrix well conditioned for high degree.
    """

    degree: int
    size: int
    power: int
    vanish: int = 0

    def __post_init__(self):
        if self.size < 1:
            raise DomainError(f"basis size must be >= 1, got {self.size}")
        if self.power < 0 or self.vanish < 0:
            raise DomainError("basis prefactor exponents must be non-negative")

    @property
    def polynomial_degree(self) -> int:
        return self.power + self.vanish + self.size - 1

    @property
    def jacobi_params(self):
        # orthogonal for the mass weight r^2 * r^(2 power) * (1 - r)^(2 vanish)
        return 2 * self.vanish, 2 * self.power + 2

    def evaluate(self, r):
        """Return (f, f', f'') with shape (size, len(r))."""
        r = np.asarray(r, dtype=float)
        x = 2.0 * r - 1.0
        a, b = self.jacobi_params
        k = np.arange(self.size)[:, None]
        p = special.eval_jacobi(k, a, b, x)
        km = np.maximum(k - 1, 0)
        dp = np.where(k >= 1, (k + a + b + 1) * special.eval_jacobi(km, a + 1, b + 1, x), 0.0)
        km2 = np.maximum(k - 2, 0)
        d2p = np.where(
            k >= 2,
            (k + a + b + 1) * (k + a + b + 2) * special.eval_jacobi(km2, a + 2, b + 2, x),
            0.0,
        )
        # chain rule for x = 2r - 1 cancels the 1/2 factors of the Jacobi derivative formula
        g, dg, d2g = _prefactor(r, self.power, self.vanish)
        return g * p, dg * p + g * dp, d2g * p + 2 * dg * dp + g * d2p

    def boundary(self):
        """Values and first derivatives at r = 1."""
        f, df, _ = self.evaluate(np.array([1.0]))
        return f[:, 0], df[:, 0]

    def quadrature(self, extra_degree: int = 1):
        n = gauss_points(self.polynomial_degree + extra_degree)
        x, w = npleg.leggauss(n)
        return 0.5 * (x + 1.0), 0.5 * w

    def gram(self):
        r, w = self.quadrature()
        f, _, _ = self.evaluate(r)
        return _form((r * f,), w)


def _monomial(r, k, order):
    """d^order/dr^order of r^k."""
    if order > k:
        return np.zeros_like(r)
    c = math.perm(k, order)
    return c * r ** (k - order)


def _prefactor(r, a, s):
    """r^a (1-r)^s and its first two derivatives."""
    one = 1.0 - r
    u = [_monomial(r, a, j) for j in range(3)]
    v = [(-1) ** j * _monomial(one, s, j) for j in range(3)]
    return u[0] * v[0], u[1] * v[0] + u[0] * v[1], u[2] * v[0] + 2 * u[1] * v[1] + u[0] * v[2]


def _form(factors, w):
    out = sum((q * w) @ q.T for q in factors)
    return 0.5 * (out + out.T)


@dataclass(frozen=True)
class ModifiedSpectrumResult:
    problem: Problem
    degree: int
    basis_size: int
    eigenvalues: tuple


def _rank_one_eigenvalue(a, b, what):
    try:
        lu = linalg.lu_factor(a, check_finite=True)
        if np.min(np.abs(np.diag(lu[0]))) <= 1e-14 * np.max(np.abs(np.diag(lu[0]))):
            raise linalg.LinAlgError("singular")
        y = linalg.lu_solve(lu, b)
    except (linalg.LinAlgError, ValueError) as exc:
        raise AssemblyError(f"{what}: singular radial form") from exc
    q = float(b @ y)
    if q == 0.0 or not np.isfinite(q):
        raise AssemblyError(f"{what}: boundary functional vanishes on the discrete space")
    return 1.0 / q


def _check_gram(basis, what):
    try:
        linalg.cholesky(basis.gram())
    except linalg.LinAlgError as exc:
        raise AssemblyError(f"{what}: singular Gram matrix") from exc


def scalar_lb_solve(l: int, m: int, omega=None, mu=None) -> ModifiedSpectrumResult:
    """Scalar problem with a surface Laplacian boundary condition; omega and mu are accepted and ignored."""
    if int(l) != l or l < 1:
        raise DomainError(f"degree l must be an integer >= 1, got {l}")
    if int(m) != m or m < 2:
        raise DomainError(f"basis size m must be an integer >= 2, got {m}")
    l, m = int(l), int(m)
    basis = RadialBasis(l, m, power=l)
    _check_gram(basis, "ScalarLB")
    r, w = basis.quadrature(0)
    f, df, _ = basis.evaluate(r)
    k = _form((r * df, math.sqrt(l * (l + 1)) * f), w)
    b, _ = basis.boundary()
    lam = -_rank_one_eigenvalue(k, b, "ScalarLB") / (l * (l + 1))
    return ModifiedSpectrumResult(Problem.SCALAR_LB, l, m, (lam,))


def _check_te_args(n, omega, m, m_min):
    if int(n) != n or n < 1:
        raise DomainError(f"degree n must be an integer >= 1, got {n}")
    if not (np.isfinite(omega) and omega > 0):
        raise DomainError(f"omega must be positive and finite, got {omega}")
    if int(m) != m or m < m_min:
        raise DomainError(f"basis size m must be an integer >= {m_min}, got {m}")
    return int(n), float(omega), int(m)


def te_radial_solve(n: int, omega: float, m: int) -> list:
    """Tangential-field (TE) reduction u = f(r) X_n; returns the single finite eigenvalue."""
    n, omega, m = _check_te_args(n, omega, m, 4)
    basis = RadialBasis(n, m, power=n)
    _check_gram(basis, "TE")
    r, w = basis.quadrature()
    f, df, _ = basis.evaluate(r)
    # curl part: ((r f)')^2 + n(n+1) f^2 ; mass: r^2 f^2
    stiff = _form((f + r * df, math.sqrt(n * (n + 1)) * f), w)
    mass = _form((r * f,), w)
    b, _ = basis.boundary()
    return [_rank_one_eigenvalue(stiff - omega**2 * mass, b, "TE")]


def s_projection_forms(n: int, omega: float, m: int):
    """Assembled (curl form, mass form, boundary functional) for poloidal fields of degree n.

    The field is u = n(n+1) h/r Y r^ + (r h)'/r grad_S Y with h(1) = 0, which is
    divergence free with zero normal trace.  All forms are divided by n(n+1).
    """
    n, omega, m = _check_te_args(n, omega, m, 4)
    basis = RadialBasis(n, m, power=n, vanish=1)
    _check_gram(basis, "SProjection")
    r, w = basis.quadrature()
    h, dh, d2h = basis.evaluate(r)
    # r * (h'' + 2h'/r - n(n+1) h / r^2), polynomial since h = O(r^n)
    lap = r * d2h + 2.0 * dh - n * (n + 1) * h / r
    curl = _form((lap,), w)
    mass = _form((math.sqrt(n * (n + 1)) * h, h + r * dh), w)
    _, b = basis.boundary()
    return curl, mass, b


def s_projection_solve(n: int, omega: float, m: int) -> ModifiedSpectrumResult:
    """Modified problem whose boundary form keeps only the surface-gradient part of the trace."""
    curl, mass, b = s_projection_forms(n, omega, m)
    lam = _rank_one_eigenvalue(curl - float(omega) ** 2 * mass, b, "SProjection")
    return ModifiedSpectrumResult(Problem.S_PROJECTION, int(n), int(m), (lam,))


def cross_degree_coupling(n1: int, n2: int, n_points: int = 64) -> float:
    """Largest normalised angular coupling between zonal harmonic fields of degrees n1 != n2.

    Checks Y, grad_S Y and the surface curl of Y by Gauss quadrature in cos(theta);
    these are the only angular factors entering the radial forms.
    """
    x, w = npleg.leggauss(n_points)
    s = np.sqrt(1.0 - x**2)

    def fields(n):
        c = np.zeros(n + 1)
        c[n] = 1.0
        y = npleg.legval(x, c)
        dy = -s * npleg.legval(x, npleg.legder(c))  # d/dtheta
        return y, dy

    y1, g1 = fields(n1)
    y2, g2 = fields(n2)
    worst = 0.0
    # grad_S Y has only a theta component; the surface curl is its rotation, same dot products
    for a, b in ((y1, y2), (g1, g2)):
        num = abs(np.sum(w * a * b))
        den = math.sqrt(np.sum(w * a * a) * np.sum(w * b * b))
        worst = max(worst, num / den)
    return float(worst)
