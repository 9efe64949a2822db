"""Closed-form Stekloff spectrum of the unit ball with unit material tensors.

Separation of variables gives one eigenvalue per family and harmonic degree:

* TE modes ``u = curl(x j_n(w r) Y_n)``:
  ``lambda = (j_n(w) + w j_n'(w)) / j_n(w)`` (positive, grows like ``n + 1``)
* TM modes ``u = curl curl(x j_n(w r) Y_n) / w``:
  ``lambda = -w**2 j_n(w) / (j_n(w) + w j_n'(w))`` (negative, tends to 0)
* the scalar boundary Laplace-Beltrami problem with ``u = r**l Y_l``:
  ``lambda = -1 / (l + 1)``

The sign convention is that of ``curl curl u - w**2 u = 0`` with
``nu x curl u + lambda nu x u x nu = 0`` on the sphere.  Every relation is
gated behind :func:`residual_check`, which rebuilds the separated field on an
``(r, theta)`` stencil with an independent Bessel/Legendre implementation
(SciPy) and evaluates the strong boundary condition by finite differences.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, PoleError
from .specfun import sph_bessel

__all__ = [
    "Family",
    "ModeIndex",
    "DispersionResult",
    "POLE_TOL",
    "te_eigenvalue",
    "tm_eigenvalue",
    "scalar_lb_eigenvalue",
    "ball_spectrum",
    "residual_check",
]

POLE_TOL = 1e-13


class Family(str, enum.Enum):
    TE = "TE"
    TM = "TM"
    SCALAR_LB = "ScalarLB"


@dataclass(frozen=True)
class ModeIndex:
    family: Family
    degree: int

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if int(self.degree) != self.degree or self.degree < 1:
            raise DomainError(f"degree must be an integer >= 1, got {self.degree!r}")
        object.__setattr__(self, "degree", int(self.degree))


@dataclass(frozen=True)
class DispersionResult:
    mode: ModeIndex
    omega: float
    eigenvalue: float
    multiplicity: int
    residual: float


def _check_omega(omega):
    if not (omega > 0.0) or not np.isfinite(omega):
        raise DomainError(f"omega must be positive and finite, got {omega!r}")
    return float(omega)


def _scale(b, omega):
    # j_n and w j_n' cannot vanish together, so this keeps the pole test
    # meaningful when j_n itself is tiny (small w, large n)
    return abs(b.value) + abs(omega * b.derivative)


def te_eigenvalue(n: int, omega: float) -> DispersionResult:
    mode = ModeIndex(Family.TE, n)
    omega = _check_omega(omega)
    b = sph_bessel(n, omega)
    if abs(b.value) < POLE_TOL * _scale(b, omega):
        raise PoleError(f"j_{n}({omega}) vanishes: TE pole", Family.TE, n)
    lam = (b.value + omega * b.derivative) / b.value
    return DispersionResult(mode, omega, lam, 2 * n + 1, residual_check(mode, omega, lam))


def tm_eigenvalue(n: int, omega: float) -> DispersionResult:
    mode = ModeIndex(Family.TM, n)
    omega = _check_omega(omega)
    b = sph_bessel(n, omega)
    denom = b.value + omega * b.derivative
    if abs(denom) < POLE_TOL * _scale(b, omega):
        raise PoleError(f"j_{n} + w j_{n}' vanishes at w={omega}: TM pole", Family.TM, n)
    lam = -(omega**2) * b.value / denom
    return DispersionResult(mode, omega, lam, 2 * n + 1, residual_check(mode, omega, lam))


def scalar_lb_eigenvalue(l: int, omega: float | None = None, mu: float | None = None) -> DispersionResult:
    """Eigenvalue of ``-div grad u = 0``, ``d_r u = lambda * Laplace_Beltrami(u)``.

    ``omega`` and ``mu`` are accepted for interface symmetry and ignored: the
    problem does not depend on them.
    """
    mode = ModeIndex(Family.SCALAR_LB, l)
    lam = -1.0 / (mode.degree + 1)
    return DispersionResult(mode, float("nan"), lam, 2 * mode.degree + 1,
                            residual_check(mode, 1.0, lam))


def ball_spectrum(omega: float, n_max: int, convention: str = "standard") -> list[DispersionResult]:
    """All TE and TM eigenvalues for degrees ``1..n_max``, sorted by eigenvalue.

    ``convention="reversed"`` flips the sign of every eigenvalue, which is
    the boundary condition written with ``- lambda`` instead of ``+ lambda``.
    """
    if int(n_max) != n_max or n_max < 1:
        raise DomainError(f"n_max must be an integer >= 1, got {n_max!r}")
    if convention not in ("standard", "reversed"):
        raise DomainError(f"unknown sign convention {convention!r}")
    out = []
    for n in range(1, int(n_max) + 1):
        out.append(te_eigenvalue(n, omega))
        out.append(tm_eigenvalue(n, omega))
    if convention == "reversed":
        out = [DispersionResult(r.mode, r.omega, -r.eigenvalue, r.multiplicity, r.residual) for r in out]
    return sorted(out, key=lambda r: (r.eigenvalue, r.mode.family.value, r.mode.degree))


# ---------------------------------------------------------------------------
# finite-difference oracle

_FD1 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
_OFFSETS = np.arange(-4, 5)


def _d_r(f, h):
    def g(r, t):
        return sum(c * f(r + k * h, t) for c, k in zip(_FD1, _OFFSETS) if c) / h
    return g


def _d_t(f, h):
    def g(r, t):
        return sum(c * f(r, t + k * h) for c, k in zip(_FD1, _OFFSETS) if c) / h
    return g


def _legendre_deriv(n, x):
    return n * (x * special.eval_legendre(n, x) - special.eval_legendre(n - 1, x)) / (x * x - 1.0)


def residual_check(mode: ModeIndex, omega: float, lam: float, n_theta: int = 24) -> float:
    """Max-norm boundary-condition residual of the separated mode.

    The residual is divided by the max-norm of the field's boundary trace
    (tangential trace for TE/TM, Dirichlet trace for ScalarLB), so it is
    scale free.  Only the ``m = 0`` member is built; the others follow by
    rotation.
    """
    if not isinstance(mode, ModeIndex):
        mode = ModeIndex(*mode)
    omega = _check_omega(omega)
    n = mode.degree
    theta = np.linspace(0.5, np.pi - 0.5, n_theta)
    one = np.ones_like(theta)
    ht = 0.06 / max(n, 1)
    hr = 0.07 / max(n, omega, 1.0)

    if mode.family is Family.SCALAR_LB:
        u = lambda r, t: r**n * special.eval_legendre(n, np.cos(t))
        du_r = _d_r(u, hr)
        du_t = _d_t(u, ht)
        lb = _d_t(lambda r, t: np.sin(t) * du_t(r, t), ht)
        res = du_r(one, theta) - lam * lb(one, theta) / np.sin(theta)
        return float(np.max(np.abs(res)) / np.max(np.abs(u(one, theta))))

    # m_phi = -d_theta [j_n(w r) P_n(cos theta)], with the Legendre derivative
    # taken in closed form so only two stencil levels remain in theta
    m_phi = lambda r, t: special.spherical_jn(n, omega * r) * np.sin(t) * _legendre_deriv(n, np.cos(t))
    if mode.family is Family.TE:
        d_rm = _d_r(lambda r, t: r * m_phi(r, t), hr)
        res = -d_rm(one, theta) + lam * m_phi(one, theta)
        trace = m_phi(one, theta)
    else:
        d_t_sin_m = _d_t(lambda r, t: np.sin(t) * m_phi(r, t), ht)
        d_r_rm = _d_r(lambda r, t: r * m_phi(r, t), hr)
        u_r = lambda r, t: d_t_sin_m(r, t) / (omega * r * np.sin(t))
        u_t = lambda r, t: -d_r_rm(r, t) / (omega * r)
        d_r_rut = _d_r(lambda r, t: r * u_t(r, t), hr)
        d_t_ur = _d_t(u_r, ht)
        curl_phi = d_r_rut(one, theta) - d_t_ur(one, theta)
        trace = u_t(one, theta)
        res = -curl_phi + lam * trace
    return float(np.max(np.abs(res)) / np.max(np.abs(trace)))
