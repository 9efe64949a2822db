"""tau-curves of the frozen Schur pencils and the fixed-point eigenvalue search.

W1 side: ``tau_n(lam)`` are the eigenvalues of
``-w**2 E1 - tau (A1 + H_W1(lam))``; eigenvalues of the pencil near zero are
the fixed points ``tau_n(lam) = lam``.

V side: ``tau~_n(lam~)`` are the nonzero eigenvalues of ``M_V^-1 K~_V(lam~)``;
fixed points ``tau~ = lam~`` give eigenvalues ``lam = 1/lam~`` beyond ``c_inf``.
For ``lam~ < 0`` the frozen V pencil is indefinite on both sides, so there the
search follows the sorted eigenvalues of the symmetric ``lam~ M_V - K~_V(lam~)``
through zero instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla
from scipy.optimize import brentq

from ..errors import AssumptionError, DomainError, ValidityError
from .linalg import numerical_rank, sym
from .model import DiscreteModel
from .pencil import Eigenvalue, group_eigenvalues
from .schur import (
    V_SIDE,
    W1_SIDE,
    gap_constants,
    schur_v,
    schur_w1,
    tau_tilde_values,
    v_validity_bound,
    w1_validity_bound,
)

__all__ = [
    "TauCurve",
    "FixedPoint",
    "FixedPointResult",
    "tau_curves",
    "tau_values",
    "fixed_point_eigensolve",
    "default_window",
    "scan_grid",
]

SCAN_POINTS = 200
GEOMETRIC_DECADES = 14
NEGATIVE_V_DECADES = 3
NOISE_FACTOR = 1e3


@dataclass(frozen=True)
class TauCurve:
    side: str
    branch: int
    samples: tuple

    @property
    def lam(self) -> np.ndarray:
        return np.array([s[0] for s in self.samples])

    @property
    def tau(self) -> np.ndarray:
        return np.array([s[1] for s in self.samples])


def _check_side(side):
    if side in ("W1", "W1side", W1_SIDE):
        return W1_SIDE
    if side in ("V", "Vside", V_SIDE):
        return V_SIDE
    raise DomainError(f"unknown side {side!r}; expected 'W1' or 'V'")


def _v_rank(model):
    return numerical_rank(model.B_tr[:, model.v])


def tau_values(model: DiscreteModel, side: str, lam: float, _rank=None) -> np.ndarray:
    """Sorted branch values of the frozen pencil at one parameter value."""
    side = _check_side(side)
    if side == W1_SIDE:
        ctx = schur_w1(model, lam)
        o = ctx.operators
        rhs = sym(o["A_tr_W1"] + o["H_W1"])
        try:
            return sla.eigh(sym(-o["omega2"] * o["E_W1"]), rhs, eigvals_only=True)
        except np.linalg.LinAlgError:
            raise AssumptionError("W1 positivity",
                                  f"A_tr|W1 + H_W1(lambda) is not positive definite at lambda = {lam}") from None
    rank = _v_rank(model) if _rank is None else _rank
    ctx = schur_v(model, lam)
    if lam >= 0:
        t = tau_tilde_values(ctx)
    else:
        o = ctx.operators
        t = np.linalg.eigvals(np.linalg.solve(o["M_V"], o["K_V"]))
        if np.abs(t.imag).max(initial=0) > 1e-10 * max(1.0, np.abs(t).max(initial=0)):
            raise AssumptionError("V-side reality", f"frozen V pencil has non-real eigenvalues at lambda~ = {lam}")
        t = t.real
    # the structural zeros (ker B_V, and the part of L outside ran B_V) are not branches
    keep = np.sort(np.argsort(-np.abs(t))[:rank])
    return np.sort(t[keep])


def _av_values(model, lam_t):
    ctx = schur_v(model, lam_t)
    return np.linalg.eigvalsh(ctx.A_V(lam_t))


def default_window(model: DiscreteModel, side: str):
    side = _check_side(side)
    if side == W1_SIDE:
        c0 = gap_constants(model).c0
        r = min(c0, 0.999 * w1_validity_bound(model))
        return (-r, r)
    r = (1.0 - 1e-9) * v_validity_bound(model)
    return (-r, r)


def _validate_window(model, side, window):
    a, b = float(window[0]), float(window[1])
    if not a < b:
        raise DomainError(f"window must satisfy a < b, got {window}")
    bound = w1_validity_bound(model) if side == W1_SIDE else v_validity_bound(model)
    if not (-bound < a and b < bound):
        raise ValidityError(f"window ({a:.6g}, {b:.6g}) leaves the {side}-side validity region "
                            f"(-{bound:.6g}, {bound:.6g})")
    return a, b


def scan_grid(window, n: int = SCAN_POINTS, decades: int = GEOMETRIC_DECADES, per_decade: int = 20) -> np.ndarray:
    """Uniform points over the window plus geometric points toward 0 when 0 is inside.

    Zero itself is excluded: it is the accumulation point of the spectrum.
    """
    a, b = window
    pts = list(np.linspace(a, b, n))
    if a < 0 < b or a == 0 or b == 0:
        for end in (a, b):
            if end != 0:
                pts.extend(end * np.logspace(0, -decades, per_decade * decades + 1))
    pts = np.unique(np.asarray(pts))
    return pts[pts != 0.0]


def tau_curves(model: DiscreteModel, side: str, lambda_grid, branch_count: int | None = None) -> list:
    """Sampled branches ``lam -> tau_n(lam)``, threaded by sorted order."""
    side = _check_side(side)
    grid = np.asarray(lambda_grid, dtype=float)
    rank = _v_rank(model) if side == V_SIDE else None
    bound = w1_validity_bound(model) if side == W1_SIDE else v_validity_bound(model)
    if np.any(np.abs(grid) >= bound):
        raise ValidityError(f"grid leaves the {side}-side validity disc of radius {bound:.6g}")
    rows = [tau_values(model, side, x, rank) for x in grid]
    n_branch = min(len(r) for r in rows) if rows else 0
    if branch_count is not None:
        if branch_count > n_branch:
            raise DomainError(f"branch_count {branch_count} exceeds the {n_branch} available branches")
        n_branch = branch_count
    return [TauCurve(side, n, tuple((float(x), float(r[n])) for x, r in zip(grid, rows)))
            for n in range(n_branch)]


@dataclass(frozen=True)
class FixedPoint:
    branch: int
    parameter: float
    eigenvalue: float
    residual: float


@dataclass
class FixedPointResult:
    side: str
    window: tuple
    roots: list
    eigenvalues: list
    branches_without_root: list = field(default_factory=list)

    def values(self) -> np.ndarray:
        return np.array([e.value for e in self.eigenvalues for _ in range(e.multiplicity)])


def _roots_of_branches(func, grid, n_branch, offset=None):
    """Sign changes of each sorted branch of ``func`` on the grid, refined by Brent's method.

    A sign change only counts when one bracket end clears the rounding floor
    ``NOISE_FACTOR * eps * max(1, |tau|)``; otherwise it is noise around a
    branch that merely touches the diagonal (e.g. at the accumulation point).
    """
    rows = np.array([func(x)[:n_branch] for x in grid])
    ref = rows + (grid[:, None] if offset is None else offset(grid)[:, None])
    floor = NOISE_FACTOR * np.finfo(float).eps * np.maximum(1.0, np.abs(ref).max(axis=1))
    roots = []
    for n in range(n_branch):
        f = rows[:, n]
        for i in np.nonzero(np.sign(f[:-1]) * np.sign(f[1:]) < 0)[0]:
            if max(abs(f[i]) - floor[i], abs(f[i + 1]) - floor[i + 1]) <= 0:
                continue
            g = lambda x, n=n: func(x)[n]
            x = brentq(g, grid[i], grid[i + 1], xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
            roots.append((n, x, abs(g(x))))
    return roots


def fixed_point_eigensolve(model: DiscreteModel, side: str, search_window=None, branch_count: int | None = None,
                           grid_points: int = SCAN_POINTS) -> FixedPointResult:
    """Eigenvalues from fixed points of the tau-curves inside a window.

    The window is in ``lam`` for the W1 side and in ``lam~ = 1/lam`` for the V
    side.  Roots are reported per branch; branches without a sign change in the
    window are listed, which is expected at finite dimension.
    """
    side = _check_side(side)
    window = default_window(model, side) if search_window is None else search_window
    a, b = _validate_window(model, side, window)
    grid = scan_grid((a, b), grid_points)
    roots = []
    if side == W1_SIDE:
        n_branch = model.dims[1] if branch_count is None else branch_count
        func = lambda x: tau_values(model, side, x) - x
        roots = [FixedPoint(n, x, x, r) for n, x, r in _roots_of_branches(func, grid, n_branch)]
    else:
        rank = _v_rank(model)
        n_branch = rank if branch_count is None else branch_count
        pos = grid[grid > 0]
        # K~_V(lam~) - K~_V(0) is O(lam~) but carries O(eps) rounding, so the
        # symmetric form cannot resolve roots arbitrarily close to 0; negative
        # roots are bounded away from 0 anyway (finitely many negative tau~)
        neg = scan_grid((a, min(b, 0.0)), grid_points, decades=NEGATIVE_V_DECADES) if a < 0 else np.zeros(0)
        if len(pos) > 1:
            func = lambda x: tau_values(model, side, x, rank) - x
            roots += [FixedPoint(n, x, 1.0 / x, r) for n, x, r in _roots_of_branches(func, pos, n_branch)]
        if len(neg) > 1:
            func = lambda x: _av_values(model, x)
            n_av = model.dims[0]
            zero = lambda x: np.zeros_like(x)
            roots += [FixedPoint(n, x, 1.0 / x, r) for n, x, r in _roots_of_branches(func, neg, n_av, zero)]
    hit = {r.branch for r in roots}
    missing = [n for n in range(n_branch) if n not in hit]
    tag = "fixedpoint-W1" if side == W1_SIDE else "fixedpoint-V"
    eigs = [Eigenvalue(v, k, tag, Eigenvalue.side_of(v)) for v, k in group_eigenvalues([r.eigenvalue for r in roots])]
    return FixedPointResult(side, (a, b), sorted(roots, key=lambda r: r.eigenvalue), eigs, missing)
