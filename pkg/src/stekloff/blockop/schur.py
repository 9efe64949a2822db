"""Schur complements of the pencil near lambda = 0 (onto W1) and near infinity (onto V)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from ..errors import AssumptionError, ValidityError
from .linalg import condition, psd_sqrt, sym
from .model import DiscreteModel

__all__ = [
    "W1_SIDE",
    "V_SIDE",
    "GapConstants",
    "gap_constants",
    "neumann_norm",
    "w1_validity_bound",
    "v_validity_bound",
    "coercivity_threshold",
    "SchurContext",
    "schur_w1",
    "schur_v",
    "COND_LIMIT",
    "POSITIVITY_SAMPLES",
    "h_norm_bound",
    "k_v_zero_identity",
    "tau_tilde_values",
]

W1_SIDE = "W1"
V_SIDE = "V"
COND_LIMIT = 1e12
POSITIVITY_SAMPLES = 64


def _blocks(model: DiscreteModel):
    m = model.M
    a = model.A_tr.entries
    v, w1 = model.v, model.w1
    return m[v, v], a[v, v], a[v, w1], a[w1, w1], model.A_eps.entries[w1, w1]


def _m_v_or_raise(model):
    m_v = _blocks(model)[0]
    c = condition(m_v)
    if c > COND_LIMIT:
        raise AssumptionError("NoNeumann", f"V block of A_c - w^2 A_eps is singular (cond {c:.3e})")
    return m_v


def neumann_norm(model: DiscreteModel) -> float:
    """``||M_V^-1 A_tr|_V||`` with ``M_V`` the V block of ``A_c - w**2 A_eps``."""
    m_v = _m_v_or_raise(model)
    if m_v.size == 0:
        return 0.0
    return float(np.linalg.norm(np.linalg.solve(m_v, _blocks(model)[1]), 2))


def w1_validity_bound(model: DiscreteModel) -> float:
    """Radius of the disc where the V block ``M_V - lam A_V`` is inverted by a Neumann series."""
    nn = neumann_norm(model)
    return np.inf if nn == 0 else 1.0 / nn


def coercivity_threshold(model: DiscreteModel) -> float:
    """``c_inf = w**2 * max eig(A_eps|W1, A_tr|W1)``.

    Beyond it ``w**2 A_eps/lam + A_tr`` is definite on W1 for every real lam.
    """
    *_, a1, e1 = _blocks(model)
    return float(model.omega**2 * sla.eigh(e1, a1, eigvals_only=True)[-1])


def v_validity_bound(model: DiscreteModel) -> float:
    """Radius ``1/c_inf`` of the inverted parameter ``lam~ = 1/lam`` on the V side."""
    return 1.0 / coercivity_threshold(model)


@dataclass(frozen=True)
class GapConstants:
    c0: float
    c_infty: float
    neumann_norm: float
    c_left: float | None = None
    positivity_radius: float | None = None

    def as_dict(self):
        return {"c0": self.c0, "c_infty": self.c_infty, "neumann_norm": self.neumann_norm,
                "c_left": self.c_left, "positivity_radius": self.positivity_radius}


def _h_w1(model, lam, blocks=None):
    m_v, a_v, a_v1, a1, e1 = blocks or _blocks(model)
    if m_v.size == 0:
        return np.zeros_like(a1)
    return sym(lam * a_v1.T @ np.linalg.solve(m_v - lam * a_v, a_v1))


def _positivity_radius(model, bound, samples=POSITIVITY_SAMPLES):
    blocks = _blocks(model)
    a1 = blocks[3]
    last = 0.0
    for j in range(1, samples + 1):
        r = bound * j / samples
        for lam in (r, -r):
            if np.linalg.eigvalsh(a1 + _h_w1(model, lam, blocks))[0] <= 0.0:
                return last
        last = r
    return bound


def _left_gap(model):
    """Most negative finite eigenvalue, from the pencil reduced to ran A_tr.

    Needs ``A_c - w**2 A_eps`` invertible on ker B_tr, the discrete no-Dirichlet
    condition; returns None otherwise.
    """
    m, a, b = model.M, model.A_tr.entries, model.B_tr
    _, s, vt = np.linalg.svd(b)
    rank = int(np.sum(s > 1e-10 * s[0])) if s.size and s[0] > 0 else 0
    q_r, q_0 = vt[:rank].T, vt[rank:].T
    if not rank:
        return 0.0
    m00 = sym(q_0.T @ m @ q_0)
    if q_0.shape[1] and np.abs(np.linalg.eigvalsh(m00)).min() <= np.abs(m).max() / COND_LIMIT:
        return None
    mr0 = q_r.T @ m @ q_0
    schur = q_r.T @ m @ q_r
    if q_0.shape[1]:
        schur = schur - mr0 @ np.linalg.solve(m00, mr0.T)
    lam_min = sla.eigh(sym(schur), sym(q_r.T @ a @ q_r), eigvals_only=True)[0]
    return float(max(0.0, -lam_min))


def gap_constants(model: DiscreteModel) -> GapConstants:
    """Right gap radius ``c0``, coercivity threshold ``c_inf`` and the measured left gap.

    ``c0`` is ``1/(2 ||M_V^-1 A_V||)`` cut down to the largest sampled radius
    on which ``A_tr|W1 + H_W1(lam)`` stays positive definite.  ``c_left`` is the
    empirical left gap: no finite eigenvalue lies below ``-c_left``.
    """
    nn = neumann_norm(model)
    half = np.inf if nn == 0 else 0.5 / nn
    if np.isinf(half):
        radius = np.inf
        c0 = np.inf
    else:
        radius = _positivity_radius(model, half)
        c0 = min(half, radius)
    return GapConstants(c0=float(c0), c_infty=coercivity_threshold(model), neumann_norm=nn,
                        c_left=_left_gap(model), positivity_radius=float(radius))


@dataclass(frozen=True)
class SchurContext:
    """A Schur complement evaluated at one parameter value.

    For the W1 side ``lam`` is the pencil parameter and the operators are
    ``A_W1`` and ``H_W1``.  For the V side ``lam`` is the inverted parameter
    ``lam~ = 1/lam`` and the operators are ``K~_V``, ``S~_V`` and ``M_V``;
    ``A_V(tau)`` gives ``tau M_V - K~_V(lam~)``.
    """

    side: str
    lam: float
    validity: tuple
    operators: dict

    def A_V(self, tau: float) -> np.ndarray:
        if self.side != V_SIDE:
            raise ValueError("A_V is only defined on the V side")
        return sym(tau * self.operators["M_V"] - self.operators["K_V"])

    def A_W1_tau(self, tau: float) -> np.ndarray:
        """Frozen W1 pencil ``-w**2 A_eps|W1 - tau (A_tr|W1 + H_W1(lam))``."""
        if self.side != W1_SIDE:
            raise ValueError("the frozen W1 pencil is only defined on the W1 side")
        o = self.operators
        return sym(-o["omega2"] * o["E_W1"] - tau * (o["A_tr_W1"] + o["H_W1"]))


def schur_w1(model: DiscreteModel, lam: float) -> SchurContext:
    """Eliminate V: ``A_W1(lam) = -w**2 E1 - lam (A1 + H_W1(lam))``."""
    bound = w1_validity_bound(model)
    if not abs(lam) < bound:
        raise ValidityError(f"|lambda| = {abs(lam):.6g} is outside the W1-side validity disc of radius {bound:.6g}")
    blocks = _blocks(model)
    _, _, _, a1, e1 = blocks
    h = _h_w1(model, lam, blocks)
    w2 = model.omega**2
    a_w1 = sym(-w2 * e1 - lam * (a1 + h))
    return SchurContext(W1_SIDE, float(lam), (-bound, bound),
                        {"A_W1": a_w1, "H_W1": h, "A_tr_W1": a1, "E_W1": e1, "omega2": w2})


def h_norm_bound(model: DiscreteModel, lam: float) -> float:
    """``2 |lam| ||M_V^-1|| ||A_tr||**2``, valid for ``|lam| <= 1/(2 ||M_V^-1 A_V||)``."""
    m_v = _blocks(model)[0]
    if m_v.size == 0:
        return 0.0
    return 2.0 * abs(lam) * np.linalg.norm(np.linalg.inv(m_v), 2) * np.linalg.norm(model.A_tr.entries, 2) ** 2


def schur_v(model: DiscreteModel, lam_t: float) -> SchurContext:
    """Eliminate W1 in the inverted parameter ``lam~ = 1/lam``.

    ``S~_V = (w**2 lam~ E1 + A1)^-1`` and ``K~_V = A_V - A_V1 S~_V A_1V``, which
    equals ``B_V^T Pi B_V`` with ``Pi = I - B_1 S~_V B_1^T`` on the boundary space.
    """
    bound = v_validity_bound(model)
    if not abs(lam_t) < bound:
        raise ValidityError(f"|lambda~| = {abs(lam_t):.6g} is outside the V-side validity disc of radius {bound:.6g}")
    m_v = _m_v_or_raise(model)
    m_v_, a_v, a_v1, a1, e1 = _blocks(model)
    w1_op = sym(model.omega**2 * lam_t * e1 + a1)
    try:
        chol = sla.cho_factor(w1_op)
    except np.linalg.LinAlgError:
        raise AssumptionError("W1 coercivity", f"W1 block is not definite at lambda~ = {lam_t}") from None
    s_v = sym(sla.cho_solve(chol, np.eye(len(a1))))
    k_v = sym(a_v - a_v1 @ sla.cho_solve(chol, a_v1.T))
    b_v = model.B_tr[:, model.v]
    b_1 = model.B_tr[:, model.w1]
    pi = sym(np.eye(b_v.shape[0]) - b_1 @ s_v @ b_1.T)
    return SchurContext(V_SIDE, float(lam_t), (-bound, bound),
                        {"K_V": k_v, "S_V": s_v, "M_V": m_v, "Pi": pi, "B_V": b_v})


def k_v_zero_identity(model: DiscreteModel):
    """Both sides of ``K~_V(0) = B_V^T P_grad B_V``; returns (assembled, projected)."""
    ctx = schur_v(model, 0.0)
    b_v = model.B_tr[:, model.v]
    g = model.grad_basis
    return ctx.operators["K_V"], sym(b_v.T @ (g @ g.T) @ b_v)


def tau_tilde_values(ctx: SchurContext) -> np.ndarray:
    """Nonzero eigenvalues of ``M_V^-1 K~_V``, via the symmetric ``F M_V^-1 F^T`` with ``F = Pi^1/2 B_V``."""
    o = ctx.operators
    f = psd_sqrt(o["Pi"]) @ o["B_V"]
    t = sym(f @ np.linalg.solve(o["M_V"], f.T))
    return np.linalg.eigvalsh(t)
