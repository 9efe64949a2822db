"""Structural checks: the abstract spectral lemma, penalty convergence, assumption audit, gap check."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import AssumptionError, DomainError
from .linalg import condition, null_basis, psd_sqrt, sym
from .model import DiscreteModel
from .pencil import SpectrumReport
from .schur import COND_LIMIT, GapConstants, schur_v

# an audited restriction counts as degenerate once eps * cond reaches the
# 1e-8 agreement tolerance of the reductions
AUDIT_COND_LIMIT = 1e8

__all__ = [
    "AUDIT_COND_LIMIT",
    "AbstractLemmaReport",
    "abstract_lemma_check",
    "derived_lemma_pair",
    "PenaltyTable",
    "penalty_experiment",
    "AuditItem",
    "assumption_audit",
    "ASSUMPTIONS",
    "GapCheck",
    "gap_check",
    "k_v_kernel_check",
]

SPECTRUM_TOL = 1e-9
ZERO_RTOL = 1e-12


@dataclass
class AbstractLemmaReport:
    hypotheses: dict
    nonzero_product: np.ndarray
    nonzero_symmetric: np.ndarray
    max_difference: float
    spectra_agree: bool
    negative_count_product: int
    negative_count_symmetric: int
    negative_count_predicted: int
    max_imaginary: float

    @property
    def passed(self) -> bool:
        counts = {self.negative_count_product, self.negative_count_symmetric, self.negative_count_predicted}
        return self.spectra_agree and len(counts) == 1 and all(self.hypotheses.values())


def abstract_lemma_check(K, G, tol: float = SPECTRUM_TOL) -> AbstractLemmaReport:
    """Compare the spectra of ``(I+G)K`` and ``K^1/2 (I+G) K^1/2``.

    The product is eigensolved as a general matrix, the symmetric form with a
    symmetric solver.  The number of negative eigenvalues is also predicted
    without either: on ``(ker K)^perp`` the symmetric form is congruent to the
    compression of ``I+G``, so Sylvester's law of inertia gives the count.
    """
    k = sym(np.asarray(K, dtype=float))
    g = sym(np.asarray(G, dtype=float))
    n = k.shape[0]
    if g.shape != k.shape:
        raise DomainError("K and G must have the same shape")
    i_g = np.eye(n) + g
    scale_k = max(1.0, np.abs(k).max(initial=0))
    w_k = np.linalg.eigvalsh(k) if n else np.zeros(0)
    k_half = psd_sqrt(k) if n and w_k[0] >= -1e-12 * scale_k else None
    hyp = {"K positive semi-definite": k_half is not None,
           "I+G invertible": condition(i_g) < COND_LIMIT}
    if k_half is None:
        k_half = psd_sqrt(k - min(0.0, w_k[0]) * np.eye(n))
    sym_form = sym(k_half @ i_g @ k_half)
    w, q = np.linalg.eigh(k) if n else (np.zeros(0), np.zeros((0, 0)))
    norm_k = np.abs(w).max(initial=0)
    rank_k = int(np.sum(w > ZERO_RTOL * norm_k))
    q_r = q[:, n - rank_k:]
    compressed = sym(q_r.T @ i_g @ q_r)
    compressed_ok = condition(compressed) < COND_LIMIT
    # with K PSD the symmetric form vanishes on ker K and is injective on
    # (ker K)^perp exactly when the compression of I+G is; comparing numerical
    # ranks instead breaks down once K has eigenvalues near rounding
    hyp["ker K = ker K^1/2(I+G)K^1/2"] = compressed_ok
    hyp["compression of I+G to (ker K)^perp invertible"] = compressed_ok
    sym_eigs = np.linalg.eigvalsh(sym_form) if n else np.zeros(0)

    prod = np.linalg.eigvals(i_g @ k) if n else np.zeros(0, complex)
    nz_prod = np.sort_complex(prod[np.argsort(-np.abs(prod))[:rank_k]])
    nz_sym = np.sort(sym_eigs[np.argsort(-np.abs(sym_eigs))[:rank_k]])
    max_imag = float(np.abs(nz_prod.imag).max(initial=0))
    nz_prod_real = np.sort(nz_prod.real)
    diff = float(np.abs(nz_prod_real - nz_sym).max(initial=0))
    agree = diff <= tol * max(1.0, np.abs(nz_sym).max(initial=0)) and max_imag <= tol
    return AbstractLemmaReport(
        hypotheses=hyp,
        nonzero_product=nz_prod_real,
        nonzero_symmetric=nz_sym,
        max_difference=diff,
        spectra_agree=bool(agree),
        negative_count_product=int(np.sum(nz_prod_real < 0)),
        negative_count_symmetric=int(np.sum(nz_sym < 0)),
        negative_count_predicted=int(np.sum(np.linalg.eigvalsh(compressed) < 0)) if compressed.size else 0,
        max_imaginary=max_imag,
    )


def derived_lemma_pair(model: DiscreteModel, lam_t: float):
    """The pair ``(K~_V(lam~), G)`` with ``I + G = M_V^-1``, so ``(I+G)K`` has the tau~ spectrum."""
    ctx = schur_v(model, lam_t)
    m_inv = np.linalg.inv(ctx.operators["M_V"])
    return ctx.operators["K_V"], sym(m_inv) - np.eye(len(m_inv))


def k_v_kernel_check(model: DiscreteModel, lam_t: float) -> dict:
    """``K~_V(lam~)`` is PSD with kernel exactly ``ker B_V``.

    Checked structurally rather than by comparing numerical ranks, which is
    fragile once trace singular values decay: ``K~_V`` must annihilate
    ``ker B_V`` and be definite on its orthogonal complement.
    """
    k = schur_v(model, lam_t).operators["K_V"]
    b_v = model.B_tr[:, model.v]
    z = null_basis(b_v)
    r = null_basis(z.T) if z.shape[1] else np.eye(model.dims[0])
    norm = max(np.abs(k).max(initial=0), np.finfo(float).tiny)
    eps = np.finfo(float).eps
    ev = np.linalg.eigvalsh(k) if k.size else np.zeros(0)
    comp = np.linalg.eigvalsh(sym(r.T @ k @ r)) if r.shape[1] else np.zeros(0)
    out = {
        "psd": bool(ev.size == 0 or ev[0] >= -1e3 * eps * norm),
        "kernel_contained": bool(np.abs(k @ z).max(initial=0) <= 1e3 * eps * norm),
        # rounding in the kernel directions stays near eps * norm; genuine
        # eigenvalues scale like lam~ * s_min(B_V)**2 and can be far smaller than 1e3 eps
        "definite_on_complement": bool(comp.size == 0 or comp[0] > 10 * eps * norm),
        "dim_kernel_B": int(z.shape[1]),
    }
    out["passed"] = out["psd"] and out["kernel_contained"] and out["definite_on_complement"]
    return out


@dataclass
class PenaltyTable:
    lambdas: np.ndarray
    errors: np.ndarray
    slope: float
    decade_ratios: np.ndarray = field(default_factory=lambda: np.zeros(0))


def _x_norm(model, e):
    x = model.A_c.entries + model.A_eps.entries + model.A_tr.entries
    return float(np.sqrt(max(e @ x @ e, 0.0)))


def penalty_experiment(model: DiscreteModel, f, lambda_list) -> PenaltyTable:
    """Errors of the penalised solutions ``(A_c + A_eps + lam A_tr) u_lam = f``.

    The reference solves ``(A_c + A_eps) u = f`` on ``ker B_tr`` (Galerkin on
    the constrained subspace).  Errors are in the energy norm
    ``A_c + A_eps + A_tr``; the slope is a least-squares fit in log-log scale.
    """
    lams = np.asarray(lambda_list, dtype=float)
    if np.any(lams <= 0) or np.any(np.diff(lams) <= 0):
        raise DomainError("penalty parameters must be positive and increasing")
    f = np.asarray(f, dtype=float)
    a0 = sym(model.A_c.entries + model.A_eps.entries)
    z = null_basis(model.B_tr)
    red = sym(z.T @ a0 @ z)
    if z.shape[1] and condition(red) > COND_LIMIT:
        raise AssumptionError("constrained solve", "constrained system is singular")
    u = z @ np.linalg.solve(red, z.T @ f) if z.shape[1] else np.zeros_like(f)
    errs = np.array([_x_norm(model, u - np.linalg.solve(a0 + lam * model.A_tr.entries, f)) for lam in lams])
    with np.errstate(divide="ignore"):
        slope = float(np.polyfit(np.log(lams), np.log(errs), 1)[0]) if np.all(errs > 0) else 0.0
    scaled = lams * errs
    ratios = scaled[1:] / scaled[:-1] if np.all(scaled > 0) else np.zeros(0)
    return PenaltyTable(lams, errs, slope, ratios)


ASSUMPTIONS = ("NoNeumann", "NoDirichlet2", "NoDirichlet", "NoHybrid", "NoReduced")


@dataclass(frozen=True)
class AuditItem:
    name: str
    passed: bool
    condition: float
    dimension: int
    note: str = ""

    def as_dict(self):
        c = self.condition
        return {"passed": self.passed, "condition": c if np.isfinite(c) else None,
                "dimension": self.dimension, "note": self.note}


def _item(name, mat, note=""):
    c = condition(mat)
    return AuditItem(name, bool(c < AUDIT_COND_LIMIT), c, int(np.atleast_2d(mat).shape[0]) if np.size(mat) else 0, note)


def assumption_audit(model: DiscreteModel) -> dict:
    """The five non-degeneracy conditions as condition numbers of finite restrictions.

    An empty restriction is bijective and passes.  ``NoReduced`` is stated on
    ``Z1 = ker B_V`` and ``Z2 = ker P_grad B_V``; the variant on ``Z1^perp``,
    which is what the abstract spectral lemma needs, is reported separately as
    ``NoReduced(Z1perp)`` and does not count toward the five.
    """
    m = model.M
    v = model.v
    m_v = m[v, v]
    b_v = model.B_tr[:, v]
    g = model.grad_basis
    out = {"NoNeumann": _item("NoNeumann", m_v)}
    z = null_basis(model.B_tr)
    out["NoDirichlet2"] = _item("NoDirichlet2", z.T @ m @ z)
    z1 = null_basis(b_v)
    z2 = null_basis(g.T @ b_v) if g.shape[1] else np.eye(model.dims[0])
    out["NoDirichlet"] = _item("NoDirichlet", z1.T @ m_v @ z1)
    out["NoHybrid"] = _item("NoHybrid", z2.T @ m_v @ z2)
    if out["NoNeumann"].passed and model.dims[0]:
        m_inv = sym(np.linalg.inv(m_v))
        r1 = _item("NoReduced", z1.T @ m_inv @ z1)
        r2 = _item("NoReduced", z2.T @ m_inv @ z2)
        worst = max(r1.condition, r2.condition)
        out["NoReduced"] = AuditItem("NoReduced", r1.passed and r2.passed, worst, r1.dimension + r2.dimension,
                                     f"Z1: cond {r1.condition:.3e}; Z2: cond {r2.condition:.3e}")
        z1p = null_basis(z1.T) if z1.shape[1] else np.eye(model.dims[0])
        out["NoReduced(Z1perp)"] = _item("NoReduced(Z1perp)", z1p.T @ m_inv @ z1p, "hypothesis of the abstract lemma")
    else:
        note = "requires NoNeumann" if model.dims[0] else "dim V = 0"
        ok = model.dims[0] == 0
        out["NoReduced"] = AuditItem("NoReduced", ok, 1.0 if ok else np.inf, 0, note)
        out["NoReduced(Z1perp)"] = AuditItem("NoReduced(Z1perp)", ok, 1.0 if ok else np.inf, 0, note)
    return out


@dataclass
class GapCheck:
    passed: bool
    right_violations: list
    left_violations: list
    left_violations_certified: list
    c0: float
    c_infty: float
    c_left: float | None

    def as_dict(self):
        return {"passed": self.passed, "c0": _finite(self.c0), "c_infty": self.c_infty,
                "c_left": self.c_left, "right_violations": self.right_violations,
                "left_violations_c_infty": self.left_violations,
                "left_violations_c_left": self.left_violations_certified}


def _finite(x):
    return x if x is not None and np.isfinite(x) else None


def gap_check(model: DiscreteModel, report: SpectrumReport, constants: GapConstants) -> GapCheck:
    """No eigenvalue in ``(0, c0)`` and none in ``(-inf, -c_inf)``.

    ``passed`` follows that statement literally.  Eigenvalues below the
    measured left gap ``-c_left`` are listed separately; that list is empty
    unless the direct solver and the reduced left-gap computation disagree.
    """
    vals = [e.value for e in report.eigenvalues]
    right = [x for x in vals if 0.0 < x < constants.c0]
    left = [x for x in vals if x < -constants.c_infty]
    c_left = constants.c_left
    certified = [] if c_left is None else [x for x in vals if x < -c_left * (1 + 1e-9) - 1e-12]
    return GapCheck(not right and not left, right, left, certified, constants.c0, constants.c_infty, c_left)
