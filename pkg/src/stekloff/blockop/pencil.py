"""The linear pencil ``A_X(lam) = (A_c - w**2 A_eps) - lam A_tr`` and its brute-force spectrum."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla

from ..errors import ModelInvariantError, SingularPencilError
from .linalg import RANK_RTOL, SymmetricOperator, null_basis, sym
from .model import DiscreteModel

__all__ = [
    "assemble_pencil",
    "BlockForm",
    "block_form",
    "Eigenvalue",
    "SpectrumReport",
    "direct_solve",
    "eigenvectors",
    "group_eigenvalues",
]

BLOCKS = ("V", "W1", "W2")
CLUSTER_RTOL = 1e-9


def assemble_pencil(model: DiscreteModel, lam: float) -> SymmetricOperator:
    return SymmetricOperator(model.A_c.entries - model.omega**2 * model.A_eps.entries
                             - lam * model.A_tr.entries)


@dataclass(frozen=True)
class BlockForm:
    blocks: dict
    zero_pattern_ok: bool
    violations: tuple

    def __getitem__(self, key):
        return self.blocks[key]


def block_form(model: DiscreteModel, lam: float, raise_on_violation: bool = True) -> BlockForm:
    """The nine blocks of ``A_X(lam)`` in V/W1/W2 coordinates, plus a zero-pattern check.

    ``A_c`` may only live on V x V, ``A_eps`` must be block diagonal, ``A_tr``
    must vanish on every block that touches W2.
    """
    a = assemble_pencil(model, lam).entries
    sl = dict(zip(BLOCKS, (model.v, model.w1, model.w2)))
    blocks = {(r, c): a[sl[r], sl[c]] for r in BLOCKS for c in BLOCKS}
    bad = []
    parts = {"A_c": model.A_c.entries, "A_eps": model.A_eps.entries, "A_tr": model.A_tr.entries}
    allowed = {
        "A_c": {("V", "V")},
        "A_eps": {(b, b) for b in BLOCKS},
        "A_tr": {(r, c) for r in ("V", "W1") for c in ("V", "W1")},
    }
    for name, mat in parts.items():
        for r in BLOCKS:
            for c in BLOCKS:
                if (r, c) not in allowed[name] and np.any(mat[sl[r], sl[c]] != 0.0):
                    bad.append(f"{name}[{r},{c}] != 0")
    if bad and raise_on_violation:
        raise ModelInvariantError("block zero pattern", "; ".join(bad))
    return BlockForm(blocks, not bad, tuple(bad))


@dataclass(frozen=True)
class Eigenvalue:
    value: float
    multiplicity: int
    method: str
    side: str

    @staticmethod
    def side_of(x: float) -> str:
        return "negative" if x < 0 else ("positive" if x > 0 else "zero")


@dataclass
class SpectrumReport:
    eigenvalues: list
    fingerprint: dict
    gap: object = None
    audits: dict = field(default_factory=dict)
    finite_count: int = 0

    def values(self, with_multiplicity: bool = True) -> np.ndarray:
        if with_multiplicity:
            return np.array([e.value for e in self.eigenvalues for _ in range(e.multiplicity)])
        return np.array([e.value for e in self.eigenvalues])


def group_eigenvalues(values, rtol: float = CLUSTER_RTOL):
    """Sort and merge values closer than ``rtol * max(1, |x|)`` into (value, multiplicity) pairs."""
    out = []
    for x in np.sort(np.asarray(values, dtype=float)):
        if out and abs(x - out[-1][0]) <= rtol * max(1.0, abs(x)):
            v, m = out[-1]
            out[-1] = ((v * m + x) / (m + 1), m + 1)
        else:
            out.append((float(x), 1))
    return out


def _shift_invert(m, a, b, sigma):
    """Eigenvalues ``sigma + 1/mu`` from ``mu`` in spec(B (M - sigma A)^-1 B^T), nearest first."""
    lu = sla.lu_factor(m - sigma * a)
    t = sym(b @ sla.lu_solve(lu, b.T))
    mu = np.linalg.eigvalsh(t)
    mu = mu[np.argsort(-np.abs(mu))]
    return mu


def _pick_shift(m, a, scale):
    for sigma in (0.0, 0.3183 * scale, -0.2718 * scale, 0.577 * scale, -1.414 * scale):
        s = np.linalg.svd(m - sigma * a, compute_uv=False)
        if s[-1] > 1e-8 * s[0]:
            return sigma
    raise SingularPencilError("could not find a regular shift for the pencil")


def direct_solve(model: DiscreteModel) -> SpectrumReport:
    """All finite eigenvalues of the pencil by dense linear algebra.

    Two reductions are combined.  On the range of ``A_tr`` the pencil is
    reduced to a definite problem ``(S, D)`` after eliminating ``ker A_tr``;
    this resolves large eigenvalues well.  The inverse form
    ``B M^-1 B^T v = (1/lam) v`` resolves small eigenvalues well.  Estimates
    are then polished by shift-and-invert at each eigenvalue.
    """
    m = model.M
    a = model.A_tr.entries
    b = model.B_tr
    n = model.size
    norm = max(np.abs(m).max(), np.abs(a).max(), 1e-300)

    common = null_basis(np.vstack([m, a]) / norm)
    if common.shape[1]:
        raise SingularPencilError(f"pencil has a common kernel of dimension {common.shape[1]}")

    # split along ker A_tr = ker B_tr
    _, s, vt = np.linalg.svd(b) if b.size else (None, np.zeros(0), np.eye(n))
    rank = int(np.sum(s > RANK_RTOL * s[0])) if s.size and s[0] > 0 else 0
    q_r = vt[:rank].T
    q_0 = vt[rank:].T
    m00 = sym(q_0.T @ m @ q_0)
    w00 = np.linalg.eigvalsh(m00) if m00.size else np.zeros(0)
    null00 = int(np.sum(np.abs(w00) <= 1e-10 * norm))
    count = rank - null00

    estimates = []
    if null00 == 0 and rank:
        mr0 = q_r.T @ m @ q_0
        schur = sym(q_r.T @ m @ q_r - (mr0 @ np.linalg.solve(m00, mr0.T) if q_0.shape[1] else 0.0))
        d = sym(q_r.T @ a @ q_r)
        lam_big = sla.eigh(schur, d, eigvals_only=True)
        estimates.extend(x for x in lam_big if abs(x) > 1.0)

    if count:
        sigma = _pick_shift(m, a, 1.0)
        mu = _shift_invert(m, a, b, sigma)[:count]
        lam_small = sigma + 1.0 / mu
        if null00 == 0 and rank:
            lam_small = [x for x in lam_small if abs(x) <= 1.0]
        estimates.extend(lam_small)

    # polish: shift just off each estimate, the nearest eigenvalues dominate 1/mu
    refined = []
    for x in sorted(estimates):
        sigma = x + 1e-7 * max(1.0, abs(x))
        try:
            mu = _shift_invert(m, a, b, sigma)
        except (np.linalg.LinAlgError, ValueError):
            refined.append(x)
            continue
        refined.append(sigma + 1.0 / mu[0])
    grouped = group_eigenvalues(refined)
    # a polished cluster of multiplicity k needs k estimates; if two estimates
    # collapsed onto one simple eigenvalue keep the raw estimates instead
    if sum(k for _, k in grouped) != len(estimates):
        grouped = group_eigenvalues(estimates)
    eigs = [Eigenvalue(float(v), int(k), "direct", Eigenvalue.side_of(v)) for v, k in grouped]
    return SpectrumReport(eigs, model.fingerprint(), finite_count=count)


def eigenvectors(model: DiscreteModel, lam: float, multiplicity: int = 1) -> np.ndarray:
    """Orthonormal basis (columns) of the approximate kernel of ``A_X(lam)``."""
    a = assemble_pencil(model, lam).entries
    _, _, vt = np.linalg.svd(a)
    return vt[-multiplicity:].T
