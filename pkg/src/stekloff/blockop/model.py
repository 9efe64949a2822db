"""Finite-dimensional models of the Stekloff pencil with an explicit V/W1/W2 split.

Coordinates are ordered ``[V | W1 | W2]``.  The boundary space ``L`` carries an
orthogonal split ``L = L_grad + L_curl`` given by two orthonormal bases.

Synthetic models are normalised so that ``A_c + A_eps + A_tr`` is the
identity, i.e. coordinates are orthonormal in the energy inner product.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import DomainError, ModelInvariantError
from .linalg import (
    SYMMETRY_RTOL,
    SymmetricOperator,
    complement_basis,
    null_basis,
    numerical_rank,
    random_orthogonal,
    range_basis,
    sym,
)

__all__ = [
    "SpectralKnobs",
    "DiscreteModel",
    "make_model",
    "from_matrices",
    "builtin_model",
    "validate_model",
    "model_to_dict",
    "model_from_dict",
    "load_model",
    "with_omega",
    "neumann_frequencies",
    "BUILTIN_MODELS",
]

INVARIANT_TOL = 1e-12


@dataclass(frozen=True)
class SpectralKnobs:
    """Spectral profile of a synthetic model.

    ``decay`` is the geometric ratio for the trace singular values on V and the
    eigenvalues of ``A_eps`` on V.  On W1 the eigenvalues ``e_k`` of ``A_eps``
    follow ``w1_scale * w1_decay**k``, or ``w1_scale * (k+1)**-w1_power`` when
    ``w1_power`` is set.
    """

    decay: float = 0.5
    trace_scale: float = 0.7
    eps_v_scale: float = 0.4
    w1_scale: float = 0.6
    w1_decay: float = 0.5
    w1_power: float | None = None
    grad_fraction: float = 0.5
    rank_fraction: float = 0.75

    def check(self):
        if not 0.0 < self.decay <= 1.0 or not 0.0 < self.w1_decay <= 1.0:
            raise DomainError("infeasible knobs: decay ratios must lie in (0, 1]")
        if self.trace_scale <= 0 or self.eps_v_scale <= 0:
            raise DomainError("infeasible knobs: scales must be positive (A_eps must stay definite)")
        if self.eps_v_scale + self.trace_scale**2 >= 1.0:
            raise DomainError("infeasible knobs: eps_v_scale + trace_scale**2 must be < 1 "
                              "for A_c to be definite on V")
        if not 0.0 < self.w1_scale < 1.0:
            raise DomainError("infeasible knobs: w1_scale must lie in (0, 1)")
        if self.w1_power is not None and self.w1_power <= 0:
            raise DomainError("infeasible knobs: w1_power must be positive")
        if not 0.0 <= self.grad_fraction <= 1.0 or not 0.0 <= self.rank_fraction <= 1.0:
            raise DomainError("infeasible knobs: fractions must lie in [0, 1]")


@dataclass(frozen=True)
class DiscreteModel:
    dims: tuple[int, int, int]
    A_c: SymmetricOperator
    A_eps: SymmetricOperator
    A_tr: SymmetricOperator
    B_tr: np.ndarray
    grad_basis: np.ndarray
    curl_basis: np.ndarray
    omega: float
    seed: int | None = None
    knobs: SpectralKnobs | None = None
    name: str | None = field(default=None, compare=False)

    @property
    def size(self) -> int:
        return sum(self.dims)

    @property
    def v(self) -> slice:
        return slice(0, self.dims[0])

    @property
    def w1(self) -> slice:
        return slice(self.dims[0], self.dims[0] + self.dims[1])

    @property
    def w2(self) -> slice:
        return slice(self.dims[0] + self.dims[1], self.size)

    @property
    def M(self) -> np.ndarray:
        """``A_c - omega**2 A_eps``, the pencil at lambda = 0."""
        return sym(self.A_c.entries - self.omega**2 * self.A_eps.entries)

    def fingerprint(self) -> dict:
        return {"dims": list(self.dims), "seed": self.seed, "omega": self.omega, "name": self.name}


def _readonly(a):
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def _w1_profile(n1: int, knobs: SpectralKnobs) -> np.ndarray:
    k = np.arange(n1)
    if knobs.w1_power is not None:
        return knobs.w1_scale * (k + 1.0) ** (-knobs.w1_power)
    return knobs.w1_scale * knobs.w1_decay**k


def make_model(dims, seed: int = 0, omega: float = 1.0, knobs: SpectralKnobs | None = None) -> DiscreteModel:
    """Random model satisfying every structural invariant, deterministic in ``seed``."""
    knobs = knobs or SpectralKnobs()
    knobs.check()
    n_v, n_1, n_2 = (int(d) for d in dims)
    if min(n_v, n_1, n_2) < 0:
        raise DomainError(f"dimensions must be non-negative, got {dims}")
    if n_1 < 1:
        raise DomainError("W1 must be nontrivial (dim W1 >= 1)")
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega}")
    rng = np.random.default_rng(seed)
    n_grad = math.ceil(knobs.grad_fraction * n_v)
    n_l = n_grad + n_1

    # W1: trace is a bijection onto L_curl, A_eps + A_tr = I on the block
    e1 = _w1_profile(n_1, knobs)
    u1 = random_orthogonal(rng, n_1)
    c1 = random_orthogonal(rng, n_1) @ np.diag(np.sqrt(1.0 - e1)) @ u1.T
    eps1 = u1 @ np.diag(e1) @ u1.T

    # V: low-rank trace with decaying singular values, A_c fills up to I
    rank_v = min(math.ceil(knobs.rank_fraction * n_v), n_l)
    s = knobs.trace_scale * knobs.decay ** np.arange(rank_v)
    u_l = random_orthogonal(rng, n_l)[:, :rank_v]
    w_v = random_orthogonal(rng, n_v)[:, :rank_v]
    b_v = u_l @ np.diag(s) @ w_v.T
    q_v = random_orthogonal(rng, n_v)
    eps_v = q_v @ np.diag(knobs.eps_v_scale * knobs.decay ** np.arange(n_v)) @ q_v.T
    ac_v = np.eye(n_v) - eps_v - b_v.T @ b_v

    n = n_v + n_1 + n_2
    b = np.zeros((n_l, n))
    b[:, :n_v] = b_v
    b[n_grad:, n_v:n_v + n_1] = c1
    a_c = np.zeros((n, n))
    a_c[:n_v, :n_v] = ac_v
    a_eps = np.zeros((n, n))
    a_eps[:n_v, :n_v] = eps_v
    a_eps[n_v:n_v + n_1, n_v:n_v + n_1] = eps1
    a_eps[n_v + n_1:, n_v + n_1:] = np.eye(n_2)
    grad = np.eye(n_l)[:, :n_grad]
    curl = np.eye(n_l)[:, n_grad:]
    return from_matrices((n_v, n_1, n_2), a_c, a_eps, b, omega=omega, grad_basis=grad,
                         curl_basis=curl, seed=seed, knobs=knobs)


def from_matrices(dims, A_c, A_eps, B_tr, omega: float = 1.0, grad_basis=None, curl_basis=None,
                  seed=None, knobs=None, name=None, A_tr=None, validate: bool = True) -> DiscreteModel:
    """Build a model from explicit matrices.

    When the boundary split is not given, ``L_curl`` is taken as the range of
    the trace on W1 and ``L_grad`` as its orthogonal complement.  ``A_tr``
    defaults to ``B_tr.T @ B_tr``; passing it explicitly lets the invariant
    checker catch inconsistent input.
    """
    dims = tuple(int(d) for d in dims)
    b = np.atleast_2d(np.asarray(B_tr, dtype=float))
    if b.shape[1] != sum(dims):
        raise DomainError(f"B_tr has {b.shape[1]} columns, expected {sum(dims)}")
    if curl_basis is None:
        curl_basis = range_basis(b[:, dims[0]:dims[0] + dims[1]])
    curl_basis = np.asarray(curl_basis, dtype=float).reshape(b.shape[0], -1)
    if grad_basis is None:
        grad_basis = complement_basis(curl_basis, b.shape[0])
    grad_basis = np.asarray(grad_basis, dtype=float).reshape(b.shape[0], -1)
    a_tr = b.T @ b if A_tr is None else np.asarray(A_tr, dtype=float)
    for label, a in (("A_c", A_c), ("A_eps", A_eps), ("A_tr", a_tr)):
        a = np.asarray(a, dtype=float)
        if a.shape != (sum(dims), sum(dims)):
            raise DomainError(f"{label} has shape {a.shape}, expected {(sum(dims), sum(dims))}")
        if np.abs(a - a.T).max(initial=0) > SYMMETRY_RTOL * max(1.0, np.abs(a).max(initial=0)):
            raise ModelInvariantError("symmetric forms", f"{label} is not symmetric")
    model = DiscreteModel(
        dims=dims,
        A_c=SymmetricOperator(A_c),
        A_eps=SymmetricOperator(A_eps),
        A_tr=SymmetricOperator(a_tr),
        B_tr=_readonly(b),
        grad_basis=_readonly(grad_basis),
        curl_basis=_readonly(curl_basis),
        omega=float(omega),
        seed=seed,
        knobs=knobs,
        name=name,
    )
    if validate:
        validate_model(model)
    return model


def validate_model(model: DiscreteModel, tol: float = INVARIANT_TOL) -> None:
    """Raise ``ModelInvariantError`` naming the first violated invariant."""
    ac, ae, at = model.A_c.entries, model.A_eps.entries, model.A_tr.entries
    b = model.B_tr
    v, w1, w2 = model.v, model.w1, model.w2
    scale = max(1.0, np.abs(ac).max(initial=0), np.abs(ae).max(initial=0), np.abs(at).max(initial=0))
    if not model.omega > 0:
        raise ModelInvariantError("omega", f"omega must be positive, got {model.omega}")
    if model.dims[1] < 1:
        raise ModelInvariantError("W1 nontrivial", "dim W1 must be at least 1")
    if np.linalg.eigvalsh(at)[0] < -tol * scale:
        raise ModelInvariantError("A_tr PSD", "trace form is not positive semi-definite")
    if np.abs(at - b.T @ b).max(initial=0) > tol * scale:
        raise ModelInvariantError("A_tr = B_tr^T B_tr", "trace form does not factor through B_tr")
    if np.linalg.eigvalsh(ae)[0] <= tol * scale:
        raise ModelInvariantError("A_eps PD", "A_eps is not positive definite")
    off = ac.copy()
    off[v, v] = 0.0
    if np.abs(off).max(initial=0) > tol * scale:
        raise ModelInvariantError("A_c kernel", "A_c does not vanish on W1 + W2")
    if model.dims[0] and np.linalg.eigvalsh(ac[v, v])[0] <= tol * scale:
        raise ModelInvariantError("A_c kernel", "A_c is not definite on V (kernel larger than W1 + W2)")
    for a, label in ((ae, "A_eps"),):
        blk = a.copy()
        blk[v, v] = blk[w1, w1] = blk[w2, w2] = 0.0
        if np.abs(blk).max(initial=0) > tol * scale:
            raise ModelInvariantError("block orthogonality", f"{label} couples different blocks")
    if np.abs(b[:, w2]).max(initial=0) > tol * scale:
        raise ModelInvariantError("B_tr vanishes on W2", "trace is nonzero on W2")
    b1 = b[:, w1]
    if numerical_rank(b1) < model.dims[1]:
        raise ModelInvariantError("B_tr injective on W1", "trace has a kernel on W1")
    g, c = model.grad_basis, model.curl_basis
    n_l = b.shape[0]
    if g.shape[1] + c.shape[1] != n_l:
        raise ModelInvariantError("boundary split", "L_grad and L_curl do not span L")
    q = np.hstack([g, c])
    if np.abs(q.T @ q - np.eye(n_l)).max(initial=0) > 1e-10:
        raise ModelInvariantError("boundary split", "L_grad and L_curl bases are not orthonormal")
    p_curl = c @ c.T
    if np.abs(b1 - p_curl @ b1).max(initial=0) > 1e-10 * max(1.0, np.abs(b1).max()) or c.shape[1] != numerical_rank(b1):
        raise ModelInvariantError("range B_tr|W1 = L_curl", "trace range on W1 differs from L_curl")


def _knobs_dict(k):
    return None if k is None else asdict(k)


def model_to_dict(model: DiscreteModel) -> dict:
    return {
        "dims": list(model.dims),
        "omega": model.omega,
        "seed": model.seed,
        "name": model.name,
        "A_c": model.A_c.entries.tolist(),
        "A_eps": model.A_eps.entries.tolist(),
        "B_tr": model.B_tr.tolist(),
        "grad_basis": model.grad_basis.tolist(),
        "curl_basis": model.curl_basis.tolist(),
        "knobs": _knobs_dict(model.knobs),
    }


def model_from_dict(d: dict, omega: float | None = None) -> DiscreteModel:
    known = {"dims", "omega", "seed", "name", "A_c", "A_eps", "A_tr", "B_tr", "grad_basis", "curl_basis", "knobs"}
    unknown = set(d) - known
    if unknown:
        raise DomainError(f"unknown model keys: {sorted(unknown)}")
    missing = {"dims", "A_c", "A_eps", "B_tr"} - set(d)
    if missing:
        raise DomainError(f"missing model keys: {sorted(missing)}")
    n_l = np.atleast_2d(np.asarray(d["B_tr"], dtype=float)).shape[0]

    def basis(key):
        if d.get(key) is None:
            return None
        return np.asarray(d[key], dtype=float).reshape(n_l, -1)

    knobs = SpectralKnobs(**d["knobs"]) if d.get("knobs") else None
    return from_matrices(d["dims"], d["A_c"], d["A_eps"], d["B_tr"],
                         omega=d.get("omega", 1.0) if omega is None else omega,
                         grad_basis=basis("grad_basis"), curl_basis=basis("curl_basis"),
                         seed=d.get("seed"), knobs=knobs, name=d.get("name"), A_tr=d.get("A_tr"))


def _golden():
    # trace (1, 1) on W1 and (1, 0) on V: A_tr = [[1, 1], [1, 2]]
    return from_matrices((1, 1, 0), np.diag([2.0, 0.0]), np.eye(2), [[1.0, 1.0], [0.0, 1.0]], name="golden")


def _degenerate():
    # one-dimensional trace space, A_tr = [[1, 1], [1, 1]], empty spectrum
    return from_matrices((1, 1, 0), np.diag([2.0, 0.0]), np.eye(2), [[1.0, 1.0]], name="degenerate")


BUILTIN_MODELS = {"golden": _golden, "degenerate": _degenerate}


def builtin_model(name: str) -> DiscreteModel:
    try:
        return BUILTIN_MODELS[name]()
    except KeyError:
        raise DomainError(f"unknown builtin model {name!r}; choose from {sorted(BUILTIN_MODELS)}") from None


def load_model(spec: str, omega: float | None = None) -> DiscreteModel:
    """A builtin model name or the path of a JSON file written by ``model_to_dict``."""
    if spec in BUILTIN_MODELS:
        m = builtin_model(spec)
        return m if omega is None else with_omega(m, omega)
    with open(spec) as fh:
        return model_from_dict(json.load(fh), omega=omega)


def with_omega(model: DiscreteModel, omega: float) -> DiscreteModel:
    return from_matrices(model.dims, model.A_c.entries, model.A_eps.entries, model.B_tr, omega=omega,
                         grad_basis=model.grad_basis, curl_basis=model.curl_basis, seed=model.seed,
                         knobs=model.knobs, name=model.name)


def neumann_frequencies(model: DiscreteModel) -> np.ndarray:
    """Frequencies w with w**2 an eigenvalue of (A_c, A_eps) on V, where the V block degenerates."""
    from scipy.linalg import eigh

    v = model.v
    if model.dims[0] == 0:
        return np.zeros(0)
    w = eigh(model.A_c.entries[v, v], model.A_eps.entries[v, v], eigvals_only=True)
    return np.sqrt(w[w > 0])


def kernel_of_trace_on_v(model: DiscreteModel) -> np.ndarray:
    return null_basis(model.B_tr[:, model.v])
