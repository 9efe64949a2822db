"""One-call verification of a model: every reduction checked against the brute-force spectrum."""

from __future__ import annotations

import numpy as np

from ..errors import AssumptionError
from .checks import abstract_lemma_check, assumption_audit, derived_lemma_pair, gap_check, penalty_experiment
from .fixedpoint import fixed_point_eigensolve
from .model import DiscreteModel
from .pencil import direct_solve, eigenvectors
from .schur import gap_constants

__all__ = ["AGREEMENT_RTOL", "compare_spectra", "verify_model", "PENALTY_LAMBDAS"]

AGREEMENT_RTOL = 1e-8
PENALTY_LAMBDAS = tuple(10.0**k for k in range(2, 7))


def compare_spectra(reference, candidate, rtol: float = AGREEMENT_RTOL) -> dict:
    """Match two sorted lists of (value, multiplicity) eigenvalue groups one to one."""
    ref = sorted((e.value, e.multiplicity) for e in reference)
    cand = sorted((e.value, e.multiplicity) for e in candidate)
    out = {"reference_count": len(ref), "candidate_count": len(cand), "max_error": 0.0,
           "multiplicities_match": True}
    if len(ref) != len(cand):
        out["passed"] = False
        out["max_error"] = None
        return out
    errs = [abs(a - b) / max(1.0, abs(a)) for (a, _), (b, _) in zip(ref, cand)]
    out["max_error"] = float(max(errs, default=0.0))
    out["multiplicities_match"] = all(ma == mb for (_, ma), (_, mb) in zip(ref, cand))
    out["passed"] = bool(out["max_error"] <= rtol and out["multiplicities_match"])
    return out


def _in_w1(e, window):
    return window[0] < e.value < window[1]


def _in_v(e, window):
    x = e.value
    return x != 0 and window[0] < 1.0 / x < window[1]


def _finite(x):
    return float(x) if x is not None and np.isfinite(x) else None


def verify_model(model: DiscreteModel, penalty_lambdas=PENALTY_LAMBDAS, lemma_fraction: float = 0.5) -> dict:
    """Run the full check battery and return a JSON-ready report.

    The returned dict has the keys ``model``, ``eigenvalues``, ``gap``,
    ``audits``, ``penalty``, ``agreement`` and a ``status`` block used for the
    exit code.  Checks that depend on an invertible V block are skipped with a
    reason when that assumption fails.
    """
    audits = assumption_audit(model)
    report = direct_solve(model)
    direct = report.eigenvalues
    w2 = model.w2
    w2_leak = 0.0
    for e in direct:
        vec = eigenvectors(model, e.value, e.multiplicity)
        w2_leak = max(w2_leak, float(np.linalg.norm(vec[w2]) / np.linalg.norm(vec)) if model.dims[2] else 0.0)

    out = {
        "model": {**model.fingerprint(), "knobs": None if model.knobs is None else vars(model.knobs).copy()},
        "eigenvalues": [{"lambda": e.value, "multiplicity": e.multiplicity, "method": e.method, "side": e.side}
                        for e in direct],
        "audits": {k: v.as_dict() for k, v in audits.items()},
    }
    skipped = []
    agreement = {"rtol": AGREEMENT_RTOL, "w2_component_max": w2_leak, "w2_decoupled": w2_leak <= 1e-12}
    gap = {"skipped": None}
    disagreement = False
    if not audits["NoNeumann"].passed:
        reason = "NoNeumann fails: the V-side reductions need an invertible V block"
        skipped = ["gap", "fixedpoint-W1", "fixedpoint-V", "abstract_lemma"]
        gap = {"skipped": reason}
        agreement["skipped"] = {"checks": skipped, "reason": reason}
    else:
        const = gap_constants(model)
        gc = gap_check(model, report, const)
        gap = {**const.as_dict(), **gc.as_dict(), "skipped": None}
        gap["c0"] = _finite(const.c0)
        gap["positivity_radius"] = _finite(const.positivity_radius)
        # the literal left-gap statement with c_infty is recorded but not gated
        gap["passed"] = not gc.right_violations and not gc.left_violations_certified
        gap["literal_c_infty_passed"] = gc.passed
        for side, key, inside in (("W1", "fixedpoint_W1", _in_w1), ("V", "fixedpoint_V", _in_v)):
            try:
                fp = fixed_point_eigensolve(model, side)
            except AssumptionError as exc:
                agreement[key] = {"passed": False, "error": str(exc)}
                disagreement = True
                continue
            ref = [e for e in direct if inside(e, fp.window)]
            cmp = compare_spectra(ref, fp.eigenvalues)
            cmp["window"] = [float(fp.window[0]), float(fp.window[1])]
            cmp["eigenvalues"] = [e.value for e in fp.eigenvalues]
            agreement[key] = cmp
            disagreement |= not cmp["passed"]
        lam_t = lemma_fraction / const.c_infty
        lemma = abstract_lemma_check(*derived_lemma_pair(model, lam_t))
        agreement["abstract_lemma"] = {
            "lambda_tilde": lam_t,
            "passed": lemma.passed,
            "hypotheses": lemma.hypotheses,
            "max_difference": lemma.max_difference,
            "negative_counts": [lemma.negative_count_product, lemma.negative_count_symmetric,
                                lemma.negative_count_predicted],
        }
        disagreement |= not lemma.passed
    rng = np.random.default_rng(model.seed if model.seed is not None else 0)
    f = rng.standard_normal(model.size)
    pen = penalty_experiment(model, f, penalty_lambdas)
    out["penalty"] = {
        "lambdas": pen.lambdas.tolist(),
        "errors": pen.errors.tolist(),
        "slope": pen.slope,
        "lambda_times_error_ratios": pen.decade_ratios.tolist(),
        "asymptotic": bool(abs(pen.slope + 1.0) <= 0.1),
    }
    out["gap"] = gap
    out["agreement"] = agreement
    gap_failed = gap.get("skipped") is None and not gap.get("passed", True)
    out["status"] = {
        "oracle_disagreement": bool(disagreement or gap_failed or not agreement["w2_decoupled"]),
        "audit_failures": [k for k in ("NoNeumann", "NoDirichlet2", "NoDirichlet", "NoHybrid", "NoReduced")
                           if not audits[k].passed],
        "skipped": skipped,
    }
    return out
