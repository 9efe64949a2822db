"""Block-operator machinery for the Stekloff pencil on finite-dimensional models."""

from .checks import (
    ASSUMPTIONS,
    AbstractLemmaReport,
    AuditItem,
    GapCheck,
    PenaltyTable,
    abstract_lemma_check,
    assumption_audit,
    derived_lemma_pair,
    gap_check,
    k_v_kernel_check,
    penalty_experiment,
)
from .fixedpoint import FixedPoint, FixedPointResult, TauCurve, default_window, fixed_point_eigensolve, tau_curves, tau_values
from .model import (
    BUILTIN_MODELS,
    DiscreteModel,
    SpectralKnobs,
    builtin_model,
    from_matrices,
    load_model,
    make_model,
    model_from_dict,
    model_to_dict,
    neumann_frequencies,
    validate_model,
    with_omega,
)
from .pencil import BlockForm, Eigenvalue, SpectrumReport, assemble_pencil, block_form, direct_solve, eigenvectors
from .schur import (
    GapConstants,
    SchurContext,
    coercivity_threshold,
    gap_constants,
    k_v_zero_identity,
    neumann_norm,
    schur_v,
    schur_w1,
    tau_tilde_values,
    v_validity_bound,
    w1_validity_bound,
)
from .verify import compare_spectra, verify_model
