"""Exact sign structure of determinantal KP II tau functions."""
from .connectivity import (
    ClassPartition,
    PathIncidence,
    classes,
    closed_path_audit,
    closed_path_violation,
    count_distinct,
    decompose,
    decompose_from_entries,
    path_incidence,
    redundancy_family,
    stratum_multiplicity,
)
from .info import (
    balancing_subsets,
    induced_distribution,
    kl_fixed_s,
    kl_grid,
    kl_induced,
    kl_star,
)
from .kp import hirota_coefficient, is_solitonic, kp_residual, triple_consistency
from .model import (
    MinorTable,
    ReducedModel,
    SolitonModel,
    TauExpansion,
    build_model,
    cauchy_binet,
    compute_minors,
    eval_tau,
    eval_tau_at,
    eval_u_at,
    exchange_audit,
    plucker_audit,
    reduce_model,
)
from .signature import (
    RowColSigns,
    Signature,
    apply_signature,
    extend_total,
    induced_signature,
    parse_signature,
)
from .strata import (
    disjoint_negatives_search,
    duality_check,
    leverage,
    negatives,
    omega,
)
from .tropical import (
    copy_identity_check,
    copy_soliton,
    dominant_subset,
    nested_groups,
)

__version__ = "0.1.0"

__all__ = [
    "ClassPartition",
    "MinorTable",
    "PathIncidence",
    "ReducedModel",
    "RowColSigns",
    "Signature",
    "SolitonModel",
    "TauExpansion",
    "apply_signature",
    "balancing_subsets",
    "build_model",
    "cauchy_binet",
    "classes",
    "closed_path_audit",
    "closed_path_violation",
    "compute_minors",
    "copy_identity_check",
    "copy_soliton",
    "count_distinct",
    "decompose",
    "decompose_from_entries",
    "disjoint_negatives_search",
    "dominant_subset",
    "duality_check",
    "eval_tau",
    "eval_tau_at",
    "eval_u_at",
    "exchange_audit",
    "extend_total",
    "hirota_coefficient",
    "induced_distribution",
    "induced_signature",
    "is_solitonic",
    "kl_fixed_s",
    "kl_grid",
    "kl_induced",
    "kl_star",
    "kp_residual",
    "leverage",
    "negatives",
    "nested_groups",
    "omega",
    "parse_signature",
    "path_incidence",
    "plucker_audit",
    "reduce_model",
    "redundancy_family",
    "stratum_multiplicity",
    "triple_consistency",
]
