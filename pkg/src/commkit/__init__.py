"""commkit: constructions and certified checks for commutators of
entrywise-positive matrices and operators on the sequence space l2."""

from .matrices import (
    DynamicRangeError,
    NormCertificate,
    UnconvergedError,
    as_matrix,
    commutator,
    entrywise_leq,
    identity,
    matrix_from_json_dict,
    matrix_to_json_dict,
    max_abs,
    nilpotency_index,
    operator_norm,
    permutation_triangularization,
    read_matrix,
    spectral_radius,
    trace,
    write_matrix,
)
from .scalars import CoefficientOverflow, EpsScalar
from .lazyops import (
    LazyOp,
    block4,
    compress,
    conjugate_by_block_scaling,
    even_isometry,
    identity_op,
    odd_isometry,
    pair_swap,
    zero_op,
)
from .constructions import (
    FactorPair,
    HalmosPair,
    halmos_nilpotent_majorant,
    halmos_pair,
    halmos_pair_scaled,
    nilpotent_commutator_factors,
    self_commutator_isometry,
    trace_zero_commutator_factors,
)
from .verdict import Verdict
from .verifiers import (
    certified_halmos_popa_check,
    delta_threshold,
    finite_dim_obstructions,
    popa_bound,
    power_inequality_report,
    wielandt_violation_witness,
)

__version__ = "0.1.0"

__all__ = [
    "CoefficientOverflow",
    "DynamicRangeError",
    "EpsScalar",
    "FactorPair",
    "HalmosPair",
    "LazyOp",
    "NormCertificate",
    "UnconvergedError",
    "Verdict",
    "as_matrix",
    "block4",
    "certified_halmos_popa_check",
    "commutator",
    "compress",
    "conjugate_by_block_scaling",
    "delta_threshold",
    "entrywise_leq",
    "even_isometry",
    "finite_dim_obstructions",
    "halmos_nilpotent_majorant",
    "halmos_pair",
    "halmos_pair_scaled",
    "identity",
    "identity_op",
    "matrix_from_json_dict",
    "matrix_to_json_dict",
    "max_abs",
    "nilpotency_index",
    "nilpotent_commutator_factors",
    "odd_isometry",
    "operator_norm",
    "pair_swap",
    "permutation_triangularization",
    "popa_bound",
    "power_inequality_report",
    "read_matrix",
    "self_commutator_isometry",
    "spectral_radius",
    "trace",
    "trace_zero_commutator_factors",
    "wielandt_violation_witness",
    "write_matrix",
    "zero_op",
]
