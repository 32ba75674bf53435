"""Entanglement witnesses from operator Schmidt decompositions."""

from .measures import (
    MeasureBoundReport,
    bipartite_bounds,
    gme_bounds,
    pure_state_oracle,
    s_value,
)
from .operators import (
    Bipartition,
    DecompositionError,
    HermitianOperator,
    OperatorSchmidtDecomposition,
    enumerate_bipartitions,
    osd,
    partial_trace,
    realign,
    tensor_product,
)
from .optimizer import (
    OptimizationTrace,
    OptimizerConfig,
    Schedule,
    grad_visibility_wrt_mu,
    grad_visibility_wrt_rotation,
    optimize_bipartite,
    optimize_multipartite,
    random_start,
    so_generators,
    step_ops,
    step_osc,
)
from .schmidt_number import (
    SchmidtNumberCoefficient,
    extended_ccnr_sn_check,
    lambda_k,
    lambda_k_bruteforce,
    sn_witness,
)
from .states import NamedState, make_state, maximally_mixed, random_density, random_pure_product
from .witnesses import (
    NOT_DETECTING,
    GmeCertificate,
    Witness,
    WitnessKind,
    ccnr_value,
    ccnr_witness,
    evaluate,
    fidelity_witness,
    gme_witness,
    osd_witness,
    visibility,
)

__version__ = "0.1.0"

__all__ = [
    "MeasureBoundReport",
    "bipartite_bounds",
    "gme_bounds",
    "pure_state_oracle",
    "s_value",
    "Bipartition",
    "DecompositionError",
    "HermitianOperator",
    "OperatorSchmidtDecomposition",
    "enumerate_bipartitions",
    "osd",
    "partial_trace",
    "realign",
    "tensor_product",
    "OptimizationTrace",
    "OptimizerConfig",
    "Schedule",
    "grad_visibility_wrt_mu",
    "grad_visibility_wrt_rotation",
    "optimize_bipartite",
    "optimize_multipartite",
    "random_start",
    "so_generators",
    "step_ops",
    "step_osc",
    "SchmidtNumberCoefficient",
    "extended_ccnr_sn_check",
    "lambda_k",
    "lambda_k_bruteforce",
    "sn_witness",
    "NamedState",
    "make_state",
    "maximally_mixed",
    "random_density",
    "random_pure_product",
    "NOT_DETECTING",
    "GmeCertificate",
    "Witness",
    "WitnessKind",
    "ccnr_value",
    "ccnr_witness",
    "evaluate",
    "fidelity_witness",
    "gme_witness",
    "osd_witness",
    "visibility",
]
