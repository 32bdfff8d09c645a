"""High-order clustering for the tensor block model.

Observations are dense order-d tensors whose signal is blockwise constant:
each mode carries a cluster assignment, and the signal entry is the core
value indexed by the clusters of its coordinates. The package provides the
spectral initializer `hsc`, the iterative refinement `hlloyd`, baselines
(`hooi_estimate`, `hosvd_cluster`, `oracle_estimate`, `brute_force_mle`),
misclassification metrics, a seeded Monte-Carlo harness, and a CLI
(`hoclust`). Modes are numbered from 0 like numpy axes; cluster labels run
from 1.
"""

from .baselines import (
    OracleConfig,
    brute_force_mle,
    contaminate_labels,
    hooi_estimate,
    hosvd_cluster,
    oracle_estimate,
)
from .blockmodel import (
    BlockModel,
    balance_check,
    balanced_labels,
    bic,
    block_mean_estimate,
    delta_min_sq,
    delta_sq,
    estimate_xhat,
    objective,
    proportion_labels,
    random_core,
    random_instance,
    sample,
    snr,
    synthesize_signal,
)
from .experiments import (
    METHODS,
    ExperimentGrid,
    RunRecord,
    phase_delta_min,
    run_estimation_comparison,
    run_init_impact,
    run_method_comparison,
    run_phase_transition,
    summarize,
    write_records_csv,
)
from .hlloyd import (
    HLloydConfig,
    HLloydTrace,
    aggregate_mode,
    assign_mode,
    default_rounds,
    hlloyd,
)
from .hsc import (
    HscConfig,
    hosvd_factors,
    hsc,
    kmeans_cost,
    power_step,
    projected_rows,
    relaxed_kmeans,
)
from .ingest import DataError, ingest_edgelist, ingest_events
from .labels import (
    cluster_sizes,
    clustering_error_rate,
    labels_from_csv,
    labels_to_csv,
    membership_matrix,
    misclassification_rate,
    validate_labels,
    weighted_membership,
)
from .linalg import singular_values, top_left_singular_vectors
from .tensor import (
    TENSOR_MAGIC,
    fold,
    frobenius,
    inner,
    kron,
    mode_product,
    multi_product,
    read_tensor,
    unfold,
    write_tensor,
)

__version__ = "0.1.0"

__all__ = [
    "BlockModel",
    "DataError",
    "ExperimentGrid",
    "HLloydConfig",
    "HLloydTrace",
    "HscConfig",
    "METHODS",
    "OracleConfig",
    "RunRecord",
    "TENSOR_MAGIC",
    "aggregate_mode",
    "assign_mode",
    "balance_check",
    "balanced_labels",
    "bic",
    "block_mean_estimate",
    "brute_force_mle",
    "cluster_sizes",
    "clustering_error_rate",
    "contaminate_labels",
    "default_rounds",
    "delta_min_sq",
    "delta_sq",
    "estimate_xhat",
    "fold",
    "frobenius",
    "hlloyd",
    "hooi_estimate",
    "hosvd_cluster",
    "hosvd_factors",
    "hsc",
    "ingest_edgelist",
    "ingest_events",
    "inner",
    "kmeans_cost",
    "kron",
    "labels_from_csv",
    "labels_to_csv",
    "membership_matrix",
    "misclassification_rate",
    "mode_product",
    "multi_product",
    "objective",
    "oracle_estimate",
    "phase_delta_min",
    "power_step",
    "projected_rows",
    "proportion_labels",
    "random_core",
    "random_instance",
    "read_tensor",
    "relaxed_kmeans",
    "run_estimation_comparison",
    "run_init_impact",
    "run_method_comparison",
    "run_phase_transition",
    "sample",
    "singular_values",
    "snr",
    "summarize",
    "synthesize_signal",
    "top_left_singular_vectors",
    "unfold",
    "validate_labels",
    "weighted_membership",
    "write_records_csv",
    "write_tensor",
]
