"""Haar-like analysis on partition trees and hierarchical paraproducts of ``A(f)``."""

from .errors import (
    DegenerateMetric,
    LevelOutOfRange,
    MissingCoordinates,
    MissingDerivative,
    NotC2,
    NotDyadic,
    NotPowerOfTwo,
    PartitionViolation,
    SchemaError,
    SizeMismatch,
    TooLarge,
    TooSmall,
    TreeParaError,
    UnknownId,
)
from .haar_basis import (
    BasisFunction,
    TensorBasis,
    TreeBasis,
    analyze,
    build_tensor_basis,
    build_tree_basis,
    l2_norm_sq,
    synthesize,
)
from .holder import (
    DecayTable,
    HolderReport,
    decay_table,
    holder_report,
    pairwise_holder_seminorm,
    pairwise_holder_seminorm_2d,
    synthesize_holder_signal,
    synthesize_holder_signal_2d,
    wavelet_decay_table,
    wavelet_holder_norm,
)
from .multiscale_ops import (
    CoefficientTable,
    ScaleOperatorStack,
    expansion_coefficients,
    scaling_P,
    tensor_PP,
    tensor_PQ,
    tensor_QP,
    tensor_QQ,
    wavelet_coefficient_table,
    wavelet_Q,
)
from .paraproduct import (
    NONLINEARITIES,
    GainThresholds,
    Nonlinearity,
    approx_1d,
    approx_2d,
    backward_context,
    forward_context,
    get_nonlinearity,
    interpolation_h,
    residual_integral_2d,
    residual_term_bounds,
    residual_terms,
    verify_residual_gain,
)
from .tree_core import (
    PartitionTree,
    PointSet,
    build_balanced_dyadic_tree,
    build_tree_from_clustering,
    dump_tree_spec,
    dyadic_distance,
    dyadic_distance_matrix,
    load_tree_spec,
    tensor_dyadic_distance,
    validate_partition_tree,
)

__version__ = "0.1.0"
