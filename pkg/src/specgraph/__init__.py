"""Random-graph sampling, spectral computation, regularization, and community detection."""

from .models import (
    DCSBM,
    ER,
    IERM,
    LSM,
    SBM,
    ExpectedMatrix,
    Graph,
    PlantedPartition,
    expected_matrix,
    max_expected_degree,
    model_from_json,
    model_to_json,
    sample,
)
from .spectral import (
    EigenPair,
    NonConvergenceError,
    SymmetricOperator,
    dense_eig_oracle,
    spectral_norm,
    top_eigs,
)
from .regularize import (
    RegularizationReport,
    choose_tau,
    degree_regularize,
    laplacian,
    regularized_laplacian,
    remove_high_degree,
    tau_regularize,
)
from .detect import misclassification_rate, sign_partition, spectral_cluster
from . import bounds
from . import experiments

__version__ = "0.1.0"
