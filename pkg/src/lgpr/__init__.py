"""Graph semi-supervised learning on Laplacian-power graphs.

Build or ingest a similarity graph, raise its Laplacian to a positive
power to obtain a signed graph, classify nodes from a few labels with
the generalized PageRank closed form, partition with a sweep cut
against the generalized Cheeger ratio, and estimate the best exponent
from one observation of the data.
"""

from .errors import (
    ConnectivityError,
    DataError,
    DegenerateError,
    LgprError,
    NumericalError,
    ParameterError,
)
from .gamma_select import GammaEstimate, GammaGrid, estimate_gamma, oracle_gamma
from .graph import (
    Graph,
    NodeSet,
    build_knn_graph,
    degree_vector,
    geodesic_hops,
    random_walk_matrix,
    volume,
)
from .harness import (
    ExperimentPlan,
    FeatureData,
    FileData,
    PlantedPartitionData,
    ScoredRun,
    cheeger_curve_experiment,
    mcc,
    mcc_sets,
    ratio_sweep_experiment,
    run_experiment,
)
from .metrics import (
    CheegerReport,
    CutDecomposition,
    cheeger_curve,
    cheeger_ratio,
    cut_decomposition,
    l2_improvement_condition,
    sbm_expected_cheeger,
)
from .pagerank import (
    DiffusionSolver,
    LabelAssignment,
    ScoreMatrix,
    ScoreVector,
    SeedVector,
    SweepCutResult,
    escape_mass_bound_check,
    sharp_drop_dichotomy,
    sharp_drop_inequality_check,
    solve,
    solve_multiclass,
    sweep_cut,
)
from .spectral import (
    SignedGraph,
    SpectralDecomposition,
    StationaryDistribution,
    decompose,
    generalized_stationary,
    generalized_volume,
    lgamma_graph,
)
from .synth import (
    LabeledSample,
    PlantedPartitionConfig,
    config_from_degree_ratio,
    critical_ratio,
    detectability_margin,
    generate_planted_partition,
    sample_labels,
)

__version__ = "0.1.0"
