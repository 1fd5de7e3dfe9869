"""Exact statevector simulation of trainable quantum similarity measures.

Data from two spaces is embedded by parameterized circuits; similarity is
the overlap of the embedded states, either in full or restricted to a prefix
of the register. The package trains such models with a derivative-free
optimizer and runs the analytic and numerical studies built on them.
"""

from .analysis import (
    GoodnessReport,
    Histogram,
    density_of_states,
    goodness_estimate,
    lambda_improvement,
    landmark_count,
    landmark_map,
    linear_separator_check,
    retrieval_loss,
    retrieval_optimum,
    wasserstein_1d,
)
from .cobyla import MinimizeResult, minimize_cobyla
from .datasets import (
    GraphProblem,
    LabeledPoints,
    build_pairs,
    gen_clusters,
    gen_delta_images,
    gen_graph_problem,
    gen_half_images,
    gen_moons,
)
from .embeddings import EmbeddingSpec, qaoa_embedding, toy_pair_circuit, weight_count
from .similarity import (
    MeasureSpec,
    SimilarityModel,
    distance,
    similarity_batch,
    similarity_matrix,
    toy_s1_closed,
    toy_s2_closed,
    zeta,
)
from .statevector import (
    Circuit,
    DensityMatrix,
    Gate,
    StateVector,
    apply_gate,
    circuit_unitary,
    hs_overlap,
    overlap_pure,
    partial_trace_first_m,
    prob_zero_prefix,
    run_circuit,
)
from .tasks import (
    CompletionResult,
    TransitionCurve,
    classify_fidelity,
    decision_grid,
    generate,
    graph_complete,
    partial_measurement_study,
    transition_scan,
)
from .training import (
    PairDataset,
    TrainConfig,
    TrainResult,
    cobyla_minimize,
    feature_gradient,
    loss,
    stochastic_batch,
    train,
)

# ``similarity`` the function stays in its module so that ``gqsim.similarity``
# always names the module
__all__ = [
    "GoodnessReport", "Histogram", "density_of_states", "goodness_estimate",
    "lambda_improvement", "landmark_count", "landmark_map", "linear_separator_check",
    "retrieval_loss", "retrieval_optimum", "wasserstein_1d",
    "MinimizeResult", "minimize_cobyla",
    "GraphProblem", "LabeledPoints", "build_pairs", "gen_clusters", "gen_delta_images",
    "gen_graph_problem", "gen_half_images", "gen_moons",
    "EmbeddingSpec", "qaoa_embedding", "toy_pair_circuit", "weight_count",
    "MeasureSpec", "SimilarityModel", "distance", "similarity_batch", "similarity_matrix",
    "toy_s1_closed", "toy_s2_closed", "zeta",
    "Circuit", "DensityMatrix", "Gate", "StateVector", "apply_gate", "circuit_unitary",
    "hs_overlap", "overlap_pure", "partial_trace_first_m", "prob_zero_prefix", "run_circuit",
    "CompletionResult", "TransitionCurve", "classify_fidelity", "decision_grid", "generate",
    "graph_complete", "partial_measurement_study", "transition_scan",
    "PairDataset", "TrainConfig", "TrainResult", "cobyla_minimize", "feature_gradient", "loss",
    "stochastic_batch", "train",
]

__version__ = "0.1.0"
