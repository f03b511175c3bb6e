"""Grasp feasibility and risk-aware abstention on partial point clouds.

Pipeline: a partial observation is completed K times by a stochastic
sampler; antipodal grasp candidates are generated per completion,
filtered by uncertainty and geometric constraints, and scored with the
force-closure epsilon metric in 6D wrench space; a lower confidence bound
over the per-sample epsilons decides whether to attempt the best grasp
or abstain.
"""

from .cloud import Aabb, PointCloud, centroid, clean, crop, estimate_normals, knn
from .completion import (
    NO_POINTS_IN_SLICE,
    CompletionEnsemble,
    SamplerConfig,
    canonical_completion,
    global_uncertainty,
    load_ensemble_dir,
    local_uncertainty,
    match_to_reference,
    sample_completions,
)
from .config import ExperimentConfig, load_config
from .decision import (
    AbstainReason,
    Decision,
    DecisionConfig,
    DecisionReport,
    EpsilonStats,
    Mode,
    ObjectInput,
    decide,
    lcb_stats,
    z_schedule,
)
from .errors import (
    BadEnsembleSize,
    ConfigError,
    DataError,
    EmptyCloud,
    EmptyShape,
    GraspUQError,
    MissingNormals,
    NoContact,
    TooFewPoints,
    UnsupportedFormat,
)
from .filters import (
    FilterConfig,
    FilterTrace,
    filter_pipeline,
    front_filter,
    global_gate,
    jaw_intersection_fast,
    jaw_intersection_naive,
    jaw_segments,
    vertical_filter,
)
from .generation import GraspPose, generate_grasps, grasps_from_csv, grasps_to_csv
from .io import load_cloud, save_cloud
from .kernels import BACKEND
from .occlusion import (
    LeafSpec,
    OcclusionOutcome,
    apply_leaf,
    centroid_shift,
    generate_strawberry,
    place_leaf,
)
from .quality import (
    ContactPair,
    EpsilonResult,
    WrenchSet,
    epsilon_hull,
    epsilon_sampled,
    estimate_contacts,
    friction_cone,
    merge_wrench_sets,
    sample_epsilon,
    torque_scale,
    wrench_matrix,
)

__version__ = "0.1.0"
