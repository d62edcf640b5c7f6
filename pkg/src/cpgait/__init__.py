"""cpgait: gait-pattern classification with Grad-CAM explanations.

Preprocessing and feature assembly for per-leg gait-cycle time series, a
from-scratch 1D CNN classifier, Grad-CAM relevance maps, per-class group
statistics, a synthetic cohort generator with planted motifs, and a REST
review service.
"""

from .channels import (
    CATALOG_VERSION,
    CHANNEL_CATALOG,
    CYCLE_POINTS,
    FEATURE_LENGTH,
    MODEL_CHANNELS,
    BodyPart,
    ChannelId,
    GaitClass,
    Plane,
    Side,
    Unit,
    Variable,
)
from .dataset import ClassificationOverride, Dataset, load_dataset, save_dataset
from .errors import (
    DatasetFormatError,
    InvalidInputError,
    InvalidModelError,
    MissingChannelError,
    MissingSideError,
)
from .explain import (
    RelevanceLevel,
    RelevanceMap,
    bin_relevance,
    grad_cam,
    overview_relevance,
    relevance_at,
)
from .groupstats import (
    GroupStats,
    asymmetry_overview,
    compute_group_stats,
    zscore_overview,
)
from .pipeline import ServedState, run_pipeline, snapshot_hash
from .series import (
    FeatureVector,
    GaitCycleSeries,
    GaitEvents,
    PatientRecord,
    Prediction,
    SideRecord,
    average_trials,
    build_feature_vector,
    min_max_normalize,
    time_normalize,
)
from .synthetic import (
    BASE_CURVES,
    MOTIF_WINDOWS,
    SyntheticConfig,
    generate_synthetic_dataset,
)

__version__ = "0.1.0"
