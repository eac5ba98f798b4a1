"""RTL seismicity features and middle-term earthquake prediction."""

from .catalog import (
    Catalog,
    CatalogError,
    CatalogEvent,
    SpatialIndex,
    build_index,
    parse_catalog,
    query_cylinder,
    surface_distance_km,
    write_catalog,
)
from .dataset import (
    Dataset,
    FeatureNormalizer,
    LabelRule,
    build_dataset,
    chronological_split,
    make_label,
    oversample,
    undersample,
)
from .metrics import Confusion, EvalReport, confusion, evaluate, f1_score, pr_auc, precision, recall, roc_auc
from .models import (
    AdaBoost,
    DecisionTree,
    GradientBoosting,
    LogisticRegression,
    MajorRtl,
    RandomForest,
    load_model,
    save_model,
)
from .rtl import RtlConfig, RtlValue, rtl_at, rtl_series, rupture_length_km
from .synth import GrParams, OuParams, SynthSpec, fit_b_value, generate_catalog, omori_rate, sample_gr_magnitude

__version__ = "0.1.0"
