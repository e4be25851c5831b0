"""Feature extraction: string statistics, trigram histograms, feature sets."""

from .featsets import (
    FEATURE_SET_DIMS,
    FEATURE_SETS,
    SET_MODEL_ROLES,
    FeatureConfigError,
    FeatureVector,
    extract,
    feature_names,
    flow_features,
)
from .stringfeats import (
    SPECIAL_CHARS,
    STRING_FEATURE_COUNT,
    string_feature_names,
    string_features,
)
from .trigrams import (
    DEFAULT_BINS,
    DEFAULT_Q,
    TrigramBuildError,
    TrigramModel,
    build_trigram_model,
    load_dictionary,
)

__all__ = [
    "FEATURE_SET_DIMS",
    "FEATURE_SETS",
    "SET_MODEL_ROLES",
    "FeatureConfigError",
    "FeatureVector",
    "extract",
    "feature_names",
    "flow_features",
    "SPECIAL_CHARS",
    "STRING_FEATURE_COUNT",
    "string_feature_names",
    "string_features",
    "DEFAULT_BINS",
    "DEFAULT_Q",
    "TrigramBuildError",
    "TrigramModel",
    "build_trigram_model",
    "load_dictionary",
]
