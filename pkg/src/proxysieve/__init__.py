"""proxysieve: cascaded random-forest detectors over HTTP proxy logs."""

__version__ = "0.1.0"

from .logmodel import ProxyLog, UrlParts, decompose_url, parse_proxy_log
from .featurizer import FeatureVector, TrigramModel, build_trigram_model, extract
from .forest import ForestParams, RandomForestModel, train_forest, train_forest_arrays
from .cascade import CascadePipeline, Detector, Verdict, run_pipeline
from .evaluator import LabelStore, evaluate, roc
from .bundle import ModelBundle, load_bundle, save_bundle

__all__ = [
    "__version__",
    "ProxyLog",
    "UrlParts",
    "decompose_url",
    "parse_proxy_log",
    "FeatureVector",
    "TrigramModel",
    "build_trigram_model",
    "extract",
    "ForestParams",
    "RandomForestModel",
    "train_forest",
    "train_forest_arrays",
    "CascadePipeline",
    "Detector",
    "Verdict",
    "run_pipeline",
    "LabelStore",
    "evaluate",
    "roc",
    "ModelBundle",
    "load_bundle",
    "save_bundle",
]
