"""The five named feature sets assembled into fixed-order vectors.

Missing values are carried as NaN; present values are always finite.
Vector layouts are canonical and stable: serialized models refer to
feature indices, so the orderings here must never be reshuffled.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from .. import kernels
from ..logmodel import ProxyLog, decompose_url
from .stringfeats import as_bytes, string_feature_names
from .trigrams import TrigramModel

FEATURE_SET_DIMS = {
    "sld": 58,
    "path_query": 116,
    "full": 290,
    "no_domain": 234,
    "prefilter": 32,
}

FEATURE_SETS = tuple(FEATURE_SET_DIMS)

# Trigram model roles required by each set.
SET_MODEL_ROLES = {
    "sld": ("domain",),
    "path_query": ("path", "query"),
    "full": ("domain", "path", "query"),
    "no_domain": ("path", "query"),
    "prefilter": (),
}

FLOW_FEATURE_NAMES = (
    "Flow Duration",
    "Client-Server Bytes",
    "Server-Client Bytes",
    "Client Port",
    "Server Port",
    "Length Of User Agent",
    "Length Of Mime Type",
    "HTTP Status",
    "Repetitive '=' And '&' In URL",
    "URL Starts With 'http://'",
    "URL Starts With 'https://'",
    "URL Starts With 'connect://'",
)

_PREFILTER_LENGTH_COMPONENTS = (
    "Referrer",
    "Protocol",
    "Hostname",
    "SLD",
    "TLD",
    "URL Path",
    "Filename",
    "URL Query",
)


class FeatureConfigError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureVector:
    """Fixed-order vector for one named set; NaN marks a missing value."""

    set_id: str
    values: np.ndarray

    def __post_init__(self):
        expected = FEATURE_SET_DIMS.get(self.set_id)
        if expected is None:
            raise FeatureConfigError(f"unknown feature set {self.set_id!r}")
        if len(self.values) != expected:
            raise FeatureConfigError(
                f"{self.set_id} vector must have {expected} entries, got {len(self.values)}"
            )

    def missing_mask(self) -> np.ndarray:
        return np.isnan(self.values)

    def validate(self) -> None:
        present = self.values[~np.isnan(self.values)]
        if not np.all(np.isfinite(present)):
            raise FeatureConfigError("present feature values must be finite")


def _require_models(set_id: str, models: Mapping[str, TrigramModel]) -> dict:
    picked = {}
    for role in SET_MODEL_ROLES[set_id]:
        model = models.get(role) if models else None
        if model is None:
            raise FeatureConfigError(
                f"feature set {set_id!r} needs a {role!r} trigram model"
            )
        if model.bins != 16:
            raise FeatureConfigError(
                f"{role!r} trigram model has {model.bins} bins; feature sets require 16"
            )
        picked[role] = model
    return picked


def flow_features(log: ProxyLog, url_bytes: Optional[bytes] = None) -> np.ndarray:
    """The 12 proxy-log flow features in canonical order."""
    if url_bytes is None:
        url_bytes = as_bytes(log.url)
    k = kernels.active()
    nan = float("nan")
    out = np.empty(12)
    out[0] = nan if log.duration_ms is None else float(log.duration_ms)
    out[1] = nan if log.bytes_c2s is None else float(log.bytes_c2s)
    out[2] = nan if log.bytes_s2c is None else float(log.bytes_s2c)
    out[3] = nan if log.client_port is None else float(log.client_port)
    out[4] = nan if log.server_port is None else float(log.server_port)
    out[5] = nan if log.user_agent is None else float(len(as_bytes(log.user_agent)))
    out[6] = nan if log.mime_type is None else float(len(as_bytes(log.mime_type)))
    out[7] = nan if log.http_status is None else float(log.http_status)
    out[8] = float(k.repetitive_flag(url_bytes))
    out[9] = 1.0 if url_bytes.startswith(b"http://") else 0.0
    out[10] = 1.0 if url_bytes.startswith(b"https://") else 0.0
    out[11] = 1.0 if url_bytes.startswith(b"connect://") else 0.0
    return out


def _block(s: bytes) -> np.ndarray:
    return kernels.active().string_block(s)


_MISSING_BLOCK = np.full(26, np.nan)


def extract(
    log: ProxyLog,
    set_id: str,
    models: Optional[Mapping[str, TrigramModel]] = None,
) -> FeatureVector:
    """Featurize one proxy log into the named set's fixed-order vector."""
    picked = _require_models(set_id, models or {})
    parts = decompose_url(log.url)
    url_b = as_bytes(log.url)

    if set_id == "prefilter":
        sb = _block(url_b)
        out = np.empty(32)
        out[0] = (
            float("nan") if log.referrer is None else float(len(as_bytes(log.referrer)))
        )
        out[1] = float(len(as_bytes(parts.protocol)))
        out[2] = float(len(as_bytes(parts.hostname)))
        out[3] = float(len(as_bytes(parts.second_level_domain)))
        out[4] = float(len(as_bytes(parts.top_level_domain)))
        out[5] = float(len(as_bytes(parts.path)))
        out[6] = float(len(as_bytes(parts.filename)))
        out[7] = float(len(as_bytes(parts.query)))
        flow = flow_features(log, url_b)
        out[8:16] = flow[0:8]
        out[16] = flow[8]
        out[17:32] = sb[9:24]
        return FeatureVector(set_id, out)

    sld_b = as_bytes(parts.second_level_domain)
    path_b = as_bytes(parts.path)
    query_b = as_bytes(parts.query)

    blocks = []
    if set_id in ("sld", "full"):
        sld_vec = np.concatenate(
            [picked["domain"].histograms(sld_b), _block(sld_b)]
        )
        if set_id == "sld":
            return FeatureVector(set_id, sld_vec)
        blocks.append(sld_vec)

    pq_vec = np.concatenate(
        [
            picked["path"].histograms(path_b),
            picked["query"].histograms(query_b),
            _block(path_b),
            _block(query_b),
        ]
    )
    if set_id == "path_query":
        return FeatureVector(set_id, pq_vec)
    blocks.append(pq_vec)

    referrer_block = (
        _MISSING_BLOCK if log.referrer is None else _block(as_bytes(log.referrer))
    )
    host_b = as_bytes(parts.hostname)
    blocks.append(referrer_block)
    blocks.append(_block(host_b))
    blocks.append(_block(as_bytes(parts.top_level_domain)))
    blocks.append(_block(as_bytes(parts.filename)))
    blocks.append(flow_features(log, url_b))
    if set_id == "no_domain":
        blocks.append(
            np.array([float(host_b.count(b".")), float(host_b.count(b"-"))])
        )
    return FeatureVector(set_id, np.concatenate(blocks))


def _hist_names(component: str) -> list:
    names = [f"{component} Trigram Histogram (bin {i})" for i in range(16)]
    names += [f"{component} Smoothed Trigram Histogram (bin {i})" for i in range(16)]
    return names


def feature_names(set_id: str) -> list:
    """Human-readable name per index; mirrors extract()'s layout exactly."""
    if set_id == "sld":
        return _hist_names("SLD") + string_feature_names("SLD")
    if set_id == "path_query":
        return (
            _hist_names("URL Path")
            + _hist_names("URL Query")
            + string_feature_names("URL Path")
            + string_feature_names("URL Query")
        )
    if set_id == "full":
        return (
            feature_names("sld")
            + feature_names("path_query")
            + string_feature_names("Referrer")
            + string_feature_names("Hostname")
            + string_feature_names("TLD")
            + string_feature_names("Filename")
            + list(FLOW_FEATURE_NAMES)
        )
    if set_id == "no_domain":
        return (
            feature_names("path_query")
            + string_feature_names("Referrer")
            + string_feature_names("Hostname")
            + string_feature_names("TLD")
            + string_feature_names("Filename")
            + list(FLOW_FEATURE_NAMES)
            + ["Hostname Dot Count", "Hostname Dash Count"]
        )
    if set_id == "prefilter":
        names = [f"Length Of {c}" for c in _PREFILTER_LENGTH_COMPONENTS]
        names += list(FLOW_FEATURE_NAMES[0:8])
        names += [FLOW_FEATURE_NAMES[8]]
        names += [
            f"Number Of Occurrences Of '{ch}' In URL" for ch in "_-?!,.@#%&=+;:/"
        ]
        return names
    raise FeatureConfigError(f"unknown feature set {set_id!r}")
