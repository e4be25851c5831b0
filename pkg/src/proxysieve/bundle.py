"""Single-file model bundle: length-prefixed, checksummed binary sections.

The bundle is self-describing (header, feature-name layouts, pipeline
topology, trigram tables, forests) and byte-identical for identical
training inputs and seed: no timestamps or environment data are stored.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass

from .cascade import CascadePipeline, Detector
from .featurizer import FEATURE_SETS, TrigramModel, feature_names
from .forest import (
    RNG_ALGORITHM,
    ForestParams,
    LeafNode,
    RandomForestModel,
    SplitNode,
)

MAGIC = b"PXSVBNDL"
FORMAT_VERSION = 1

_FOREST_MAGIC = b"FRST"


class BundleError(ValueError):
    pass


@dataclass
class ModelBundle:
    pipeline: CascadePipeline
    trigram_models: dict  # role -> TrigramModel
    seed: int
    config_digest: str = ""

    @property
    def header(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "rng_algorithm": RNG_ALGORITHM,
            "package": "proxysieve",
            "seed": self.seed,
            "config_digest": self.config_digest,
        }

    def layouts(self) -> dict:
        return {set_id: feature_names(set_id) for set_id in FEATURE_SETS}

    def topology(self) -> dict:
        pf = self.pipeline.prefilter
        return {
            "schema": 1,
            "prefilter": _detector_meta(pf) if pf is not None else None,
            "levels": [
                [d.detector_id for d in level] for level in self.pipeline.levels
            ],
            "detectors": {
                d.detector_id: _detector_meta(d) for d in self.pipeline.detectors()
            },
            "priorities": self.pipeline.priorities,
        }


def _detector_meta(d: Detector) -> dict:
    return {
        "id": d.detector_id,
        "behavior": d.behavior,
        "feature_set": d.feature_set_id,
        "threshold": d.threshold,
        "parents": list(d.parents),
    }


# ---------------------------------------------------------------------------
# forest <-> bytes

def forest_to_bytes(model: RandomForestModel) -> bytes:
    params = model.params
    set_id = model.feature_set_id.encode("utf-8")
    out = [
        _FOREST_MAGIC,
        struct.pack(
            "<IiiIQH",
            params.trees,
            -1 if params.max_depth is None else params.max_depth,
            -1 if params.features_per_split is None else params.features_per_split,
            model.n_features,
            model.seed & ((1 << 64) - 1),
            len(set_id),
        ),
        set_id,
    ]

    def emit(node) -> None:
        if node.is_leaf:
            out.append(struct.pack("<iBII", -1, node.label, *node.class_counts))
        else:
            out.append(
                struct.pack(
                    "<idII",
                    node.feature,
                    node.threshold,
                    node.train_count_left,
                    node.train_count_right,
                )
            )
            emit(node.left)
            emit(node.right)

    for root in model.trees:
        emit(root)
    return b"".join(out)


def forest_from_bytes(blob: bytes) -> RandomForestModel:
    if blob[:4] != _FOREST_MAGIC:
        raise BundleError("bad forest magic")
    trees_n, max_depth, f_split, n_features, seed, set_len = struct.unpack_from(
        "<IiiIQH", blob, 4
    )
    off = 4 + struct.calcsize("<IiiIQH")
    set_id = blob[off : off + set_len].decode("utf-8")
    off += set_len
    params = ForestParams(
        trees=trees_n,
        max_depth=None if max_depth < 0 else max_depth,
        features_per_split=None if f_split < 0 else f_split,
    )

    pos = off

    def read_node():
        nonlocal pos
        (feature,) = struct.unpack_from("<i", blob, pos)
        if feature < 0:
            label, c0, c1 = struct.unpack_from("<BII", blob, pos + 4)
            pos += struct.calcsize("<iBII")
            return LeafNode(label, (c0, c1))
        threshold, cl, cr = struct.unpack_from("<dII", blob, pos + 4)
        pos += struct.calcsize("<idII")
        left = read_node()
        right = read_node()
        return SplitNode(feature, threshold, left, right, cl, cr)

    trees = [read_node() for _ in range(trees_n)]
    if pos != len(blob):
        raise BundleError("trailing bytes in forest section")
    return RandomForestModel(trees, params, set_id, seed, n_features)


# ---------------------------------------------------------------------------
# bundle file

def _json_bytes(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


def _pack_section(name: str, payload: bytes) -> bytes:
    name_b = name.encode("utf-8")
    return b"".join(
        [
            struct.pack("<H", len(name_b)),
            name_b,
            struct.pack("<Q", len(payload)),
            hashlib.sha256(payload).digest(),
            payload,
        ]
    )


def bundle_to_bytes(bundle: ModelBundle) -> bytes:
    sections = [
        ("header", _json_bytes(bundle.header)),
        ("layouts", _json_bytes(bundle.layouts())),
        ("topology", _json_bytes(bundle.topology())),
    ]
    for role in sorted(bundle.trigram_models):
        sections.append((f"trigram/{role}", bundle.trigram_models[role].to_bytes()))
    for det in sorted(bundle.pipeline.detectors(), key=lambda d: d.detector_id):
        sections.append((f"forest/{det.detector_id}", forest_to_bytes(det.model)))
    body = b"".join(_pack_section(name, payload) for name, payload in sections)
    return MAGIC + struct.pack("<II", FORMAT_VERSION, len(sections)) + body


def bundle_from_bytes(blob: bytes) -> ModelBundle:
    if blob[:8] != MAGIC:
        raise BundleError("not a model bundle (bad magic)")
    version, n_sections = struct.unpack_from("<II", blob, 8)
    if version != FORMAT_VERSION:
        raise BundleError(f"unsupported bundle format version {version}")
    pos = 16
    sections = {}
    order = []
    for _ in range(n_sections):
        (name_len,) = struct.unpack_from("<H", blob, pos)
        pos += 2
        name = blob[pos : pos + name_len].decode("utf-8")
        pos += name_len
        (payload_len,) = struct.unpack_from("<Q", blob, pos)
        pos += 8
        digest = blob[pos : pos + 32]
        pos += 32
        payload = blob[pos : pos + payload_len]
        pos += payload_len
        if hashlib.sha256(payload).digest() != digest:
            raise BundleError(f"section {name!r} failed its checksum")
        sections[name] = payload
        order.append(name)
    if pos != len(blob):
        raise BundleError("trailing bytes after last section")

    for required in ("header", "topology", "layouts"):
        if required not in sections:
            raise BundleError(f"bundle is missing the {required!r} section")
    header = json.loads(sections["header"])
    topology = json.loads(sections["topology"])

    trigram_models = {}
    for name, payload in sections.items():
        if name.startswith("trigram/"):
            trigram_models[name.split("/", 1)[1]] = TrigramModel.from_bytes(payload)

    forests = {}
    for name, payload in sections.items():
        if name.startswith("forest/"):
            forests[name.split("/", 1)[1]] = forest_from_bytes(payload)

    def detector_from(meta: dict) -> Detector:
        det_id = meta["id"]
        if det_id not in forests:
            raise BundleError(f"topology references missing forest {det_id!r}")
        return Detector(
            det_id,
            meta["behavior"],
            forests[det_id],
            meta["threshold"],
            tuple(meta["parents"]),
        )

    metas = topology["detectors"]
    prefilter = (
        detector_from(topology["prefilter"]) if topology.get("prefilter") else None
    )
    levels = [
        [detector_from(metas[det_id]) for det_id in level]
        for level in topology["levels"]
    ]
    pipeline = CascadePipeline(levels, prefilter, topology.get("priorities"))
    return ModelBundle(
        pipeline,
        trigram_models,
        int(header.get("seed", 0)),
        header.get("config_digest", ""),
    )


def save_bundle(bundle: ModelBundle, path) -> None:
    with open(path, "wb") as fh:
        fh.write(bundle_to_bytes(bundle))


def load_bundle(path) -> ModelBundle:
    with open(path, "rb") as fh:
        return bundle_from_bytes(fh.read())
