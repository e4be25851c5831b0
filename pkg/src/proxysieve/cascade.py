"""Multi-level detector cascades over proxy logs.

Level 0 is an optional cheap pre-filter calibrated to full recall; later
levels hold behavior detectors gated by parent edges: a flow reaches a
detector only if at least one of its parents fired (score strictly above
the parent's threshold). An incident is raised only when a last-level
detector fires.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence

import numpy as np

from .featurizer import FeatureVector, TrigramModel, extract
from .forest import ForestParams, GroupKeys, RandomForestModel, train_forest_arrays
from .logmodel import ProxyLog, decompose_url, group_domain

DEFAULT_PRIORITIES = {"dga": 0, "c2": 0, "click-fraud": 1, "phishing": 2}
_UNRANKED_PRIORITY = 99

MIXIN_MODES = ("swap_domain_only", "swap_and_strip_path_query")


class PipelineError(ValueError):
    pass


class BuildError(ValueError):
    pass


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class Detector:
    detector_id: str
    behavior: str
    model: RandomForestModel
    threshold: float
    parents: tuple = ()

    def __post_init__(self):
        if not 0.0 <= self.threshold < 1.0:
            raise PipelineError(
                f"threshold must lie in [0, 1), got {self.threshold}"
                " (a strict '>' test can never fire at 1.0)"
            )

    @property
    def feature_set_id(self) -> str:
        return self.model.feature_set_id

    def fires(self, score: float, tau: Optional[float] = None) -> bool:
        return score > (self.threshold if tau is None else tau)

    def with_threshold(self, tau: float) -> "Detector":
        return replace(self, threshold=tau)


@dataclass(frozen=True)
class Verdict:
    group: GroupKeys
    scores: dict
    fired: tuple
    fired_behaviors: tuple
    incident: Optional[tuple]  # (behavior, priority)
    filtered_at: Optional[int]  # level index where traversal stopped
    node_tests: int
    extracted_sets: tuple

    @property
    def detected(self) -> bool:
        return self.incident is not None

    def final_score(self, last_level_ids: Sequence[str]) -> float:
        return max((self.scores.get(d, 0.0) for d in last_level_ids), default=0.0)


class CascadePipeline:
    """Prefilter (optional) plus ordered detector levels forming a DAG."""

    def __init__(
        self,
        levels: Sequence[Sequence[Detector]],
        prefilter: Optional[Detector] = None,
        priorities: Optional[Mapping[str, int]] = None,
    ):
        self.levels = [list(level) for level in levels]
        self.prefilter = prefilter
        self.priorities = dict(priorities) if priorities is not None else dict(
            DEFAULT_PRIORITIES
        )
        self._validate()

    def _validate(self) -> None:
        if not self.levels or any(not level for level in self.levels):
            raise PipelineError("pipeline needs at least one non-empty detector level")
        seen = set()
        if self.prefilter is not None:
            seen.add(self.prefilter.detector_id)
        for k, level in enumerate(self.levels):
            prev_ids = {d.detector_id for d in self.levels[k - 1]} if k > 0 else set()
            for det in level:
                if det.detector_id in seen:
                    raise PipelineError(f"duplicate detector id {det.detector_id!r}")
                seen.add(det.detector_id)
                if k == 0:
                    allowed = (
                        {self.prefilter.detector_id} if self.prefilter else set()
                    )
                    if any(p not in allowed for p in det.parents):
                        raise PipelineError(
                            f"{det.detector_id!r}: first-level parents may only "
                            "reference the prefilter"
                        )
                else:
                    if not det.parents:
                        raise PipelineError(
                            f"{det.detector_id!r} at level {k + 1} declares no parents"
                        )
                    missing = [p for p in det.parents if p not in prev_ids]
                    if missing:
                        raise PipelineError(
                            f"{det.detector_id!r} references non-previous-level "
                            f"parents {missing}"
                        )

    @property
    def num_levels(self) -> int:
        """Level count including the prefilter level when present."""
        return len(self.levels) + (1 if self.prefilter is not None else 0)

    def detectors(self):
        if self.prefilter is not None:
            yield self.prefilter
        for level in self.levels:
            yield from level

    def get(self, detector_id: str) -> Detector:
        for det in self.detectors():
            if det.detector_id == detector_id:
                return det
        raise PipelineError(f"unknown detector {detector_id!r}")

    def last_level_ids(self) -> list:
        return [d.detector_id for d in self.levels[-1]]

    def priority_of(self, behavior: str) -> int:
        return self.priorities.get(behavior, _UNRANKED_PRIORITY)

    def replace_detector(self, detector: Detector) -> "CascadePipeline":
        levels = [
            [detector if d.detector_id == detector.detector_id else d for d in level]
            for level in self.levels
        ]
        prefilter = self.prefilter
        if prefilter is not None and prefilter.detector_id == detector.detector_id:
            prefilter = detector
        return CascadePipeline(levels, prefilter, self.priorities)

    def with_prefilter(self, prefilter: Detector) -> "CascadePipeline":
        return CascadePipeline(self.levels, prefilter, self.priorities)


def _group_keys(log: ProxyLog) -> GroupKeys:
    return GroupKeys(url=log.url, domain=group_domain(log.url), user_id=log.user_id)


def run_pipeline(
    pipeline: CascadePipeline,
    log: ProxyLog,
    models: Mapping[str, TrigramModel],
    tau_overrides: Optional[Mapping[str, float]] = None,
) -> Verdict:
    """Score one flow level by level; features are extracted lazily."""
    cache: dict = {}

    def vector(set_id: str) -> FeatureVector:
        fv = cache.get(set_id)
        if fv is None:
            fv = extract(log, set_id, models)
            cache[set_id] = fv
        return fv

    def tau_for(det: Detector) -> float:
        if tau_overrides and det.detector_id in tau_overrides:
            return tau_overrides[det.detector_id]
        return det.threshold

    scores: dict = {}
    fired_all: list = []
    tests_total = 0

    if pipeline.prefilter is not None:
        det = pipeline.prefilter
        votes, tests = det.model.votes(vector(det.feature_set_id))
        s = votes / det.model.params.trees
        scores[det.detector_id] = s
        tests_total += tests
        if not s > tau_for(det):
            return Verdict(
                _group_keys(log), scores, (), (), None, 0, tests_total, tuple(cache)
            )
        fired_all.append(det.detector_id)

    fired_prev: set = set()
    filtered_at: Optional[int] = None
    for k, level in enumerate(pipeline.levels, start=1):
        fired_here = []
        for det in level:
            if k > 1 and not any(p in fired_prev for p in det.parents):
                continue
            votes, tests = det.model.votes(vector(det.feature_set_id))
            s = votes / det.model.params.trees
            scores[det.detector_id] = s
            tests_total += tests
            if s > tau_for(det):
                fired_here.append(det.detector_id)
        if not fired_here:
            filtered_at = k
            break
        fired_all.extend(fired_here)
        fired_prev = set(fired_here)

    incident = None
    fired_behaviors: tuple = ()
    if filtered_at is None:
        last_ids = set(pipeline.last_level_ids())
        behaviors = sorted(
            {
                pipeline.get(d).behavior
                for d in fired_prev
                if d in last_ids
            }
        )
        fired_behaviors = tuple(behaviors)
        incident = min(
            ((pipeline.priority_of(b), b) for b in behaviors),
        )
        incident = (incident[1], incident[0])

    return Verdict(
        _group_keys(log),
        scores,
        tuple(fired_all),
        fired_behaviors,
        incident,
        filtered_at,
        tests_total,
        tuple(cache),
    )


def _detector_votes(
    det: Detector, logs: Sequence[ProxyLog], models: Mapping[str, TrigramModel]
) -> np.ndarray:
    return np.array(
        [det.model.votes(extract(log, det.feature_set_id, models))[0] for log in logs],
        dtype=np.int64,
    )


def detector_fires(
    det: Detector,
    log: ProxyLog,
    models: Mapping[str, TrigramModel],
    tau: Optional[float] = None,
) -> bool:
    votes, _ = det.model.votes(extract(log, det.feature_set_id, models))
    return det.fires(votes / det.model.params.trees, tau)


@dataclass(frozen=True)
class CalibrationResult:
    tau0: float
    min_positive_votes: int
    negative_filter_fraction: float


def calibrate_prefilter(
    detector: Detector,
    calibration_positives: Sequence[ProxyLog],
    calibration_negatives: Sequence[ProxyLog],
    models: Mapping[str, TrigramModel],
) -> CalibrationResult:
    """Largest vote-grid threshold strictly below every positive's score."""
    if not calibration_positives:
        raise CalibrationError("calibration needs at least one positive sample")
    trees = detector.model.params.trees
    pos_votes = _detector_votes(detector, calibration_positives, models)
    min_votes = int(pos_votes.min())
    if min_votes == 0:
        raise CalibrationError(
            "a calibration positive scores 0: full recall is impossible "
            "under a strict threshold"
        )
    tau0 = (min_votes - 1) / trees
    if calibration_negatives:
        neg_votes = _detector_votes(detector, calibration_negatives, models)
        filtered = float(np.mean(neg_votes < min_votes))
    else:
        filtered = 0.0
    return CalibrationResult(tau0, min_votes, filtered)


@dataclass(frozen=True)
class LevelSpec:
    behavior: str
    feature_set: str
    positives: Sequence[ProxyLog]
    negatives: Sequence[ProxyLog]
    params: ForestParams
    threshold: float = 0.5
    detector_id: Optional[str] = None


@dataclass
class BuildResult:
    pipeline: CascadePipeline
    pools: dict  # detector id -> (positive logs, negative logs)


def _featurize_pool(
    positives: Sequence[ProxyLog],
    negatives: Sequence[ProxyLog],
    set_id: str,
    models: Mapping[str, TrigramModel],
):
    X = np.stack(
        [extract(log, set_id, models).values for log in list(positives) + list(negatives)]
    )
    y = np.concatenate(
        [np.ones(len(positives), dtype=np.int64), np.zeros(len(negatives), dtype=np.int64)]
    )
    return X, y


def train_detector(
    detector_id: str,
    behavior: str,
    feature_set: str,
    positives: Sequence[ProxyLog],
    negatives: Sequence[ProxyLog],
    params: ForestParams,
    threshold: float,
    models: Mapping[str, TrigramModel],
    seed: int,
    parents: tuple = (),
    threads: int = 1,
) -> Detector:
    if not positives:
        raise BuildError(f"{detector_id}: positive pool is empty")
    if not negatives:
        raise BuildError(f"{detector_id}: negative pool is empty")
    X, y = _featurize_pool(positives, negatives, feature_set, models)
    model = train_forest_arrays(X, y, feature_set, params, seed, threads=threads)
    return Detector(detector_id, behavior, model, threshold, parents)


def build_bottom_up(
    level_specs: Sequence[LevelSpec],
    models: Mapping[str, TrigramModel],
    seed: int,
    priorities: Optional[Mapping[str, int]] = None,
) -> BuildResult:
    """Train a single chain where each level learns from the survivors of
    the previous one; a spec's own samples are merged into the surviving
    pool before filtering."""
    if not level_specs:
        raise BuildError("no level specs given")
    detectors: list = []
    pools: dict = {}
    pos_pool: list = []
    neg_pool: list = []
    for k, spec in enumerate(level_specs):
        det_id = spec.detector_id or f"{spec.behavior}-l{k + 1}"
        if k == 0:
            pos_pool = list(spec.positives)
            neg_pool = list(spec.negatives)
        else:
            prev = detectors[-1]
            pos_pool = [
                log
                for log in pos_pool + list(spec.positives)
                if detector_fires(prev, log, models)
            ]
            neg_pool = [
                log
                for log in neg_pool + list(spec.negatives)
                if detector_fires(prev, log, models)
            ]
            if not pos_pool:
                raise BuildError(
                    f"level {k + 1} ({det_id}): no surviving positive samples"
                )
            if not neg_pool:
                raise BuildError(
                    f"level {k + 1} ({det_id}): no surviving negative samples"
                )
        parents = (detectors[-1].detector_id,) if detectors else ()
        det = train_detector(
            det_id,
            spec.behavior,
            spec.feature_set,
            pos_pool,
            neg_pool,
            spec.params,
            spec.threshold,
            models,
            seed + k,
            parents,
        )
        detectors.append(det)
        pools[det_id] = (list(pos_pool), list(neg_pool))
    pipeline = CascadePipeline([[d] for d in detectors], None, priorities)
    return BuildResult(pipeline, pools)


@dataclass(frozen=True)
class RelaxedSpec:
    feature_set: str
    recall_target: float
    params: ForestParams
    detector_id: str = "front"
    behavior: str = "front"


def build_top_down(
    final_detector: Detector,
    training_positives: Sequence[ProxyLog],
    training_negatives: Sequence[ProxyLog],
    relaxed: RelaxedSpec,
    models: Mapping[str, TrigramModel],
    seed: int,
    priorities: Optional[Mapping[str, int]] = None,
) -> BuildResult:
    """Prepend a cheaper front detector tuned to a recall target against
    the final detector's positives."""
    if not 0.0 < relaxed.recall_target <= 1.0:
        raise BuildError("recall target must lie in (0, 1]")
    front = train_detector(
        relaxed.detector_id,
        relaxed.behavior,
        relaxed.feature_set,
        training_positives,
        training_negatives,
        relaxed.params,
        0.0,
        models,
        seed,
    )
    trees = front.model.params.trees
    votes = _detector_votes(front, training_positives, models)
    best_v = None
    for v in range(trees - 1, -1, -1):
        recall = float(np.mean(votes > v))
        if recall >= relaxed.recall_target:
            best_v = v
            break
    if best_v is None:
        achievable = float(np.mean(votes > 0))
        raise BuildError(
            f"recall target {relaxed.recall_target} unreachable; "
            f"maximum achievable is {achievable:.4f} at threshold 0"
        )
    front = front.with_threshold(best_v / trees)
    final = replace(final_detector, parents=(front.detector_id,))
    pipeline = CascadePipeline([[front], [final]], None, priorities)
    pools = {
        front.detector_id: (list(training_positives), list(training_negatives)),
        final.detector_id: (list(training_positives), list(training_negatives)),
    }
    return BuildResult(pipeline, pools)


def _swap_sld(log: ProxyLog, new_sld: str, strip_path_query: bool) -> ProxyLog:
    url = log.url
    sep = url.find("://")
    head_end = sep + 3 if sep >= 0 else 0
    rest = url[head_end:]
    host_end = len(rest)
    for stop in "/?#":
        pos = rest.find(stop)
        if pos >= 0:
            host_end = min(host_end, pos)
    authority = rest[:host_end]
    tail = rest[host_end:]

    port_suffix = ""
    host = authority
    if not authority.startswith("["):
        colon = authority.rfind(":")
        if colon >= 0 and authority[colon + 1 :].isdigit() and colon + 1 < len(authority):
            host = authority[:colon]
            port_suffix = authority[colon:]

    labels = host.split(".")
    if len(labels) >= 2 and not decompose_url(url).host_is_ip:
        labels[-2] = new_sld
        new_host = ".".join(labels)
    else:
        # IP or single-label host: the whole host becomes the pool entry.
        new_host = new_sld

    if strip_path_query:
        frag = tail.find("#")
        tail = tail[frag:] if frag >= 0 else ""

    return log.with_url(url[:head_end] + new_host + port_suffix + tail)


def augment_domain_mixin(
    positive_logs: Sequence[ProxyLog],
    domain_pool: Sequence[str],
    mode: str,
    rounds: int = 1,
) -> list:
    """Copy each positive log with its SLD swapped for the next pool entry
    (round-robin); the second mode additionally empties path and query."""
    if mode not in MIXIN_MODES:
        raise ValueError(f"mode must be one of {MIXIN_MODES}, got {mode!r}")
    if not domain_pool:
        raise ValueError("domain pool is empty")
    strip = mode == "swap_and_strip_path_query"
    out = []
    cursor = 0
    for _ in range(rounds):
        for log in positive_logs:
            sld = domain_pool[cursor % len(domain_pool)]
            cursor += 1
            out.append(_swap_sld(log, sld, strip))
    return out


@dataclass(frozen=True)
class Feedback:
    tp_domains: frozenset  # case-folded hostnames confirmed malicious
    detections: Sequence[ProxyLog]  # flows the detector fired on


@dataclass
class RetrainResult:
    pipeline: CascadePipeline
    pools: dict
    no_op: bool
    report: Optional[object]  # evaluator.PrecisionReport
    target_reached: bool


def retrain_level(
    pipeline: CascadePipeline,
    level_index: int,
    behavior: str,
    feedback: Feedback,
    pools: Mapping[str, tuple],
    models: Mapping[str, TrigramModel],
    seed: int,
    user_precision_target: float = 0.85,
) -> RetrainResult:
    """One retraining round: confirmed-domain detections enlarge the
    positive pool, the rest the negative pool; the detector is retrained
    and re-evaluated against the feedback flows."""
    from .evaluator import LabelStore, evaluate, records_from_scored

    if not 1 <= level_index <= len(pipeline.levels):
        raise PipelineError(f"no detector level {level_index}")
    matches = [
        d for d in pipeline.levels[level_index - 1] if d.behavior == behavior
    ]
    if not matches:
        raise PipelineError(
            f"no detector for behavior {behavior!r} at level {level_index}"
        )
    det = matches[0]
    pos_pool, neg_pool = pools[det.detector_id]

    tp_domains = frozenset(d.lower() for d in feedback.tp_domains)
    seen_urls = {log.url for log in pos_pool} | {log.url for log in neg_pool}
    new_pos: list = []
    new_neg: list = []
    for log in feedback.detections:
        if log.url in seen_urls:
            continue
        seen_urls.add(log.url)  # one proxy log per unique URL
        if group_domain(log.url) in tp_domains:
            new_pos.append(log)
        else:
            new_neg.append(log)
    if not new_pos and not new_neg:
        return RetrainResult(pipeline, dict(pools), True, None, False)

    pos_pool = list(pos_pool) + new_pos
    neg_pool = list(neg_pool) + new_neg
    retrained = train_detector(
        det.detector_id,
        det.behavior,
        det.feature_set_id,
        pos_pool,
        neg_pool,
        det.model.params,
        det.threshold,
        models,
        seed,
        det.parents,
    )
    new_pipeline = pipeline.replace_detector(retrained)
    new_pools = dict(pools)
    new_pools[det.detector_id] = (pos_pool, neg_pool)

    labels = LabelStore(tp_domains)
    scored = []
    for log in feedback.detections:
        fired = detector_fires(retrained, log, models)
        scored.append((log, fired))
    records = records_from_scored(scored)
    report = evaluate(records, labels)
    user = report.counts["user"]
    reached = user.precision is not None and user.precision >= user_precision_target
    return RetrainResult(new_pipeline, new_pools, False, report, reached)


def rebuild_prefilter(
    pipeline: CascadePipeline,
    pools: Mapping[str, tuple],
    models: Mapping[str, TrigramModel],
    params: ForestParams,
    seed: int,
    detector_id: str = "prefilter",
    calibration_positives: Optional[Sequence[ProxyLog]] = None,
    calibration_negatives: Optional[Sequence[ProxyLog]] = None,
) -> tuple:
    """Train the level-0 forest on the union of all detector pools and
    calibrate it to 100% recall.

    Calibration uses the union of positive pools unless explicit samples
    are given; fresh (out-of-training) samples give an unbiased operating
    point, since forests memorize their own training set.
    """
    pos_union: list = []
    neg_union: list = []
    seen_pos: set = set()
    seen_neg: set = set()
    for det_id in sorted(pools):
        pos, neg = pools[det_id]
        for log in pos:
            key = (log.url, log.user_id, log.timestamp)
            if key not in seen_pos:
                seen_pos.add(key)
                pos_union.append(log)
        for log in neg:
            key = (log.url, log.user_id, log.timestamp)
            if key not in seen_neg:
                seen_neg.add(key)
                neg_union.append(log)
    det = train_detector(
        detector_id, "prefilter", "prefilter", pos_union, neg_union,
        params, 0.0, models, seed,
    )
    cal_pos = calibration_positives if calibration_positives is not None else pos_union
    cal_neg = calibration_negatives if calibration_negatives is not None else neg_union
    calibration = calibrate_prefilter(det, cal_pos, cal_neg, models)
    det = det.with_threshold(calibration.tau0)
    return pipeline.with_prefilter(det), calibration
