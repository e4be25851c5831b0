"""Command-line interface: train, score, eval, importance, bench, gen-synth.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 internal
invariant violation. Seeds are always explicit flags; no environment
variables are consulted.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from typing import Optional

from . import kernels
from .bench import run_benchmark
from .bundle import BundleError, ModelBundle, load_bundle, save_bundle
from .cascade import (
    BuildError,
    CalibrationError,
    CascadePipeline,
    PipelineError,
    augment_domain_mixin,
    detector_fires,
    rebuild_prefilter,
    run_pipeline,
    train_detector,
)
from .evaluator import GRANULARITIES, DetectionRecord, LabelStore, evaluate, roc, roc_table
from .featurizer import (
    SET_MODEL_ROLES,
    FeatureConfigError,
    TrigramBuildError,
    build_trigram_model,
    load_dictionary,
)
from .featurizer.stringfeats import as_bytes
from .forest import ForestParams, TrainingError
from .logmodel import LOG_FORMATS, ParseError, decompose_url, format_tsv12, parse_proxy_log
from . import synth


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read_corpus(path: str, format: str) -> list:
    try:
        with open(path, "r", encoding="utf-8", errors="surrogateescape") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise DataError(f"cannot read corpus {path}: {exc}") from None
    flows = []
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            flows.append(parse_proxy_log(line, format, line_no))
        except ParseError as exc:
            raise DataError(f"{path}: {exc}") from None
    if not flows:
        raise DataError(f"corpus {path} contains no records")
    return flows


# ---------------------------------------------------------------------------
# train

def _build_trigram_models(cfg: dict, corpora_cache: dict, needed_roles: set) -> dict:
    q = int(cfg.get("q", 2))
    bins = int(cfg.get("bins", 16))
    min_len = int(cfg.get("min_part_length", 10))
    models = {}
    if "domain" in needed_roles:
        path = cfg.get("domain_dictionary")
        if not path:
            raise UsageError("config: trigram.domain_dictionary is required")
        try:
            entries = load_dictionary(path)
        except OSError as exc:
            raise DataError(f"cannot read dictionary {path}: {exc}") from None
        models["domain"] = build_trigram_model(entries, q, bins)
    if needed_roles & {"path", "query"}:
        corpus_path = cfg.get("corpus")
        if not corpus_path:
            raise UsageError("config: trigram.corpus is required for path/query models")
        fmt = cfg.get("corpus_format", "tsv12")
        flows = _cached_corpus(corpora_cache, corpus_path, fmt)
        paths = []
        queries = []
        for log in flows:
            parts = decompose_url(log.url)
            if len(as_bytes(parts.path)) > min_len:
                paths.append(parts.path)
            if len(as_bytes(parts.query)) > min_len:
                queries.append(parts.query)
        if "path" in needed_roles:
            models["path"] = build_trigram_model(paths, q, bins)
        if "query" in needed_roles:
            models["query"] = build_trigram_model(queries, q, bins)
    return models


def _cached_corpus(cache: dict, path: str, fmt: str) -> list:
    key = (path, fmt)
    if key not in cache:
        cache[key] = _read_corpus(path, fmt)
    return cache[key]


def _forest_params(cfg: dict) -> ForestParams:
    return ForestParams(
        trees=int(cfg.get("trees", 40)),
        max_depth=cfg.get("max_depth", 19),
        features_per_split=cfg.get("features_per_split"),
    )


def cmd_train(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            config_text = fh.read()
        config = json.loads(config_text)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config is not valid JSON: {exc}") from None

    det_cfgs = config.get("detectors")
    if not det_cfgs:
        raise UsageError("config: at least one detector is required")
    for i, dc in enumerate(det_cfgs):
        for key in ("id", "behavior", "level", "feature_set", "positives", "negatives"):
            if key not in dc:
                raise UsageError(f"config: detector #{i} is missing {key!r}")
        if dc["feature_set"] not in SET_MODEL_ROLES:
            raise UsageError(
                f"config: detector {dc['id']!r} names unknown feature set "
                f"{dc['feature_set']!r}"
            )

    needed_roles = set()
    for dc in det_cfgs:
        needed_roles.update(SET_MODEL_ROLES[dc["feature_set"]])
    corpora: dict = {}
    models = _build_trigram_models(config.get("trigram", {}), corpora, needed_roles)

    det_cfgs = sorted(enumerate(det_cfgs), key=lambda kv: (kv[1]["level"], kv[0]))
    levels_cfg: dict = {}
    detectors: dict = {}
    pools: dict = {}
    for index, (_, dc) in enumerate(det_cfgs):
        fmt = dc.get("format", "tsv12")
        positives = list(_cached_corpus(corpora, dc["positives"], fmt))
        negatives = list(_cached_corpus(corpora, dc["negatives"], fmt))
        level = int(dc["level"])
        parents = tuple(dc.get("parents", ()))
        if level > 1:
            if not parents:
                raise UsageError(
                    f"config: detector {dc['id']!r} at level {level} needs parents"
                )
            for p in parents:
                if p not in detectors:
                    raise UsageError(
                        f"config: detector {dc['id']!r} references untrained parent {p!r}"
                    )
            parent_dets = [detectors[p] for p in parents]
            positives = [
                log
                for log in positives
                if any(detector_fires(d, log, models) for d in parent_dets)
            ]
            negatives = [
                log
                for log in negatives
                if any(detector_fires(d, log, models) for d in parent_dets)
            ]
            if not positives:
                raise BuildError(
                    f"detector {dc['id']!r}: no positive samples survive its parents"
                )
            if not negatives:
                raise BuildError(
                    f"detector {dc['id']!r}: no negative samples survive its parents"
                )
        aug = dc.get("augment")
        if aug:
            pool = load_dictionary(aug["domain_pool"])
            swapped = augment_domain_mixin(
                positives, pool, "swap_domain_only", int(aug.get("swap_rounds", 1))
            )
            stripped = augment_domain_mixin(
                positives, pool, "swap_and_strip_path_query", int(aug.get("strip_rounds", 1))
            )
            positives = positives + swapped + stripped
        params = _forest_params(dc)
        det = train_detector(
            dc["id"],
            dc["behavior"],
            dc["feature_set"],
            positives,
            negatives,
            params,
            float(dc.get("threshold", 0.5)),
            models,
            args.seed + index,
            parents,
            threads=args.threads,
        )
        detectors[dc["id"]] = det
        pools[dc["id"]] = (positives, negatives)
        levels_cfg.setdefault(level, []).append(det)
        f_eff = params.effective_f(det.model.n_features)
        print(
            f"trained {dc['id']:<16} set={det.feature_set_id:<10}"
            f" pos={len(positives):<7} neg={len(negatives):<7}"
            f" T={params.trees} D_max={params.max_depth} F={f_eff}"
            f" splits={det.model.split_node_count()}"
            f" depth_used={det.model.max_depth_used()}"
        )

    levels = [levels_cfg[k] for k in sorted(levels_cfg)]
    pipeline = CascadePipeline(levels, None, config.get("priorities"))

    pf_cfg = config.get("prefilter", {})
    if pf_cfg.get("enabled", True):
        pipeline, calibration = rebuild_prefilter(
            pipeline, pools, models, _forest_params(pf_cfg), args.seed + len(detectors)
        )
        print(
            f"prefilter calibrated: tau0={calibration.tau0:.4f}"
            f" min_votes={calibration.min_positive_votes}"
            f" filters {calibration.negative_filter_fraction:.1%} of training negatives"
        )

    digest = hashlib.sha256(config_text.encode("utf-8")).hexdigest()
    bundle = ModelBundle(pipeline, models, args.seed, digest)
    save_bundle(bundle, args.out)
    print(f"bundle written to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# score

def _parse_tau_overrides(items, pipeline: CascadePipeline) -> Optional[dict]:
    if not items:
        return None
    overrides = {}
    known = {d.detector_id for d in pipeline.detectors()}
    for item in items:
        det_id, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--tau expects detector=value, got {item!r}")
        if det_id not in known:
            raise UsageError(f"--tau names unknown detector {det_id!r}")
        try:
            tau = float(value)
        except ValueError:
            raise UsageError(f"--tau value for {det_id!r} is not a number") from None
        if not 0.0 <= tau < 1.0:
            raise UsageError(f"--tau for {det_id!r} must lie in [0, 1)")
        overrides[det_id] = tau
    return overrides


def cmd_score(args) -> int:
    bundle = load_bundle(args.bundle)
    pipeline = bundle.pipeline
    overrides = _parse_tau_overrides(args.tau, pipeline)
    last_ids = pipeline.last_level_ids()

    if args.input == "-":
        lines = sys.stdin
        close_in = None
    else:
        try:
            close_in = open(args.input, "r", encoding="utf-8", errors="surrogateescape")
        except OSError as exc:
            raise DataError(f"cannot read input: {exc}") from None
        lines = close_in
    out = sys.stdout if args.output == "-" else open(args.output, "w", encoding="utf-8")

    flows = skipped = incidents = 0
    try:
        for line_no, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                log = parse_proxy_log(line, args.format, line_no)
            except ParseError as exc:
                print(f"skip: {exc}", file=sys.stderr)
                skipped += 1
                continue
            verdict = run_pipeline(pipeline, log, bundle.trigram_models, overrides)
            flows += 1
            if verdict.detected:
                incidents += 1
            record = {
                "line": line_no,
                "url": log.url,
                "domain": verdict.group.domain,
                "user_id": log.user_id,
                "filtered_at": verdict.filtered_at,
                "incident": (
                    {"behavior": verdict.incident[0], "priority": verdict.incident[1]}
                    if verdict.incident
                    else None
                ),
                "fired": list(verdict.fired),
                "scores": verdict.scores,
                "final_score": verdict.final_score(last_ids),
                "node_tests": verdict.node_tests,
            }
            out.write(json.dumps(record, sort_keys=True) + "\n")
    finally:
        if close_in is not None:
            close_in.close()
        if out is not sys.stdout:
            out.close()
    print(f"flows={flows} skipped={skipped} incidents={incidents}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# eval

def _records_from_verdict_file(path: str) -> list:
    records = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                    records.append(
                        DetectionRecord(
                            url=obj["url"],
                            domain=obj["domain"],
                            user_id=obj["user_id"],
                            detected=obj["incident"] is not None,
                            score=float(obj.get("final_score", 0.0)),
                        )
                    )
                except (json.JSONDecodeError, KeyError) as exc:
                    raise DataError(f"{path} line {line_no}: bad verdict record ({exc})")
    except OSError as exc:
        raise DataError(f"cannot read verdicts: {exc}") from None
    return records


def cmd_eval(args) -> int:
    records = _records_from_verdict_file(args.verdicts)
    try:
        labels = LabelStore.load(args.labels)
    except OSError as exc:
        raise DataError(f"cannot read labels: {exc}") from None
    totals = {"user": args.total_users} if args.total_users else None
    report = evaluate(records, labels, args.granularity, total_entities=totals)
    for line in report.lines():
        print(line)
    print(f"digest {report.dataset_digest[:16]}")
    if args.tsv:
        with open(args.tsv, "w", encoding="utf-8") as fh:
            fh.write("granularity\ttp\tfp\tprecision\n")
            for g, c in report.counts.items():
                prec = "" if c.precision is None else f"{c.precision:.6f}"
                fh.write(f"{g}\t{c.tp}\t{c.fp}\t{prec}\n")
    if args.roc:
        grid = [0.5 + i * 0.5 / (args.grid + 1) for i in range(1, args.grid + 1)]
        curves = roc(records, labels, grid)
        with open(args.roc, "w", encoding="utf-8") as fh:
            fh.write("granularity\ttau\ttp\tfp\n")
            for g, tau, tp, fp in roc_table(curves):
                fh.write(f"{g}\t{tau:.6f}\t{tp}\t{fp}\n")
    return 0


# ---------------------------------------------------------------------------
# importance

def cmd_importance(args) -> int:
    bundle = load_bundle(args.bundle)
    try:
        det = bundle.pipeline.get(args.detector)
    except PipelineError as exc:
        raise UsageError(str(exc)) from None
    counts = det.model.feature_importance()
    names = bundle.layouts()[det.feature_set_id]
    rows = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    if args.top:
        rows = rows[: args.top]
    print(f"detector {det.detector_id} (feature set {det.feature_set_id})")
    print(f"{'count':>6}  {'index':>5}  feature")
    for feature, count in rows:
        print(f"{count:>6}  {feature:>5}  {names[feature]}")
    return 0


# ---------------------------------------------------------------------------
# bench

def cmd_bench(args) -> int:
    bundle = load_bundle(args.bundle)
    flows = synth.bench_corpus(args.flows, args.seed)
    backends = (
        list(kernels.available()) if args.backend == "both" else [args.backend]
    )
    reports = []
    for backend in backends:
        name = None if backend == "auto" else backend
        report = run_benchmark(
            bundle.pipeline, bundle.trigram_models, flows,
            threads=args.threads, backend=name,
        )
        reports.append(report)
        for line in report.lines():
            print(line)
        print()
    if len(reports) == 2:
        slow = max(reports, key=lambda r: r.wall_time)
        fast = min(reports, key=lambda r: r.wall_time)
        if fast.wall_time > 0:
            print(
                f"{fast.backend} backend is {slow.wall_time / fast.wall_time:.1f}x "
                f"faster than {slow.backend}"
            )
    return 0


# ---------------------------------------------------------------------------
# gen-synth

def cmd_gen_synth(args) -> int:
    corpus = synth.generate_corpus(args.scenario, args.count, args.seed)
    with open(args.out, "w", encoding="utf-8") as fh:
        for log in corpus.flows:
            fh.write(format_tsv12(log) + "\n")
    labels_path = args.labels or args.out + ".labels"
    store = LabelStore(
        corpus.malicious_domains,
        {d.lower(): f"synthetic {args.scenario}" for d in corpus.malicious_domains},
    )
    store.save(labels_path)
    dict_path = args.dictionary or args.out + ".domains"
    with open(dict_path, "w", encoding="utf-8") as fh:
        fh.write("# benign second-level domains used by the generator\n")
        for entry in corpus.dictionary:
            fh.write(entry + "\n")
    print(
        f"wrote {len(corpus.flows)} flows to {args.out}"
        f" (classes: {corpus.class_counts});"
        f" {len(corpus.malicious_domains)} malicious domains to {labels_path};"
        f" dictionary to {dict_path}"
    )
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="proxysieve", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a detector cascade from a JSON config")
    p.add_argument("--config", required=True, help="JSON training configuration")
    p.add_argument("--out", required=True, help="output bundle path")
    p.add_argument("--seed", required=True, type=int, help="training seed")
    p.add_argument("--threads", type=int, default=1, help="worker threads per forest")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("score", help="score a log stream against a bundle")
    p.add_argument("--bundle", required=True)
    p.add_argument("--input", default="-", help="log file or - for stdin")
    p.add_argument("--format", choices=LOG_FORMATS, default="tsv12")
    p.add_argument("--output", default="-", help="verdict JSONL file or - for stdout")
    p.add_argument(
        "--tau", action="append", metavar="DETECTOR=VALUE",
        help="per-detector threshold override (repeatable)",
    )
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("eval", help="entity-level precision from scored verdicts")
    p.add_argument("--verdicts", required=True, help="JSONL output of `score`")
    p.add_argument("--labels", required=True, help="malicious-domain label file")
    p.add_argument("--granularity", choices=GRANULARITIES + ("all",), default="all")
    p.add_argument("--total-users", type=int, help="user count for the FP-rate")
    p.add_argument("--tsv", help="write the precision table as TSV")
    p.add_argument("--roc", help="write threshold-sweep curves as TSV")
    p.add_argument("--grid", type=int, default=20, help="ROC grid points in (0.5, 1)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("importance", help="feature usage counts of one detector")
    p.add_argument("--bundle", required=True)
    p.add_argument("--detector", required=True)
    p.add_argument("--top", type=int, default=20)
    p.set_defaults(func=cmd_importance)

    p = sub.add_parser("bench", help="throughput and cost-model benchmark")
    p.add_argument("--bundle", required=True)
    p.add_argument("--flows", type=int, default=100_000)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument(
        "--backend", choices=("auto", "compiled", "python", "both"), default="auto"
    )
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen-synth", help="generate a labeled synthetic corpus")
    p.add_argument("--scenario", choices=synth.SCENARIOS, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--out", required=True, help="tsv12 corpus path")
    p.add_argument("--labels", help="label-store path (default OUT.labels)")
    p.add_argument("--dictionary", help="benign-SLD dictionary path (default OUT.domains)")
    p.set_defaults(func=cmd_gen_synth)
    return parser


_CONFIG_ERRORS = (UsageError, PipelineError, FeatureConfigError)
_DATA_ERRORS = (
    DataError,
    ParseError,
    TrainingError,
    BuildError,
    CalibrationError,
    TrigramBuildError,
    BundleError,
    OSError,
)


def main(argv=None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        return args.func(args)
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AssertionError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
