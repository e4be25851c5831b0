import numpy as np
import pytest

from proxysieve import synth
from proxysieve.featurizer import build_trigram_model
from proxysieve.featurizer.stringfeats import as_bytes
from proxysieve.logmodel import decompose_url


def harvest_trigram_models(flows, dictionary, min_len=10):
    """Domain model from the dictionary; path/query models from the flows."""
    paths, queries = [], []
    for log in flows:
        parts = decompose_url(log.url)
        if len(as_bytes(parts.path)) > min_len:
            paths.append(parts.path)
        if len(as_bytes(parts.query)) > min_len:
            queries.append(parts.query)
    return {
        "domain": build_trigram_model(dictionary),
        "path": build_trigram_model(paths),
        "query": build_trigram_model(queries),
    }


@pytest.fixture(scope="session")
def small_corpus():
    return synth.generate_corpus("mixed", 1200, seed=1234)


@pytest.fixture(scope="session")
def small_models(small_corpus):
    return harvest_trigram_models(small_corpus.flows, small_corpus.dictionary)


@pytest.fixture(scope="session")
def tiny_models():
    """Cheap models for tests that only need well-formed inputs."""
    return {
        "domain": build_trigram_model(["example", "website", "service"]),
        "path": build_trigram_model(["/index.html", "/images/logo.png"]),
        "query": build_trigram_model(["id=123&page=2", "q=search+terms"]),
    }


@pytest.fixture
def rng():
    return np.random.default_rng(20240809)


def split_pools(corpus, lo, hi):
    """(negatives, dga positives, enc positives) for flows[lo:hi]."""
    rows = list(zip(corpus.flows, corpus.labels, corpus.kinds))[lo:hi]
    neg = [f for f, label, kind in rows if label == 0]
    dga = [f for f, label, kind in rows if kind == "dga"]
    enc = [f for f, label, kind in rows if kind == "enc"]
    return neg, dga, enc


def build_dual_chain(corpus, models, n_train, seed=7, params=None):
    """Prefiltered two-level pipeline with a DGA chain and an ENC chain.

    Level 1 learns from the first half of the training slice; level 2 from
    fresh flows of the second half filtered through level 1 (forests
    memorize their training set, so survivors must come from fresh data).
    """
    from proxysieve.cascade import (
        CascadePipeline,
        LevelSpec,
        build_bottom_up,
        rebuild_prefilter,
    )
    from proxysieve.forest import ForestParams

    params = params or ForestParams(trees=40, max_depth=19)
    half = n_train // 2
    neg_a, dga_a, enc_a = split_pools(corpus, 0, half)
    neg_b, dga_b, enc_b = split_pools(corpus, half, n_train)

    enc_chain = build_bottom_up(
        [
            LevelSpec("c2", "path_query", enc_a, neg_a, params, 0.5, "enc-l1"),
            LevelSpec("c2", "no_domain", enc_b, neg_b, params, 0.5, "enc-l2"),
        ],
        models,
        seed=seed,
    )
    dga_chain = build_bottom_up(
        [
            LevelSpec("dga", "sld", dga_a, neg_a, params, 0.5, "dga-l1"),
            LevelSpec("dga", "full", dga_b, neg_b, params, 0.5, "dga-l2"),
        ],
        models,
        seed=seed + 10,
    )
    levels = [
        [dga_chain.pipeline.levels[0][0], enc_chain.pipeline.levels[0][0]],
        [dga_chain.pipeline.levels[1][0], enc_chain.pipeline.levels[1][0]],
    ]
    pools = {**dga_chain.pools, **enc_chain.pools}
    pipeline = CascadePipeline(levels)
    pipeline, calibration = rebuild_prefilter(
        pipeline,
        pools,
        models,
        params,
        seed=seed + 20,
        calibration_positives=dga_b + enc_b,
        calibration_negatives=neg_b,
    )
    return pipeline, pools, calibration


@pytest.fixture(scope="session")
def trained_cascade(small_corpus, small_models):
    pipeline, pools, calibration = build_dual_chain(
        small_corpus, small_models, n_train=800
    )
    return {
        "pipeline": pipeline,
        "pools": pools,
        "calibration": calibration,
        "eval_rows": list(
            zip(small_corpus.flows, small_corpus.labels, small_corpus.kinds)
        )[800:],
    }
