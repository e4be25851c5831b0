"""Bit-level parity between the compiled kernels and the Python fallback."""

import numpy as np
import pytest

from proxysieve import kernels
from proxysieve.featurizer import build_trigram_model
from proxysieve.forest import ForestParams, train_forest_arrays

pytestmark = pytest.mark.skipif(
    "compiled" not in kernels.available(),
    reason="compiled kernels not built",
)


@pytest.fixture(autouse=True)
def restore_backend():
    before = kernels.active_name()
    yield
    kernels.use(before)


def both():
    return kernels.get("python"), kernels.get("compiled")


def random_bytes(rng, n):
    return bytes(rng.integers(0, 256, size=n, dtype=np.uint8))


def test_string_block_bitwise(rng):
    py, cy = both()
    for _ in range(2000):
        s = random_bytes(rng, int(rng.integers(0, 64)))
        a = py.string_block(s)
        b = cy.string_block(s)
        assert a.tobytes() == b.tobytes(), s


def test_repetitive_flag(rng):
    py, cy = both()
    alphabet = b"a=&b"
    for _ in range(2000):
        s = bytes(
            alphabet[int(i)] for i in rng.integers(0, 4, int(rng.integers(0, 12)))
        )
        assert py.repetitive_flag(s) == cy.repetitive_flag(s), s


def test_trigram_hists_bitwise(rng):
    py, cy = both()
    words = [
        "".join("abcdef"[int(i)] for i in rng.integers(0, 6, int(rng.integers(3, 10))))
        for _ in range(60)
    ]
    model = build_trigram_model(words, q=2)
    hp = py.prepare_trigrams(model._keys, model._freqs)
    hc = cy.prepare_trigrams(model._keys, model._freqs)
    for _ in range(800):
        n = int(rng.integers(0, 40))
        s = bytes(b"abcdefgh"[int(i)] for i in rng.integers(0, 8, n))
        a = py.trigram_hists(hp, s, model.lo, model.width, 2, 16)
        b = cy.trigram_hists(hc, s, model.lo, model.width, 2, 16)
        assert a.tobytes() == b.tobytes(), s


def test_trigram_hists_bitwise_large_q(rng):
    py, cy = both()
    model = build_trigram_model(["abcdefgh", "aabbccdd"], q=4)
    hp = py.prepare_trigrams(model._keys, model._freqs)
    hc = cy.prepare_trigrams(model._keys, model._freqs)
    for _ in range(200):
        n = int(rng.integers(0, 20))
        s = bytes(b"abcd"[int(i)] for i in rng.integers(0, 4, n))
        a = py.trigram_hists(hp, s, model.lo, model.width, 4, 16)
        b = cy.trigram_hists(hc, s, model.lo, model.width, 4, 16)
        assert a.tobytes() == b.tobytes()


def test_forest_votes_bitwise(rng):
    py, cy = both()
    X = rng.normal(size=(300, 12))
    y = rng.integers(0, 2, size=300)
    params = ForestParams(trees=15, max_depth=9, features_per_split=4)
    model = train_forest_arrays(X, y, "sld", params, seed=31)
    flat = model._flatten()
    hp = py.prepare_forest(*flat)
    hc = cy.prepare_forest(*flat)
    for _ in range(500):
        x = rng.normal(size=12)
        x[rng.random(12) < 0.3] = np.nan
        assert py.forest_votes(hp, x) == cy.forest_votes(hc, x)


def test_extraction_identical_between_backends(small_corpus, small_models):
    from proxysieve.featurizer import FEATURE_SET_DIMS, extract

    for log in small_corpus.flows[:60]:
        vectors = {}
        for name in ("python", "compiled"):
            kernels.use(name)
            vectors[name] = {
                set_id: extract(log, set_id, small_models).values.tobytes()
                for set_id in FEATURE_SET_DIMS
            }
        assert vectors["python"] == vectors["compiled"]


def test_training_identical_between_backends(small_corpus, small_models):
    """Models trained on either backend's features must match bit-for-bit."""
    from proxysieve.bundle import forest_to_bytes
    from proxysieve.cascade import train_detector

    rows = list(zip(small_corpus.flows, small_corpus.labels))[:300]
    pos = [f for f, label in rows if label == 1]
    neg = [f for f, label in rows if label == 0]
    blobs = {}
    for name in ("python", "compiled"):
        kernels.use(name)
        det = train_detector(
            "d", "x", "path_query", pos, neg,
            ForestParams(trees=6, max_depth=8), 0.5, small_models, seed=3,
        )
        blobs[name] = forest_to_bytes(det.model)
    assert blobs["python"] == blobs["compiled"]
