"""String-feature block against an independent character-scan oracle.

The oracle below was written from the feature definitions before the
kernel implementations and shares no code with them.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from proxysieve.featurizer import string_features
from proxysieve.featurizer.stringfeats import SPECIAL_CHARS, string_feature_names

VOWELS = set(b"aeiouAEIOU")
B64 = set(
    b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/="
)


def oracle_string_block(s: bytes):
    """Straightforward multi-pass reimplementation of the 26 features."""
    n = len(s)
    if n == 0:
        return [0.0] * 26
    out = [0.0] * 26
    out[0] = float(n)

    def is_lower(b):
        return ord("a") <= b <= ord("z")

    def is_upper(b):
        return ord("A") <= b <= ord("Z")

    def is_digit(b):
        return ord("0") <= b <= ord("9")

    def is_letter(b):
        return is_lower(b) or is_upper(b)

    changes = 0
    for a, b in zip(s, s[1:]):
        if is_letter(a) and a not in VOWELS and b in VOWELS:
            changes += 1
    out[1] = changes / n

    from collections import Counter

    counts = Counter(s)
    out[2] = max(counts.values()) / n
    out[3] = max([counts[b] for b in counts if is_digit(b)], default=0) / n
    out[4] = max([counts[b] for b in counts if is_upper(b)], default=0) / n
    out[5] = max([counts[b] for b in counts if is_lower(b)], default=0) / n

    def max_run(pred):
        best = run = 0
        for b in s:
            run = run + 1 if pred(b) else 0
            best = max(best, run)
        return float(best)

    out[6] = max_run(is_lower)
    out[7] = max_run(is_upper)
    out[8] = max_run(is_digit)
    for i, ch in enumerate(SPECIAL_CHARS):
        out[9 + i] = float(counts[ord(ch)])
    out[24] = float(sum(1 for b in s if b not in B64))
    out[25] = 1.0 - sum(1 for b in s if is_letter(b)) / n
    return out


def test_single_repeated_letter():
    f = string_features("aaa")
    assert f[0] == 3
    assert f[2] == 1.0  # max char occurrence ratio
    assert f[6] == 3  # lower-case stream
    assert f[25] == 0.0  # non-letter ratio


def test_empty_string_all_zero():
    assert np.all(string_features("") == 0)


def test_worked_example():
    f = string_features("ab1?ab")
    assert f[0] == 6
    assert f[1] == 0.0  # no consonant->vowel adjacency
    assert f[2] == pytest.approx(2 / 6)
    assert f[3] == pytest.approx(1 / 6)  # digit occurrence max
    assert f[11] == 1  # '?' count
    assert f[24] == 1  # only '?' is outside the Base64 alphabet
    assert f[25] == pytest.approx(2 / 6)


def test_consonant_vowel_changes():
    # b->a and d->e change; a->b, e->(end) do not; 'y' is a consonant.
    f = string_features("bade")
    assert f[1] == pytest.approx(2 / 4)
    assert string_features("ya")[1] == pytest.approx(1 / 2)
    assert string_features("ay")[1] == 0.0


def test_streams_vs_ratios():
    grouped = string_features("ver123456")
    spread = string_features("r12v34e56")
    assert grouped[8] == 6 and spread[8] == 2  # digit stream length differs
    assert grouped[3] == spread[3]  # per-digit occurrence max does not


def test_special_character_counts_order():
    s = "_-?!,.@#%&=+;:/"
    f = string_features(s)
    assert list(f[9:24]) == [1.0] * 15


def test_non_ascii_bytes_are_other():
    f = string_features("é")  # two UTF-8 bytes, neither a letter
    assert f[0] == 2
    assert f[25] == 1.0
    assert f[24] == 2


def test_ratios_bounded():
    for s in ("", "a", "A1/_", "xyz" * 40, "É" * 7):
        f = string_features(s)
        for idx in (1, 2, 3, 4, 5, 25):
            assert 0.0 <= f[idx] <= 1.0


@settings(max_examples=400, deadline=None)
@given(st.binary(min_size=0, max_size=80))
def test_matches_oracle_on_random_bytes(data):
    assert string_features(data).tolist() == oracle_string_block(data)


def test_matches_oracle_on_many_random_strings(rng):
    # 10k printable-ish random strings, seeded.
    alphabet = bytes(range(32, 127)) + b"\xc3\xa9\x00"
    for _ in range(10_000):
        n = int(rng.integers(0, 40))
        s = bytes(rng.choice(list(alphabet), size=n))
        assert string_features(s).tolist() == oracle_string_block(s)


def test_feature_names_shape():
    names = string_feature_names("URL Path")
    assert len(names) == 26
    assert names[0] == "Length Of URL Path"
    assert names[23] == "Number Of Occurrences Of '/' In URL Path"
    assert names[25] == "Non Letter Ratio Of URL Path"
