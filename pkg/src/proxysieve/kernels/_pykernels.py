"""Pure-Python kernels: the reference semantics for the compiled twin.

All functions operate on raw byte strings. Arithmetic is kept to plain
scalar float64 operations in a fixed order so the compiled backend can
reproduce results bit-for-bit.
"""

from __future__ import annotations

import math

import numpy as np

_LOWER = [0] * 256
_UPPER = [0] * 256
_DIGIT = [0] * 256
_VOWEL = [0] * 256
_B64 = [0] * 256
for _b in range(ord("a"), ord("z") + 1):
    _LOWER[_b] = 1
    _B64[_b] = 1
for _b in range(ord("A"), ord("Z") + 1):
    _UPPER[_b] = 1
    _B64[_b] = 1
for _b in range(ord("0"), ord("9") + 1):
    _DIGIT[_b] = 1
    _B64[_b] = 1
for _b in b"+/=":
    _B64[_b] = 1
for _b in b"aeiouAEIOU":
    _VOWEL[_b] = 1

# '_', '-', '?', '!', ',', '.', '@', '#', '%', '&', '=', '+', ';', ':', '/'
SPECIAL_BYTES = b"_-?!,.@#%&=+;:/"


def string_block(s: bytes) -> np.ndarray:
    """26 character-statistics features of a byte string, canonical order."""
    n = len(s)
    out = np.zeros(26)
    if n == 0:
        return out
    counts = [0] * 256
    cv_changes = 0
    run_lower = run_upper = run_digit = 0
    max_lower = max_upper = max_digit = 0
    non_b64 = 0
    letters = 0
    prev_consonant = False
    for b in s:
        counts[b] += 1
        lower = _LOWER[b]
        upper = _UPPER[b]
        letter = lower or upper
        if letter:
            letters += 1
        if prev_consonant and _VOWEL[b]:
            cv_changes += 1
        prev_consonant = bool(letter) and not _VOWEL[b]
        if lower:
            run_lower += 1
            if run_lower > max_lower:
                max_lower = run_lower
        else:
            run_lower = 0
        if upper:
            run_upper += 1
            if run_upper > max_upper:
                max_upper = run_upper
        else:
            run_upper = 0
        if _DIGIT[b]:
            run_digit += 1
            if run_digit > max_digit:
                max_digit = run_digit
        else:
            run_digit = 0
        if not _B64[b]:
            non_b64 += 1
    out[0] = float(n)
    out[1] = cv_changes / n
    out[2] = max(counts) / n
    out[3] = max(counts[48:58]) / n
    out[4] = max(counts[65:91]) / n
    out[5] = max(counts[97:123]) / n
    out[6] = float(max_lower)
    out[7] = float(max_upper)
    out[8] = float(max_digit)
    for i, b in enumerate(SPECIAL_BYTES):
        out[9 + i] = float(counts[b])
    out[24] = float(non_b64)
    out[25] = 1.0 - letters / n
    return out


def repetitive_flag(s: bytes) -> int:
    """1 iff the '='/'&' subsequence is non-empty, starts '=', alternates."""
    last = 0
    for b in s:
        if b != 61 and b != 38:  # '=' and '&'
            continue
        if last == 0:
            if b != 61:
                return 0
        elif b == last:
            return 0
        last = b
    return 1 if last != 0 else 0


def prepare_trigrams(keys: np.ndarray, freqs: np.ndarray):
    """Backend-private lookup structure for a trigram frequency table."""
    return {int(k): float(f) for k, f in zip(keys, freqs)}


def trigram_hists(table, s: bytes, lo: float, width: float, q: int, bins: int) -> np.ndarray:
    """Two normalized trigram histograms (single and Q-smoothed) of `s`.

    Bin 0 collects unseen trigrams (and all-unseen windows); bins 1..bins-1
    place log10(frequency) relative to (lo, width), clamped at both ends.
    """
    out = np.zeros(2 * bins)
    n = len(s)
    ntri = n - 2
    if ntri <= 0:
        return out
    top = bins - 1
    freq_seq = [0.0] * ntri
    get = table.get
    single = [0] * bins
    for i in range(ntri):
        key = (s[i] << 16) | (s[i + 1] << 8) | s[i + 2]
        f = get(key, 0.0)
        freq_seq[i] = f
        if f == 0.0:
            single[0] += 1
        else:
            k = 1 + int(math.floor((math.log10(f) - lo) / width))
            if k < 1:
                k = 1
            elif k > top:
                k = top
            single[k] += 1
    for k in range(bins):
        out[k] = single[k] / ntri
    nwin = ntri - q + 1
    if nwin <= 0:
        return out
    smooth = [0] * bins
    for i in range(nwin):
        m = 0.0
        for j in range(q):
            m += freq_seq[i + j]
        m /= q
        if m == 0.0:
            smooth[0] += 1
        else:
            k = 1 + int(math.floor((math.log10(m) - lo) / width))
            if k < 1:
                k = 1
            elif k > top:
                k = top
            smooth[k] += 1
    for k in range(bins):
        out[bins + k] = smooth[k] / nwin
    return out


def prepare_forest(roots, feat, thresh, left, right, label):
    return (
        [int(v) for v in roots],
        [int(v) for v in feat],
        [float(v) for v in thresh],
        [int(v) for v in left],
        [int(v) for v in right],
        [int(v) for v in label],
    )


def forest_votes(handle, x: np.ndarray):
    """Sum of per-tree votes plus the number of node tests performed.

    A missing feature (NaN) fails the `x > threshold` test and follows the
    right branch.
    """
    roots, feat, thresh, left, right, label = handle
    xs = x.tolist()
    votes = 0
    tests = 0
    for r in roots:
        i = r
        f = feat[i]
        while f >= 0:
            tests += 1
            v = xs[f]
            if v > thresh[i]:
                i = left[i]
            else:
                i = right[i]
            f = feat[i]
        votes += label[i]
    return votes, tests
