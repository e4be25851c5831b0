# Compiled twin of _pykernels. Must stay operation-for-operation identical
# to the pure-Python backend so both produce bit-identical float64 results.

from libc.math cimport floor, log10

import numpy as np

cdef int[256] _LOWER
cdef int[256] _UPPER
cdef int[256] _DIGIT
cdef int[256] _VOWEL
cdef int[256] _B64

cdef int _b
for _b in range(256):
    _LOWER[_b] = 1 if 97 <= _b <= 122 else 0
    _UPPER[_b] = 1 if 65 <= _b <= 90 else 0
    _DIGIT[_b] = 1 if 48 <= _b <= 57 else 0
    _VOWEL[_b] = 0
    _B64[_b] = _LOWER[_b] | _UPPER[_b] | _DIGIT[_b]
for _b in b"+/=":
    _B64[_b] = 1
for _b in b"aeiouAEIOU":
    _VOWEL[_b] = 1

SPECIAL_BYTES = b"_-?!,.@#%&=+;:/"
cdef const unsigned char[::1] _SPECIAL = SPECIAL_BYTES


def string_block(const unsigned char[::1] s):
    """26 character-statistics features of a byte string, canonical order."""
    cdef Py_ssize_t n = s.shape[0]
    out_arr = np.zeros(26)
    cdef double[::1] out = out_arr
    if n == 0:
        return out_arr
    cdef long counts[256]
    cdef int i
    for i in range(256):
        counts[i] = 0
    cdef long cv_changes = 0
    cdef long run_lower = 0, run_upper = 0, run_digit = 0
    cdef long max_lower = 0, max_upper = 0, max_digit = 0
    cdef long non_b64 = 0, letters = 0
    cdef int prev_consonant = 0
    cdef int lower, upper, letter
    cdef unsigned char b
    cdef Py_ssize_t pos
    for pos in range(n):
        b = s[pos]
        counts[b] += 1
        lower = _LOWER[b]
        upper = _UPPER[b]
        letter = lower | upper
        if letter:
            letters += 1
        if prev_consonant and _VOWEL[b]:
            cv_changes += 1
        prev_consonant = letter and not _VOWEL[b]
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
    cdef long max_char = 0, max_d = 0, max_u = 0, max_l = 0
    for i in range(256):
        if counts[i] > max_char:
            max_char = counts[i]
    for i in range(48, 58):
        if counts[i] > max_d:
            max_d = counts[i]
    for i in range(65, 91):
        if counts[i] > max_u:
            max_u = counts[i]
    for i in range(97, 123):
        if counts[i] > max_l:
            max_l = counts[i]
    cdef double dn = <double> n
    out[0] = dn
    out[1] = cv_changes / dn
    out[2] = max_char / dn
    out[3] = max_d / dn
    out[4] = max_u / dn
    out[5] = max_l / dn
    out[6] = <double> max_lower
    out[7] = <double> max_upper
    out[8] = <double> max_digit
    for i in range(15):
        out[9 + i] = <double> counts[_SPECIAL[i]]
    out[24] = <double> non_b64
    out[25] = 1.0 - letters / dn
    return out_arr


def repetitive_flag(const unsigned char[::1] s):
    """1 iff the '='/'&' subsequence is non-empty, starts '=', alternates."""
    cdef unsigned char last = 0
    cdef unsigned char b
    cdef Py_ssize_t pos
    for pos in range(s.shape[0]):
        b = s[pos]
        if b != 61 and b != 38:
            continue
        if last == 0:
            if b != 61:
                return 0
        elif b == last:
            return 0
        last = b
    return 1 if last != 0 else 0


def prepare_trigrams(keys, freqs):
    """Backend-private lookup structure for a trigram frequency table."""
    return (
        np.ascontiguousarray(keys, dtype=np.uint32),
        np.ascontiguousarray(freqs, dtype=np.float64),
    )


cdef inline double _lookup(const unsigned int[::1] keys, const double[::1] freqs,
                           unsigned int key) noexcept:
    cdef Py_ssize_t lo = 0, hi = keys.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if keys[mid] < key:
            lo = mid + 1
        else:
            hi = mid
    if lo < keys.shape[0] and keys[lo] == key:
        return freqs[lo]
    return 0.0


def trigram_hists(table, const unsigned char[::1] s, double lo, double width,
                  int q, int bins):
    """Two normalized trigram histograms (single and Q-smoothed) of `s`."""
    cdef const unsigned int[::1] keys = table[0]
    cdef const double[::1] freqs = table[1]
    out_arr = np.zeros(2 * bins)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t n = s.shape[0]
    cdef Py_ssize_t ntri = n - 2
    if ntri <= 0:
        return out_arr
    cdef int top = bins - 1
    freq_arr = np.zeros(ntri)
    cdef double[::1] freq_seq = freq_arr
    counts_arr = np.zeros(2 * bins, dtype=np.int64)
    cdef long long[::1] counts = counts_arr
    cdef Py_ssize_t i, j
    cdef unsigned int key
    cdef double f, m
    cdef int k
    for i in range(ntri):
        key = (<unsigned int> s[i] << 16) | (<unsigned int> s[i + 1] << 8) | s[i + 2]
        f = _lookup(keys, freqs, key)
        freq_seq[i] = f
        if f == 0.0:
            counts[0] += 1
        else:
            k = 1 + <int> floor((log10(f) - lo) / width)
            if k < 1:
                k = 1
            elif k > top:
                k = top
            counts[k] += 1
    for k in range(bins):
        out[k] = counts[k] / (<double> ntri)
    cdef Py_ssize_t nwin = ntri - q + 1
    if nwin <= 0:
        return out_arr
    for i in range(nwin):
        m = 0.0
        for j in range(q):
            m += freq_seq[i + j]
        m /= q
        if m == 0.0:
            counts[bins] += 1
        else:
            k = 1 + <int> floor((log10(m) - lo) / width)
            if k < 1:
                k = 1
            elif k > top:
                k = top
            counts[bins + k] += 1
    for k in range(bins):
        out[bins + k] = counts[bins + k] / (<double> nwin)
    return out_arr


def prepare_forest(roots, feat, thresh, left, right, label):
    return (
        np.ascontiguousarray(roots, dtype=np.int32),
        np.ascontiguousarray(feat, dtype=np.int32),
        np.ascontiguousarray(thresh, dtype=np.float64),
        np.ascontiguousarray(left, dtype=np.int32),
        np.ascontiguousarray(right, dtype=np.int32),
        np.ascontiguousarray(label, dtype=np.int8),
    )


def forest_votes(handle, x):
    """Sum of per-tree votes plus the number of node tests performed."""
    cdef const int[::1] roots = handle[0]
    cdef const int[::1] feat = handle[1]
    cdef const double[::1] thresh = handle[2]
    cdef const int[::1] left = handle[3]
    cdef const int[::1] right = handle[4]
    cdef const signed char[::1] label = handle[5]
    cdef const double[::1] xs = x
    cdef long votes = 0, tests = 0
    cdef Py_ssize_t t
    cdef int i, f
    for t in range(roots.shape[0]):
        i = roots[t]
        f = feat[i]
        while f >= 0:
            tests += 1
            if xs[f] > thresh[i]:
                i = left[i]
            else:
                i = right[i]
            f = feat[i]
        votes += label[i]
    return votes, tests
