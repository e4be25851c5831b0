"""Character-trigram frequency models and their histogram features."""

from __future__ import annotations

import hashlib
import math
import struct
from typing import Iterable

import numpy as np

from .. import kernels
from .stringfeats import as_bytes

DEFAULT_BINS = 16
DEFAULT_Q = 2

_MAGIC = b"TGM1"


class TrigramBuildError(ValueError):
    pass


class TrigramModel:
    """Frequency table over byte trigrams plus log10-spaced histogram bins.

    Immutable once built. `bin_edges` has bins+1 ascending entries: bin 0 is
    reserved for unseen trigrams, bins 1..bins-1 are equal-width over the
    [min, max] range of the table's log10 frequencies.
    """

    def __init__(self, frequency_table: dict, smoothing_window: int,
                 bins: int, source_digest: str):
        if smoothing_window < 1:
            raise TrigramBuildError("smoothing window Q must be positive")
        if bins < 2:
            raise TrigramBuildError("need at least 2 histogram bins")
        if not frequency_table:
            raise TrigramBuildError("empty trigram table")
        self.frequency_table = dict(sorted(frequency_table.items()))
        self.smoothing_window = smoothing_window
        self.bins = bins
        self.source_digest = source_digest

        logs = [math.log10(f) for f in self.frequency_table.values()]
        lo = min(logs)
        span = max(logs) - lo
        if span <= 0.0:
            span = 1.0  # degenerate table: keep edges strictly increasing
        self.width = span / (bins - 1)
        self.lo = lo
        self.bin_edges = tuple(lo + (i - 1) * self.width for i in range(bins + 1))

        keys = np.array(
            [(g[0] << 16) | (g[1] << 8) | g[2] for g in self.frequency_table],
            dtype=np.uint32,
        )
        freqs = np.array(list(self.frequency_table.values()), dtype=np.float64)
        self._keys = keys
        self._freqs = freqs
        self._handles: dict = {}

    def _handle(self):
        name = kernels.active_name()
        handle = self._handles.get(name)
        if handle is None:
            handle = kernels.active().prepare_trigrams(self._keys, self._freqs)
            self._handles[name] = handle
        return handle

    def histograms(self, s) -> np.ndarray:
        """2*bins values: normalized single-trigram then Q-smoothed histograms."""
        return kernels.active().trigram_hists(
            self._handle(), as_bytes(s), self.lo, self.width,
            self.smoothing_window, self.bins,
        )

    def to_bytes(self) -> bytes:
        """Persist as magic, Q, bins, edges, entry count, sorted records, digest."""
        parts = [
            _MAGIC,
            struct.pack("<II", self.smoothing_window, self.bins),
            struct.pack(f"<{self.bins + 1}d", *self.bin_edges),
            struct.pack("<Q", len(self.frequency_table)),
        ]
        for gram, freq in self.frequency_table.items():
            parts.append(gram)
            parts.append(struct.pack("<d", freq))
        parts.append(bytes.fromhex(self.source_digest))
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, blob: bytes) -> "TrigramModel":
        if blob[:4] != _MAGIC:
            raise ValueError("bad trigram model magic")
        q, bins = struct.unpack_from("<II", blob, 4)
        off = 12
        edges = struct.unpack_from(f"<{bins + 1}d", blob, off)
        off += 8 * (bins + 1)
        (count,) = struct.unpack_from("<Q", blob, off)
        off += 8
        table = {}
        for _ in range(count):
            gram = blob[off : off + 3]
            (freq,) = struct.unpack_from("<d", blob, off + 3)
            table[gram] = freq
            off += 11
        digest = blob[off : off + 32].hex()
        model = cls(table, q, bins, digest)
        if tuple(edges) != model.bin_edges:
            raise ValueError("trigram model edges do not match its table")
        return model

    def __eq__(self, other):
        return (
            isinstance(other, TrigramModel)
            and self.frequency_table == other.frequency_table
            and self.smoothing_window == other.smoothing_window
            and self.bins == other.bins
            and self.source_digest == other.source_digest
        )


def build_trigram_model(
    dictionary: Iterable,
    q: int = DEFAULT_Q,
    bins: int = DEFAULT_BINS,
) -> TrigramModel:
    """Count trigrams over all dictionary entries and normalize to frequencies."""
    counts: dict = {}
    total = 0
    digest = hashlib.sha256()
    for word in dictionary:
        data = as_bytes(word)
        digest.update(data)
        digest.update(b"\n")
        for i in range(len(data) - 2):
            gram = data[i : i + 3]
            counts[gram] = counts.get(gram, 0) + 1
            total += 1
    if total == 0:
        raise TrigramBuildError("dictionary has no entry of length >= 3")
    table = {gram: c / total for gram, c in counts.items()}
    return TrigramModel(table, q, bins, digest.hexdigest())


def load_dictionary(path) -> list:
    """One entry per line; blank lines and '#'-prefixed comments ignored."""
    entries = []
    with open(path, "r", encoding="utf-8", errors="surrogateescape") as fh:
        for line in fh:
            line = line.rstrip("\r\n")
            if not line or line.startswith("#"):
                continue
            entries.append(line)
    return entries
