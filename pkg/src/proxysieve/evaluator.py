"""Entity-level evaluation: precision by log/URL/domain/user plus ROC sweeps.

Labels live at domain granularity: a detected flow is a TP iff its
(case-folded, port-stripped) hostname is labeled malicious; anything else
counts as an FP, so reported precision is a lower bound. At url/domain/user
granularity each entity contributes at most one TP and at most one FP over
the whole evaluation.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

GRANULARITIES = ("log", "url", "domain", "user")


class LabelStore:
    """Set of malicious domains (case-folded) with optional notes."""

    def __init__(self, malicious_domains: Iterable[str], notes: Optional[Mapping] = None):
        self.malicious_domains = frozenset(d.lower() for d in malicious_domains)
        self.notes = dict(notes or {})

    def is_malicious(self, domain: str) -> bool:
        return domain.lower() in self.malicious_domains

    @classmethod
    def load(cls, path) -> "LabelStore":
        domains = []
        notes = {}
        with open(path, "r", encoding="utf-8", errors="surrogateescape") as fh:
            for line in fh:
                line = line.rstrip("\r\n")
                if not line or line.startswith("#"):
                    continue
                domain, _, note = line.partition("\t")
                domain = domain.strip().lower()
                domains.append(domain)
                if note:
                    notes[domain] = note
        return cls(domains, notes)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for domain in sorted(self.malicious_domains):
                note = self.notes.get(domain)
                fh.write(domain + ("\t" + note if note else "") + "\n")

    def __len__(self):
        return len(self.malicious_domains)


@dataclass(frozen=True)
class DetectionRecord:
    """One scored flow reduced to what evaluation needs."""

    url: str
    domain: str
    user_id: str
    detected: bool
    score: float = 0.0


def records_from_verdicts(pairs) -> list:
    """(log-Verdict) view: accepts objects with .group and .detected."""
    records = []
    for v in pairs:
        g = v.group
        records.append(
            DetectionRecord(g.url, g.domain, g.user_id, v.detected)
        )
    return records


def records_from_scored(scored) -> list:
    """From (ProxyLog, detected_bool) pairs."""
    from .logmodel import group_domain

    return [
        DetectionRecord(log.url, group_domain(log.url), log.user_id, bool(fired))
        for log, fired in scored
    ]


@dataclass(frozen=True)
class GranularityCounts:
    tp: int
    fp: int
    precision: Optional[float]  # None = undefined (no detections)
    fp_rate: Optional[float] = None

    @staticmethod
    def from_counts(tp: int, fp: int, total_entities: Optional[int] = None):
        precision = tp / (tp + fp) if tp + fp > 0 else None
        fp_rate = None
        if total_entities is not None:
            clean = total_entities - tp
            fp_rate = fp / clean if clean > 0 else None
        return GranularityCounts(tp, fp, precision, fp_rate)


@dataclass(frozen=True)
class PrecisionReport:
    counts: dict  # granularity -> GranularityCounts
    tau: Optional[float]
    dataset_digest: str

    def lines(self) -> list:
        out = []
        for g in GRANULARITIES:
            if g not in self.counts:
                continue
            c = self.counts[g]
            prec = "undefined" if c.precision is None else f"{c.precision:.4f}"
            row = f"{g:<7} TP={c.tp:<8} FP={c.fp:<8} precision={prec}"
            if c.fp_rate is not None:
                row += f" fp_rate={c.fp_rate:.6g}"
            out.append(row)
        return out


def _digest(records: Sequence[DetectionRecord], labels: LabelStore) -> str:
    h = hashlib.sha256()
    for r in records:
        h.update(f"{r.url}\t{r.user_id}\t{int(r.detected)}\n".encode("utf-8", "surrogateescape"))
    for d in sorted(labels.malicious_domains):
        h.update(d.encode("utf-8", "surrogateescape") + b"\n")
    return h.hexdigest()


def evaluate(
    records: Sequence[DetectionRecord],
    labels: LabelStore,
    granularity: str = "all",
    tau: Optional[float] = None,
    total_entities: Optional[Mapping[str, int]] = None,
) -> PrecisionReport:
    """Count TP/FP per granularity over the detected flows.

    An entity is a TP if at least one of its detected flows goes to a
    labeled domain, and an FP if at least one does not; a user can be both.
    """
    wanted = GRANULARITIES if granularity == "all" else (granularity,)
    for g in wanted:
        if g not in GRANULARITIES:
            raise ValueError(f"unknown granularity {g!r}")
    log_tp = log_fp = 0
    entity_tp: dict = {g: set() for g in GRANULARITIES[1:]}
    entity_fp: dict = {g: set() for g in GRANULARITIES[1:]}
    for r in records:
        if not r.detected:
            continue
        is_tp = labels.is_malicious(r.domain)
        keys = {"url": r.url, "domain": r.domain.lower(), "user": r.user_id}
        if is_tp:
            log_tp += 1
            for g, key in keys.items():
                entity_tp[g].add(key)
        else:
            log_fp += 1
            for g, key in keys.items():
                entity_fp[g].add(key)
    totals = total_entities or {}
    counts = {}
    for g in wanted:
        if g == "log":
            counts[g] = GranularityCounts.from_counts(log_tp, log_fp, totals.get(g))
        else:
            counts[g] = GranularityCounts.from_counts(
                len(entity_tp[g]), len(entity_fp[g]), totals.get(g)
            )
    return PrecisionReport(counts, tau, _digest(records, labels))


@dataclass(frozen=True)
class RocPoint:
    tau: float
    tp: int
    fp: int


def roc(
    scored_flows: Sequence[DetectionRecord],
    labels: LabelStore,
    tau_grid: Sequence[float],
) -> dict:
    """Per-granularity (tau, TP, FP) curves for strict score > tau."""
    taus = list(tau_grid)
    if any(b <= a for a, b in zip(taus, taus[1:])):
        raise ValueError("tau grid must be strictly ascending")

    # Entity -> max score per polarity; an entity counts at tau iff its
    # max-scoring flow of that polarity clears the threshold.
    log_scores = {True: [], False: []}
    entity_max: dict = {
        g: {True: {}, False: {}} for g in GRANULARITIES[1:]
    }
    for r in scored_flows:
        is_tp = labels.is_malicious(r.domain)
        log_scores[is_tp].append(r.score)
        keys = {"url": r.url, "domain": r.domain.lower(), "user": r.user_id}
        for g, key in keys.items():
            side = entity_max[g][is_tp]
            prev = side.get(key)
            if prev is None or r.score > prev:
                side[key] = r.score

    def curve(tp_scores: np.ndarray, fp_scores: np.ndarray) -> list:
        tp_sorted = np.sort(tp_scores)
        fp_sorted = np.sort(fp_scores)
        points = []
        for t in taus:
            tp = int(tp_sorted.size - np.searchsorted(tp_sorted, t, side="right"))
            fp = int(fp_sorted.size - np.searchsorted(fp_sorted, t, side="right"))
            points.append(RocPoint(t, tp, fp))
        return points

    out = {
        "log": curve(
            np.asarray(log_scores[True], dtype=np.float64),
            np.asarray(log_scores[False], dtype=np.float64),
        )
    }
    for g in GRANULARITIES[1:]:
        out[g] = curve(
            np.asarray(list(entity_max[g][True].values()), dtype=np.float64),
            np.asarray(list(entity_max[g][False].values()), dtype=np.float64),
        )
    return out


def roc_table(curves: dict) -> list:
    """Flatten curves into plot-ready (granularity, tau, tp, fp) rows."""
    rows = []
    for g in GRANULARITIES:
        for p in curves.get(g, ()):
            rows.append((g, p.tau, p.tp, p.fp))
    return rows
