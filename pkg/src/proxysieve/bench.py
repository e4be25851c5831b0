"""Throughput benchmark and the per-flow operation-count model."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from . import kernels
from .cascade import CascadePipeline, run_pipeline
from .featurizer import TrigramModel
from .featurizer.stringfeats import as_bytes
from .logmodel import ProxyLog


def extraction_op_estimate(s_url: int, s_ref: int) -> int:
    """Closed-form op count for extracting the full feature set.

    Counts 26 ops per character of URL and referrer (single-pass string
    block), two hash lookups per URL trigram, one op per length feature
    (6 of them), and at most 25 character comparisons for the starts-with
    flags. Fields read directly from the log cost nothing.
    """
    trigram_ops = 2 * (s_url - 2) if s_url >= 3 else 0
    return 26 * s_url + 26 * s_ref + trigram_ops + 6 + 25


@dataclass
class CostReport:
    flows_processed: int
    wall_time: float
    node_tests: int
    node_tests_max: int
    node_test_bound: int  # trees x max_depth x levels, one detector per level
    worst_case_bound: int  # sum over levels of detectors x trees x max_depth
    extraction_ops: int  # closed-form estimate accumulated over flows
    avg_url_len: float
    avg_ref_len: float
    backend: str
    threads: int = 1

    @property
    def flows_per_sec(self) -> float:
        return self.flows_processed / self.wall_time if self.wall_time > 0 else 0.0

    def lines(self) -> list:
        return [
            f"backend           {self.backend} (threads={self.threads})",
            f"flows             {self.flows_processed}",
            f"wall time         {self.wall_time:.3f} s",
            f"throughput        {self.flows_per_sec:,.0f} flows/s",
            f"node tests        total={self.node_tests} max/flow={self.node_tests_max}"
            f" bound/flow={self.node_test_bound}",
            f"worst-case bound  {self.worst_case_bound} (multi-detector levels)",
            f"extraction ops    {self.extraction_ops}"
            f" (~{self.extraction_ops / max(1, self.flows_processed):,.0f}/flow)",
            f"avg lengths       url={self.avg_url_len:.1f} referrer={self.avg_ref_len:.1f}",
        ]


def node_test_bounds(pipeline: CascadePipeline) -> tuple:
    per_level = []
    if pipeline.prefilter is not None:
        m = pipeline.prefilter.model
        per_level.append([m.params.trees * (m.params.max_depth or m.max_depth_used())])
    for level in pipeline.levels:
        per_level.append(
            [
                d.model.params.trees * (d.model.params.max_depth or d.model.max_depth_used())
                for d in level
            ]
        )
    single_chain = sum(max(tests) for tests in per_level)
    worst_case = sum(sum(tests) for tests in per_level)
    return single_chain, worst_case


def run_benchmark(
    pipeline: CascadePipeline,
    models: Mapping[str, TrigramModel],
    flows: Sequence[ProxyLog],
    threads: int = 1,
    backend: Optional[str] = None,
) -> CostReport:
    """Score pre-parsed flows and collect cost counters.

    Single-threaded by default; the threads flag shards the flow list for
    scaling demonstrations only.
    """
    previous = kernels.active_name()
    if backend is not None:
        kernels.use(backend)
    try:
        url_len_total = 0
        ref_len_total = 0
        op_total = 0
        for log in flows:
            s_url = len(as_bytes(log.url))
            s_ref = len(as_bytes(log.referrer)) if log.referrer else 0
            url_len_total += s_url
            ref_len_total += s_ref
            op_total += extraction_op_estimate(s_url, s_ref)

        def score_chunk(chunk):
            tests = 0
            tests_max = 0
            for log in chunk:
                verdict = run_pipeline(pipeline, log, models)
                tests += verdict.node_tests
                if verdict.node_tests > tests_max:
                    tests_max = verdict.node_tests
            return tests, tests_max

        start = time.perf_counter()
        if threads > 1:
            size = (len(flows) + threads - 1) // threads
            chunks = [flows[i : i + size] for i in range(0, len(flows), size)]
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(score_chunk, chunks))
            tests_total = sum(r[0] for r in results)
            tests_max = max((r[1] for r in results), default=0)
        else:
            tests_total, tests_max = score_chunk(flows)
        elapsed = time.perf_counter() - start

        bound, worst = node_test_bounds(pipeline)
        n = len(flows)
        return CostReport(
            flows_processed=n,
            wall_time=elapsed,
            node_tests=tests_total,
            node_tests_max=tests_max,
            node_test_bound=bound,
            worst_case_bound=worst,
            extraction_ops=op_total,
            avg_url_len=url_len_total / n if n else 0.0,
            avg_ref_len=ref_len_total / n if n else 0.0,
            backend=kernels.active_name(),
            threads=threads,
        )
    finally:
        kernels.use(previous)
