"""Synthetic dataset generation, (n, k) grid search, and micro-benchmarks.

The generator plants contiguous target spans verbatim inside reference
documents so that a tunable fraction of the target is copyable; the grid
search then sweeps match/copy lengths with the model-free simulator, and
the benchmark times the live engine against the stepwise baseline.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from .core import DecodeConfig, Document, ReferenceSet, validate_config
from .dataset import SCENARIOS, DatasetSample
from .decoder import reference_decode, stepwise_decode
from .errors import InvalidParam, OutputMismatch, SchemaError
from .index import build_index
from .lm import LmContract, scripted_for
from .rng import SplitRng, derive_key, geometric
from .simulator import TraceStats, aggregate_stats, infer_decode_sequence

SPAN_MEAN = 8.0  # mean planted-span and filler-gap length, in tokens


def _random_tokens(rng: SplitRng, count: int, vocab_size: int) -> list[int]:
    return [rng.next_below(vocab_size) for _ in range(count)]


def _template_prompt(query: list[int], docs: list[list[int]], vocab_size: int) -> list[int]:
    # Fixed template structure: doc section, separators, query, answer cue.
    m_docs = max(0, vocab_size - 1)
    m_sep = max(0, vocab_size - 2)
    m_query = max(0, vocab_size - 3)
    m_answer = max(0, vocab_size - 4)
    prompt = [m_docs]
    for i, d in enumerate(docs):
        if i:
            prompt.append(m_sep)
        prompt.extend(d)
    prompt.append(m_query)
    prompt.extend(query)
    prompt.append(m_answer)
    return prompt


def gen_synthetic(scenario: str, num_samples: int, target_len: int, num_docs: int,
                  overlap: float, vocab_size: int, seed: int = 0) -> list[DatasetSample]:
    """Generate samples whose targets share ~overlap of their tokens with refs.

    Targets alternate between copy spans (planted verbatim into a random
    document behind a random-length filler gap) and noise spans of fresh
    random tokens; span lengths are geometric with mean 8, and noise-span
    lengths are scaled so copy spans cover the requested fraction. The
    retrieval scenario embeds the documents into the prompt through a fixed
    template; the other scenarios keep references out of the prompt.
    """
    if scenario not in SCENARIOS:
        raise InvalidParam(f"unknown scenario {scenario!r}")
    if num_samples < 1 or target_len < 1 or num_docs < 1 or vocab_size < 1:
        raise InvalidParam("num_samples, target_len, num_docs and vocab_size must be >= 1")
    if not (0.0 <= overlap <= 1.0):
        raise InvalidParam(f"overlap must be in [0, 1], got {overlap}")

    samples = []
    for i in range(num_samples):
        rng = SplitRng(seed, "gen", i)
        docs: list[list[int]] = [[] for _ in range(num_docs)]
        target: list[int] = []

        if overlap <= 0.0:
            copying = False
        elif overlap >= 1.0:
            copying = True
        else:
            copying = rng.next_u64() < int(overlap * 2.0**64)
        noise_mean = SPAN_MEAN if overlap <= 0.0 or overlap >= 1.0 \
            else SPAN_MEAN * (1.0 - overlap) / overlap

        while len(target) < target_len:
            if copying:
                # Full overlap degenerates to one span: the target is then
                # contained verbatim in a single document.
                length = target_len - len(target) if overlap >= 1.0 \
                    else min(geometric(rng, SPAN_MEAN), target_len - len(target))
                span = _random_tokens(rng, length, vocab_size)
                di = rng.next_below(num_docs)
                gap = geometric(rng, SPAN_MEAN)
                docs[di].extend(_random_tokens(rng, gap, vocab_size))
                docs[di].extend(span)
                target.extend(span)
                if 0.0 < overlap < 1.0:
                    copying = False
            else:
                length = min(geometric(rng, noise_mean), target_len - len(target))
                target.extend(_random_tokens(rng, length, vocab_size))
                if overlap > 0.0:
                    copying = True

        # Trailing filler keeps planted spans copyable through their last token
        # (a match ending at a document's final token yields nothing to copy).
        for d in docs:
            d.extend(_random_tokens(rng, geometric(rng, SPAN_MEAN), vocab_size))

        query = _random_tokens(rng, 8 + rng.next_below(17), vocab_size)
        if scenario == "retrieval":
            prompt = _template_prompt(query, docs, vocab_size)
        else:
            prompt = query

        refs = ReferenceSet(tuple(
            Document(doc_id=f"d{j}", tokens=tuple(d)) for j, d in enumerate(docs)))
        samples.append(DatasetSample(
            sample_id=f"s{i}", prompt=tuple(prompt), target=tuple(target),
            refs=refs, scenario=scenario))
    return samples


def cell_seed(seed: int, n: int, k: int, sample_id: str) -> int:
    """Derived generator seed for one (n, k, sample) grid evaluation."""
    return derive_key(seed, "cell", n, k, sample_id)


@dataclass
class GridResult:
    n_values: tuple[int, ...]
    k_values: tuple[int, ...]
    cells: dict[tuple[int, int], TraceStats]
    best: tuple[int, int]
    step_latency: Optional[dict[tuple[int, int], float]] = field(default=None)

    def stats(self, n: int, k: int) -> TraceStats:
        return self.cells[(n, k)]


def _require_targets(samples: Sequence[DatasetSample]):
    for s in samples:
        if s.target is None:
            raise SchemaError(f"sample {s.sample_id!r} has no target; "
                              "simulator workflows require one")


def grid_search(samples: Sequence[DatasetSample], n_values: Sequence[int],
                k_values: Sequence[int], seed: int = 0, jobs: int = 1,
                timed: bool = False) -> GridResult:
    """Simulate every sample under every (n, k) and aggregate per cell.

    Each (n, k, sample) evaluation draws from its own derived generator
    stream, so cells may be computed concurrently in any order and the
    result is still byte-for-byte reproducible.
    """
    if not samples:
        raise SchemaError("grid search requires a non-empty sample list")
    _require_targets(samples)
    n_values = tuple(n_values)
    k_values = tuple(k_values)

    def run_cell(cell: tuple[int, int]):
        n, k = cell
        traces = []
        started = time.perf_counter()
        for s in samples:
            traces.append(infer_decode_sequence(
                s.target, s.refs, n, k, seed=cell_seed(seed, n, k, s.sample_id)))
        elapsed = time.perf_counter() - started
        stats = aggregate_stats(traces)
        latency = elapsed / sum(t.num_steps for t in traces)
        return cell, stats, latency

    grid = [(n, k) for n in n_values for k in k_values]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_cell, grid))
    else:
        results = [run_cell(cell) for cell in grid]

    cells = {cell: stats for cell, stats, _ in results}
    latencies = {cell: lat for cell, _, lat in results} if timed else None
    best = max(grid, key=lambda c: (cells[c].compression_ratio, (-c[0], -c[1])))
    return GridResult(n_values=n_values, k_values=k_values, cells=cells,
                      best=best, step_latency=latencies)


LmFactory = Union[LmContract, Callable[[DatasetSample], LmContract]]


@dataclass(frozen=True)
class BenchRow:
    sample_id: str
    output_tokens: int
    baseline_steps: int
    accel_steps: int
    sim_steps: int
    baseline_time: float
    accel_time: float


@dataclass(frozen=True)
class BenchReport:
    rows: tuple[BenchRow, ...]
    repetitions: int
    baseline_time_total: float
    accel_time_total: float
    tokens_per_sec_baseline: float
    tokens_per_sec_accel: float
    speedup: float
    index_build_time: float


def scripted_factory(sample: DatasetSample) -> LmContract:
    if sample.target is None:
        raise SchemaError(f"sample {sample.sample_id!r} has no target; "
                          "a scripted model needs one")
    return scripted_for(sample.prompt, sample.target,
                        [d.tokens for d in sample.refs])


def benchmark(lm: LmFactory, samples: Sequence[DatasetSample], cfg: DecodeConfig,
              repetitions: int = 3) -> BenchReport:
    """Time stepwise vs accelerated decoding on identical samples.

    Only the decode loops are timed; index construction is reported
    separately. Any divergence between the two output sequences aborts the
    run: equality is the whole point of the engine.
    """
    validate_config(cfg)
    if repetitions < 1:
        raise InvalidParam("repetitions must be >= 1")
    if not samples:
        raise SchemaError("benchmark requires a non-empty sample list")

    rows = []
    index_time = 0.0
    for s in samples:
        model = lm(s) if callable(lm) and not isinstance(lm, LmContract) else lm
        sample_cfg = cfg
        if hasattr(model, "stop_token"):
            sample_cfg = DecodeConfig(cfg.match_len, cfg.copy_len, cfg.max_new_tokens,
                                      stop_token=model.stop_token, seed=cfg.seed)

        t0 = time.perf_counter()
        index = build_index(s.refs, cfg.match_len)
        index_time += time.perf_counter() - t0

        base_total = accel_total = 0.0
        base_out = accel_out = None
        base_trace = accel_trace = None
        for _ in range(repetitions):
            t0 = time.perf_counter()
            base_out, base_trace = stepwise_decode(model, s.prompt, sample_cfg)
            t1 = time.perf_counter()
            accel_out, accel_trace = reference_decode(model, s.prompt, s.refs,
                                                      sample_cfg, index=index)
            t2 = time.perf_counter()
            base_total += t1 - t0
            accel_total += t2 - t1
            if accel_out != base_out:
                raise OutputMismatch(f"sample {s.sample_id!r}: accelerated output "
                                     "diverged from the stepwise baseline")

        sim_steps = infer_decode_sequence(accel_out, s.refs, cfg.match_len,
                                          cfg.copy_len, seed=cfg.seed).num_steps
        rows.append(BenchRow(
            sample_id=s.sample_id,
            output_tokens=len(base_out),
            baseline_steps=base_trace.num_steps,
            accel_steps=accel_trace.num_steps,
            sim_steps=sim_steps,
            baseline_time=base_total / repetitions,
            accel_time=accel_total / repetitions,
        ))

    total_tokens = sum(r.output_tokens for r in rows)
    base_total = sum(r.baseline_time for r in rows)
    accel_total = sum(r.accel_time for r in rows)
    return BenchReport(
        rows=tuple(rows),
        repetitions=repetitions,
        baseline_time_total=base_total,
        accel_time_total=accel_total,
        tokens_per_sec_baseline=total_tokens / base_total if base_total else 0.0,
        tokens_per_sec_accel=total_tokens / accel_total if accel_total else 0.0,
        speedup=base_total / accel_total if accel_total else 0.0,
        index_build_time=index_time,
    )
