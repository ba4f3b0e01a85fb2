import math

import pytest

from refdecode.core import DecodeConfig, StepKind
from refdecode.errors import InvalidParam, OutputMismatch, SchemaError
from refdecode.harness import (benchmark, cell_seed, gen_synthetic, grid_search,
                               scripted_factory)
from refdecode.lm import HashLm
from refdecode.simulator import aggregate_stats, infer_decode_sequence


def contains_subseq(haystack, needle):
    n = len(needle)
    return any(haystack[i:i + n] == needle for i in range(len(haystack) - n + 1))


# --- gen_synthetic -----------------------------------------------------------

def test_gen_param_validation():
    with pytest.raises(InvalidParam):
        gen_synthetic("retrieval", 1, 10, 1, overlap=1.2, vocab_size=100)
    with pytest.raises(InvalidParam):
        gen_synthetic("retrieval", 0, 10, 1, overlap=0.5, vocab_size=100)
    with pytest.raises(InvalidParam):
        gen_synthetic("weird", 1, 10, 1, overlap=0.5, vocab_size=100)


def test_gen_shapes_and_ids():
    samples = gen_synthetic("retrieval", 7, 60, 3, overlap=0.5,
                            vocab_size=100000, seed=4)
    assert [s.sample_id for s in samples] == [f"s{i}" for i in range(7)]
    for s in samples:
        assert len(s.target) == 60
        assert [d.doc_id for d in s.refs] == ["d0", "d1", "d2"]
        assert s.scenario == "retrieval"


def test_gen_zero_overlap_simulates_stepwise():
    samples = gen_synthetic("cache", 20, 80, 4, overlap=0.0,
                            vocab_size=100000, seed=9)
    for s in samples:
        trace = infer_decode_sequence(s.target, s.refs, n=2, k=4, seed=1)
        assert trace.num_steps == len(s.target)
        assert all(r.kind is StepKind.STEPWISE for r in trace.steps)


def test_gen_full_overlap_closed_form():
    # one doc holds the whole target verbatim; with distinct tokens and n=1
    # the simulator needs exactly 1 + ceil((L-1)/(k+1)) steps
    k = 4
    samples = gen_synthetic("cache", 3, 40, 1, overlap=1.0,
                            vocab_size=100000, seed=2)
    for s in samples:
        doc = list(s.refs.docs[0].tokens)
        assert contains_subseq(doc, list(s.target))
        if len(set(s.target)) == len(s.target):
            trace = infer_decode_sequence(s.target, s.refs, n=1, k=k, seed=0)
            assert trace.num_steps == 1 + math.ceil((len(s.target) - 1) / (k + 1))


def test_gen_retrieval_embeds_docs_in_prompt_cache_does_not():
    ret = gen_synthetic("retrieval", 2, 40, 2, overlap=0.5,
                        vocab_size=50000, seed=3)
    for s in ret:
        for d in s.refs:
            assert contains_subseq(list(s.prompt), list(d.tokens))
    cache = gen_synthetic("cache", 2, 40, 2, overlap=0.5,
                          vocab_size=50000, seed=3)
    for s in cache:
        assert len(s.prompt) < 30  # query only, no documents


def test_gen_default_target_len_matches_cli_default():
    samples = gen_synthetic("retrieval", 1, 122, 2, overlap=0.6,
                            vocab_size=100000, seed=0)
    assert len(samples[0].target) == 122


# --- grid_search -------------------------------------------------------------

def test_grid_single_cell_equals_single_aggregate():
    samples = gen_synthetic("cache", 5, 50, 2, overlap=0.5,
                            vocab_size=10000, seed=6)
    result = grid_search(samples, [2], [5], seed=42)
    traces = [infer_decode_sequence(s.target, s.refs, 2, 5,
                                    seed=cell_seed(42, 2, 5, s.sample_id))
              for s in samples]
    assert result.cells[(2, 5)] == aggregate_stats(traces)
    assert result.best == (2, 5)


def test_grid_covers_full_cross_product_and_is_reproducible():
    samples = gen_synthetic("retrieval", 8, 60, 3, overlap=0.6,
                            vocab_size=100000, seed=13)
    a = grid_search(samples, [1, 2, 3], [4, 8], seed=5)
    assert set(a.cells) == {(n, k) for n in (1, 2, 3) for k in (4, 8)}
    b = grid_search(samples, [1, 2, 3], [4, 8], seed=5, jobs=4)
    assert a.cells == b.cells and a.best == b.best


def test_grid_requires_targets():
    samples = gen_synthetic("cache", 2, 30, 2, overlap=0.5,
                            vocab_size=1000, seed=1)
    stripped = [s.__class__(s.sample_id, s.prompt, None, s.refs, s.scenario)
                for s in samples]
    with pytest.raises(SchemaError):
        grid_search(stripped, [1], [4], seed=0)


def test_grid_best_cell_prefers_aggressive_match_on_high_overlap():
    samples = gen_synthetic("retrieval", 30, 100, 4, overlap=0.8,
                            vocab_size=100000, seed=21)
    result = grid_search(samples, [1, 2, 3], [4, 8, 12, 16], seed=21)
    assert result.best[0] == 1


def test_accepted_nondecreasing_in_k_for_single_span_sources():
    # single contiguous planted span per sample (overlap=1): accepted totals
    # cannot decrease as the copy budget grows
    samples = gen_synthetic("cache", 10, 60, 1, overlap=1.0,
                            vocab_size=100000, seed=8)
    result = grid_search(samples, [1], [1, 2, 4, 8, 12], seed=8)
    accepted = [result.cells[(1, k)].accepted_per_sample for k in (1, 2, 4, 8, 12)]
    assert accepted == sorted(accepted)


def test_grid_optional_step_latency():
    samples = gen_synthetic("cache", 2, 30, 2, overlap=0.5, vocab_size=1000, seed=3)
    timed = grid_search(samples, [1], [4], seed=0, timed=True)
    assert timed.step_latency is not None and timed.step_latency[(1, 4)] > 0
    untimed = grid_search(samples, [1], [4], seed=0)
    assert untimed.step_latency is None


# --- benchmark ---------------------------------------------------------------

def test_benchmark_scripted_cross_checks_simulator():
    samples = gen_synthetic("retrieval", 4, 60, 3, overlap=0.7,
                            vocab_size=100000, seed=30)
    cfg = DecodeConfig(match_len=1, copy_len=8, max_new_tokens=60, seed=30)
    report = benchmark(scripted_factory, samples, cfg, repetitions=3)
    assert report.repetitions == 3
    assert len(report.rows) == 4
    for row in report.rows:
        assert row.output_tokens == 60
        assert row.baseline_steps == 60
        assert row.accel_steps < row.baseline_steps
        assert row.sim_steps == row.accel_steps
    assert report.speedup > 0
    assert report.tokens_per_sec_baseline > 0


def test_benchmark_shared_hash_lm():
    samples = gen_synthetic("cache", 2, 30, 2, overlap=0.5, vocab_size=5000, seed=1)
    cfg = DecodeConfig(1, 4, 24, seed=1)
    report = benchmark(HashLm(vocab_size=5000, window=3, seed=2), samples, cfg,
                       repetitions=1)
    for row in report.rows:
        assert row.accel_steps == row.sim_steps


def test_benchmark_aborts_on_divergence():
    class LyingLm(HashLm):
        def verify(self, context, draft):
            out = list(super().verify(context, draft))
            out[0] = (out[0] + 1) % self.vocab_size
            return tuple(out)

    samples = gen_synthetic("cache", 1, 30, 1, overlap=1.0, vocab_size=50, seed=2)
    cfg = DecodeConfig(1, 4, 24, seed=2)
    with pytest.raises(OutputMismatch):
        benchmark(LyingLm(vocab_size=50, window=2, seed=0), samples, cfg,
                  repetitions=1)


def test_benchmark_budget_shorter_than_target():
    # mid-copy truncation binds identically for baseline and accelerated
    samples = gen_synthetic("retrieval", 3, 60, 3, overlap=0.8,
                            vocab_size=100000, seed=12)
    cfg = DecodeConfig(match_len=1, copy_len=8, max_new_tokens=30, seed=12)
    report = benchmark(scripted_factory, samples, cfg, repetitions=1)
    for row in report.rows:
        assert row.output_tokens == 30
        assert row.sim_steps == row.accel_steps
