"""Command-line front door: decode, simulate, gen, and bench workflows.

Exit codes: 0 on success, 1 on runtime errors (bad data, output mismatch),
2 on bad flags. Every workflow is deterministic given identical flags and
seed; REFDECODE_SEED supplies the default seed when --seed is absent.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .core import DecodeConfig, Document, ReferenceSet, validate_config
from .dataset import TOKENIZERS, DatasetSample, load_dataset, save_dataset
from .decoder import reference_decode
from .errors import InvalidConfig, RefdecodeError
from .harness import benchmark, gen_synthetic, grid_search, scripted_factory
from .lm import HashLm, NgramLm
from .simulator import aggregate_stats, infer_decode_sequence, write_trace
from . import report

SEED_ENV = "REFDECODE_SEED"


class LmSpecError(RefdecodeError):
    """Malformed LM spec string; reported as a flag error (exit 2)."""


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise RefdecodeError(f"{SEED_ENV} must be an integer, got {raw!r}")


def _parse_kv(spec: str) -> tuple[str, dict[str, str]]:
    kind, _, rest = spec.partition(":")
    params = {}
    if rest:
        for pair in rest.split(","):
            key, eq, val = pair.partition("=")
            if not eq:
                raise LmSpecError(f"bad LM parameter {pair!r} (expected key=val)")
            params[key.strip()] = val.strip()
    return kind.strip(), params


def _int_param(params: dict, key: str, default: Optional[int]) -> Optional[int]:
    if key not in params:
        return default
    try:
        return int(params[key])
    except ValueError:
        raise LmSpecError(f"LM parameter {key} must be an integer, got {params[key]!r}")


def build_lm(spec: str, seed: int, config_path: Optional[str] = None):
    """Build an LM (or per-sample factory) from a compact spec string.

    hash:seed=7,h=3,vocab=100000   windowed hash model
    ngram:order=2,corpus=PATH,vocab=100000   count model fit from a corpus file
    scripted   per-sample replay of the dataset target (stop token derived)
    """
    if config_path is not None:
        with open(config_path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
        kind = obj.pop("kind", None)
        if kind is None:
            raise LmSpecError("LM config file needs a 'kind' field")
        params = {k: str(v) for k, v in obj.items()}
    else:
        kind, params = _parse_kv(spec)

    if kind == "hash":
        return HashLm(vocab_size=_int_param(params, "vocab", 100000),
                      window=_int_param(params, "h", 4),
                      seed=_int_param(params, "seed", seed))
    if kind == "ngram":
        corpus = params.get("corpus")
        if corpus is None:
            raise LmSpecError("ngram LM needs corpus=PATH")
        return NgramLm.fit_file(corpus, vocab_size=_int_param(params, "vocab", 100000),
                                order=_int_param(params, "order", 2))
    if kind == "scripted":
        return scripted_factory
    raise LmSpecError(f"unknown LM kind {kind!r} (expected hash, ngram or scripted)")


def _parse_token_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split()]
    except ValueError:
        raise RefdecodeError(f"token list must be space-separated integers, got {text!r}")


def _parse_grid_axis(spec: str, name: str) -> list[int]:
    prefix = name + "="
    if not spec.startswith(prefix):
        raise RefdecodeError(f"grid axis must look like {name}=LO:HI or "
                             f"{name}=a,b,c, got {spec!r}")
    body = spec[len(prefix):]
    if ":" in body:
        lo, _, hi = body.partition(":")
        values = list(range(int(lo), int(hi) + 1))
    else:
        values = [int(v) for v in body.split(",")]
    if not values or any(v < 1 for v in values):
        raise RefdecodeError(f"grid axis {name} must contain integers >= 1")
    return values


def _load_samples(args) -> list[DatasetSample]:
    if args.dataset:
        return load_dataset(args.dataset)
    if args.prompt is None:
        raise RefdecodeError("either --dataset or --prompt is required")
    docs = tuple(Document(doc_id=f"d{i}", tokens=tuple(_parse_token_list(d)))
                 for i, d in enumerate(args.doc or []))
    return [DatasetSample(sample_id="inline", prompt=tuple(_parse_token_list(args.prompt)),
                          target=None, refs=ReferenceSet(docs), scenario="custom")]


def _decode_text(sample: DatasetSample, tokens: Sequence[int]) -> Optional[str]:
    if sample.text_codec is None:
        return None
    return TOKENIZERS[sample.text_codec].decode(tokens)


def _check_config_flags(args, parser, seed) -> None:
    try:
        validate_config(DecodeConfig(match_len=args.match_len, copy_len=args.copy_len,
                                     max_new_tokens=args.max_new_tokens,
                                     stop_token=getattr(args, "stop_token", None),
                                     seed=seed))
    except InvalidConfig as exc:
        parser.error(str(exc))


def cmd_decode(args, parser) -> int:
    if args.lm is None and args.lm_config is None:
        parser.error("--lm (or --lm-config) is required")
    seed = args.seed if args.seed is not None else _default_seed()
    _check_config_flags(args, parser, seed)
    samples = _load_samples(args)
    try:
        lm = build_lm(args.lm, seed, args.lm_config)
    except LmSpecError as exc:
        parser.error(str(exc))
    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)

    for sample in samples:
        model = lm(sample) if callable(lm) else lm
        stop = args.stop_token
        if hasattr(model, "stop_token"):
            stop = model.stop_token
        cfg = DecodeConfig(match_len=args.match_len, copy_len=args.copy_len,
                           max_new_tokens=args.max_new_tokens, stop_token=stop,
                           seed=seed)
        refs = ReferenceSet() if args.refs == "none" else sample.refs
        y, trace = reference_decode(model, sample.prompt, refs, cfg)

        ratio = trace.num_output_tokens / trace.num_steps if trace.num_steps else 1.0
        print(f"sample {sample.sample_id}: output_tokens={trace.num_output_tokens} "
              f"steps={trace.num_steps} triggers={trace.num_triggers} "
              f"accepted={trace.num_accepted} compression={ratio:.6f}")
        print("tokens: " + " ".join(str(t) for t in y))
        text = _decode_text(sample, y)
        if text is not None:
            print("text: " + text)
        if out_dir:
            write_trace(trace, str(out_dir / f"{sample.sample_id}.trace.csv"))
            report.write_text(out_dir / f"{sample.sample_id}.tokens.txt",
                              " ".join(str(t) for t in y) + "\n")
    return 0


def cmd_simulate(args, parser) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    samples = load_dataset(args.dataset)
    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)

    if args.grid:
        n_values = _parse_grid_axis(args.grid[0], "n")
        k_values = _parse_grid_axis(args.grid[1], "k")
        result = grid_search(samples, n_values, k_values, seed=seed, jobs=args.jobs)
        for line in report.grid_table_lines(result):
            print(line)
        print(f"best: n={result.best[0]} k={result.best[1]} "
              f"compression={result.cells[result.best].compression_ratio:.6f}")
        if out_dir:
            report.write_grid_report(result, out_dir, figures=not args.no_figures)
        return 0

    if args.match_len is None or args.copy_len is None:
        parser.error("--match-len and --copy-len are required without --grid")
    traces = []
    for sample in samples:
        if sample.target is None:
            raise RefdecodeError(f"sample {sample.sample_id!r} has no target")
        trace = infer_decode_sequence(sample.target, sample.refs, args.match_len,
                                      args.copy_len, seed=seed)
        traces.append(trace)
        if out_dir:
            write_trace(trace, str(out_dir / f"{sample.sample_id}.trace.csv"))
    stats = aggregate_stats(traces)
    for line in report.stats_table_lines(stats):
        print(line)
    if out_dir:
        report.write_stats_report(stats, out_dir)
    return 0


def cmd_gen(args, parser) -> int:
    if not (0.0 <= args.overlap <= 1.0):
        parser.error(f"--overlap must be in [0, 1], got {args.overlap}")
    seed = args.seed if args.seed is not None else _default_seed()
    samples = gen_synthetic(scenario=args.scenario, num_samples=args.n,
                            target_len=args.target_len, num_docs=args.num_docs,
                            overlap=args.overlap, vocab_size=args.vocab_size,
                            seed=seed)
    save_dataset(samples, args.out)
    print(f"wrote {len(samples)} samples to {args.out}")
    return 0


def cmd_bench(args, parser) -> int:
    if args.lm is None and args.lm_config is None:
        parser.error("--lm (or --lm-config) is required")
    seed = args.seed if args.seed is not None else _default_seed()
    _check_config_flags(args, parser, seed)
    samples = load_dataset(args.dataset)
    try:
        lm = build_lm(args.lm, seed, args.lm_config)
    except LmSpecError as exc:
        parser.error(str(exc))
    cfg = DecodeConfig(match_len=args.match_len, copy_len=args.copy_len,
                       max_new_tokens=args.max_new_tokens, seed=seed)
    rep = benchmark(lm, samples, cfg, repetitions=args.reps)
    for line in report.bench_summary_lines(rep):
        print(line)
    print(f"index_build_time_s={rep.index_build_time:.6f}")
    if args.out:
        report.write_bench_report(rep, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="refdecode",
        description="Reference-accelerated greedy decoding: decode, simulate, "
                    "generate datasets, and benchmark.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_seed(p):
        p.add_argument("--seed", type=int, default=None,
                       help=f"generator seed (default: ${SEED_ENV} or 0)")

    p = sub.add_parser("decode", help="run copy-and-verify decoding with a mock LM")
    p.add_argument("--lm", help="LM spec, e.g. hash:seed=7,h=3 | ngram:order=2,corpus=F | scripted")
    p.add_argument("--lm-config", help="JSON file with the same keys as the LM spec")
    p.add_argument("--dataset", help="JSONL dataset; prompts/refs come from samples")
    p.add_argument("--prompt", help="inline prompt: space-separated token ids")
    p.add_argument("--doc", action="append",
                   help="inline reference doc (token ids); repeatable")
    p.add_argument("--refs", choices=["sample", "none"], default="sample",
                   help="use each sample's docs, or decode with no references")
    p.add_argument("--match-len", type=int, required=True, help="suffix match length n")
    p.add_argument("--copy-len", type=int, required=True, help="speculative copy length k")
    p.add_argument("--max-new-tokens", type=int, default=256)
    p.add_argument("--stop-token", type=int, default=None)
    p.add_argument("--out", help="directory for per-sample trace and token files")
    add_seed(p)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", help="model-free trace simulation from targets")
    p.add_argument("--dataset", required=True)
    p.add_argument("--match-len", type=int, default=None)
    p.add_argument("--copy-len", type=int, default=None)
    p.add_argument("--grid", nargs=2, metavar=("N_SPEC", "K_SPEC"),
                   help="sweep instead of single run, e.g. --grid n=1:3 k=4:18")
    p.add_argument("--jobs", type=int, default=1, help="worker threads for grid cells")
    p.add_argument("--out", help="directory for traces / grid report")
    p.add_argument("--no-figures", action="store_true",
                   help="skip PNG rendering in grid reports")
    add_seed(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gen", help="generate a synthetic dataset")
    p.add_argument("--scenario", choices=["retrieval", "cache", "multiturn", "custom"],
                   default="retrieval")
    p.add_argument("--overlap", type=float, default=0.6,
                   help="fraction of target tokens planted in the references")
    p.add_argument("--n", "--num-samples", dest="n", type=int, default=100,
                   help="number of samples")
    p.add_argument("--target-len", type=int, default=122)
    p.add_argument("--num-docs", type=int, default=10)
    p.add_argument("--vocab-size", type=int, default=100000)
    p.add_argument("--out", required=True, help="output dataset file (JSONL)")
    add_seed(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="time stepwise vs accelerated decoding")
    p.add_argument("--lm")
    p.add_argument("--lm-config")
    p.add_argument("--dataset", required=True)
    p.add_argument("--match-len", type=int, required=True)
    p.add_argument("--copy-len", type=int, required=True)
    p.add_argument("--max-new-tokens", type=int, default=256)
    p.add_argument("--reps", type=int, default=3, help="repetitions to average over")
    p.add_argument("--out", help="directory for bench report files")
    add_seed(p)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except RefdecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
