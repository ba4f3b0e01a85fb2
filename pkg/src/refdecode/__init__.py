"""Reference-accelerated greedy decoding.

Match a suffix of the generated output against reference documents,
speculatively copy a span, verify it with one scoring call, and keep the
longest valid prefix: output stays bit-identical to stepwise greedy
decoding while using far fewer steps when output overlaps the references.
"""

from .core import (DecodeConfig, DecodeTrace, Document, ReferenceSet, StepKind,
                   StepRecord, TokenSeq, reference_set, token_seq, validate_config)
from .dataset import ByteTokenizer, DatasetSample, load_dataset, save_dataset
from .decoder import reference_decode, stepwise_decode, verify_draft
from .errors import (ContextTooShort, EmptyInput, InvalidConfig, InvalidParam,
                     LengthMismatch, OutputMismatch, ParseError, RefdecodeError,
                     SchemaError, TokenOutOfRange)
from .harness import (BenchReport, GridResult, benchmark, cell_seed, gen_synthetic,
                      grid_search, scripted_factory)
from .index import MatchResult, ReferenceIndex, build_index, match_ngrams
from .lm import HashLm, LmContract, NgramLm, ScriptedLm, scripted_for
from .rng import SplitRng, derive_key, mix64
from .simulator import (TraceStats, aggregate_stats, format_trace,
                        get_matched_tokens, infer_decode_sequence, trace_lines,
                        write_trace)

__version__ = "0.1.0"

__all__ = [
    "BenchReport", "ByteTokenizer", "ContextTooShort", "DatasetSample",
    "DecodeConfig", "DecodeTrace", "Document", "EmptyInput", "GridResult",
    "HashLm", "InvalidConfig", "InvalidParam", "LengthMismatch", "LmContract",
    "MatchResult", "NgramLm", "OutputMismatch", "ParseError", "RefdecodeError",
    "ReferenceIndex", "ReferenceSet", "SchemaError", "ScriptedLm", "SplitRng",
    "StepKind", "StepRecord", "TokenOutOfRange", "TokenSeq", "TraceStats",
    "aggregate_stats", "benchmark", "build_index", "cell_seed", "derive_key",
    "format_trace", "gen_synthetic", "get_matched_tokens", "grid_search",
    "infer_decode_sequence", "load_dataset", "match_ngrams", "mix64",
    "reference_decode", "reference_set", "save_dataset", "scripted_factory",
    "scripted_for", "stepwise_decode", "token_seq", "trace_lines",
    "validate_config", "verify_draft", "write_trace",
]
