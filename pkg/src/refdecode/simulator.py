"""Model-free trace reconstruction from a known target sequence.

Under greedy decoding the whole accelerated decode is determined by the
target and the references, so the per-step input/output counts can be
inferred without ever running a model. The walk below reuses the decoder's
match_ngrams (same index, same tie-break generator discipline), which is
what makes the decoder-agreement test meaningful rather than circular.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .core import DecodeTrace, Document, ReferenceSet, StepKind, StepRecord, token_seq
from .errors import EmptyInput
from .index import ReferenceIndex, build_index, match_ngrams
from .rng import SplitRng


def get_matched_tokens(doc: Document, pos: int, y: Sequence[int], step: int) -> int:
    """Longest common prefix of doc.tokens[pos:] and y[step:]."""
    if not (0 <= pos <= len(doc.tokens)):
        raise IndexError(f"pos {pos} outside [0, {len(doc.tokens)}]")
    if not (0 <= step <= len(y)):
        raise IndexError(f"step {step} outside [0, {len(y)}]")
    count = 0
    while (pos + count < len(doc.tokens) and step + count < len(y)
           and doc.tokens[pos + count] == y[step + count]):
        count += 1
    return count


def infer_decode_sequence(y: Sequence[int], refs: ReferenceSet, n: int, k: int,
                          seed: int = 0,
                          index: Optional[ReferenceIndex] = None) -> DecodeTrace:
    """Reconstruct the accelerated decode trace for target y.

    Walks y left to right; a matched position contributes a copy step of
    min(k, matched)+1 output tokens, anything else a stepwise step. The
    final copy step's +1 bonus token may overrun the end of y, in which
    case its output count is truncated so totals equal len(y) exactly,
    mirroring the decoder's budget rule.
    """
    if n < 1 or k < 1:
        raise ValueError("n and k must be >= 1")
    y = token_seq(y)
    if index is None:
        index = build_index(refs, n)
    rng = SplitRng(seed)

    steps: list[StepRecord] = []
    step = 0
    while step < len(y):
        match = match_ngrams(index, y[:step], rng)
        if match is None:
            step += 1
            steps.append(StepRecord(kind=StepKind.STEPWISE, input_tokens=1, output_tokens=1))
            continue
        doc = index.document(match.doc_id)
        draft_len = min(k, len(doc.tokens) - match.pos)
        num_valid = min(k, get_matched_tokens(doc, match.pos, y, step))
        num_output = num_valid + 1
        truncated = False
        if step + num_output > len(y):
            num_output = len(y) - step
            truncated = True
        step += num_output
        steps.append(StepRecord(
            kind=StepKind.COPY,
            input_tokens=1 + draft_len,
            output_tokens=num_output,
            doc_id=match.doc_id,
            copy_pos=match.pos,
            accepted=num_valid,
            truncated=truncated,
        ))
    return DecodeTrace.from_steps(steps)


@dataclass(frozen=True)
class TraceStats:
    """Per-sample means over a set of decode traces."""

    triggers_per_sample: float
    accepted_per_sample: float
    steps_per_sample: float
    outputs_per_sample: float
    compression_ratio: float

    def as_dict(self) -> dict[str, float]:
        return {
            "triggers_per_sample": self.triggers_per_sample,
            "accepted_per_sample": self.accepted_per_sample,
            "steps_per_sample": self.steps_per_sample,
            "outputs_per_sample": self.outputs_per_sample,
            "compression_ratio": self.compression_ratio,
        }


def aggregate_stats(traces: Sequence[DecodeTrace]) -> TraceStats:
    """Arithmetic means of per-trace totals; ratio is mean outputs over mean steps."""
    if not traces:
        raise EmptyInput("cannot aggregate zero traces")
    m = len(traces)
    steps = sum(t.num_steps for t in traces) / m
    outputs = sum(t.num_output_tokens for t in traces) / m
    return TraceStats(
        triggers_per_sample=sum(t.num_triggers for t in traces) / m,
        accepted_per_sample=sum(t.num_accepted for t in traces) / m,
        steps_per_sample=steps,
        outputs_per_sample=outputs,
        compression_ratio=outputs / steps if steps else 1.0,
    )


TRACE_HEADER = "step_index,kind,input_tokens,output_tokens,accepted,doc_id,pos"


def trace_lines(trace: DecodeTrace) -> Iterable[str]:
    """Render a trace in the documented export format, one record per line."""
    yield TRACE_HEADER
    for i, s in enumerate(trace.steps):
        if s.kind is StepKind.COPY:
            yield f"{i},copy,{s.input_tokens},{s.output_tokens},{s.accepted},{s.doc_id},{s.copy_pos}"
        else:
            yield f"{i},stepwise,1,1,,,"


def format_trace(trace: DecodeTrace) -> str:
    return "".join(line + "\n" for line in trace_lines(trace))


def write_trace(trace: DecodeTrace, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_trace(trace))
