"""Domain types shared by every other module.

Token ids are plain non-negative ints and token sequences are tuples, so
all types here are immutable after construction and safe to share across
concurrent readers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

from .errors import InvalidConfig, SchemaError

TokenSeq = tuple[int, ...]


def token_seq(tokens: Iterable[int]) -> TokenSeq:
    """Normalize an iterable of token ids to the canonical tuple form."""
    seq = tuple(int(t) for t in tokens)
    for t in seq:
        if t < 0:
            raise SchemaError(f"negative token id {t}")
    return seq


@dataclass(frozen=True)
class Document:
    doc_id: str
    tokens: TokenSeq

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class ReferenceSet:
    """Ordered collection of reference documents; may be empty."""

    docs: tuple[Document, ...] = ()

    def __post_init__(self):
        seen = set()
        for d in self.docs:
            if d.doc_id in seen:
                raise SchemaError(f"duplicate doc_id {d.doc_id!r}")
            seen.add(d.doc_id)

    def __len__(self) -> int:
        return len(self.docs)

    def __iter__(self):
        return iter(self.docs)


def reference_set(token_lists: Sequence[Sequence[int]], ids: Optional[Sequence[str]] = None) -> ReferenceSet:
    """Build a ReferenceSet from raw token lists, defaulting ids to d0, d1, ..."""
    docs = []
    for i, toks in enumerate(token_lists):
        doc_id = ids[i] if ids is not None else f"d{i}"
        docs.append(Document(doc_id=doc_id, tokens=token_seq(toks)))
    return ReferenceSet(docs=tuple(docs))


@dataclass(frozen=True)
class DecodeConfig:
    match_len: int
    copy_len: int
    max_new_tokens: int
    stop_token: Optional[int] = None
    seed: int = 0


def validate_config(cfg: DecodeConfig) -> None:
    if cfg.match_len < 1:
        raise InvalidConfig("match_len", f"must be >= 1, got {cfg.match_len}")
    if cfg.copy_len < 1:
        raise InvalidConfig("copy_len", f"must be >= 1, got {cfg.copy_len}")
    if cfg.max_new_tokens < 1:
        raise InvalidConfig("max_new_tokens", f"must be >= 1, got {cfg.max_new_tokens}")
    if cfg.stop_token is not None and cfg.stop_token < 0:
        raise InvalidConfig("stop_token", f"must be non-negative, got {cfg.stop_token}")


class StepKind(str, Enum):
    STEPWISE = "stepwise"
    COPY = "copy"


@dataclass(frozen=True)
class StepRecord:
    """One decoding step: a single scoring call and the tokens it emitted.

    A copy step normally emits accepted+1 tokens; when the output budget or
    the stop token cuts the emission short, `truncated` is set and
    output_tokens may be smaller. Steps that emit nothing are never
    recorded (see decoder module).
    """

    kind: StepKind
    input_tokens: int
    output_tokens: int
    doc_id: Optional[str] = None
    copy_pos: Optional[int] = None
    accepted: Optional[int] = None
    truncated: bool = False

    def validate(self) -> None:
        if self.kind is StepKind.STEPWISE:
            if self.input_tokens != 1 or self.output_tokens != 1:
                raise SchemaError(f"stepwise record must be (1, 1), got "
                                  f"({self.input_tokens}, {self.output_tokens})")
            if self.accepted is not None:
                raise SchemaError("stepwise record must not carry an accepted count")
        else:
            drafted = self.input_tokens - 1
            if self.accepted is None or not (0 <= self.accepted <= drafted):
                raise SchemaError(f"copy record accepted={self.accepted} outside [0, {drafted}]")
            if not self.truncated and self.output_tokens != self.accepted + 1:
                raise SchemaError(f"untruncated copy record must emit accepted+1 tokens, "
                                  f"got {self.output_tokens} != {self.accepted}+1")
            if not (1 <= self.output_tokens <= drafted + 1):
                raise SchemaError(f"copy record output_tokens={self.output_tokens} outside "
                                  f"[1, {drafted + 1}]")


@dataclass(frozen=True)
class DecodeTrace:
    """Per-step record of a whole decode, with totals derived from the steps."""

    steps: tuple[StepRecord, ...]
    num_steps: int = field(default=0)
    num_triggers: int = field(default=0)
    num_accepted: int = field(default=0)
    num_output_tokens: int = field(default=0)

    @classmethod
    def from_steps(cls, steps: Iterable[StepRecord]) -> "DecodeTrace":
        steps = tuple(steps)
        copies = [s for s in steps if s.kind is StepKind.COPY]
        return cls(
            steps=steps,
            num_steps=len(steps),
            num_triggers=len(copies),
            num_accepted=sum(s.accepted for s in copies),
            num_output_tokens=sum(s.output_tokens for s in steps),
        )

    def validate(self) -> None:
        """Recompute totals from steps and require exact agreement."""
        for s in self.steps:
            s.validate()
        recomputed = DecodeTrace.from_steps(self.steps)
        if recomputed != self:
            raise SchemaError("trace totals disagree with steps")
        if self.num_steps > self.num_output_tokens:
            raise SchemaError(f"{self.num_steps} steps emitted only "
                              f"{self.num_output_tokens} tokens")
