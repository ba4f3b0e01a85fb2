"""Stepwise greedy decoding and its copy-and-verify acceleration.

The accelerated loop produces output bit-identical to the stepwise loop:
every token it appends is an argmax the model actually produced with a
fully-valid input prefix, so acceptance-by-prefix makes the speculation
lossless for greedy decoding.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .core import (DecodeConfig, DecodeTrace, ReferenceSet, StepKind,
                   StepRecord, TokenSeq, token_seq, validate_config)
from .errors import InvalidConfig, LengthMismatch
from .index import ReferenceIndex, build_index, match_ngrams
from .lm import LmContract
from .rng import SplitRng


def stepwise_decode(lm: LmContract, x: Sequence[int], cfg: DecodeConfig) -> tuple[TokenSeq, DecodeTrace]:
    """Baseline loop: one scoring call, one emitted token, per step.

    Stops after max_new_tokens or when the model produces the stop token
    (which is not emitted and not recorded).
    """
    validate_config(cfg)
    ctx = list(token_seq(x))
    prompt_len = len(ctx)
    steps = []
    while len(ctx) - prompt_len < cfg.max_new_tokens:
        tok = lm.next_argmax(ctx)
        if cfg.stop_token is not None and tok == cfg.stop_token:
            break
        ctx.append(tok)
        steps.append(StepRecord(kind=StepKind.STEPWISE, input_tokens=1, output_tokens=1))
    return tuple(ctx[prompt_len:]), DecodeTrace.from_steps(steps)


def verify_draft(outputs: Sequence[int], draft: Sequence[int]) -> int:
    """Count how many drafted tokens the scoring call confirmed.

    outputs must be the verification result for draft, length len(draft)+1;
    the accepted count is the longest common prefix of draft and
    outputs[:-1], and the step's emission is outputs[:accepted+1].
    """
    if len(outputs) != len(draft) + 1:
        raise LengthMismatch(f"expected {len(draft) + 1} outputs for a "
                             f"{len(draft)}-token draft, got {len(outputs)}")
    accepted = 0
    while accepted < len(draft) and draft[accepted] == outputs[accepted]:
        accepted += 1
    return accepted


def copy_step_emission(outputs: Sequence[int], accepted: int, budget: int,
                       stop_token: Optional[int]) -> tuple[list[int], bool, bool]:
    """Emission of a copy step after budget and stop-token truncation.

    Returns (emitted tokens, truncated flag, halt flag). The budget cut is
    applied first: a stop token beyond the remaining budget is unreachable,
    exactly as in the stepwise loop.
    """
    emit = list(outputs[: accepted + 1])
    truncated = False
    halt = False
    if len(emit) > budget:
        emit = emit[:budget]
        truncated = True
    if stop_token is not None and stop_token in emit:
        emit = emit[: emit.index(stop_token)]
        truncated = True
        halt = True
    return emit, truncated, halt


def reference_decode(lm: LmContract, x: Sequence[int], refs: ReferenceSet,
                     cfg: DecodeConfig,
                     index: Optional[ReferenceIndex] = None) -> tuple[TokenSeq, DecodeTrace]:
    """Copy-and-verify decoding against a reference set.

    Each iteration first tries to match the last match_len output tokens in
    the references. On a match, up to copy_len subsequent document tokens
    are drafted and checked with a single verify call, emitting between 1
    and copy_len+1 tokens; otherwise the iteration falls back to one
    stepwise call. Steps that end up emitting nothing (stop token first)
    are not recorded, so every recorded step carries at least one token.
    """
    validate_config(cfg)
    x = token_seq(x)
    if index is None:
        index = build_index(refs, cfg.match_len)
    elif index.gram_len != cfg.match_len:
        raise InvalidConfig("match_len", f"index was built with n={index.gram_len}, "
                                         f"config wants {cfg.match_len}")
    rng = SplitRng(cfg.seed)

    ctx = list(x)
    y: list[int] = []
    steps: list[StepRecord] = []
    while len(y) < cfg.max_new_tokens:
        match = match_ngrams(index, y, rng)
        if match is None:
            tok = lm.next_argmax(ctx)
            if cfg.stop_token is not None and tok == cfg.stop_token:
                break
            y.append(tok)
            ctx.append(tok)
            steps.append(StepRecord(kind=StepKind.STEPWISE, input_tokens=1, output_tokens=1))
            continue

        doc = index.document(match.doc_id).tokens
        draft = doc[match.pos : match.pos + min(cfg.copy_len, len(doc) - match.pos)]
        outputs = lm.verify(ctx, draft)
        accepted = verify_draft(outputs, draft)
        emit, truncated, halt = copy_step_emission(
            outputs, accepted, cfg.max_new_tokens - len(y), cfg.stop_token)
        if emit:
            y.extend(emit)
            ctx.extend(emit)
            steps.append(StepRecord(
                kind=StepKind.COPY,
                input_tokens=1 + len(draft),
                output_tokens=len(emit),
                doc_id=match.doc_id,
                copy_pos=match.pos,
                accepted=accepted,
                truncated=truncated,
            ))
        if halt:
            break
    return tuple(y), DecodeTrace.from_steps(steps)
