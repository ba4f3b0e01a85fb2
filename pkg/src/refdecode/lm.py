"""Deterministic language-model contract consumed by the decoder.

Only argmax outputs cross this boundary: the engine never needs logits.
The one law every implementation must satisfy is that verify(c, g)[j]
equals next_argmax(c ++ g[:j]) for every j; the default verify below gets
that for free by chaining next_argmax, and real parallel hosts must match
it output-for-output.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .core import TokenSeq, token_seq
from .errors import ContextTooShort, ParseError, TokenOutOfRange
from .rng import GOLDEN, MASK64, mix64


class LmContract:
    """Abstract deterministic scorer: argmax next token + parallel draft check."""

    vocab_size: int

    def next_argmax(self, context: Sequence[int]) -> int:
        raise NotImplementedError

    def verify(self, context: Sequence[int], draft: Sequence[int]) -> TokenSeq:
        """Score a drafted continuation in one conceptual call.

        Element j is the model's argmax after context plus the first j draft
        tokens, so the result has length len(draft)+1.
        """
        self._check_tokens(draft)
        ctx = list(context)
        outputs = [self.next_argmax(ctx)]
        for tok in draft:
            ctx.append(tok)
            outputs.append(self.next_argmax(ctx))
        return tuple(outputs)

    def _check_tokens(self, tokens: Sequence[int]) -> None:
        for t in tokens:
            if not (0 <= t < self.vocab_size):
                raise TokenOutOfRange(f"token {t} outside [0, {self.vocab_size})")


class HashLm(LmContract):
    """Pure hash of the last `window` context tokens; a fixed-point-free
    stand-in for a real model in fuzz tests.

    The mixing recipe is part of the fixture format (docs/formats.md):
        state = mix64(seed)
        for t in context[-window:]: state = mix64(state XOR ((t + GOLDEN) mod 2^64))
        next = state mod vocab_size
    """

    def __init__(self, vocab_size: int, window: int = 4, seed: int = 0):
        if vocab_size < 1:
            raise ValueError("vocab_size must be >= 1")
        if window < 1:
            raise ValueError("window must be >= 1")
        self.vocab_size = vocab_size
        self.window = window
        self.seed = seed

    def next_argmax(self, context: Sequence[int]) -> int:
        self._check_tokens(context)
        state = mix64(self.seed)
        start = max(0, len(context) - self.window)
        for i in range(start, len(context)):
            state = mix64(state ^ ((context[i] + GOLDEN) & MASK64))
        return state % self.vocab_size


class NgramLm(LmContract):
    """Count-based n-gram argmax model with backoff.

    Prediction uses the longest context window seen during fitting, falling
    back one token at a time down to the global unigram argmax. Ties go to
    the numerically smallest token id.
    """

    def __init__(self, vocab_size: int, order: int = 2):
        if vocab_size < 1:
            raise ValueError("vocab_size must be >= 1")
        if order < 1:
            raise ValueError("order must be >= 1")
        self.vocab_size = vocab_size
        self.order = order
        # counts[L] maps an L-token context tuple to {token: count}
        self.counts: list[dict[TokenSeq, dict[int, int]]] = [{} for _ in range(order)]

    def fit(self, corpus: Sequence[Sequence[int]]) -> "NgramLm":
        for seq in corpus:
            seq = token_seq(seq)
            self._check_tokens(seq)
            for i, tok in enumerate(seq):
                for ctx_len in range(min(self.order - 1, i) + 1):
                    key = seq[i - ctx_len : i]
                    bucket = self.counts[ctx_len].setdefault(key, {})
                    bucket[tok] = bucket.get(tok, 0) + 1
        return self

    @classmethod
    def fit_file(cls, path: str, vocab_size: int, order: int = 2) -> "NgramLm":
        """Fit from a token-corpus file: one space-separated id sequence per line."""
        corpus = []
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    corpus.append([int(tok) for tok in line.split()])
                except ValueError as exc:
                    raise ParseError(path, line_no, f"bad token id: {exc}") from exc
        return cls(vocab_size=vocab_size, order=order).fit(corpus)

    @staticmethod
    def _argmax(bucket: dict[int, int]) -> int:
        best_tok, best_count = -1, -1
        for tok, count in bucket.items():
            if count > best_count or (count == best_count and tok < best_tok):
                best_tok, best_count = tok, count
        return best_tok

    def next_argmax(self, context: Sequence[int]) -> int:
        self._check_tokens(context)
        context = tuple(context)
        for ctx_len in range(min(self.order - 1, len(context)), -1, -1):
            key = context[len(context) - ctx_len :]
            bucket = self.counts[ctx_len].get(key)
            if bucket:
                return self._argmax(bucket)
        return 0  # empty model: degenerate but deterministic


class ScriptedLm(LmContract):
    """Replays a fixed target no matter what the context contains.

    Output position is len(context) - prompt_len; past the target it emits
    stop_token forever. This is the model-free hook that lets a known
    target drive the full decode loop.
    """

    def __init__(self, prompt_len: int, target: Sequence[int], stop_token: int,
                 vocab_size: Optional[int] = None):
        if prompt_len < 0:
            raise ValueError("prompt_len must be >= 0")
        self.prompt_len = prompt_len
        self.target = token_seq(target)
        self.stop_token = stop_token
        if vocab_size is None:
            vocab_size = max(self.target, default=0)
            vocab_size = max(vocab_size, stop_token) + 1
        self.vocab_size = vocab_size

    def next_argmax(self, context: Sequence[int]) -> int:
        self._check_tokens(context)
        if len(context) < self.prompt_len:
            raise ContextTooShort(
                f"context of {len(context)} tokens is shorter than the "
                f"{self.prompt_len}-token prompt")
        pos = len(context) - self.prompt_len
        if pos < len(self.target):
            return self.target[pos]
        return self.stop_token


def scripted_for(prompt: Sequence[int], target: Sequence[int],
                 refs_tokens: Sequence[Sequence[int]] = ()) -> ScriptedLm:
    """Build a ScriptedLm whose stop token cannot collide with any input.

    vocab_size is the largest token anywhere in (prompt, target, refs) plus
    two, and the stop token is vocab_size-1; ports must derive it the same
    way for trace parity.
    """
    high = 0
    for seq in (prompt, target, *refs_tokens):
        for t in seq:
            if t > high:
                high = t
    return ScriptedLm(prompt_len=len(prompt), target=target,
                      stop_token=high + 1, vocab_size=high + 2)
