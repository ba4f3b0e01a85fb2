"""N-gram position index over a reference set.

Answers the decoder's per-step query: does the current output suffix occur
in any reference document, and if it occurs more than once, which
occurrence has the longest matching prefix before it?
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .core import Document, ReferenceSet, TokenSeq
from .rng import SplitRng


@dataclass(frozen=True)
class MatchResult:
    """A selected reference span.

    pos is the document index immediately after the matched n-gram, i.e.
    the first token to copy; prefix_ext counts how many tokens before the
    n-gram also match the output suffix.
    """

    doc_id: str
    pos: int
    prefix_ext: int


class ReferenceIndex:
    """Immutable map from n-gram to its (doc, end_pos) occurrences.

    Occurrences are stored in document order, positions ascending, and that
    order is what the tie-break draws against, so lookups are deterministic
    across runs and platforms.
    """

    def __init__(self, refs: ReferenceSet, gram_len: int,
                 prefix_cap: Optional[int] = None):
        if gram_len < 1:
            raise ValueError("gram_len must be >= 1")
        self.refs = refs
        self.gram_len = gram_len
        self.prefix_cap = prefix_cap
        self._docs_by_id = {d.doc_id: d for d in refs}
        positions: dict[TokenSeq, list[tuple[int, int]]] = {}
        for ordinal, doc in enumerate(refs):
            toks = doc.tokens
            for end in range(gram_len, len(toks) + 1):
                key = toks[end - gram_len : end]
                positions.setdefault(key, []).append((ordinal, end))
        self.positions = positions

    def document(self, doc_id: str) -> Document:
        return self._docs_by_id[doc_id]


def build_index(refs: ReferenceSet, n: int, prefix_cap: Optional[int] = None) -> ReferenceIndex:
    """Index every n-gram occurrence of every document in refs."""
    return ReferenceIndex(refs, n, prefix_cap)


def _prefix_extension(doc: TokenSeq, gram_start: int, y: Sequence[int],
                      suffix_start: int, cap: Optional[int]) -> int:
    # Longest common suffix of y[:suffix_start] and doc[:gram_start],
    # measured strictly before the matched n-gram.
    ext = 0
    while (
        ext < gram_start
        and ext < suffix_start
        and doc[gram_start - 1 - ext] == y[suffix_start - 1 - ext]
    ):
        ext += 1
        if cap is not None and ext >= cap:
            break
    return ext


def match_ngrams(index: ReferenceIndex, y: Sequence[int], rng: SplitRng) -> Optional[MatchResult]:
    """Match the last n generated tokens against the reference set.

    Returns the candidate span maximizing the prefix extension; equal-best
    candidates are tie-broken uniformly with one draw from `rng` (the draw
    happens on every successful match, tie or not, so generator state is a
    pure function of the match history). Spans ending at a document's last
    token are excluded: they would yield an empty draft.
    """
    n = index.gram_len
    if len(y) < n:
        return None
    key = tuple(y[len(y) - n :])
    occurrences = index.positions.get(key)
    if not occurrences:
        return None

    best: list[tuple[int, int]] = []
    best_ext = -1
    suffix_start = len(y) - n
    for ordinal, end in occurrences:
        doc = index.refs.docs[ordinal]
        if end >= len(doc.tokens):  # nothing left to copy
            continue
        ext = _prefix_extension(doc.tokens, end - n, y, suffix_start, index.prefix_cap)
        if ext > best_ext:
            best_ext = ext
            best = [(ordinal, end)]
        elif ext == best_ext:
            best.append((ordinal, end))
    if not best:
        return None

    ordinal, end = best[rng.next_below(len(best))]
    return MatchResult(doc_id=index.refs.docs[ordinal].doc_id, pos=end, prefix_ext=best_ext)
