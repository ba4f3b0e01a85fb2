"""Dataset file handling: JSONL samples of (prompt, target, references).

Canonical records carry integer token arrays. A sibling text mode stores
raw strings plus a named tokenizer ("byte" built in) for demo ergonomics;
text records are tokenized at load time and always saved back in the
canonical token form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import Document, ReferenceSet, TokenSeq, token_seq
from .errors import ParseError, SchemaError

SCENARIOS = ("retrieval", "cache", "multiturn", "custom")


class ByteTokenizer:
    """UTF-8 byte-level codec: token ids are byte values 0..255."""

    name = "byte"
    vocab_size = 256

    @staticmethod
    def encode(text: str) -> TokenSeq:
        return tuple(text.encode("utf-8"))

    @staticmethod
    def decode(tokens: Sequence[int]) -> str:
        return bytes(tokens).decode("utf-8", errors="replace")


TOKENIZERS = {"byte": ByteTokenizer()}


@dataclass(frozen=True)
class DatasetSample:
    sample_id: str
    prompt: TokenSeq
    target: Optional[TokenSeq]
    refs: ReferenceSet
    scenario: str
    text_codec: Optional[str] = None  # set when loaded from a text-mode record


def _require(obj: dict, field: str, where: str):
    if field not in obj:
        raise SchemaError(f"{where}: missing field {field!r}")
    return obj[field]


def _tokens(value, where: str) -> TokenSeq:
    if not isinstance(value, list) or not all(isinstance(t, int) for t in value):
        raise SchemaError(f"{where}: tokens must be an array of integers")
    try:
        return token_seq(value)
    except SchemaError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def _sample_from_obj(obj: dict, where: str) -> DatasetSample:
    sample_id = str(_require(obj, "sample_id", where))
    scenario = _require(obj, "scenario", where)
    if scenario not in SCENARIOS:
        raise SchemaError(f"{where}: unknown scenario {scenario!r}")

    if "tokenizer" in obj:
        codec_name = obj["tokenizer"]
        codec = TOKENIZERS.get(codec_name)
        if codec is None:
            raise SchemaError(f"{where}: unknown tokenizer {codec_name!r}")
        prompt = codec.encode(_require(obj, "prompt_text", where))
        target_text = obj.get("target_text")
        target = codec.encode(target_text) if target_text is not None else None
        docs = []
        for i, d in enumerate(_require(obj, "docs", where)):
            docs.append(Document(doc_id=str(_require(d, "id", f"{where} doc {i}")),
                                 tokens=codec.encode(_require(d, "text", f"{where} doc {i}"))))
        return DatasetSample(sample_id, prompt, target, ReferenceSet(tuple(docs)),
                             scenario, text_codec=codec_name)

    prompt = _tokens(_require(obj, "prompt", where), where)
    raw_target = _require(obj, "target", where)
    target = _tokens(raw_target, where) if raw_target is not None else None
    docs = []
    for i, d in enumerate(_require(obj, "docs", where)):
        doc_where = f"{where} doc {i}"
        docs.append(Document(doc_id=str(_require(d, "id", doc_where)),
                             tokens=_tokens(_require(d, "tokens", doc_where), doc_where)))
    return DatasetSample(sample_id, prompt, target, ReferenceSet(tuple(docs)), scenario)


def sample_to_obj(sample: DatasetSample) -> dict:
    return {
        "sample_id": sample.sample_id,
        "scenario": sample.scenario,
        "prompt": list(sample.prompt),
        "target": list(sample.target) if sample.target is not None else None,
        "docs": [{"id": d.doc_id, "tokens": list(d.tokens)} for d in sample.refs],
    }


def load_dataset(path: str) -> list[DatasetSample]:
    samples = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(path, line_no, exc.msg) from exc
            if not isinstance(obj, dict):
                raise SchemaError(f"{path}:{line_no}: record must be an object")
            samples.append(_sample_from_obj(obj, f"{path}:{line_no}"))
    return samples


def save_dataset(samples: Sequence[DatasetSample], path: str) -> None:
    """Write samples in canonical token form: sorted keys, compact separators."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sample in samples:
            fh.write(json.dumps(sample_to_obj(sample), sort_keys=True,
                                separators=(",", ":")) + "\n")
