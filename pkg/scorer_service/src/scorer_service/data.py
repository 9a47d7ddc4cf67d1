"""Training-pair input format, vocabulary, and sequence encoding.

The training file is the pair export produced by the retrieval pipeline:
one JSON object per line with topic_id, report_id, query, passage, and a
binary label. Sequences are encoded as

    [CLS] query tokens [SEP] passage tokens [SEP]

with the query truncated to ``max_query_tokens`` and the whole sequence
to ``max_sequence_tokens``; over-long input is truncated, never rejected.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import DataError

PAD, UNK, CLS, SEP = 0, 1, 2, 3
SPECIAL_TOKENS = ("[PAD]", "[UNK]", "[CLS]", "[SEP]")

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class TrainingPair:
    topic_id: str
    report_id: str
    query: str
    passage: str
    label: int


def parse_pairs(lines: Iterable[str]) -> list[TrainingPair]:
    pairs = []
    for n, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"pairs line {n}: invalid JSON: {exc.msg}") from exc
        try:
            label = obj["label"]
            if label not in (0, 1) or isinstance(label, bool):
                raise DataError(f"pairs line {n}: label must be 0 or 1, got {label!r}")
            pairs.append(
                TrainingPair(
                    topic_id=obj["topic_id"],
                    report_id=obj["report_id"],
                    query=obj["query"],
                    passage=obj["passage"],
                    label=label,
                )
            )
        except KeyError as exc:
            raise DataError(f"pairs line {n}: missing field {exc.args[0]!r}") from exc
    return pairs


def read_pairs(path: str | Path) -> list[TrainingPair]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_pairs(fh)
    except OSError as exc:
        raise DataError(f"cannot read pairs file {path}: {exc}") from exc


class Vocabulary:
    """Token-to-id table with fixed special tokens at ids 0-3."""

    def __init__(self, tokens: Iterable[str]):
        self.token_to_id: dict[str, int] = {
            tok: i for i, tok in enumerate(SPECIAL_TOKENS)
        }
        for token in tokens:
            if token not in self.token_to_id:
                self.token_to_id[token] = len(self.token_to_id)

    def __len__(self) -> int:
        return len(self.token_to_id)

    def lookup(self, token: str) -> int:
        return self.token_to_id.get(token, UNK)

    @classmethod
    def build(cls, texts: Iterable[str]) -> "Vocabulary":
        seen: dict[str, None] = {}
        for text in texts:
            for token in tokenize(text):
                seen.setdefault(token)
        return cls(sorted(seen))

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.token_to_id, fh, indent=0, sort_keys=False)
            fh.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                table = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot load vocabulary {path}: {exc}") from exc
        vocab = cls(())
        for token, idx in table.items():
            vocab.token_to_id[token] = idx
        for i, tok in enumerate(SPECIAL_TOKENS):
            if vocab.token_to_id.get(tok) != i:
                raise DataError(f"vocabulary {path} lost special token {tok}")
        return vocab


def encode(
    vocab: Vocabulary,
    query: str,
    passage: str,
    max_query_tokens: int,
    max_sequence_tokens: int,
) -> list[int]:
    """Token ids for one query/passage pair, truncated to the limits."""
    query_ids = [vocab.lookup(t) for t in tokenize(query)][:max_query_tokens]
    ids = [CLS] + query_ids + [SEP]
    room = max_sequence_tokens - len(ids) - 1
    ids.extend(vocab.lookup(t) for t in tokenize(passage)[: max(0, room)])
    ids.append(SEP)
    return ids[:max_sequence_tokens]
