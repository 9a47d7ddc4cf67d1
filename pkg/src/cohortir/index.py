"""Inverted index and BM25 scoring over report text.

Scoring follows the Lucene/Anserini BM25 variant:

    idf(t) = ln(1 + (doc_count - df + 0.5) / (df + 0.5))
    score(q, d) = sum_t idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl/avgdl))

with defaults k1 = 0.9, b = 0.4. Queries are bags of stemmed terms combined
by OR; only documents containing at least one query term score above zero.
"""

from __future__ import annotations

import json
import math
import struct
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .corpus import Corpus, RankedList, Report, Topic
from .errors import DataError, UnsearchableQueryError
from .textproc import DEFAULT_STOPWORDS, analyze

_MAGIC = b"CIRX"
_VERSION = 1


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 0.9
    b: float = 0.4

    def __post_init__(self) -> None:
        if self.k1 < 0:
            raise DataError(f"k1 must be >= 0, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise DataError(f"b must be in [0, 1], got {self.b}")


class InvertedIndex:
    """Immutable after build: postings, document lengths, and statistics."""

    def __init__(
        self,
        postings: dict[str, tuple[tuple[str, int], ...]],
        doc_lengths: dict[str, int],
    ):
        self.postings = postings
        self.doc_lengths = doc_lengths
        self.doc_count = len(doc_lengths)
        total = sum(doc_lengths.values())
        self.avg_doc_length = total / self.doc_count if self.doc_count else 0.0

    def df(self, term: str) -> int:
        return len(self.postings.get(term, ()))

    def idf(self, term: str) -> float:
        df = self.df(term)
        return math.log(1.0 + (self.doc_count - df + 0.5) / (df + 0.5))


def build_index(
    reports: Corpus | Iterable[Report],
    stoplist: frozenset[str] = DEFAULT_STOPWORDS,
) -> InvertedIndex:
    """Index every report through the tokenize/stopword/stem pipeline."""
    raw: dict[str, dict[str, int]] = {}
    doc_lengths: dict[str, int] = {}
    for rep in reports:
        if rep.report_id in doc_lengths:
            raise DataError(f"duplicate report id {rep.report_id!r}")
        terms = analyze(rep.text, stoplist)
        doc_lengths[rep.report_id] = len(terms)
        for term, tf in Counter(terms).items():
            raw.setdefault(term, {})[rep.report_id] = tf
    postings = {
        term: tuple(sorted(docs.items())) for term, docs in raw.items()
    }
    return InvertedIndex(postings, doc_lengths)


def build_or_query(
    topic: Topic | str, stoplist: frozenset[str] = DEFAULT_STOPWORDS
) -> list[str]:
    """Stemmed, stopword-free query terms, de-duplicated in first-seen order."""
    text = topic.description if isinstance(topic, Topic) else topic
    seen: set[str] = set()
    terms = []
    for term in analyze(text, stoplist):
        if term not in seen:
            seen.add(term)
            terms.append(term)
    if not terms:
        raise UnsearchableQueryError(
            f"unsearchable query: no terms survive analysis of {text!r}"
        )
    return terms


def _tf_factor(tf: int, dl: int, index: InvertedIndex, params: Bm25Params) -> float:
    if index.avg_doc_length > 0:
        norm = 1.0 - params.b + params.b * dl / index.avg_doc_length
    else:
        norm = 1.0
    return tf * (params.k1 + 1.0) / (tf + params.k1 * norm)


def bm25_score(
    index: InvertedIndex,
    params: Bm25Params,
    terms: Iterable[str],
    report_id: str,
) -> float:
    """Score one document against a term bag; summed in term order."""
    if report_id not in index.doc_lengths:
        raise DataError(f"unknown report id {report_id!r}")
    dl = index.doc_lengths[report_id]
    score = 0.0
    for term in terms:
        for doc_id, tf in index.postings.get(term, ()):
            if doc_id == report_id:
                score += index.idf(term) * _tf_factor(tf, dl, index, params)
                break
    return score


def retrieve_top_n(
    index: InvertedIndex,
    params: Bm25Params,
    terms: list[str],
    n: int,
    topic_id: str = "",
    run_tag: str = "bm25",
) -> RankedList:
    """Top-n report ranking; ties broken by report id ascending.

    Documents containing none of the query terms are excluded.
    """
    if n < 1:
        raise DataError(f"n must be >= 1, got {n}")
    if not terms:
        raise UnsearchableQueryError("empty query term list")
    scores: dict[str, float] = {}
    for term in terms:
        idf = index.idf(term)
        for doc_id, tf in index.postings.get(term, ()):
            contribution = idf * _tf_factor(
                tf, index.doc_lengths[doc_id], index, params
            )
            scores[doc_id] = scores.get(doc_id, 0.0) + contribution
    ordered = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))[:n]
    return RankedList(
        topic_id=topic_id,
        level="report",
        items=tuple(ordered),
        run_tag=run_tag,
    )


def save_index(index: InvertedIndex, path: str | Path) -> None:
    """Single self-describing binary file: magic, version, length, JSON body.

    Keys are sorted and postings are ordered, so two builds of the same
    corpus serialize byte-identically.
    """
    payload = {
        "format": "cohortir-index",
        "doc_lengths": index.doc_lengths,
        "postings": {
            term: [[doc_id, tf] for doc_id, tf in plist]
            for term, plist in index.postings.items()
        },
    }
    body = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack(">I", _VERSION))
        fh.write(struct.pack(">Q", len(body)))
        fh.write(body)


def load_index(path: str | Path) -> InvertedIndex:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise DataError(f"not an index file: bad magic {magic!r}")
        (version,) = struct.unpack(">I", fh.read(4))
        if version != _VERSION:
            raise DataError(f"unsupported index version {version}")
        (length,) = struct.unpack(">Q", fh.read(8))
        body = fh.read(length)
        if len(body) != length:
            raise DataError("truncated index file")
    payload = json.loads(body.decode("utf-8"))
    postings = {
        term: tuple((doc_id, tf) for doc_id, tf in plist)
        for term, plist in payload["postings"].items()
    }
    return InvertedIndex(postings, payload["doc_lengths"])
