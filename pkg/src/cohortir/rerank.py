"""Training-pair construction and pluggable binary-relevance re-ranking.

A scorer maps (query, passage) pairs to a relevance probability in [0, 1].
Scorers are either in-process (baseline lexical overlap, label oracle) or
remote, speaking a small JSON wire protocol:

    request:  {"pairs": [{"id": ..., "query": ..., "passage": ...}, ...]}
    response: {"scores": [{"id": ..., "score": ...}, ...]}  (any order)

Remote transports: HTTP POST to a configurable URL, or newline-delimited
JSON over a child process's standard streams.
"""

from __future__ import annotations

import json
import logging
import random
import shlex
import subprocess
import time
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Mapping, Sequence

import requests

from .corpus import Corpus, JudgmentSet, RankedList, Topic
from .errors import (
    DataError,
    ParseError,
    ScorerProtocolError,
    ScorerTransportError,
)
from .summarize import ReportSummary
from .textproc import analyze

logger = logging.getLogger(__name__)

RELEVANT = 1
NOT_RELEVANT = 0

PAIR_ID_SEP = "::"


@dataclass(frozen=True)
class ScoredPair:
    """One (topic query, report summary) pair, optionally labeled/scored."""

    topic_id: str
    report_id: str
    query_text: str
    passage_text: str
    label: int | None = None
    probability: float | None = None

    @property
    def pair_id(self) -> str:
        return f"{self.topic_id}{PAIR_ID_SEP}{self.report_id}"


@dataclass(frozen=True)
class SamplingPolicy:
    negative_ratio: int = 10
    max_pairs_per_topic: int = 1650
    reference_positive_count: int = 150
    random_seed: int = 0

    def __post_init__(self) -> None:
        if self.negative_ratio < 1:
            raise DataError(f"negative_ratio must be >= 1, got {self.negative_ratio}")
        if self.reference_positive_count < 1:
            raise DataError(
                "reference_positive_count must be >= 1, got "
                f"{self.reference_positive_count}"
            )
        if self.max_pairs_per_topic < 1:
            raise DataError(
                f"max_pairs_per_topic must be >= 1, got {self.max_pairs_per_topic}"
            )


@dataclass(frozen=True)
class ScorerEndpoint:
    """Where scores come from.

    transport: "baseline" | "oracle" (in-process), "http" | "subprocess"
    (remote). ``address`` is the URL for http, the command line for
    subprocess, unused otherwise.
    """

    transport: str
    address: str = ""
    batch_size: int = 32
    max_retries: int = 3
    backoff_seconds: float = 0.5
    timeout_seconds: float = 30.0

    def __post_init__(self) -> None:
        if self.transport not in ("baseline", "oracle", "http", "subprocess"):
            raise DataError(f"unknown scorer transport {self.transport!r}")
        if self.batch_size < 1:
            raise DataError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.transport in ("http", "subprocess") and not self.address:
            raise DataError(f"{self.transport} scorer needs an address")


def propagate_labels(
    judgments: JudgmentSet, reports: Corpus
) -> dict[tuple[str, str], int]:
    """Report-level labels from binarized visit judgments.

    Returns entries only for reports whose visit is judged; read with
    ``labels.get((topic_id, report_id), NOT_RELEVANT)``; unjudged visits
    are not relevant.
    """
    binary = judgments.binarize()
    labels: dict[tuple[str, str], int] = {}
    for topic_id in binary.topics():
        judged = binary.judged(topic_id)
        for report in reports:
            grade = judged.get(report.visit_id)
            if grade is not None:
                labels[(topic_id, report.report_id)] = grade
    return labels


def build_pair(topic: Topic, summary: ReportSummary) -> ScoredPair:
    """Query = topic description, passage = rendered summary."""
    return ScoredPair(
        topic_id=topic.topic_id,
        report_id=summary.report_id,
        query_text=topic.description,
        passage_text=summary.rendered,
    )


def sample_training_pairs(
    candidates: Iterable[RankedList],
    labels: Mapping[tuple[str, str], int],
    policy: SamplingPolicy,
    topics: Mapping[str, Topic],
    summaries: Mapping[str, ReportSummary],
) -> list[ScoredPair]:
    """Per-topic positives (best-BM25 first) plus sampled negatives.

    Positives are capped at ``reference_positive_count``; negatives are
    drawn uniformly without replacement, at most ``negative_ratio`` per kept
    positive; the per-topic total never exceeds ``max_pairs_per_topic``.
    Topics with zero positive candidates are skipped with a warning. The
    per-topic RNG is seeded from (seed, topic id), so output is stable
    regardless of topic order.
    """
    out: list[ScoredPair] = []
    for run in candidates:
        topic_id = run.topic_id
        if topic_id not in topics:
            raise DataError(f"no topic description for {topic_id!r}")
        positives = [r for r in run.ids() if labels.get((topic_id, r), 0) == RELEVANT]
        negatives = [r for r in run.ids() if labels.get((topic_id, r), 0) != RELEVANT]
        if not positives:
            logger.warning("topic %s: no positive candidates, skipped", topic_id)
            continue
        kept_cap = min(
            policy.reference_positive_count,
            policy.max_pairs_per_topic // (policy.negative_ratio + 1),
        )
        kept = positives[: max(1, kept_cap)]
        n_neg = min(
            len(negatives),
            policy.negative_ratio * len(kept),
            policy.max_pairs_per_topic - len(kept),
        )
        rng = random.Random(f"{policy.random_seed}:{topic_id}")
        sampled = rng.sample(negatives, n_neg)
        for report_id, label in [(r, RELEVANT) for r in kept] + [
            (r, NOT_RELEVANT) for r in sampled
        ]:
            summary = summaries.get(report_id)
            if summary is None:
                raise DataError(f"no summary for report {report_id!r}")
            pair = build_pair(topics[topic_id], summary)
            out.append(replace(pair, label=label))
    return out


def split_topics(
    topics: Sequence[Topic] | Sequence[str], fraction: float, seed: int
) -> tuple[list, list]:
    """Seeded shuffle, then the first floor(fraction * n) become train."""
    if not 0.0 < fraction < 1.0:
        raise DataError(f"split fraction must be in (0, 1), got {fraction}")
    items = sorted(topics, key=lambda t: t.topic_id if isinstance(t, Topic) else t)
    rng = random.Random(seed)
    rng.shuffle(items)
    cut = int(fraction * len(items))
    return items[:cut], items[cut:]


def write_training_pairs(pairs: Iterable[ScoredPair], stream) -> None:
    """Training export JSONL: topic_id, report_id, query, passage, label."""
    for pair in pairs:
        if pair.label not in (0, 1):
            raise DataError(f"pair {pair.pair_id} has no binary label")
        stream.write(
            json.dumps(
                {
                    "topic_id": pair.topic_id,
                    "report_id": pair.report_id,
                    "query": pair.query_text,
                    "passage": pair.passage_text,
                    "label": pair.label,
                }
            )
            + "\n"
        )


def parse_training_pairs(lines: Iterable[str]) -> list[ScoredPair]:
    pairs = []
    for n, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", line=n) from exc
        try:
            label = obj["label"]
            if label not in (0, 1):
                raise ParseError(f"label must be 0 or 1, got {label!r}", line=n)
            pairs.append(
                ScoredPair(
                    topic_id=obj["topic_id"],
                    report_id=obj["report_id"],
                    query_text=obj["query"],
                    passage_text=obj["passage"],
                    label=label,
                )
            )
        except KeyError as exc:
            raise ParseError(f"missing field {exc.args[0]!r}", line=n) from exc
    return pairs


# ---------------------------------------------------------------------------
# Scorers
# ---------------------------------------------------------------------------


def baseline_lexical_score(query_text: str, passage_text: str) -> float:
    """Stemmed-term overlap: |q & p| / |q| after the full term pipeline."""
    query_terms = set(analyze(query_text))
    if not query_terms:
        return 0.0
    passage_terms = set(analyze(passage_text))
    return len(query_terms & passage_terms) / len(query_terms)


class BaselineLexicalScorer:
    def score_pair(self, pair: ScoredPair) -> float:
        return baseline_lexical_score(pair.query_text, pair.passage_text)


class OracleScorer:
    """Probability 1 for pairs labeled relevant, 0 otherwise."""

    def __init__(self, labels: Mapping[tuple[str, str], int]):
        self.labels = labels

    def score_pair(self, pair: ScoredPair) -> float:
        return float(self.labels.get((pair.topic_id, pair.report_id), 0))


def validate_score_response(
    request_ids: Sequence[str], response_obj: object
) -> dict[str, float]:
    """Check a wire response against its request; return id -> score.

    Raises ScorerProtocolError naming the defect: bad shape, count
    mismatch, unknown or duplicate ids, non-numeric or out-of-range scores.
    """
    if not isinstance(response_obj, dict) or "scores" not in response_obj:
        raise ScorerProtocolError('response missing "scores" field')
    scores = response_obj["scores"]
    if not isinstance(scores, list):
        raise ScorerProtocolError('"scores" must be a list')
    if len(scores) != len(request_ids):
        raise ScorerProtocolError(
            f"expected {len(request_ids)} scores, got {len(scores)}"
        )
    wanted = set(request_ids)
    out: dict[str, float] = {}
    for entry in scores:
        if not isinstance(entry, dict) or "id" not in entry or "score" not in entry:
            raise ScorerProtocolError(f"malformed score entry {entry!r}")
        pair_id = entry["id"]
        value = entry["score"]
        if pair_id not in wanted:
            raise ScorerProtocolError(f"unknown pair id {pair_id!r} in response")
        if pair_id in out:
            raise ScorerProtocolError(f"duplicate pair id {pair_id!r} in response")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ScorerProtocolError(f"non-numeric score for {pair_id!r}")
        if not 0.0 <= float(value) <= 1.0:
            raise ScorerProtocolError(
                f"score {value!r} for {pair_id!r} outside [0, 1]"
            )
        out[pair_id] = float(value)
    return out


def _wire_request(batch: Sequence[ScoredPair]) -> dict:
    return {
        "pairs": [
            {"id": p.pair_id, "query": p.query_text, "passage": p.passage_text}
            for p in batch
        ]
    }


def _with_retries(
    send: Callable[[], dict], endpoint: ScorerEndpoint
) -> dict:
    last: Exception | None = None
    for attempt in range(endpoint.max_retries):
        try:
            return send()
        except ScorerTransportError as exc:
            last = exc
            if attempt + 1 < endpoint.max_retries:
                time.sleep(endpoint.backoff_seconds * (2**attempt))
    raise ScorerTransportError(
        f"scorer unreachable after {endpoint.max_retries} attempts: {last}"
    )


class HttpScorerClient:
    def __init__(self, endpoint: ScorerEndpoint):
        self.endpoint = endpoint

    def score_batch(self, batch: Sequence[ScoredPair]) -> dict[str, float]:
        payload = _wire_request(batch)

        def send() -> dict:
            try:
                resp = requests.post(
                    self.endpoint.address,
                    json=payload,
                    timeout=self.endpoint.timeout_seconds,
                )
            except requests.RequestException as exc:
                raise ScorerTransportError(str(exc)) from exc
            if resp.status_code >= 500:
                raise ScorerTransportError(f"server error {resp.status_code}")
            if resp.status_code != 200:
                raise ScorerProtocolError(
                    f"scorer rejected request: HTTP {resp.status_code}"
                )
            try:
                return resp.json()
            except ValueError as exc:
                raise ScorerProtocolError("response is not valid JSON") from exc

        obj = _with_retries(send, self.endpoint)
        return validate_score_response([p.pair_id for p in batch], obj)

    def close(self) -> None:
        pass


class SubprocessScorerClient:
    """Newline-delimited JSON over a child process's stdin/stdout."""

    def __init__(self, endpoint: ScorerEndpoint):
        self.endpoint = endpoint
        self._proc: subprocess.Popen | None = None

    def _ensure_proc(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            try:
                self._proc = subprocess.Popen(
                    shlex.split(self.endpoint.address),
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    text=True,
                )
            except OSError as exc:
                raise ScorerTransportError(f"cannot start scorer: {exc}") from exc
        return self._proc

    def score_batch(self, batch: Sequence[ScoredPair]) -> dict[str, float]:
        payload = _wire_request(batch)

        def send() -> dict:
            proc = self._ensure_proc()
            try:
                assert proc.stdin is not None and proc.stdout is not None
                proc.stdin.write(json.dumps(payload) + "\n")
                proc.stdin.flush()
                line = proc.stdout.readline()
            except (BrokenPipeError, OSError) as exc:
                raise ScorerTransportError(str(exc)) from exc
            if not line:
                raise ScorerTransportError("scorer closed its output stream")
            try:
                return json.loads(line)
            except json.JSONDecodeError as exc:
                raise ScorerProtocolError("response is not valid JSON") from exc

        obj = _with_retries(send, self.endpoint)
        return validate_score_response([p.pair_id for p in batch], obj)

    def close(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            if self._proc.stdin is not None:
                self._proc.stdin.close()
            self._proc.terminate()
            self._proc.wait(timeout=10)
        self._proc = None


def score_pairs(
    pairs: Sequence[ScoredPair],
    endpoint: ScorerEndpoint,
    labels: Mapping[tuple[str, str], int] | None = None,
) -> list[ScoredPair]:
    """Score every pair, batching by ``endpoint.batch_size``.

    Duplicate pair ids are rejected before anything is sent. Remote
    responses may arrive in any order; results are realigned by id.
    """
    seen: set[str] = set()
    for pair in pairs:
        if pair.pair_id in seen:
            raise DataError(f"duplicate pair id {pair.pair_id!r}")
        seen.add(pair.pair_id)

    if endpoint.transport == "baseline":
        return _score_in_process(pairs, BaselineLexicalScorer())
    if endpoint.transport == "oracle":
        if labels is None:
            raise DataError("oracle scorer needs labels")
        return _score_in_process(pairs, OracleScorer(labels))

    client: HttpScorerClient | SubprocessScorerClient
    if endpoint.transport == "http":
        client = HttpScorerClient(endpoint)
    else:
        client = SubprocessScorerClient(endpoint)
    try:
        out: list[ScoredPair] = []
        for lo in range(0, len(pairs), endpoint.batch_size):
            batch = pairs[lo : lo + endpoint.batch_size]
            by_id = client.score_batch(batch)
            out.extend(replace(p, probability=by_id[p.pair_id]) for p in batch)
        return out
    finally:
        client.close()


def _score_in_process(pairs: Sequence[ScoredPair], scorer) -> list[ScoredPair]:
    out = []
    for pair in pairs:
        value = float(scorer.score_pair(pair))
        if not 0.0 <= value <= 1.0:
            raise ScorerProtocolError(
                f"score {value!r} for {pair.pair_id!r} outside [0, 1]"
            )
        out.append(replace(pair, probability=value))
    return out


def rerank(
    candidates: RankedList,
    scored_pairs: Iterable[ScoredPair],
    run_tag: str | None = None,
) -> RankedList:
    """Sort candidates by probability; ties keep BM25 order, then id order.

    Every candidate must have a scored pair; the output has the same length
    and id set as the input.
    """
    probs: dict[str, float] = {}
    for pair in scored_pairs:
        if pair.topic_id != candidates.topic_id:
            continue
        if pair.probability is None:
            raise DataError(f"pair {pair.pair_id} has no probability")
        probs[pair.report_id] = pair.probability
    missing = [r for r in candidates.ids() if r not in probs]
    if missing:
        raise DataError(
            f"missing scores for topic {candidates.topic_id!r}: "
            f"{', '.join(missing[:5])}"
        )
    order = sorted(
        enumerate(candidates.ids()),
        key=lambda pos_id: (-probs[pos_id[1]], pos_id[0], pos_id[1]),
    )
    return RankedList(
        topic_id=candidates.topic_id,
        level="report",
        items=tuple((report_id, probs[report_id]) for _, report_id in order),
        run_tag=run_tag if run_tag is not None else candidates.run_tag,
    )
