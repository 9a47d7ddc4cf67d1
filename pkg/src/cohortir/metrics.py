"""trec_eval-style retrieval metrics over visit rankings.

Conventions follow the reference evaluator:

- Binary relevance means judged grade >= 1; unjudged visits are not
  relevant. R is the number of judged relevant visits for the topic.
- P@k uses the fixed denominator k.
- AP = (1/R) * sum over relevant ranks i of (relevant in top i) / i.
- bpref = (1/R) * sum over retrieved judged-relevant docs r of
  1 - min(n_r, R) / min(R, N), where n_r counts judged non-relevant docs
  ranked above r and N is the judged non-relevant total. Unjudged documents
  are skipped entirely. If N = 0 every retrieved relevant contributes 1.
- DCG gain is (2^grade - 1) / log2(rank + 1); the ideal ranking sorts
  judged grades descending. NDCG = DCG / IDCG.
- MRR is the reciprocal rank of the first relevant visit, 0 if none.

``evaluate_run`` macro-averages over topics with R >= 1; qrels topics
missing from the run contribute zeros, topics with R = 0 are flagged and
excluded, and a topic appearing twice in the run is an error.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import JudgmentSet, RankedList
from .errors import DataError

DEFAULT_KS = (10, 1000)


def _relevant(judgments: JudgmentSet, topic_id: str) -> set[str]:
    return judgments.relevant_visits(topic_id)


def _require_relevant(judgments: JudgmentSet, topic_id: str) -> set[str]:
    relevant = _relevant(judgments, topic_id)
    if not relevant:
        raise DataError(f"topic {topic_id!r} has no relevant visits")
    return relevant


def precision_at_k(run: RankedList, judgments: JudgmentSet, k: int) -> float:
    if k < 1:
        raise DataError(f"k must be >= 1, got {k}")
    relevant = _relevant(judgments, run.topic_id)
    hits = sum(1 for visit_id in run.ids()[:k] if visit_id in relevant)
    return hits / k


def r_precision(run: RankedList, judgments: JudgmentSet) -> float:
    relevant = _require_relevant(judgments, run.topic_id)
    r = len(relevant)
    hits = sum(1 for visit_id in run.ids()[:r] if visit_id in relevant)
    return hits / r


def average_precision(run: RankedList, judgments: JudgmentSet) -> float:
    relevant = _require_relevant(judgments, run.topic_id)
    hits = 0
    total = 0.0
    for rank, visit_id in enumerate(run.ids(), 1):
        if visit_id in relevant:
            hits += 1
            total += hits / rank
    return total / len(relevant)


def bpref(run: RankedList, judgments: JudgmentSet) -> float:
    relevant = _require_relevant(judgments, run.topic_id)
    nonrelevant = judgments.judged_nonrelevant(run.topic_id)
    r = len(relevant)
    n = len(nonrelevant)
    nonrel_above = 0
    total = 0.0
    for visit_id in run.ids():
        if visit_id in relevant:
            if n == 0:
                total += 1.0
            else:
                total += 1.0 - min(nonrel_above, r) / min(r, n)
        elif visit_id in nonrelevant:
            nonrel_above += 1
        # unjudged: skipped entirely
    return total / r


def ndcg(run: RankedList, judgments: JudgmentSet) -> float:
    judged = judgments.judged(run.topic_id)
    ideal_grades = sorted((g for g in judged.values() if g > 0), reverse=True)
    if not ideal_grades:
        raise DataError(f"topic {run.topic_id!r} has no judged grade > 0")
    dcg = 0.0
    for rank, visit_id in enumerate(run.ids(), 1):
        grade = judged.get(visit_id, 0)
        if grade > 0:
            dcg += (2**grade - 1) / math.log2(rank + 1)
    idcg = sum(
        (2**grade - 1) / math.log2(rank + 1)
        for rank, grade in enumerate(ideal_grades, 1)
    )
    return dcg / idcg


def reciprocal_rank(run: RankedList, judgments: JudgmentSet) -> float:
    relevant = _relevant(judgments, run.topic_id)
    for rank, visit_id in enumerate(run.ids(), 1):
        if visit_id in relevant:
            return 1.0 / rank
    return 0.0


@dataclass(frozen=True)
class TopicEval:
    topic_id: str
    average_precision: float
    r_prec: float
    bpref: float
    p_at_k: dict[int, float]
    ndcg: float
    reciprocal_rank: float

    def as_record(self) -> dict[str, float | str]:
        record: dict[str, float | str] = {"topic": self.topic_id}
        record["map"] = round(self.average_precision, 6)
        record["rprec"] = round(self.r_prec, 6)
        record["bpref"] = round(self.bpref, 6)
        for k in sorted(self.p_at_k):
            record[f"p{k}"] = round(self.p_at_k[k], 6)
        record["ndcg"] = round(self.ndcg, 6)
        record["mrr"] = round(self.reciprocal_rank, 6)
        return record


@dataclass(frozen=True)
class EvalReport:
    topics: tuple[TopicEval, ...]
    macro: dict[str, float]
    flagged: tuple[str, ...]
    ks: tuple[int, ...]

    def macro_record(self) -> dict[str, float | str]:
        record: dict[str, float | str] = {"topic": "all"}
        for key, value in self.macro.items():
            record[key] = round(value, 6)
        return record


def evaluate_topic(
    run: RankedList, judgments: JudgmentSet, ks: Sequence[int] = DEFAULT_KS
) -> TopicEval:
    return TopicEval(
        topic_id=run.topic_id,
        average_precision=average_precision(run, judgments),
        r_prec=r_precision(run, judgments),
        bpref=bpref(run, judgments),
        p_at_k={k: precision_at_k(run, judgments, k) for k in ks},
        ndcg=ndcg(run, judgments),
        reciprocal_rank=reciprocal_rank(run, judgments),
    )


def evaluate_run(
    runs: Iterable[RankedList],
    judgments: JudgmentSet,
    ks: Sequence[int] = DEFAULT_KS,
) -> EvalReport:
    by_topic: dict[str, RankedList] = {}
    level = "visit"
    for run in runs:
        if run.topic_id in by_topic:
            raise DataError(f"duplicate topic {run.topic_id!r} in run")
        by_topic[run.topic_id] = run
        level = run.level
    evaluated: list[TopicEval] = []
    flagged: list[str] = []
    for topic_id in judgments.topics():
        if not judgments.relevant_visits(topic_id):
            flagged.append(topic_id)
            continue
        run = by_topic.get(topic_id)
        if run is None:
            run = RankedList(topic_id=topic_id, level=level, items=())
        evaluated.append(evaluate_topic(run, judgments, ks))
    count = len(evaluated)
    metric_keys = _metric_columns(ks)
    sums = {key: 0.0 for key in metric_keys}
    for ev in evaluated:
        sums["map"] += ev.average_precision
        sums["rprec"] += ev.r_prec
        sums["bpref"] += ev.bpref
        for k in ev.p_at_k:
            sums[f"p{k}"] += ev.p_at_k[k]
        sums["ndcg"] += ev.ndcg
        sums["mrr"] += ev.reciprocal_rank
    macro = {
        key: (sums[key] / count if count else 0.0) for key in metric_keys
    }
    return EvalReport(
        topics=tuple(evaluated),
        macro=macro,
        flagged=tuple(flagged),
        ks=tuple(sorted(ks)),
    )


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def _metric_columns(ks: Sequence[int]) -> list[str]:
    return ["map", "rprec", "bpref"] + [f"p{k}" for k in sorted(ks)] + ["ndcg", "mrr"]


def format_eval_table(report: EvalReport) -> str:
    """Aligned per-topic table with a trailing macro-average row."""
    columns = _metric_columns(report.ks)
    rows = [ev.as_record() for ev in report.topics]
    rows.append(report.macro_record())
    width = max([len("topic")] + [len(str(r["topic"])) for r in rows]) + 2
    lines = ["topic".ljust(width) + "  ".join(c.rjust(8) for c in columns)]
    for record in rows:
        cells = "  ".join(f"{float(record[c]):8.4f}" for c in columns)
        lines.append(str(record["topic"]).ljust(width) + cells)
    if report.flagged:
        lines.append(
            "# flagged (no relevant visits, excluded): "
            + ", ".join(report.flagged)
        )
    return "\n".join(lines)


def eval_report_lines(report: EvalReport) -> list[str]:
    """Machine-readable JSONL: one record per topic plus one "all" record."""
    lines = [json.dumps(ev.as_record()) for ev in report.topics]
    lines.append(json.dumps(report.macro_record()))
    return lines
