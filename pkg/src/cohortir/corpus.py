"""Data model and file formats: reports, visits, topics, qrels, run files."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import DataError, ParseError

REPORT_TYPES = (
    "Radiology Report",
    "History and Physical",
    "Consultation Report",
    "Emergency Department Report",
    "Progress Note",
    "Discharge Summary",
    "Operative Report",
    "Surgical Pathology Report",
    "Cardiology Report",
)

GRADES = (0, 1, 2)  # not relevant, partially relevant, relevant


@dataclass(frozen=True)
class Report:
    report_id: str
    visit_id: str
    report_type: str
    text: str


@dataclass(frozen=True)
class Visit:
    visit_id: str
    report_ids: tuple[str, ...]


@dataclass(frozen=True)
class Topic:
    topic_id: str
    description: str


class Corpus:
    """All reports plus the visit grouping derived from them."""

    def __init__(self, reports: Iterable[Report]):
        self.reports: dict[str, Report] = {}
        grouped: dict[str, list[str]] = {}
        for rep in reports:
            if rep.report_id in self.reports:
                raise DataError(f"duplicate report id {rep.report_id!r}")
            self.reports[rep.report_id] = rep
            grouped.setdefault(rep.visit_id, []).append(rep.report_id)
        self.visits: dict[str, Visit] = {
            vid: Visit(vid, tuple(rids)) for vid, rids in grouped.items()
        }

    def __len__(self) -> int:
        return len(self.reports)

    def __iter__(self) -> Iterator[Report]:
        return iter(self.reports.values())

    def visit_map(self) -> dict[str, str]:
        """report_id -> visit_id for every report."""
        return {r.report_id: r.visit_id for r in self}


@dataclass
class JudgmentSet:
    """Graded relevance judgments: topic -> visit -> grade in {0, 1, 2}.

    Grade 0 entries are kept; they mark visits judged non-relevant, which
    bpref needs. Unjudged (topic, visit) pairs read as grade 0.
    """

    grades: dict[str, dict[str, int]] = field(default_factory=dict)

    @classmethod
    def from_entries(cls, entries: Iterable[tuple[str, str, int]]) -> "JudgmentSet":
        j = cls()
        for topic_id, visit_id, grade in entries:
            if grade not in GRADES:
                raise DataError(f"grade {grade!r} outside {GRADES}")
            per_topic = j.grades.setdefault(topic_id, {})
            if visit_id in per_topic:
                raise DataError(
                    f"duplicate judgment for topic {topic_id!r} visit {visit_id!r}"
                )
            per_topic[visit_id] = grade
        return j

    def grade(self, topic_id: str, visit_id: str) -> int:
        return self.grades.get(topic_id, {}).get(visit_id, 0)

    def topics(self) -> list[str]:
        return sorted(self.grades)

    def judged(self, topic_id: str) -> dict[str, int]:
        return dict(self.grades.get(topic_id, {}))

    def relevant_visits(self, topic_id: str) -> set[str]:
        """Binarized view: partially relevant counts as relevant."""
        return {v for v, g in self.grades.get(topic_id, {}).items() if g >= 1}

    def judged_nonrelevant(self, topic_id: str) -> set[str]:
        return {v for v, g in self.grades.get(topic_id, {}).items() if g == 0}

    def binarize(self) -> "JudgmentSet":
        """Collapse grades to {0, 1}; idempotent."""
        return JudgmentSet(
            {
                t: {v: (1 if g >= 1 else 0) for v, g in per.items()}
                for t, per in self.grades.items()
            }
        )

    def entries(self) -> Iterator[tuple[str, str, int]]:
        for t in self.topics():
            for v in sorted(self.grades[t]):
                yield t, v, self.grades[t][v]


@dataclass(frozen=True)
class RankedList:
    """One topic's ranking of report or visit ids with non-increasing scores."""

    topic_id: str
    level: str  # "report" | "visit"
    items: tuple[tuple[str, float], ...]
    run_tag: str = "cohortir"

    def __post_init__(self) -> None:
        if self.level not in ("report", "visit"):
            raise DataError(f"bad ranking level {self.level!r}")
        seen: set[str] = set()
        prev = None
        for item_id, score in self.items:
            if item_id in seen:
                raise DataError(
                    f"duplicate id {item_id!r} in ranking for topic {self.topic_id!r}"
                )
            seen.add(item_id)
            if prev is not None and score > prev:
                raise DataError(
                    f"scores increase at {item_id!r} in topic {self.topic_id!r}"
                )
            prev = score

    def ids(self) -> list[str]:
        return [item_id for item_id, _ in self.items]

    def __len__(self) -> int:
        return len(self.items)


# ---------------------------------------------------------------------------
# Parsers and writers
# ---------------------------------------------------------------------------


def parse_corpus(lines: Iterable[str]) -> Corpus:
    """Read report JSONL: {"report_id", "visit_id", "report_type", "text"}."""
    reports = []
    seen: set[str] = set()
    for n, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", line=n) from exc
        if not isinstance(obj, dict):
            raise ParseError("expected a JSON object", line=n)
        try:
            rep = Report(
                report_id=obj["report_id"],
                visit_id=obj["visit_id"],
                report_type=obj["report_type"],
                text=obj["text"],
            )
        except KeyError as exc:
            raise ParseError(f"missing field {exc.args[0]!r}", line=n) from exc
        if rep.report_type not in REPORT_TYPES:
            raise ParseError(
                f"unknown report type {rep.report_type!r}", line=n
            )
        if not rep.report_id or not rep.visit_id:
            raise ParseError("empty report_id or visit_id", line=n)
        if rep.report_id in seen:
            raise ParseError(f"duplicate report id {rep.report_id!r}", line=n)
        seen.add(rep.report_id)
        reports.append(rep)
    return Corpus(reports)


def write_corpus(reports: Iterable[Report], stream) -> None:
    for rep in reports:
        stream.write(
            json.dumps(
                {
                    "report_id": rep.report_id,
                    "visit_id": rep.visit_id,
                    "report_type": rep.report_type,
                    "text": rep.text,
                }
            )
            + "\n"
        )


def parse_topics(lines: Iterable[str]) -> list[Topic]:
    """Read topic JSONL: {"topic_id", "description"}."""
    topics = []
    seen: set[str] = set()
    for n, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", line=n) from exc
        try:
            topic = Topic(topic_id=obj["topic_id"], description=obj["description"])
        except KeyError as exc:
            raise ParseError(f"missing field {exc.args[0]!r}", line=n) from exc
        if not topic.topic_id:
            raise ParseError("empty topic_id", line=n)
        if not topic.description.strip():
            raise ParseError(f"empty description for topic {topic.topic_id!r}", line=n)
        if topic.topic_id in seen:
            raise ParseError(f"duplicate topic id {topic.topic_id!r}", line=n)
        seen.add(topic.topic_id)
        topics.append(topic)
    return topics


def write_topics(topics: Iterable[Topic], stream) -> None:
    for t in topics:
        stream.write(
            json.dumps({"topic_id": t.topic_id, "description": t.description}) + "\n"
        )


def parse_qrels(lines: Iterable[str]) -> JudgmentSet:
    """Read qrels: whitespace-separated ``topic_id 0 visit_id grade``."""
    j = JudgmentSet()
    for n, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 4:
            raise ParseError(f"expected 4 fields, got {len(fields)}", line=n)
        topic_id, _, visit_id, grade_text = fields
        try:
            grade = int(grade_text)
        except ValueError as exc:
            raise ParseError(f"non-numeric grade {grade_text!r}", line=n) from exc
        if grade not in GRADES:
            raise ParseError(f"grade {grade} outside {GRADES}", line=n)
        per_topic = j.grades.setdefault(topic_id, {})
        if visit_id in per_topic:
            raise ParseError(
                f"duplicate judgment for topic {topic_id!r} visit {visit_id!r}",
                line=n,
            )
        per_topic[visit_id] = grade
    return j


def write_qrels(judgments: JudgmentSet, stream) -> None:
    for topic_id, visit_id, grade in judgments.entries():
        stream.write(f"{topic_id} 0 {visit_id} {grade}\n")


def format_score(score: float) -> str:
    """Run-file score rendering: 6 significant digits."""
    return f"{score:.6g}"


def write_run(runs: RankedList | Iterable[RankedList], stream) -> None:
    """Write TREC-style run lines: topic Q0 id rank score tag, rank from 1."""
    if isinstance(runs, RankedList):
        runs = [runs]
    for run in runs:
        for rank, (item_id, score) in enumerate(run.items, 1):
            stream.write(
                f"{run.topic_id} Q0 {item_id} {rank} {format_score(score)} "
                f"{run.run_tag}\n"
            )


def parse_run(lines: Iterable[str], level: str) -> list[RankedList]:
    """Read a run file into one RankedList per topic (first-appearance order)."""
    per_topic: dict[str, list[tuple[int, str, float, int]]] = {}
    tags: dict[str, str] = {}
    for n, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 6:
            raise ParseError(f"expected 6 fields, got {len(fields)}", line=n)
        topic_id, _, item_id, rank_text, score_text, tag = fields
        try:
            rank = int(rank_text)
        except ValueError as exc:
            raise ParseError(f"non-numeric rank {rank_text!r}", line=n) from exc
        try:
            score = float(score_text)
        except ValueError as exc:
            raise ParseError(f"non-numeric score {score_text!r}", line=n) from exc
        per_topic.setdefault(topic_id, []).append((rank, item_id, score, n))
        tags.setdefault(topic_id, tag)
    runs = []
    for topic_id, rows in per_topic.items():
        rows.sort(key=lambda r: r[0])
        try:
            runs.append(
                RankedList(
                    topic_id=topic_id,
                    level=level,
                    items=tuple((item_id, score) for _, item_id, score, _ in rows),
                    run_tag=tags[topic_id],
                )
            )
        except DataError as exc:
            raise ParseError(f"topic {topic_id!r}: {exc}", line=rows[0][3]) from exc
    return runs


def runs_by_topic(runs: Iterable[RankedList]) -> dict[str, RankedList]:
    out: dict[str, RankedList] = {}
    for run in runs:
        if run.topic_id in out:
            raise DataError(f"duplicate topic {run.topic_id!r} in run")
        out[run.topic_id] = run
    return out


def topics_by_id(topics: Iterable[Topic]) -> dict[str, Topic]:
    return {t.topic_id: t for t in topics}
