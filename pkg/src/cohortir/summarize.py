"""Concept-based report summaries.

A dictionary lexicon (term -> concept) is matched greedily, longest entry
first, over normalized unstemmed tokens. Negation is whole-sentence: any
sentence containing a trigger phrase marks every concept mention in it
negative. Summaries keep positive mentions only, drop concepts whose
positive document frequency exceeds a threshold, and always start with the
report type as a concept of its own (exempt from the DF filter).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Iterable, Mapping

from .corpus import Report
from .errors import DataError, ParseError
from .textproc import (
    DEFAULT_ABBREVIATIONS,
    split_sentences,
    tokenize,
)

# Whole-sentence negation triggers. Bare "negative" is deliberately absent:
# "The ears are negative." asserts a finding, while "negative for X" negates.
DEFAULT_NEGATION_TRIGGERS = (
    "no",
    "not",
    "without",
    "denies",
    "denied",
    "negative for",
    "free of",
    "absence of",
    "no evidence of",
    "never",
    "none",
)

MAX_ENTRY_TOKENS = 5

POSITIVE = "positive"
NEGATIVE = "negative"


@dataclass(frozen=True)
class Concept:
    concept_id: str
    preferred_name: str


@dataclass(frozen=True)
class ConceptMention:
    concept_id: str
    preferred_name: str
    start: int
    end: int
    sentence_index: int
    polarity: str | None = None


class ConceptLexicon:
    """Lookup from 1..5-token term sequences to concepts."""

    def __init__(self, entries: Mapping[tuple[str, ...], Concept]):
        self.entries: dict[tuple[str, ...], Concept] = {}
        for key, concept in entries.items():
            if not key or len(key) > MAX_ENTRY_TOKENS:
                raise DataError(
                    f"lexicon term must be 1..{MAX_ENTRY_TOKENS} tokens, "
                    f"got {key!r}"
                )
            self.entries[key] = concept
        self.max_len = max((len(k) for k in self.entries), default=1)

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[str, str, str]]) -> "ConceptLexicon":
        """Build from (term_text, concept_id, preferred_name) triples."""
        entries: dict[tuple[str, ...], Concept] = {}
        for term_text, concept_id, preferred_name in terms:
            key = tuple(tokenize(term_text).normalized())
            if not key:
                raise DataError(f"lexicon term {term_text!r} has no tokens")
            entries[key] = Concept(concept_id, preferred_name)
        return cls(entries)

    def __len__(self) -> int:
        return len(self.entries)


def parse_lexicon(lines: Iterable[str]) -> ConceptLexicon:
    """Read TSV lines: term <TAB> concept_id <TAB> preferred_name."""
    terms = []
    for n, raw in enumerate(lines, 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ParseError(f"expected 3 tab-separated fields, got {len(fields)}", line=n)
        term_text, concept_id, preferred_name = fields
        if not term_text.strip() or not concept_id.strip():
            raise ParseError("empty term or concept id", line=n)
        key_len = len(tokenize(term_text).normalized())
        if not 1 <= key_len <= MAX_ENTRY_TOKENS:
            raise ParseError(
                f"term {term_text!r} has {key_len} tokens "
                f"(allowed 1..{MAX_ENTRY_TOKENS})",
                line=n,
            )
        terms.append((term_text, concept_id, preferred_name))
    return ConceptLexicon.from_terms(terms)


def write_lexicon(lexicon: ConceptLexicon, stream) -> None:
    for key in sorted(lexicon.entries):
        concept = lexicon.entries[key]
        stream.write(
            f"{' '.join(key)}\t{concept.concept_id}\t{concept.preferred_name}\n"
        )


def extract_concepts(
    text: str,
    lexicon: ConceptLexicon,
    sentences: list[tuple[str, tuple[int, int]]] | None = None,
) -> list[ConceptMention]:
    """Greedy longest-match extraction within each sentence.

    Mentions carry absolute character spans and their sentence index;
    polarity is left unset.
    """
    if sentences is None:
        sentences = split_sentences(text)
    mentions: list[ConceptMention] = []
    for sent_idx, (sent_text, (sent_start, _)) in enumerate(sentences):
        tokens = tokenize(sent_text).tokens
        norms = [t.normalized for t in tokens]
        i = 0
        while i < len(tokens):
            matched = False
            max_len = min(lexicon.max_len, len(tokens) - i)
            for length in range(max_len, 0, -1):
                key = tuple(norms[i : i + length])
                concept = lexicon.entries.get(key)
                if concept is not None:
                    mentions.append(
                        ConceptMention(
                            concept_id=concept.concept_id,
                            preferred_name=concept.preferred_name,
                            start=sent_start + tokens[i].start,
                            end=sent_start + tokens[i + length - 1].end,
                            sentence_index=sent_idx,
                        )
                    )
                    i += length
                    matched = True
                    break
            if not matched:
                i += 1
    return mentions


def _trigger_token_seqs(
    triggers: Iterable[str],
) -> list[tuple[str, ...]]:
    seqs = []
    for phrase in triggers:
        key = tuple(tokenize(phrase).normalized())
        if key:
            seqs.append(key)
    return seqs


def detect_negated_sentences(
    sentences: Iterable[str],
    triggers: Iterable[str] = DEFAULT_NEGATION_TRIGGERS,
) -> set[int]:
    """Indexes of sentences containing any trigger phrase, token-aligned.

    Runs on raw sentence text, before any stopword removal; "no" must
    trigger even though it is a stopword.
    """
    seqs = _trigger_token_seqs(triggers)
    negated: set[int] = set()
    for idx, sent in enumerate(sentences):
        norms = tokenize(sent).normalized()
        for seq in seqs:
            k = len(seq)
            if k > len(norms):
                continue
            if any(
                tuple(norms[i : i + k]) == seq
                for i in range(len(norms) - k + 1)
            ):
                negated.add(idx)
                break
    return negated


def assign_polarity(
    mentions: Iterable[ConceptMention], negated_sentences: set[int]
) -> list[ConceptMention]:
    """Whole-sentence scope: every mention in a negated sentence is negative."""
    return [
        replace(
            m,
            polarity=NEGATIVE if m.sentence_index in negated_sentences else POSITIVE,
        )
        for m in mentions
    ]


def filter_by_df(
    mentions: Iterable[ConceptMention],
    concept_df: Mapping[str, int],
    threshold: int,
) -> list[ConceptMention]:
    """Keep mentions whose concept df is at or below the threshold.

    Concepts absent from the table count as df 0 and are kept.
    """
    return [m for m in mentions if concept_df.get(m.concept_id, 0) <= threshold]


def _positive_mentions(
    report: Report,
    lexicon: ConceptLexicon,
    triggers: Iterable[str],
    abbreviations: frozenset[str],
) -> list[ConceptMention]:
    sentences = split_sentences(report.text, abbreviations)
    mentions = extract_concepts(report.text, lexicon, sentences)
    negated = detect_negated_sentences((s for s, _ in sentences), triggers)
    return [m for m in assign_polarity(mentions, negated) if m.polarity == POSITIVE]


def compute_concept_df(
    reports: Iterable[Report],
    lexicon: ConceptLexicon,
    triggers: Iterable[str] = DEFAULT_NEGATION_TRIGGERS,
    abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS,
) -> dict[str, int]:
    """Documents with at least one positive mention, per concept.

    Negated mentions do not count; this is the table the DF filter uses.
    """
    df: dict[str, int] = {}
    for report in reports:
        seen = {m.concept_id for m in _positive_mentions(report, lexicon, triggers, abbreviations)}
        for concept_id in seen:
            df[concept_id] = df.get(concept_id, 0) + 1
    return df


@dataclass(frozen=True)
class ReportSummary:
    report_id: str
    concepts: tuple[str, ...]

    @property
    def rendered(self) -> str:
        return "; ".join(self.concepts)


def summarize_report(
    report: Report,
    lexicon: ConceptLexicon,
    concept_df: Mapping[str, int],
    triggers: Iterable[str] = DEFAULT_NEGATION_TRIGGERS,
    df_threshold: int = 2500,
    abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS,
) -> ReportSummary:
    """Positive, DF-filtered concept names in first-mention order.

    The lowercased report type is prepended and bypasses the DF filter;
    duplicates are dropped.
    """
    positives = _positive_mentions(report, lexicon, triggers, abbreviations)
    kept = filter_by_df(positives, concept_df, df_threshold)
    type_concept = report.report_type.lower()
    names = [type_concept]
    seen = {type_concept}
    for mention in kept:
        if mention.preferred_name not in seen:
            seen.add(mention.preferred_name)
            names.append(mention.preferred_name)
    return ReportSummary(report_id=report.report_id, concepts=tuple(names))


def write_summaries(summaries: Iterable[ReportSummary], stream) -> None:
    """Summary cache JSONL: {"report_id", "concepts": [...]}."""
    for summary in summaries:
        stream.write(
            json.dumps(
                {"report_id": summary.report_id, "concepts": list(summary.concepts)}
            )
            + "\n"
        )


def parse_summaries(lines: Iterable[str]) -> dict[str, ReportSummary]:
    out: dict[str, ReportSummary] = {}
    for n, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", line=n) from exc
        try:
            summary = ReportSummary(
                report_id=obj["report_id"], concepts=tuple(obj["concepts"])
            )
        except KeyError as exc:
            raise ParseError(f"missing field {exc.args[0]!r}", line=n) from exc
        if summary.report_id in out:
            raise ParseError(f"duplicate report id {summary.report_id!r}", line=n)
        out[summary.report_id] = summary
    return out
