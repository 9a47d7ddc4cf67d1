"""Deterministic synthetic corpus generator with planted relevance.

Each topic gets a disjoint set of target concepts. Visits planted as
relevant assert those concepts in positive sentences (with probability
``relevance_signal_strength`` per report and concept, grade 2 in the
qrels). Near-miss visits mention the targets only under negation and are
graded 1 with probability 0.5, otherwise 0. Common-class concepts are
injected into most reports so the summarizer's DF filter has something to
prune. All randomness flows from one seeded RNG, so identical configs
produce byte-identical files.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import (
    REPORT_TYPES,
    JudgmentSet,
    Report,
    Topic,
    write_corpus,
    write_qrels,
    write_topics,
)
from .errors import DataError
from .summarize import ConceptLexicon, write_lexicon


@dataclass(frozen=True)
class ConceptSpec:
    name: str
    frequency_class: str  # "common" | "discriminative"


def _specs(names: str, frequency_class: str) -> tuple[ConceptSpec, ...]:
    return tuple(
        ConceptSpec(line.strip(), frequency_class)
        for line in names.strip().splitlines()
    )


# Common concepts appear in filler across most reports (DF-filter fodder);
# discriminative concepts are reserved for topic targets. Token sets are
# pairwise disjoint so one topic's signal never leaks into another's query.
COMMON_CONCEPTS = _specs(
    """
    blood pressure
    heart rate
    body temperature
    respiratory effort
    oxygen saturation
    bowel sounds
    breath sounds
    mental status
    general appearance
    mild discomfort
    """,
    "common",
)

DISCRIMINATIVE_CONCEPTS = _specs(
    """
    dental caries
    impacted wisdom tooth
    atrial fibrillation
    hip fracture
    pulmonary embolism
    diabetic ketoacidosis
    cholecystitis
    appendicitis
    pancreatitis
    achalasia
    pneumothorax
    cellulitis
    diverticulitis
    endocarditis
    osteomyelitis
    pyelonephritis
    bronchiolitis
    epiglottitis
    pericarditis
    myocarditis
    nephrolithiasis
    cirrhosis
    hemochromatosis
    sarcoidosis
    amyloidosis
    thyrotoxicosis
    anaphylaxis
    epistaxis
    hemoptysis
    dysphagia
    ataxia
    aphasia
    neutropenia
    thrombocytopenia
    hyponatremia
    hyperkalemia
    rhabdomyolysis
    encephalopathy
    cardiomyopathy
    retinopathy
    vasculitis
    urticaria
    psoriasis
    eczema
    scabies
    shingles
    melanoma
    glaucoma
    """,
    "discriminative",
)

DEFAULT_VOCAB = COMMON_CONCEPTS + DISCRIMINATIVE_CONCEPTS

_POSITIVE_TEMPLATES = (
    "The patient has {}.",
    "Assessment shows {}.",
    "He has {} today.",
    "She reports {}.",
    "Findings are consistent with {}.",
)

_NEGATED_TEMPLATES = (
    "He has no {}.",
    "The patient denies {}.",
    "No evidence of {} is seen.",
    "She is without {}.",
    "Workup was negative for {}.",
)

_GENERIC_FILLER = (
    "Vitals were reviewed this morning.",
    "The course was otherwise unremarkable.",
    "Labs were drawn and sent.",
    "Follow up was arranged at discharge.",
    "The family was updated at the bedside.",
    "Medications were continued as written.",
)


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    n_visits: int = 300
    reports_per_visit: tuple[int, int] = (2, 4)
    n_topics: int = 10
    vocab: tuple[ConceptSpec, ...] = DEFAULT_VOCAB
    negation_rate: float = 0.1
    relevance_signal_strength: float = 0.9
    relevant_per_topic: int = 12
    near_miss_per_topic: int = 3
    targets_per_topic: int = 2

    def validate(self) -> None:
        lo, hi = self.reports_per_visit
        if not 1 <= lo <= hi:
            raise DataError(f"bad reports_per_visit range {self.reports_per_visit}")
        if self.n_visits < 1 or self.n_topics < 1:
            raise DataError("n_visits and n_topics must be >= 1")
        if not 0.0 <= self.negation_rate <= 1.0:
            raise DataError(f"negation_rate must be in [0, 1], got {self.negation_rate}")
        if not 0.0 <= self.relevance_signal_strength <= 1.0:
            raise DataError(
                f"relevance_signal_strength must be in [0, 1], got "
                f"{self.relevance_signal_strength}"
            )
        near_miss = self.effective_near_miss()
        if self.relevant_per_topic + near_miss > self.n_visits:
            raise DataError(
                f"infeasible: {self.relevant_per_topic} relevant plus "
                f"{near_miss} near-miss visits demanded, only "
                f"{self.n_visits} visits"
            )
        discriminative = [
            c for c in self.vocab if c.frequency_class == "discriminative"
        ]
        needed = self.targets_per_topic * self.n_topics
        if needed > len(discriminative):
            raise DataError(
                f"infeasible: {needed} target concepts demanded, vocabulary "
                f"has {len(discriminative)} discriminative concepts"
            )
        if self.relevant_per_topic < 1 or self.targets_per_topic < 1:
            raise DataError("relevant_per_topic and targets_per_topic must be >= 1")

    def effective_near_miss(self) -> int:
        # near-miss visits exist only through negated sentences
        return self.near_miss_per_topic if self.negation_rate > 0 else 0


@dataclass
class GeneratedData:
    reports: list[Report]
    topics: list[Topic]
    judgments: JudgmentSet
    lexicon: ConceptLexicon
    targets: dict[str, tuple[str, ...]] = field(default_factory=dict)


def generate(config: GeneratorConfig) -> GeneratedData:
    config.validate()
    rng = random.Random(config.seed)

    commons = [c.name for c in config.vocab if c.frequency_class == "common"]
    discriminative = [
        c.name for c in config.vocab if c.frequency_class == "discriminative"
    ]
    pool = list(discriminative)
    rng.shuffle(pool)

    visit_ids = [f"V{i:05d}" for i in range(1, config.n_visits + 1)]
    topics: list[Topic] = []
    targets: dict[str, tuple[str, ...]] = {}
    planted: dict[str, list[str]] = {}
    near_miss: dict[str, list[str]] = {}
    for t in range(config.n_topics):
        topic_id = f"T{t + 1:03d}"
        chosen = tuple(
            pool[t * config.targets_per_topic : (t + 1) * config.targets_per_topic]
        )
        targets[topic_id] = chosen
        topics.append(
            Topic(topic_id=topic_id, description=f"Patients with {' and '.join(chosen)}.")
        )
        relevant = sorted(rng.sample(visit_ids, config.relevant_per_topic))
        planted[topic_id] = relevant
        remaining = [v for v in visit_ids if v not in set(relevant)]
        near_miss[topic_id] = sorted(
            rng.sample(remaining, config.effective_near_miss())
        )

    # visit -> [(targets, negated?)] assignments
    assignments: dict[str, list[tuple[tuple[str, ...], bool]]] = {
        v: [] for v in visit_ids
    }
    for topic in topics:
        for visit_id in planted[topic.topic_id]:
            assignments[visit_id].append((targets[topic.topic_id], False))
        for visit_id in near_miss[topic.topic_id]:
            assignments[visit_id].append((targets[topic.topic_id], True))

    reports: list[Report] = []
    report_no = 0
    lo, hi = config.reports_per_visit
    for visit_id in visit_ids:
        for _ in range(rng.randint(lo, hi)):
            report_no += 1
            sentences = []
            for _ in range(rng.randint(2, 4)):
                if rng.random() < 0.5:
                    sentences.append(rng.choice(_GENERIC_FILLER))
                else:
                    concept = rng.choice(commons)
                    if rng.random() < config.negation_rate:
                        sentences.append(rng.choice(_NEGATED_TEMPLATES).format(concept))
                    else:
                        sentences.append(rng.choice(_POSITIVE_TEMPLATES).format(concept))
            for concept_names, negated in assignments[visit_id]:
                for concept in concept_names:
                    if rng.random() < config.relevance_signal_strength:
                        templates = (
                            _NEGATED_TEMPLATES if negated else _POSITIVE_TEMPLATES
                        )
                        sentences.append(rng.choice(templates).format(concept))
            rng.shuffle(sentences)
            reports.append(
                Report(
                    report_id=f"R{report_no:06d}",
                    visit_id=visit_id,
                    report_type=rng.choice(REPORT_TYPES),
                    text=" ".join(sentences),
                )
            )

    entries = []
    for topic in topics:
        for visit_id in planted[topic.topic_id]:
            entries.append((topic.topic_id, visit_id, 2))
        for visit_id in near_miss[topic.topic_id]:
            entries.append((topic.topic_id, visit_id, 1 if rng.random() < 0.5 else 0))
    judgments = JudgmentSet.from_entries(entries)

    all_concepts = commons + discriminative
    lexicon = ConceptLexicon.from_terms(
        (name, f"C{i + 1:04d}", name) for i, name in enumerate(all_concepts)
    )
    return GeneratedData(
        reports=reports,
        topics=topics,
        judgments=judgments,
        lexicon=lexicon,
        targets=targets,
    )


def write_generated(data: GeneratedData, out_dir: str | Path) -> dict[str, Path]:
    """Write corpus.jsonl, topics.jsonl, qrels.txt, lexicon.tsv."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "corpus": out / "corpus.jsonl",
        "topics": out / "topics.jsonl",
        "qrels": out / "qrels.txt",
        "lexicon": out / "lexicon.tsv",
    }
    with open(paths["corpus"], "w", encoding="utf-8") as fh:
        write_corpus(data.reports, fh)
    with open(paths["topics"], "w", encoding="utf-8") as fh:
        write_topics(data.topics, fh)
    with open(paths["qrels"], "w", encoding="utf-8") as fh:
        write_qrels(data.judgments, fh)
    with open(paths["lexicon"], "w", encoding="utf-8") as fh:
        write_lexicon(data.lexicon, fh)
    return paths
