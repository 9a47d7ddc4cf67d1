"""Synthetic corpus generator tests: determinism, feasibility, structure."""

from __future__ import annotations

import pytest

from cohortir.errors import DataError
from cohortir.summarize import detect_negated_sentences
from cohortir.synth import (
    COMMON_CONCEPTS,
    DISCRIMINATIVE_CONCEPTS,
    GeneratorConfig,
    generate,
    write_generated,
)
from cohortir.textproc import analyze, split_sentences, stem, tokenize

SMALL = GeneratorConfig(
    seed=11, n_visits=40, reports_per_visit=(1, 3), n_topics=4,
    negation_rate=0.2, relevance_signal_strength=1.0,
    relevant_per_topic=5, near_miss_per_topic=2, targets_per_topic=2,
)


class TestDeterminism:
    def test_same_seed_same_data(self):
        a, b = generate(SMALL), generate(SMALL)
        assert a.reports == b.reports
        assert a.topics == b.topics
        assert a.judgments == b.judgments
        assert a.targets == b.targets

    def test_same_seed_byte_identical_files(self, tmp_path):
        write_generated(generate(SMALL), tmp_path / "a")
        write_generated(generate(SMALL), tmp_path / "b")
        for name in ("corpus.jsonl", "topics.jsonl", "qrels.txt", "lexicon.tsv"):
            assert (tmp_path / "a" / name).read_bytes() == (
                tmp_path / "b" / name
            ).read_bytes()

    def test_different_seed_differs(self):
        from dataclasses import replace

        a = generate(SMALL)
        b = generate(replace(SMALL, seed=12))
        assert a.reports != b.reports


class TestValidation:
    def test_bad_reports_per_visit(self):
        with pytest.raises(DataError):
            GeneratorConfig(reports_per_visit=(3, 2)).validate()
        with pytest.raises(DataError):
            GeneratorConfig(reports_per_visit=(0, 2)).validate()

    def test_bad_rates(self):
        with pytest.raises(DataError):
            GeneratorConfig(negation_rate=1.5).validate()
        with pytest.raises(DataError):
            GeneratorConfig(relevance_signal_strength=-0.1).validate()

    def test_too_many_relevant_visits_infeasible(self):
        config = GeneratorConfig(
            n_visits=10, relevant_per_topic=9, near_miss_per_topic=3
        )
        with pytest.raises(DataError, match="infeasible"):
            config.validate()

    def test_too_many_targets_infeasible(self):
        config = GeneratorConfig(n_topics=30, targets_per_topic=2)
        with pytest.raises(DataError, match="infeasible"):
            config.validate()

    def test_near_miss_needs_negation(self):
        # with negation off, near-miss visits cannot exist, so the same
        # relevant count that was infeasible above becomes feasible
        config = GeneratorConfig(
            n_visits=10, relevant_per_topic=9, near_miss_per_topic=3,
            negation_rate=0.0,
        )
        config.validate()
        assert config.effective_near_miss() == 0


class TestNegationRateZero:
    def test_no_negated_sentences_anywhere(self):
        from dataclasses import replace

        data = generate(replace(SMALL, negation_rate=0.0))
        for report in data.reports:
            sents = [s for s, _ in split_sentences(report.text)]
            assert detect_negated_sentences(sents) == set()

    def test_only_grade_two_judgments(self):
        from dataclasses import replace

        data = generate(replace(SMALL, negation_rate=0.0))
        grades = {g for _, _, g in data.judgments.entries()}
        assert grades == {2}


class TestStructure:
    def data(self):
        return generate(SMALL)

    def test_counts(self):
        data = self.data()
        visits = {r.visit_id for r in data.reports}
        assert len(visits) == SMALL.n_visits
        assert len(data.topics) == SMALL.n_topics
        per_visit: dict[str, int] = {}
        for r in data.reports:
            per_visit[r.visit_id] = per_visit.get(r.visit_id, 0) + 1
        lo, hi = SMALL.reports_per_visit
        assert all(lo <= n <= hi for n in per_visit.values())

    def test_topic_descriptions_name_targets(self):
        data = self.data()
        for topic in data.topics:
            a, b = data.targets[topic.topic_id]
            assert topic.description == f"Patients with {a} and {b}."

    def test_targets_disjoint_across_topics(self):
        data = self.data()
        seen: set[str] = set()
        for names in data.targets.values():
            for name in names:
                assert name not in seen
                seen.add(name)

    def test_planted_visits_graded_two(self):
        data = self.data()
        for topic in data.topics:
            graded_two = {
                v for v, g in data.judgments.judged(topic.topic_id).items()
                if g == 2
            }
            assert len(graded_two) == SMALL.relevant_per_topic

    def test_full_signal_plants_every_target_mention(self):
        data = self.data()
        by_visit: dict[str, list] = {}
        for r in data.reports:
            by_visit.setdefault(r.visit_id, []).append(r)
        for topic in data.topics:
            target_stems = {
                s for name in data.targets[topic.topic_id] for s in analyze(name)
            }
            for visit_id, grade in data.judgments.judged(topic.topic_id).items():
                if grade != 2:
                    continue
                for report in by_visit[visit_id]:
                    terms = set(analyze(report.text))
                    assert target_stems <= terms, (topic.topic_id, report.report_id)

    def test_target_tokens_only_in_assigned_visits(self):
        data = self.data()
        for topic in data.topics:
            judged = data.judgments.judged(topic.topic_id)
            allowed = set(judged)  # planted (2) and near-miss (1 or 0)
            target_stems = {
                s for name in data.targets[topic.topic_id] for s in analyze(name)
            }
            for report in data.reports:
                if report.visit_id in allowed:
                    continue
                assert not target_stems & set(analyze(report.text)), (
                    topic.topic_id, report.report_id,
                )

    def test_near_miss_mentions_are_negated(self):
        data = self.data()
        planted = {
            (t, v)
            for t in data.judgments.topics()
            for v, g in data.judgments.judged(t).items()
            if g == 2
        }
        checked = 0
        for topic in data.topics:
            target_stems = {
                s for name in data.targets[topic.topic_id] for s in analyze(name)
            }
            for visit_id in data.judgments.judged(topic.topic_id):
                if (topic.topic_id, visit_id) in planted:
                    continue
                for report in data.reports:
                    if report.visit_id != visit_id:
                        continue
                    sents = split_sentences(report.text)
                    negated = detect_negated_sentences(s for s, _ in sents)
                    for idx, (sent, _) in enumerate(sents):
                        if target_stems & set(analyze(sent)):
                            assert idx in negated, (report.report_id, sent)
                            checked += 1
        assert checked > 0

    def test_lexicon_covers_vocabulary(self):
        data = self.data()
        assert len(data.lexicon) == len(COMMON_CONCEPTS) + len(
            DISCRIMINATIVE_CONCEPTS
        )

    def test_report_ids_unique_and_sequential(self):
        data = self.data()
        ids = [r.report_id for r in data.reports]
        assert ids == [f"R{i + 1:06d}" for i in range(len(ids))]


class TestVocabulary:
    def test_stems_idempotent(self):
        # every indexed vocabulary token must have a stable stem
        for spec in COMMON_CONCEPTS + DISCRIMINATIVE_CONCEPTS:
            for tok in tokenize(spec.name).normalized():
                assert stem(stem(tok)) == stem(tok), tok

    def test_discriminative_tokens_unique(self):
        seen: set[str] = set()
        for spec in DISCRIMINATIVE_CONCEPTS:
            for tok in tokenize(spec.name).normalized():
                assert tok not in seen
                seen.add(tok)

    def test_no_overlap_between_classes(self):
        common = {
            t for s in COMMON_CONCEPTS for t in tokenize(s.name).normalized()
        }
        disc = {
            t
            for s in DISCRIMINATIVE_CONCEPTS
            for t in tokenize(s.name).normalized()
        }
        assert not common & disc
