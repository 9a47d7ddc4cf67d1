"""Evaluation metric tests.

Hand-computed fixtures plus a randomized cross-check against the
brute-force reference implementations in oracles.py.
"""

from __future__ import annotations

import random
import time

import pytest

from cohortir.corpus import JudgmentSet, RankedList
from cohortir.errors import DataError
from cohortir.metrics import (
    average_precision,
    bpref,
    eval_report_lines,
    evaluate_run,
    evaluate_topic,
    format_eval_table,
    ndcg,
    precision_at_k,
    r_precision,
    reciprocal_rank,
)
from oracles import (
    oracle_average_precision,
    oracle_bpref,
    oracle_ndcg,
    oracle_p_at_k,
    oracle_r_precision,
    oracle_reciprocal_rank,
)


def make_run(ids, topic_id="T1", level="visit"):
    """Ranking with strictly decreasing scores, one per id."""
    items = tuple((vid, float(len(ids) - i)) for i, vid in enumerate(ids))
    return RankedList(topic_id=topic_id, level=level, items=items)


def make_judgments(grades, topic_id="T1"):
    return JudgmentSet.from_entries(
        (topic_id, vid, g) for vid, g in sorted(grades.items())
    )


# ---------------------------------------------------------------------------
# Hand-computed fixtures
# ---------------------------------------------------------------------------


class TestFixtures:
    def test_average_precision_fixture(self):
        # qrels {v1, v3 relevant}, run [v1, v2, v3] -> (1/2)(1 + 2/3)
        j = make_judgments({"v1": 1, "v2": 0, "v3": 1})
        run = make_run(["v1", "v2", "v3"])
        assert average_precision(run, j) == pytest.approx(0.833333, abs=1e-6)

    def test_bpref_fixture(self):
        j = make_judgments({"v1": 1, "v2": 0, "v3": 1})
        run = make_run(["v1", "v2", "v3"])
        assert bpref(run, j) == pytest.approx(0.5, abs=1e-6)

    def test_bpref_skips_unjudged(self):
        # an unjudged visit between v1 and v2 must not change the value
        j = make_judgments({"v1": 1, "v2": 0, "v3": 1})
        run = make_run(["v1", "u9", "v2", "v3"])
        assert bpref(run, j) == pytest.approx(0.5, abs=1e-6)

    def test_ndcg_fixture(self):
        # grades along run [2, 0, 1]: DCG = 3.5, IDCG = 3 + 1/log2(3)
        j = make_judgments({"a": 2, "b": 0, "c": 1})
        run = make_run(["a", "b", "c"])
        assert ndcg(run, j) == pytest.approx(0.963940, abs=1e-6)

    def test_ndcg_ideal_order_is_one(self):
        j = make_judgments({"a": 2, "b": 0, "c": 1})
        run = make_run(["a", "c", "b"])
        assert ndcg(run, j) == pytest.approx(1.0)

    def test_ndcg_prefers_higher_grade_first(self):
        j = make_judgments({"a": 2, "c": 1})
        high_first = ndcg(make_run(["a", "c"]), j)
        low_first = ndcg(make_run(["c", "a"]), j)
        assert high_first > low_first

    def test_precision_fixed_denominator(self):
        # 4 results, 2 relevant, k=10 -> 0.2
        j = make_judgments({"v1": 1, "v2": 0, "v3": 1, "v4": 0})
        run = make_run(["v1", "v2", "v3", "v4"])
        assert precision_at_k(run, j, 10) == pytest.approx(0.2)

    def test_precision_direct_count(self):
        j = make_judgments({"v1": 1, "v2": 0, "v3": 1})
        run = make_run(["v1", "v2", "v3"])
        assert precision_at_k(run, j, 3) == pytest.approx(2 / 3)

    def test_precision_saturation(self):
        j = make_judgments({f"v{i}": 1 for i in range(10)})
        run = make_run([f"v{i}" for i in range(10)])
        assert precision_at_k(run, j, 10) == pytest.approx(1.0)

    def test_r_precision_half(self):
        j = make_judgments({"v1": 1, "v2": 0, "v3": 1})
        run = make_run(["v1", "v2", "v3"])
        assert r_precision(run, j) == pytest.approx(0.5)

    def test_r_precision_truncated_run(self):
        # R = 3 but only one relevant retrieved -> 1/3
        j = make_judgments({"v1": 1, "v2": 1, "v3": 1})
        run = make_run(["v1", "x"])
        assert r_precision(run, j) == pytest.approx(1 / 3)

    def test_ap_perfect(self):
        j = make_judgments({"v1": 1, "v2": 1, "v3": 0})
        run = make_run(["v1", "v2", "v3"])
        assert average_precision(run, j) == pytest.approx(1.0)

    def test_ap_no_relevant_retrieved(self):
        j = make_judgments({"v1": 1, "v2": 0})
        run = make_run(["v2", "x"])
        assert average_precision(run, j) == pytest.approx(0.0)

    def test_bpref_no_judged_nonrelevant(self):
        j = make_judgments({"v1": 1, "v2": 1})
        run = make_run(["v1", "v2"])
        assert bpref(run, j) == pytest.approx(1.0)

    def test_reciprocal_rank_cases(self):
        j = make_judgments({"v1": 1, "v2": 0})
        assert reciprocal_rank(make_run(["v1", "v2"]), j) == pytest.approx(1.0)
        assert reciprocal_rank(make_run(["a", "b", "c", "v1"]), j) == pytest.approx(0.25)
        assert reciprocal_rank(make_run(["a", "b"]), j) == pytest.approx(0.0)

    def test_empty_run_scores_zero(self):
        j = make_judgments({"v1": 1, "v2": 0})
        run = RankedList(topic_id="T1", level="visit", items=())
        assert precision_at_k(run, j, 10) == 0.0
        assert average_precision(run, j) == 0.0
        assert bpref(run, j) == 0.0
        assert ndcg(run, j) == 0.0
        assert reciprocal_rank(run, j) == 0.0

    def test_no_relevant_raises(self):
        j = make_judgments({"v1": 0, "v2": 0})
        run = make_run(["v1", "v2"])
        for metric in (average_precision, r_precision, bpref, ndcg):
            with pytest.raises(DataError):
                metric(run, j)


# ---------------------------------------------------------------------------
# Randomized cross-check against the brute-force oracle
# ---------------------------------------------------------------------------


def random_instance(rng):
    """One topic's qrels + ranking, guaranteed at least one relevant visit."""
    n_visits = rng.randint(2, 50)
    visits = [f"V{i:03d}" for i in range(n_visits)]
    judged = rng.sample(visits, rng.randint(1, n_visits))
    grades = {v: rng.choice([0, 0, 1, 2]) for v in judged}
    grades[rng.choice(judged)] = rng.choice([1, 2])  # force R >= 1
    run_len = rng.randint(0, n_visits)
    ranking = rng.sample(visits, run_len)
    return ranking, grades


def test_random_instances_match_oracle():
    rng = random.Random(20120604)
    start = time.monotonic()
    checked = 0
    for _ in range(150):
        ranking, grades = random_instance(rng)
        k = rng.choice([1, 5, 10])
        run = make_run(ranking)
        j = make_judgments(grades)
        assert precision_at_k(run, j, k) == pytest.approx(
            oracle_p_at_k(ranking, grades, k), abs=1e-9
        )
        assert r_precision(run, j) == pytest.approx(
            oracle_r_precision(ranking, grades), abs=1e-9
        )
        assert average_precision(run, j) == pytest.approx(
            oracle_average_precision(ranking, grades), abs=1e-9
        )
        assert bpref(run, j) == pytest.approx(
            oracle_bpref(ranking, grades), abs=1e-9
        )
        assert ndcg(run, j) == pytest.approx(
            oracle_ndcg(ranking, grades), abs=1e-9
        )
        assert reciprocal_rank(run, j) == pytest.approx(
            oracle_reciprocal_rank(ranking, grades), abs=1e-9
        )
        checked += 1
    assert checked >= 100
    assert time.monotonic() - start < 5.0


def test_multi_topic_random_runs_match_oracle():
    rng = random.Random(97)
    for _ in range(30):
        n_topics = rng.randint(1, 5)
        runs, per_topic = [], {}
        entries = []
        for t in range(n_topics):
            topic_id = f"T{t + 1}"
            ranking, grades = random_instance(rng)
            runs.append(make_run(ranking, topic_id=topic_id))
            per_topic[topic_id] = (ranking, grades)
            entries.extend((topic_id, v, g) for v, g in sorted(grades.items()))
        j = JudgmentSet.from_entries(entries)
        report = evaluate_run(runs, j, ks=(5,))
        expected_map = sum(
            oracle_average_precision(r, g) for r, g in per_topic.values()
        ) / n_topics
        assert report.macro["map"] == pytest.approx(expected_map, abs=1e-9)


# ---------------------------------------------------------------------------
# evaluate_run semantics
# ---------------------------------------------------------------------------


class TestEvaluateRun:
    def test_singleton_averages_equal_topic(self):
        j = make_judgments({"v1": 1, "v2": 0, "v3": 1})
        run = make_run(["v1", "v2", "v3"])
        report = evaluate_run([run], j)
        ev = report.topics[0]
        assert report.macro["map"] == pytest.approx(ev.average_precision)
        assert report.macro["ndcg"] == pytest.approx(ev.ndcg)

    def test_two_topic_mean(self):
        entries = [("T1", "a", 1), ("T2", "b", 1)]
        j = JudgmentSet.from_entries(entries)
        runs = [
            make_run(["a"], topic_id="T1"),       # AP 1.0
            make_run(["x", "y"], topic_id="T2"),  # AP 0.0
        ]
        report = evaluate_run(runs, j)
        assert report.macro["map"] == pytest.approx(0.5)

    def test_missing_topic_scores_zero_and_counts(self):
        entries = [("T1", "a", 1), ("T2", "b", 1)]
        j = JudgmentSet.from_entries(entries)
        report = evaluate_run([make_run(["a"], topic_id="T1")], j)
        assert len(report.topics) == 2
        t2 = next(t for t in report.topics if t.topic_id == "T2")
        assert t2.average_precision == 0.0
        assert report.macro["map"] == pytest.approx(0.5)

    def test_topic_without_relevant_is_flagged_and_excluded(self):
        entries = [("T1", "a", 1), ("T2", "b", 0)]
        j = JudgmentSet.from_entries(entries)
        runs = [make_run(["a"], topic_id="T1"), make_run(["b"], topic_id="T2")]
        report = evaluate_run(runs, j)
        assert report.flagged == ("T2",)
        assert [t.topic_id for t in report.topics] == ["T1"]
        assert report.macro["map"] == pytest.approx(1.0)

    def test_duplicate_topic_rejected(self):
        j = make_judgments({"a": 1})
        runs = [make_run(["a"]), make_run(["b"])]
        with pytest.raises(DataError):
            evaluate_run(runs, j)

    def test_run_only_topic_ignored(self):
        j = JudgmentSet.from_entries([("T1", "a", 1)])
        runs = [make_run(["a"], topic_id="T1"), make_run(["z"], topic_id="T9")]
        report = evaluate_run(runs, j)
        assert [t.topic_id for t in report.topics] == ["T1"]

    def test_macro_uses_unrounded_values(self):
        # averaging rounded per-topic records would drift past 1e-9
        rng = random.Random(5)
        entries, runs = [], []
        for t in range(5):
            topic_id = f"T{t}"
            ranking, grades = random_instance(rng)
            entries.extend((topic_id, v, g) for v, g in sorted(grades.items()))
            runs.append(make_run(ranking, topic_id=topic_id))
        j = JudgmentSet.from_entries(entries)
        report = evaluate_run(runs, j, ks=(5,))
        raw_mean = sum(t.bpref for t in report.topics) / len(report.topics)
        assert report.macro["bpref"] == pytest.approx(raw_mean, abs=1e-15)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


class TestRendering:
    def report(self):
        entries = [("T1", "a", 1), ("T1", "b", 0), ("T2", "c", 2), ("T3", "d", 0)]
        j = JudgmentSet.from_entries(entries)
        runs = [make_run(["a", "b"], topic_id="T1"), make_run(["c"], topic_id="T2")]
        return evaluate_run(runs, j)

    def test_table_shape(self):
        table = format_eval_table(self.report())
        lines = table.splitlines()
        assert lines[0].split() == [
            "topic", "map", "rprec", "bpref", "p10", "p1000", "ndcg", "mrr",
        ]
        assert lines[1].startswith("T1")
        assert lines[3].startswith("all")
        assert "T3" in lines[-1] and "no relevant" in lines[-1]

    def test_jsonl_lines(self):
        import json

        lines = eval_report_lines(self.report())
        records = [json.loads(line) for line in lines]
        assert [r["topic"] for r in records] == ["T1", "T2", "all"]
        assert records[0]["map"] == 1.0
        assert set(records[-1]) == {
            "topic", "map", "rprec", "bpref", "p10", "p1000", "ndcg", "mrr",
        }

    def test_topic_record_rounding(self):
        j = make_judgments({"v1": 1, "v2": 0, "v3": 1})
        ev = evaluate_topic(make_run(["v1", "v2", "v3"]), j)
        assert ev.as_record()["map"] == 0.833333
