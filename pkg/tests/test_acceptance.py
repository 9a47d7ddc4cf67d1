"""Acceptance suite: one top-level check per shipping requirement.

Each test prints exactly one PASS or FAIL line on the real stdout so the
outcome is visible even in captured pytest runs. The whole suite uses only
in-process scorers (baseline, oracle); no external service is needed.
"""

from __future__ import annotations

import io
import math
import random
import time
from contextlib import contextmanager

import pytest

from cohortir.aggregate import map_to_visits
from cohortir.cli import main as cli_main
from cohortir.corpus import (
    JudgmentSet,
    RankedList,
    Report,
    Topic,
    parse_qrels,
    parse_run,
)
from cohortir.index import Bm25Params, build_index, retrieve_top_n
from cohortir.metrics import evaluate_run, evaluate_topic
from cohortir.rerank import (
    SamplingPolicy,
    sample_training_pairs,
    write_training_pairs,
)
from cohortir.summarize import ReportSummary, summarize_report
from cohortir.textproc import stem

from oracles import (
    oracle_average_precision,
    oracle_bpref,
    oracle_ndcg,
    oracle_p_at_k,
    oracle_r_precision,
    oracle_reciprocal_rank,
)
from test_index import VOCAB, mini_corpus, oracle_ranking
from test_summarizer import EXCERPT_DF, excerpt_lexicon, excerpt_report
from test_textproc import PORTER_PAIRS


@pytest.fixture
def criterion(capsys):
    @contextmanager
    def check(label):
        try:
            yield
        except BaseException:
            with capsys.disabled():
                print(f"ACCEPTANCE FAIL: {label}", flush=True)
            raise
        with capsys.disabled():
            print(f"ACCEPTANCE PASS: {label}", flush=True)

    return check


def read_lines(path):
    with open(path, "r", encoding="utf-8") as fh:
        return fh.readlines()


# ---------------------------------------------------------------------------
# 1-2: evaluation metrics
# ---------------------------------------------------------------------------


def random_topic(rng, topic_id):
    n_visits = rng.randint(2, 50)
    visits = [f"{topic_id}V{i:03d}" for i in range(n_visits)]
    judged = rng.sample(visits, rng.randint(1, n_visits))
    grades = {v: rng.choice([0, 0, 1, 2]) for v in judged}
    grades[rng.choice(judged)] = rng.choice([1, 2])
    ranking = rng.sample(visits, rng.randint(0, n_visits))
    items = tuple((v, float(len(ranking) - i)) for i, v in enumerate(ranking))
    run = RankedList(topic_id=topic_id, level="visit", items=items)
    return run, ranking, grades


def test_01_metric_oracle_suite(criterion):
    with criterion(
        "all metrics match a brute-force oracle on 110 random multi-topic "
        "instances within 1e-9 in under 5 s"
    ):
        rng = random.Random(1251)
        start = time.monotonic()
        instances = 0
        for _ in range(110):
            k = rng.choice([1, 5, 10])
            runs, oracle_aps, entries = [], [], []
            for t in range(rng.randint(1, 5)):
                run, ranking, grades = random_topic(rng, f"T{t}")
                runs.append(run)
                entries.extend(
                    (run.topic_id, v, g) for v, g in sorted(grades.items())
                )
                judgments = JudgmentSet.from_entries(
                    (run.topic_id, v, g) for v, g in sorted(grades.items())
                )
                ev = evaluate_topic(run, judgments, ks=(k,))
                expected = {
                    "map": oracle_average_precision(ranking, grades),
                    "rprec": oracle_r_precision(ranking, grades),
                    "bpref": oracle_bpref(ranking, grades),
                    f"p{k}": oracle_p_at_k(ranking, grades, k),
                    "ndcg": oracle_ndcg(ranking, grades),
                    "mrr": oracle_reciprocal_rank(ranking, grades),
                }
                got = {
                    "map": ev.average_precision,
                    "rprec": ev.r_prec,
                    "bpref": ev.bpref,
                    f"p{k}": ev.p_at_k[k],
                    "ndcg": ev.ndcg,
                    "mrr": ev.reciprocal_rank,
                }
                for name in expected:
                    assert got[name] == pytest.approx(
                        expected[name], abs=1e-9
                    ), name
                oracle_aps.append(expected["map"])
            report = evaluate_run(runs, JudgmentSet.from_entries(entries), ks=(k,))
            assert report.macro["map"] == pytest.approx(
                sum(oracle_aps) / len(oracle_aps), abs=1e-9
            )
            instances += 1
        elapsed = time.monotonic() - start
        assert instances >= 100
        assert elapsed < 5.0, f"metric oracle suite took {elapsed:.2f}s"


def test_02_metric_hand_fixtures(criterion):
    with criterion(
        "hand-computed fixtures hold: AP 0.833333, bpref 0.5, NDCG 0.963940 "
        "within 1e-6, re-derived by the independent oracle"
    ):
        judgments = JudgmentSet.from_entries(
            [("T1", "v1", 1), ("T1", "v2", 0), ("T1", "v3", 1)]
        )
        run = RankedList(
            topic_id="T1", level="visit",
            items=(("v1", 3.0), ("v2", 2.0), ("v3", 1.0)),
        )
        ev = evaluate_topic(run, judgments, ks=(10,))
        grades = {"v1": 1, "v2": 0, "v3": 1}
        assert oracle_average_precision(["v1", "v2", "v3"], grades) == 0.8333333333333333
        assert oracle_bpref(["v1", "v2", "v3"], grades) == 0.5
        assert ev.average_precision == pytest.approx(0.833333, abs=1e-6)
        assert ev.bpref == pytest.approx(0.5, abs=1e-6)

        graded = JudgmentSet.from_entries(
            [("T1", "v1", 2), ("T1", "v2", 0), ("T1", "v3", 1)]
        )
        ndcg_grades = {"v1": 2, "v2": 0, "v3": 1}
        want = 3.5 / (3.0 + 1.0 / math.log2(3.0))
        assert oracle_ndcg(["v1", "v2", "v3"], ndcg_grades) == pytest.approx(
            want, abs=1e-12
        )
        ev = evaluate_topic(run, graded, ks=(10,))
        assert ev.ndcg == pytest.approx(0.963940, abs=1e-6)


# ---------------------------------------------------------------------------
# 3-4: candidate generation
# ---------------------------------------------------------------------------


def test_03_bm25_oracle_suite(criterion):
    with criterion(
        "BM25 retrieval order equals exhaustive scoring with the id tie "
        "rule on 50 random mini-corpora; single-term score ln(4/3)"
    ):
        params = Bm25Params()
        rng = random.Random(1604)
        for round_no in range(50):
            n_docs = rng.randint(1, 12)
            docs = {
                f"R{i:02d}": [rng.choice(VOCAB) for _ in range(rng.randint(1, 15))]
                for i in range(n_docs)
            }
            terms = list(dict.fromkeys(rng.sample(VOCAB, rng.randint(1, 4))))
            n = rng.choice([1, 3, 2000])
            index = build_index(mini_corpus(docs))
            run = retrieve_top_n(index, params, terms, n, topic_id="T1")
            expected = oracle_ranking(docs, terms, params)[:n]
            assert run.ids() == [d for d, _ in expected], f"round {round_no}"

        single = build_index(
            [Report(report_id="R1", visit_id="V1",
                    report_type="Progress Note", text="Dental caries noted.")]
        )
        run = retrieve_top_n(single, params, ["cari"], 10, topic_id="T1")
        assert math.log(4.0 / 3.0) == pytest.approx(0.287682, abs=1e-6)
        assert run.items[0][1] == pytest.approx(0.287682, abs=1e-6)


def test_04_stemmer_fixtures(criterion):
    with criterion(
        f"Porter stemmer reproduces the dehydration family, caries->cari, "
        f"and {len(PORTER_PAIRS)} hand-traced pairs exactly"
    ):
        assert stem("dehydrate") == "dehydr"
        assert stem("dehydrated") == "dehydr"
        assert stem("dehydration") == "dehydr"
        assert stem("caries") == "cari"
        assert len(PORTER_PAIRS) >= 30
        for word, expected in PORTER_PAIRS:
            assert stem(word) == expected, word


# ---------------------------------------------------------------------------
# 5: concept summarization
# ---------------------------------------------------------------------------


def test_05_summary_excerpt_fixture(criterion):
    with criterion(
        "emergency-report excerpt summarizes to exactly {report type, ears, "
        "impacted wisdom tooth, dental, caries, adenopathy}"
    ):
        summary = summarize_report(excerpt_report(), excerpt_lexicon(), EXCERPT_DF)
        assert summary.concepts[0] == "emergency department report"
        assert set(summary.concepts) == {
            "emergency department report",
            "ears",
            "impacted wisdom tooth",
            "dental",
            "caries",
            "adenopathy",
        }
        # negated findings and corpus-frequent generics never slip through
        assert not {"pharynx", "trismus"} & set(summary.concepts)
        generics = {"blood pressure", "pulse oximetry", "air", "skin", "neck"}
        assert not generics & set(summary.concepts)


# ---------------------------------------------------------------------------
# 6: training-pair sampling
# ---------------------------------------------------------------------------


def sampling_world(rng):
    n_pos = rng.randint(0, 300)
    n_neg = rng.randint(0, 1800)
    ids = [f"P{i:03d}" for i in range(n_pos)] + [f"N{i:04d}" for i in range(n_neg)]
    rng.shuffle(ids)
    labels = {("T1", rid): int(rid.startswith("P")) for rid in ids}
    items = tuple((rid, float(len(ids) - i)) for i, rid in enumerate(ids))
    run = RankedList(topic_id="T1", level="report", items=items)
    summaries = {
        rid: ReportSummary(report_id=rid, concepts=("progress note", rid.lower()))
        for rid in ids
    }
    return run, labels, summaries


def test_06_sampling_invariants(criterion):
    with criterion(
        "pair sampling holds negatives <= 10x positives and totals <= 1650 "
        "over 200 random configurations, byte-identically per seed"
    ):
        topic = {"T1": Topic(topic_id="T1", description="Patients with anything.")}
        replicates = []
        for replicate in range(2):
            world_rng = random.Random(9)
            buffer = io.StringIO()
            for config_no in range(200):
                run, labels, summaries = sampling_world(world_rng)
                policy = SamplingPolicy(random_seed=config_no % 7)
                pairs = sample_training_pairs(
                    [run], labels, policy, topic, summaries
                )
                n_pos = sum(1 for p in pairs if p.label == 1)
                n_neg = sum(1 for p in pairs if p.label == 0)
                assert n_pos <= 150, config_no
                assert n_neg <= 10 * n_pos, config_no
                assert n_pos + n_neg <= 1650, config_no
                assert len({p.pair_id for p in pairs}) == len(pairs)
                write_training_pairs(pairs, buffer)
            replicates.append(buffer.getvalue().encode("utf-8"))
        assert replicates[0] == replicates[1]


# ---------------------------------------------------------------------------
# 7 + 9: end-to-end synthetic pipeline
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    root = tmp_path_factory.mktemp("acceptance")
    data = root / "data"
    start = time.monotonic()
    assert cli_main([
        "gen-corpus", "--out-dir", str(data), "--seed", "7",
        "--n-visits", "300", "--reports-per-visit", "2:4", "--n-topics", "10",
        "--signal", "1.0", "--negation-rate", "0.2",
    ]) == 0
    common = [
        "run-all", "--corpus", str(data / "corpus.jsonl"),
        "--topics", str(data / "topics.jsonl"),
        "--qrels", str(data / "qrels.txt"),
        "--lexicon", str(data / "lexicon.tsv"),
    ]
    oracle_dir = root / "oracle"
    baseline_dir = root / "baseline"
    assert cli_main(common + ["--out-dir", str(oracle_dir),
                              "--scorer", "oracle"]) == 0
    assert cli_main(common + ["--out-dir", str(baseline_dir),
                              "--scorer", "baseline"]) == 0
    elapsed = time.monotonic() - start
    return {
        "root": root, "qrels": data / "qrels.txt", "common": common,
        "oracle": oracle_dir, "baseline": baseline_dir, "elapsed": elapsed,
    }


def macro_map(run_path, qrels_path):
    runs = parse_run(read_lines(run_path), level="visit")
    judgments = parse_qrels(read_lines(qrels_path))
    return evaluate_run(runs, judgments).macro["map"]


def test_07_end_to_end_pipeline(criterion, pipeline):
    with criterion(
        "synthetic end-to-end run: oracle scorer reaches MAP 1.0, baseline "
        "scorer never loses to plain BM25, all in under 60 s"
    ):
        oracle = macro_map(pipeline["oracle"] / "reranked_visits.run",
                           pipeline["qrels"])
        bm25 = macro_map(pipeline["baseline"] / "bm25_visits.run",
                         pipeline["qrels"])
        baseline = macro_map(pipeline["baseline"] / "reranked_visits.run",
                             pipeline["qrels"])
        assert oracle == pytest.approx(1.0, abs=1e-9)
        assert baseline >= bm25
        assert pipeline["elapsed"] < 60.0, f"pipeline took {pipeline['elapsed']:.1f}s"


# ---------------------------------------------------------------------------
# 8: report-to-visit aggregation
# ---------------------------------------------------------------------------


def test_08_visit_mapping_properties(criterion):
    with criterion(
        "visit mapping keeps ids unique, carries each visit's best report "
        "score, and respects the length cap on 100 random rankings"
    ):
        rng = random.Random(812)
        for _ in range(100):
            n_visits = rng.randint(1, 20)
            visit_map, rid = {}, 0
            for v in range(n_visits):
                for _ in range(rng.randint(1, 4)):
                    visit_map[f"R{rid:03d}"] = f"V{v:02d}"
                    rid += 1
            retrieved = rng.sample(sorted(visit_map), rng.randint(1, rid))
            score = 100.0
            items = []
            for report_id in retrieved:
                items.append((report_id, score))
                if rng.random() < 0.7:
                    score -= rng.random()
            run = RankedList(topic_id="T1", level="report", items=tuple(items))
            m = rng.randint(1, 25)
            out = map_to_visits(run, visit_map, m)

            ids = out.ids()
            assert len(ids) == len(set(ids))
            distinct = {visit_map[r] for r in retrieved}
            assert len(ids) == min(m, len(distinct))
            best = {}
            for report_id, s in items:
                visit = visit_map[report_id]
                best[visit] = max(best.get(visit, float("-inf")), s)
            for visit_id, s in out.items:
                assert s == best[visit_id]


def test_09_pipeline_determinism(criterion, pipeline):
    with criterion(
        "running the full pipeline twice with one config yields "
        "byte-identical run files and evaluation reports"
    ):
        repeat = pipeline["root"] / "baseline_repeat"
        assert cli_main(pipeline["common"] + ["--out-dir", str(repeat),
                                              "--scorer", "baseline"]) == 0
        artifacts = [
            "bm25_reports.run", "reranked_reports.run",
            "bm25_visits.run", "reranked_visits.run",
            "eval_bm25.txt", "eval_bm25.jsonl",
            "eval_reranked.txt", "eval_reranked.jsonl",
        ]
        for name in artifacts:
            first = (pipeline["baseline"] / name).read_bytes()
            second = (repeat / name).read_bytes()
            assert first == second, name
