"""Command-line interface.

Subcommands: index, search, summarize, make-pairs, rerank, map-visits,
eval, gen-corpus, run-all. Exit codes: 0 success, 1 usage error, 2 data
error, 3 scorer transport/protocol error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .aggregate import map_to_visits
from .config import PipelineConfig, build_config, parse_config_file
from .corpus import (
    RankedList,
    parse_corpus,
    parse_qrels,
    parse_run,
    parse_topics,
    runs_by_topic,
    topics_by_id,
    write_run,
)
from .errors import (
    CohortIrError,
    ConfigError,
    DataError,
    ParseError,
    ScorerError,
)
from .index import (
    Bm25Params,
    build_index,
    build_or_query,
    load_index,
    retrieve_top_n,
    save_index,
)
from .metrics import eval_report_lines, evaluate_run, format_eval_table
from .rerank import (
    SamplingPolicy,
    ScorerEndpoint,
    propagate_labels,
    rerank,
    sample_training_pairs,
    score_pairs,
    split_topics,
    write_training_pairs,
)
from .summarize import (
    DEFAULT_NEGATION_TRIGGERS,
    compute_concept_df,
    parse_lexicon,
    parse_summaries,
    summarize_report,
    write_summaries,
)
from .synth import GeneratorConfig, generate, write_generated
from .textproc import DEFAULT_ABBREVIATIONS, DEFAULT_STOPWORDS, load_wordlist


def _require_file(path: str, flag: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"{flag}: file not found: {path}")
    return p


def _read_lines(path: Path):
    with open(path, "r", encoding="utf-8") as fh:
        yield from fh


def _load_config(args: argparse.Namespace, **overrides) -> PipelineConfig:
    file_values = None
    if getattr(args, "config", None):
        file_values = parse_config_file(_require_file(args.config, "--config"))
    return build_config(file_values, overrides)


def _stoplist(args: argparse.Namespace) -> frozenset[str]:
    if getattr(args, "stoplist", None):
        return load_wordlist(_require_file(args.stoplist, "--stoplist"))
    return DEFAULT_STOPWORDS


def _triggers(args: argparse.Namespace):
    if getattr(args, "triggers", None):
        return tuple(sorted(load_wordlist(_require_file(args.triggers, "--triggers"))))
    return DEFAULT_NEGATION_TRIGGERS


def _abbreviations(args: argparse.Namespace) -> frozenset[str]:
    if getattr(args, "abbreviations", None):
        return load_wordlist(_require_file(args.abbreviations, "--abbreviations"))
    return DEFAULT_ABBREVIATIONS


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_index(args: argparse.Namespace) -> int:
    corpus = parse_corpus(_read_lines(_require_file(args.corpus, "--corpus")))
    index = build_index(corpus, _stoplist(args))
    save_index(index, args.out)
    print(f"indexed {index.doc_count} reports -> {args.out}")
    return 0


def cmd_search(args: argparse.Namespace) -> int:
    cfg = _load_config(args, n_candidates=args.n, k1=args.k1, b=args.b,
                       run_tag=args.run_tag)
    index = load_index(_require_file(args.index, "--index"))
    topics = parse_topics(_read_lines(_require_file(args.topics, "--topics")))
    stoplist = _stoplist(args)
    params = Bm25Params(k1=cfg.k1, b=cfg.b)
    runs = []
    for topic in topics:
        terms = build_or_query(topic, stoplist)
        runs.append(
            retrieve_top_n(
                index, params, terms, cfg.n_candidates,
                topic_id=topic.topic_id, run_tag=cfg.run_tag,
            )
        )
    with open(args.out, "w", encoding="utf-8") as fh:
        write_run(runs, fh)
    print(f"searched {len(runs)} topics -> {args.out}")
    return 0


def _df_threshold(cfg: PipelineConfig, doc_count: int) -> int:
    if cfg.df_threshold_fraction is not None:
        return int(cfg.df_threshold_fraction * doc_count)
    return cfg.df_threshold


def cmd_summarize(args: argparse.Namespace) -> int:
    cfg = _load_config(
        args,
        df_threshold=args.df_threshold,
        df_threshold_fraction=args.df_threshold_fraction,
    )
    corpus = parse_corpus(_read_lines(_require_file(args.corpus, "--corpus")))
    lexicon = parse_lexicon(_read_lines(_require_file(args.lexicon, "--lexicon")))
    triggers = _triggers(args)
    abbreviations = _abbreviations(args)
    concept_df = compute_concept_df(corpus, lexicon, triggers, abbreviations)
    threshold = _df_threshold(cfg, len(corpus))
    summaries = [
        summarize_report(
            report, lexicon, concept_df,
            triggers=triggers, df_threshold=threshold,
            abbreviations=abbreviations,
        )
        for report in corpus
    ]
    with open(args.out, "w", encoding="utf-8") as fh:
        write_summaries(summaries, fh)
    if args.df_out:
        with open(args.df_out, "w", encoding="utf-8") as fh:
            json.dump(concept_df, fh, sort_keys=True, indent=0)
            fh.write("\n")
    print(
        f"summarized {len(summaries)} reports (df threshold {threshold}) "
        f"-> {args.out}"
    )
    return 0


def cmd_make_pairs(args: argparse.Namespace) -> int:
    cfg = _load_config(
        args,
        negative_ratio=args.negative_ratio,
        max_pairs_per_topic=args.max_pairs,
        reference_positive_count=args.ref_positives,
        seed=args.seed,
        split_fraction=args.split_fraction,
    )
    corpus = parse_corpus(_read_lines(_require_file(args.corpus, "--corpus")))
    judgments = parse_qrels(_read_lines(_require_file(args.qrels, "--qrels")))
    topics = parse_topics(_read_lines(_require_file(args.topics, "--topics")))
    summaries = parse_summaries(
        _read_lines(_require_file(args.summaries, "--summaries"))
    )
    candidates = parse_run(
        _read_lines(_require_file(args.candidates, "--candidates")), level="report"
    )
    if args.split != "all":
        train, test = split_topics(topics, cfg.split_fraction, cfg.seed)
        chosen = {t.topic_id for t in (train if args.split == "train" else test)}
        candidates = [run for run in candidates if run.topic_id in chosen]
    labels = propagate_labels(judgments, corpus)
    policy = SamplingPolicy(
        negative_ratio=cfg.negative_ratio,
        max_pairs_per_topic=cfg.max_pairs_per_topic,
        reference_positive_count=cfg.reference_positive_count,
        random_seed=cfg.seed,
    )
    pairs = sample_training_pairs(
        candidates, labels, policy, topics_by_id(topics), summaries
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        write_training_pairs(pairs, fh)
    print(f"sampled {len(pairs)} training pairs -> {args.out}")
    return 0


def _endpoint_from_config(cfg: PipelineConfig) -> ScorerEndpoint:
    address = ""
    if cfg.scorer == "http":
        address = cfg.scorer_url
    elif cfg.scorer == "subprocess":
        address = cfg.scorer_cmd
    return ScorerEndpoint(
        transport=cfg.scorer,
        address=address,
        batch_size=cfg.batch_size,
        max_retries=cfg.max_retries,
        backoff_seconds=cfg.backoff_seconds,
        timeout_seconds=cfg.timeout_seconds,
    )


def _rerank_runs(
    candidates: list[RankedList],
    topics,
    summaries,
    endpoint: ScorerEndpoint,
    labels,
    run_tag: str,
) -> list[RankedList]:
    from .rerank import build_pair

    by_id = topics_by_id(topics)
    pairs = []
    for run in candidates:
        topic = by_id.get(run.topic_id)
        if topic is None:
            raise DataError(f"no topic description for {run.topic_id!r}")
        for report_id in run.ids():
            summary = summaries.get(report_id)
            if summary is None:
                raise DataError(f"no summary for report {report_id!r}")
            pairs.append(build_pair(topic, summary))
    scored = score_pairs(pairs, endpoint, labels)
    by_topic: dict[str, list] = {}
    for pair in scored:
        by_topic.setdefault(pair.topic_id, []).append(pair)
    return [
        rerank(run, by_topic.get(run.topic_id, ()), run_tag=run_tag)
        for run in candidates
    ]


def cmd_rerank(args: argparse.Namespace) -> int:
    cfg = _load_config(
        args,
        scorer=args.scorer,
        scorer_url=args.scorer_url,
        scorer_cmd=args.scorer_cmd,
        batch_size=args.batch_size,
        run_tag=args.run_tag,
    )
    topics = parse_topics(_read_lines(_require_file(args.topics, "--topics")))
    summaries = parse_summaries(
        _read_lines(_require_file(args.summaries, "--summaries"))
    )
    candidates = parse_run(
        _read_lines(_require_file(args.candidates, "--candidates")), level="report"
    )
    labels = None
    if cfg.scorer == "oracle":
        if not args.qrels or not args.corpus:
            raise ConfigError("--scorer oracle needs --qrels and --corpus")
        corpus = parse_corpus(_read_lines(_require_file(args.corpus, "--corpus")))
        judgments = parse_qrels(_read_lines(_require_file(args.qrels, "--qrels")))
        labels = propagate_labels(judgments, corpus)
    runs = _rerank_runs(
        candidates, topics, summaries, _endpoint_from_config(cfg), labels,
        cfg.run_tag,
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        write_run(runs, fh)
    print(f"reranked {len(runs)} topics -> {args.out}")
    return 0


def cmd_map_visits(args: argparse.Namespace) -> int:
    cfg = _load_config(args, m_visits=args.m)
    corpus = parse_corpus(_read_lines(_require_file(args.corpus, "--corpus")))
    report_runs = parse_run(
        _read_lines(_require_file(args.run, "--run")), level="report"
    )
    visit_map = corpus.visit_map()
    visit_runs = [map_to_visits(run, visit_map, cfg.m_visits) for run in report_runs]
    with open(args.out, "w", encoding="utf-8") as fh:
        write_run(visit_runs, fh)
    print(f"mapped {len(visit_runs)} topics to visits -> {args.out}")
    return 0


def _parse_ks(text: str) -> tuple[int, ...]:
    try:
        ks = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"--ks: expected comma-separated integers, got {text!r}") from exc
    if not ks or any(k < 1 for k in ks):
        raise ConfigError(f"--ks: values must be >= 1, got {text!r}")
    return ks


def cmd_eval(args: argparse.Namespace) -> int:
    judgments = parse_qrels(_read_lines(_require_file(args.qrels, "--qrels")))
    runs = parse_run(_read_lines(_require_file(args.run, "--run")), level="visit")
    report = evaluate_run(runs, judgments, _parse_ks(args.ks))
    print(format_eval_table(report))
    if args.jsonl_out:
        with open(args.jsonl_out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(eval_report_lines(report)) + "\n")
    if args.plot_dir:
        from .plots import render_eval_figures

        written = render_eval_figures(report, args.plot_dir)
        print(f"wrote {len(written)} figures -> {args.plot_dir}", file=sys.stderr)
    return 0


def cmd_gen_corpus(args: argparse.Namespace) -> int:
    try:
        lo_text, _, hi_text = args.reports_per_visit.partition(":")
        reports_per_visit = (int(lo_text), int(hi_text or lo_text))
    except ValueError as exc:
        raise ConfigError(
            f"--reports-per-visit: expected MIN:MAX, got {args.reports_per_visit!r}"
        ) from exc
    config = GeneratorConfig(
        seed=args.seed,
        n_visits=args.n_visits,
        reports_per_visit=reports_per_visit,
        n_topics=args.n_topics,
        negation_rate=args.negation_rate,
        relevance_signal_strength=args.signal,
        relevant_per_topic=args.relevant_per_topic,
        near_miss_per_topic=args.near_miss_per_topic,
        targets_per_topic=args.targets_per_topic,
    )
    paths = write_generated(generate(config), args.out_dir)
    print(
        "generated corpus: "
        + ", ".join(f"{name}={path}" for name, path in sorted(paths.items()))
    )
    return 0


def cmd_run_all(args: argparse.Namespace) -> int:
    cfg = _load_config(
        args,
        n_candidates=args.n,
        m_visits=args.m,
        k1=args.k1,
        b=args.b,
        df_threshold=args.df_threshold,
        df_threshold_fraction=args.df_threshold_fraction,
        scorer=args.scorer,
        scorer_url=args.scorer_url,
        scorer_cmd=args.scorer_cmd,
        batch_size=args.batch_size,
        run_tag=args.run_tag,
    )
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus = parse_corpus(_read_lines(_require_file(args.corpus, "--corpus")))
    topics = parse_topics(_read_lines(_require_file(args.topics, "--topics")))
    judgments = parse_qrels(_read_lines(_require_file(args.qrels, "--qrels")))
    lexicon = parse_lexicon(_read_lines(_require_file(args.lexicon, "--lexicon")))
    stoplist = _stoplist(args)
    triggers = _triggers(args)
    abbreviations = _abbreviations(args)

    # 1. index
    index = build_index(corpus, stoplist)
    save_index(index, out / "index.bin")

    # 2. search
    params = Bm25Params(k1=cfg.k1, b=cfg.b)
    bm25_runs = [
        retrieve_top_n(
            index, params, build_or_query(t, stoplist), cfg.n_candidates,
            topic_id=t.topic_id, run_tag=f"{cfg.run_tag}-bm25",
        )
        for t in topics
    ]
    with open(out / "bm25_reports.run", "w", encoding="utf-8") as fh:
        write_run(bm25_runs, fh)

    # 3. summarize
    concept_df = compute_concept_df(corpus, lexicon, triggers, abbreviations)
    threshold = _df_threshold(cfg, len(corpus))
    summaries = {
        report.report_id: summarize_report(
            report, lexicon, concept_df,
            triggers=triggers, df_threshold=threshold,
            abbreviations=abbreviations,
        )
        for report in corpus
    }
    with open(out / "summaries.jsonl", "w", encoding="utf-8") as fh:
        write_summaries(summaries.values(), fh)
    with open(out / "concept_df.json", "w", encoding="utf-8") as fh:
        json.dump(concept_df, fh, sort_keys=True, indent=0)
        fh.write("\n")

    # 4. rerank
    labels = None
    if cfg.scorer == "oracle":
        labels = propagate_labels(judgments, corpus)
    reranked = _rerank_runs(
        bm25_runs, topics, summaries, _endpoint_from_config(cfg), labels,
        f"{cfg.run_tag}-reranked",
    )
    with open(out / "reranked_reports.run", "w", encoding="utf-8") as fh:
        write_run(reranked, fh)

    # 5. map to visits
    visit_map = corpus.visit_map()
    bm25_visits = [map_to_visits(r, visit_map, cfg.m_visits) for r in bm25_runs]
    reranked_visits = [map_to_visits(r, visit_map, cfg.m_visits) for r in reranked]
    with open(out / "bm25_visits.run", "w", encoding="utf-8") as fh:
        write_run(bm25_visits, fh)
    with open(out / "reranked_visits.run", "w", encoding="utf-8") as fh:
        write_run(reranked_visits, fh)

    # 6. eval both, render figures
    from .plots import render_eval_figures

    for name, visit_runs in (("bm25", bm25_visits), ("reranked", reranked_visits)):
        report = evaluate_run(visit_runs, judgments)
        table = format_eval_table(report)
        with open(out / f"eval_{name}.txt", "w", encoding="utf-8") as fh:
            fh.write(table + "\n")
        with open(out / f"eval_{name}.jsonl", "w", encoding="utf-8") as fh:
            fh.write("\n".join(eval_report_lines(report)) + "\n")
        render_eval_figures(report, out / "figures", prefix=f"eval_{name}")
        if name == "reranked":
            print(table)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_config_flag(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--config",
        help="flat key=value config file; flags override it (default: none)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cohortir",
        description="Patient cohort retrieval over clinical reports",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="build a BM25 index from a report corpus")
    p.add_argument("--corpus", required=True, help="report JSONL (required)")
    p.add_argument("--out", required=True, help="index output path (required)")
    p.add_argument("--stoplist", help="stopword file, one word per line (default: built-in)")
    _add_config_flag(p)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("search", help="BM25 candidate retrieval per topic")
    p.add_argument("--index", required=True, help="index file (required)")
    p.add_argument("--topics", required=True, help="topic JSONL (required)")
    p.add_argument("--out", required=True, help="report-level run output (required)")
    p.add_argument("--n", type=int, help="candidates per topic (default: 2000)")
    p.add_argument("--k1", type=float, help="BM25 k1 (default: 0.9)")
    p.add_argument("--b", type=float, help="BM25 b (default: 0.4)")
    p.add_argument("--run-tag", help="run tag column value (default: cohortir)")
    p.add_argument("--stoplist", help="stopword file (default: built-in)")
    _add_config_flag(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("summarize", help="concept summaries for every report")
    p.add_argument("--corpus", required=True, help="report JSONL (required)")
    p.add_argument("--lexicon", required=True, help="concept lexicon TSV (required)")
    p.add_argument("--out", required=True, help="summary JSONL output (required)")
    p.add_argument("--triggers", help="negation trigger file (default: built-in)")
    p.add_argument("--abbreviations", help="sentence-split abbreviation file (default: built-in)")
    p.add_argument("--df-threshold", type=int, help="max concept df kept (default: 2500)")
    p.add_argument(
        "--df-threshold-fraction", type=float,
        help="df threshold as a fraction of doc count; overrides --df-threshold (default: unset)",
    )
    p.add_argument("--df-out", help="also write the concept df table as JSON (default: skip)")
    _add_config_flag(p)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("make-pairs", help="sample labeled training pairs")
    p.add_argument("--candidates", required=True, help="report-level run file (required)")
    p.add_argument("--qrels", required=True, help="visit qrels (required)")
    p.add_argument("--topics", required=True, help="topic JSONL (required)")
    p.add_argument("--summaries", required=True, help="summary JSONL (required)")
    p.add_argument("--corpus", required=True, help="report JSONL for visit mapping (required)")
    p.add_argument("--out", required=True, help="training pair JSONL output (required)")
    p.add_argument("--negative-ratio", type=int, help="negatives per positive (default: 10)")
    p.add_argument("--max-pairs", type=int, help="per-topic pair cap (default: 1650)")
    p.add_argument("--ref-positives", type=int, help="positive cap per topic (default: 150)")
    p.add_argument("--seed", type=int, help="sampling seed (default: 0)")
    p.add_argument(
        "--split", choices=("all", "train", "test"), default="all",
        help="restrict to a topic split (default: all)",
    )
    p.add_argument("--split-fraction", type=float, help="train fraction (default: 0.8)")
    _add_config_flag(p)
    p.set_defaults(func=cmd_make_pairs)

    p = sub.add_parser("rerank", help="re-rank candidates with a scorer")
    p.add_argument("--candidates", required=True, help="report-level run file (required)")
    p.add_argument("--topics", required=True, help="topic JSONL (required)")
    p.add_argument("--summaries", required=True, help="summary JSONL (required)")
    p.add_argument("--out", required=True, help="re-ranked run output (required)")
    p.add_argument(
        "--scorer", choices=("baseline", "oracle", "http", "subprocess"),
        help="scorer transport (default: baseline)",
    )
    p.add_argument("--scorer-url", help="scorer URL for --scorer http (default: unset)")
    p.add_argument("--scorer-cmd", help="scorer command for --scorer subprocess (default: unset)")
    p.add_argument("--batch-size", type=int, help="pairs per scorer request (default: 32)")
    p.add_argument("--qrels", help="qrels, needed for --scorer oracle (default: unset)")
    p.add_argument("--corpus", help="corpus, needed for --scorer oracle (default: unset)")
    p.add_argument("--run-tag", help="run tag for the output (default: cohortir)")
    _add_config_flag(p)
    p.set_defaults(func=cmd_rerank)

    p = sub.add_parser("map-visits", help="report ranking -> visit ranking")
    p.add_argument("--run", required=True, help="report-level run file (required)")
    p.add_argument("--corpus", required=True, help="report JSONL (required)")
    p.add_argument("--out", required=True, help="visit-level run output (required)")
    p.add_argument("--m", type=int, help="visits kept per topic (default: 1000)")
    _add_config_flag(p)
    p.set_defaults(func=cmd_map_visits)

    p = sub.add_parser("eval", help="score a visit run against qrels")
    p.add_argument("--run", required=True, help="visit-level run file (required)")
    p.add_argument("--qrels", required=True, help="visit qrels (required)")
    p.add_argument("--ks", default="10,1000", help="precision cutoffs (default: 10,1000)")
    p.add_argument("--jsonl-out", help="also write per-topic JSONL (default: skip)")
    p.add_argument("--plot-dir", help="also render metric figures here (default: skip)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gen-corpus", help="generate a synthetic corpus")
    p.add_argument("--out-dir", required=True, help="output directory (required)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default: 0)")
    p.add_argument("--n-visits", type=int, default=300, help="visit count (default: 300)")
    p.add_argument(
        "--reports-per-visit", default="2:4",
        help="MIN:MAX reports per visit (default: 2:4)",
    )
    p.add_argument("--n-topics", type=int, default=10, help="topic count (default: 10)")
    p.add_argument(
        "--negation-rate", type=float, default=0.1,
        help="fraction of filler sentences negated (default: 0.1)",
    )
    p.add_argument(
        "--signal", type=float, default=0.9,
        help="probability a relevant report asserts each target (default: 0.9)",
    )
    p.add_argument(
        "--relevant-per-topic", type=int, default=12,
        help="planted relevant visits per topic (default: 12)",
    )
    p.add_argument(
        "--near-miss-per-topic", type=int, default=3,
        help="near-miss visits per topic; 0 when negation rate is 0 (default: 3)",
    )
    p.add_argument(
        "--targets-per-topic", type=int, default=2,
        help="target concepts per topic (default: 2)",
    )
    p.set_defaults(func=cmd_gen_corpus)

    p = sub.add_parser("run-all", help="index, search, summarize, rerank, map, eval")
    p.add_argument("--corpus", required=True, help="report JSONL (required)")
    p.add_argument("--topics", required=True, help="topic JSONL (required)")
    p.add_argument("--qrels", required=True, help="visit qrels (required)")
    p.add_argument("--lexicon", required=True, help="concept lexicon TSV (required)")
    p.add_argument("--out-dir", required=True, help="output directory (required)")
    p.add_argument("--n", type=int, help="candidates per topic (default: 2000)")
    p.add_argument("--m", type=int, help="visits kept per topic (default: 1000)")
    p.add_argument("--k1", type=float, help="BM25 k1 (default: 0.9)")
    p.add_argument("--b", type=float, help="BM25 b (default: 0.4)")
    p.add_argument("--df-threshold", type=int, help="max concept df kept (default: 2500)")
    p.add_argument(
        "--df-threshold-fraction", type=float,
        help="df threshold as a fraction of doc count (default: unset)",
    )
    p.add_argument(
        "--scorer", choices=("baseline", "oracle", "http", "subprocess"),
        help="scorer transport (default: baseline)",
    )
    p.add_argument("--scorer-url", help="scorer URL for --scorer http (default: unset)")
    p.add_argument("--scorer-cmd", help="scorer command for --scorer subprocess (default: unset)")
    p.add_argument("--batch-size", type=int, help="pairs per scorer request (default: 32)")
    p.add_argument("--run-tag", help="run tag prefix (default: cohortir)")
    p.add_argument("--stoplist", help="stopword file (default: built-in)")
    p.add_argument("--triggers", help="negation trigger file (default: built-in)")
    p.add_argument("--abbreviations", help="abbreviation file (default: built-in)")
    _add_config_flag(p)
    p.set_defaults(func=cmd_run_all)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ParseError, DataError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except ScorerError as exc:
        print(f"scorer error: {exc}", file=sys.stderr)
        return 3
    except CohortIrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
