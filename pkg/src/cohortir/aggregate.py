"""Turn report rankings into visit rankings.

Walking the report ranking in order, the first report seen from a visit
fixes that visit's rank and score; later reports from the same visit are
dropped. The result is truncated to the top M visits.
"""

from __future__ import annotations

from typing import Mapping

from .corpus import Corpus, RankedList
from .errors import DataError


def visit_map_from_corpus(corpus: Corpus) -> dict[str, str]:
    return corpus.visit_map()


def map_to_visits(
    report_run: RankedList, report_to_visit: Mapping[str, str], m: int = 1000
) -> RankedList:
    """De-duplicate by visit in rank order; keep each visit's best score."""
    if m < 1:
        raise DataError(f"m must be >= 1, got {m}")
    if report_run.level != "report":
        raise DataError(f"expected a report-level ranking, got {report_run.level!r}")
    items: list[tuple[str, float]] = []
    seen: set[str] = set()
    for report_id, score in report_run.items:
        visit_id = report_to_visit.get(report_id)
        if visit_id is None:
            raise DataError(f"report {report_id!r} has no visit mapping")
        if visit_id in seen:
            continue
        seen.add(visit_id)
        items.append((visit_id, score))
        if len(items) == m:
            break
    return RankedList(
        topic_id=report_run.topic_id,
        level="visit",
        items=tuple(items),
        run_tag=report_run.run_tag,
    )
