"""Patient cohort retrieval over free-text clinical reports.

The pipeline: BM25 candidate generation at the report level, concept-based
report summaries, a pluggable binary-relevance re-ranker, aggregation of
report rankings into visit rankings, and trec_eval-style evaluation.
"""

__version__ = "0.1.0"
