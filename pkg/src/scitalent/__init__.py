"""Identification of young scientific talent from publication records.

The pipeline normalizes citation impact as Hazen percentiles within
(broad field, year) groups, flags first-quartile journal-years, computes
fractional per-field author indicators over the first ten career years,
selects top-1% talent and top-5%-to-10% control cohorts for all indicator
combinations, and validates the selection against post-window performance.
"""

from .cohorts import (
    ALL_COMBINATIONS,
    COMBINATION_NAMES,
    CohortAssignment,
    IndicatorCombination,
    ThresholdRow,
    build_cohort,
    compute_thresholds,
    compute_threshold_table,
    select_all_groups,
    select_groups,
    top_percent_rank,
)
from .config import PipelineConfig, load_config
from .corpus import (
    ALLOWED_DOC_TYPES,
    Corpus,
    DuplicatePubIdError,
    IngestStats,
    MalformedRecordError,
    PublicationRecord,
    broad_fields_of,
    build_corpus,
    corpus_digest,
    ingest,
)
from .indicators import (
    AuthorFieldIndicators,
    compute_window_indicators,
    first_paper_year,
    first_paper_years,
)
from .percentiles import PaperFieldPercentile, compute_paper_percentiles, hazen_percentiles
from .pipeline import RunResult, StageError, run_pipeline
from .quartiles import JournalYearQuartile, apply_recent_year_substitution, assign_q1
from .synthgen import SynthConfig, generate, write_synthetic_jsonl
from .validation import (
    AuthorPostWindowPerformance,
    DistributionStats,
    ValidationSummary,
    post_window_performance,
    rank_combinations,
    subtract_stats,
    summarize,
)

__version__ = "0.1.0"
