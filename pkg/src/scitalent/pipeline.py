"""End-to-end pipeline stages and the run orchestrator.

Every stage writes its artifact files with a fixed name and canonical
ordering, and downstream stages consume exactly the values that round-trip
through those files (float columns are quantized on write). Running the
stages one by one through the CLI therefore produces byte-identical
artifacts to one `run` invocation, and reruns on identical input and
config are byte-identical too. The manifest records config, input digests,
per-stage row counts and timings, and a digest per output file.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import cohorts as coh
from . import corpus as corp
from . import indicators as ind
from . import percentiles as pct
from . import quartiles as qrt
from . import validation as val
from .config import PipelineConfig
from .synthgen import SynthConfig, write_synthetic_jsonl

CORPUS_FILE = "corpus.jsonl"
INGEST_REPORT_FILE = "ingest_report.csv"
PERCENTILES_FILE = "percentiles.csv"
QUARTILES_FILE = "quartiles.csv"
INDICATORS_FILE = "indicators.csv"
THRESHOLDS_FILE = "thresholds.csv"
COHORTS_FILE = "cohorts.csv"
COUNTS_REPORT_FILE = "report_counts.csv"
PAPERS_REPORT_FILE = "report_papers.csv"
PERCENTILES_REPORT_FILE = "report_percentiles.csv"
SUMMARY_FILE = "summary.txt"
TALENT_DATASET_FILE = "talent_dataset.csv"
MANIFEST_FILE = "manifest.json"
SYNTHETIC_FILE = "synthetic.jsonl"


def _csv_cell(s: str) -> str:
    # Same minimal quoting the csv module applies with lineterminator "\n".
    if '"' in s or "," in s or "\n" in s or "\r" in s:
        return '"' + s.replace('"', '""') + '"'
    return s


class StageError(RuntimeError):
    """A pipeline stage failed; carries the stage name for exit messages."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def load_corpus(path, cfg: PipelineConfig) -> corp.Corpus:
    """Reload a corpus artifact; filtering is idempotent on it."""
    built, _ = corp.ingest(
        path,
        first_year=cfg.first_year,
        last_year=cfg.last_year,
        doc_types=cfg.doc_types,
        skip_malformed=False,
    )
    return built


def stage_ingest(input_paths, cfg: PipelineConfig, outdir: Path) -> tuple[corp.Corpus, corp.IngestStats]:
    paths = [input_paths] if isinstance(input_paths, (str, os.PathLike)) else list(input_paths)
    if len(paths) == 1:
        built, stats = corp.ingest(
            paths[0],
            first_year=cfg.first_year,
            last_year=cfg.last_year,
            doc_types=cfg.doc_types,
            skip_malformed=cfg.skip_malformed,
        )
    else:
        stats = corp.IngestStats()
        kept: list[corp.PublicationRecord] = []
        for path in paths:
            part_corpus, part = corp.ingest(
                path,
                first_year=cfg.first_year,
                last_year=cfg.last_year,
                doc_types=cfg.doc_types,
                skip_malformed=cfg.skip_malformed,
            )
            kept.extend(part_corpus.records)
            stats.records_read += part.records_read
            for reason, count in part.dropped.items():
                stats.dropped[reason] = stats.dropped.get(reason, 0) + count
        built = corp.build_corpus(kept, (cfg.first_year, cfg.last_year))
        stats.records_kept = len(built.records)
    corp.write_corpus_jsonl(built, outdir / CORPUS_FILE)
    corp.write_ingest_report(stats, outdir / INGEST_REPORT_FILE)
    return built, stats


def stage_percentiles(corpus: corp.Corpus, outdir: Path) -> list[pct.PaperFieldPercentile]:
    # Single fused pass: compute, write at CSV precision, and hand the
    # quantized values downstream. Matches compute_paper_percentiles
    # followed by write + quantize, at half the allocations.
    rows: list[pct.PaperFieldPercentile] = []
    append = rows.append
    make = pct.PaperFieldPercentile
    cell_of = _csv_cell
    index = corpus.by_field_year
    with open(outdir / PERCENTILES_FILE, "w", encoding="utf-8", newline="") as fh:
        fh.write("pub_id,field,year,percentile\n")
        for field, year in sorted(index):
            recs = index[(field, year)]
            counts = np.fromiter((r.citation_count for r in recs), dtype=np.int64, count=len(recs))
            parts = []
            group = f",{field},{year},"
            for r, p in zip(recs, pct.hazen_percentiles(counts).tolist()):
                cell = f"{p:.6f}"
                parts.append(cell_of(r.pub_id) + group + cell + "\n")
                append(make(r.pub_id, field, year, float(cell)))
            fh.write("".join(parts))
    return rows


def stage_quartiles(
    corpus: corp.Corpus,
    percentile_rows,
    cfg: PipelineConfig,
    outdir: Path,
) -> list[qrt.JournalYearQuartile]:
    rows = qrt.assign_q1(percentile_rows, corpus, cfg.q1_threshold)
    rows = qrt.apply_recent_year_substitution(
        rows, cfg.substitution_target_years, cfg.substitution_source_year
    )
    qrt.write_quartiles_csv(rows, outdir / QUARTILES_FILE)
    return rows


def stage_indicators(
    corpus: corp.Corpus,
    quartile_rows,
    cfg: PipelineConfig,
    outdir: Path,
) -> list[ind.AuthorFieldIndicators]:
    entries = ind.compute_window_indicators(corpus, quartile_rows, cfg.window_length)
    ind.write_indicators_csv(entries, outdir / INDICATORS_FILE)
    return ind.quantize_indicators(entries)


def stage_cohorts(
    corpus: corp.Corpus,
    entries,
    cfg: PipelineConfig,
    outdir: Path,
) -> tuple[frozenset[str], list[coh.ThresholdRow], list[coh.CohortAssignment]]:
    cohort = coh.build_cohort(corpus, cfg.validation_cohort_range)
    thresholds = coh.compute_threshold_table(cohort, entries, cfg.top_percents)
    assignments = coh.select_all_groups(cohort, entries, thresholds, coh.ALL_COMBINATIONS, cfg.top_percents)
    coh.write_thresholds_csv(thresholds, outdir / THRESHOLDS_FILE)
    coh.write_assignments_csv(assignments, outdir / COHORTS_FILE)
    return cohort, thresholds, assignments


def stage_validate(
    corpus: corp.Corpus,
    percentile_rows,
    assignments,
    cfg: PipelineConfig,
    outdir: Path,
) -> val.ValidationSummary:
    authors = sorted({a.author_id for a in assignments})
    relevant = {r.pub_id for author in authors for r in corpus.by_author[author]}
    pub_obs: dict[str, list[float]] = {}
    for obs in percentile_rows:
        if obs.pub_id in relevant:
            pub_obs.setdefault(obs.pub_id, []).append(obs.percentile)
    performances = {}
    for author in authors:
        perf = val.post_window_performance(
            author, corpus, pub_obs, cfg.window_length, cfg.post_window_end_year
        )
        if perf is not None:
            performances[author] = perf
    summary = val.summarize(assignments, performances)
    val.write_counts_report(summary, outdir / COUNTS_REPORT_FILE)
    val.write_papers_report(summary, outdir / PAPERS_REPORT_FILE)
    val.write_percentiles_report(summary, outdir / PERCENTILES_REPORT_FILE)
    val.write_summary_text(summary, outdir / SUMMARY_FILE)
    return summary


def stage_export(
    corpus: corp.Corpus,
    entries,
    cfg: PipelineConfig,
    outdir: Path,
) -> tuple[list[ind.AuthorFieldIndicators], dict[int, int]]:
    combination = coh.IndicatorCombination.from_name(cfg.export_combination)
    cohort = coh.build_cohort(corpus, cfg.talent_cohort_range)
    thresholds = coh.compute_threshold_table(cohort, entries, cfg.top_percents)
    assignments = coh.select_all_groups(cohort, entries, thresholds, [combination], cfg.top_percents)
    entry_map = {(e.author_id, e.field): e for e in entries}
    rows = [
        entry_map[(a.author_id, a.field)]
        for a in assignments
        if a.group == coh.GROUP_TALENT
    ]
    ind.write_indicators_csv(rows, outdir / TALENT_DATASET_FILE)
    per_year: dict[int, int] = {}
    for author in {r.author_id for r in rows}:
        y0 = min(r.year for r in corpus.by_author[author])
        per_year[y0] = per_year.get(y0, 0) + 1
    return rows, dict(sorted(per_year.items()))


@dataclass
class RunResult:
    outdir: Path
    manifest: dict
    created_files: list[str] = field(default_factory=list)


def run_pipeline(
    cfg: PipelineConfig,
    outdir,
    input_paths=None,
    synth_config: SynthConfig | None = None,
) -> RunResult:
    """Execute every stage in order and write the manifest.

    Exactly one of ``input_paths`` and ``synth_config`` must be given. On
    a stage failure, files created by this run are removed and a
    StageError naming the stage is raised.
    """
    cfg.validate()
    if (input_paths is None) == (synth_config is None):
        raise ValueError("exactly one of input_paths and synth_config is required")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    created: list[str] = []
    stages: list[dict] = []
    manifest: dict = {"config": cfg.to_dict()}

    def track(*names: str) -> None:
        created.extend(names)

    def timed(name: str, fn, *args):
        t0 = time.perf_counter()
        try:
            result = fn(*args)
        except StageError:
            raise
        except Exception as exc:
            raise StageError(name, exc) from exc
        stages.append({"name": name, "seconds": round(time.perf_counter() - t0, 6)})
        return result

    try:
        if synth_config is not None:
            n = timed("synth", write_synthetic_jsonl, synth_config, outdir / SYNTHETIC_FILE)
            track(SYNTHETIC_FILE)
            stages[-1]["rows"] = {"records": n}
            input_paths = [outdir / SYNTHETIC_FILE]
        elif isinstance(input_paths, (str, os.PathLike)):
            input_paths = [input_paths]

        manifest["inputs"] = [
            {"path": str(p), "sha256": file_sha256(p)} for p in input_paths
        ]

        corpus, stats = timed("ingest", stage_ingest, input_paths, cfg, outdir)
        track(CORPUS_FILE, INGEST_REPORT_FILE)
        stages[-1]["rows"] = {
            "records_read": stats.records_read,
            "records_kept": stats.records_kept,
            "dropped": dict(sorted(stats.dropped.items())),
        }

        percentile_rows = timed("percentiles", stage_percentiles, corpus, outdir)
        track(PERCENTILES_FILE)
        stages[-1]["rows"] = {"observations": len(percentile_rows)}

        quartile_rows = timed("quartiles", stage_quartiles, corpus, percentile_rows, cfg, outdir)
        track(QUARTILES_FILE)
        stages[-1]["rows"] = {
            "journal_years": len(quartile_rows),
            "substituted": sum(1 for q in quartile_rows if q.source_year != q.year),
        }

        entries = timed("indicators", stage_indicators, corpus, quartile_rows, cfg, outdir)
        track(INDICATORS_FILE)
        stages[-1]["rows"] = {"entries": len(entries)}

        cohort, thresholds, assignments = timed("cohorts", stage_cohorts, corpus, entries, cfg, outdir)
        track(THRESHOLDS_FILE, COHORTS_FILE)
        stages[-1]["rows"] = {
            "cohort_authors": len(cohort),
            "threshold_rows": len(thresholds),
            "assignments": len(assignments),
        }

        summary = timed("validate", stage_validate, corpus, percentile_rows, assignments, cfg, outdir)
        track(COUNTS_REPORT_FILE, PAPERS_REPORT_FILE, PERCENTILES_REPORT_FILE, SUMMARY_FILE)
        stages[-1]["rows"] = {
            "combinations": len(summary.combinations),
        }

        talent_rows, per_year = timed("export", stage_export, corpus, entries, cfg, outdir)
        track(TALENT_DATASET_FILE)
        stages[-1]["rows"] = {"talent_rows": len(talent_rows)}
        manifest["talent_per_first_year"] = {str(y): c for y, c in per_year.items()}

        manifest["stages"] = stages
        manifest["files"] = {name: file_sha256(outdir / name) for name in sorted(created)}
        with open(outdir / MANIFEST_FILE, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        created.append(MANIFEST_FILE)
    except StageError:
        for name in created:
            try:
                (outdir / name).unlink()
            except FileNotFoundError:
                pass
        raise
    return RunResult(outdir=outdir, manifest=manifest, created_files=created)
