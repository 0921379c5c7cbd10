"""Command-line interface for the talent identification pipeline.

Subcommands mirror the pipeline stages (`ingest`, `percentiles`,
`quartiles`, `indicators`, `cohorts`, `validate`, `export`), plus `synth`
for synthetic corpus generation and `run` for the whole pipeline. Stage
subcommands read their inputs from the artifact directory written by the
previous stage, so a staged sequence reproduces `run` byte for byte.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import pipeline as pl
from .cohorts import read_assignments_csv
from .config import PipelineConfig, config_from_dict
from .indicators import read_indicators_csv
from .percentiles import read_percentiles_csv
from .quartiles import read_quartiles_csv
from .synthgen import SynthConfig, write_synthetic_jsonl

_CONFIG_FLAG_FIELDS = (
    "first_year",
    "last_year",
    "window_length",
    "q1_threshold",
    "substitution_source_year",
    "export_combination",
    "post_window_end_year",
    "seed",
)

_SYNTH_FLAG_FIELDS = (
    "n_authors",
    "n_journals",
    "n_fields",
    "papers_per_year",
    "citation_location",
    "citation_scale",
    "citation_ability_weight",
    "q1_journal_fraction",
    "q1_citation_boost",
    "ability_correlation",
    "corresponding_prob",
    "multifield_prob",
    "offfield_prob",
    "excluded_extra_prob",
    "fieldless_prob",
)


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON file with pipeline settings")
    for fld in dataclasses.fields(PipelineConfig):
        if fld.name in _CONFIG_FLAG_FIELDS:
            p.add_argument(_flag(fld.name), type=type(fld.default), default=None)
    p.add_argument("--doc-types", default=None, help="comma-separated document types")
    p.add_argument(
        "--substitution-target-years", default=None, help="comma-separated years"
    )
    p.add_argument("--validation-cohort-range", nargs=2, type=int, default=None, metavar=("FIRST", "LAST"))
    p.add_argument("--talent-cohort-range", nargs=2, type=int, default=None, metavar=("FIRST", "LAST"))
    p.add_argument(
        "--top-percents", nargs=3, type=float, default=None, metavar=("TALENT", "UPPER", "LOWER")
    )
    p.add_argument("--skip-malformed", action="store_true", default=None)


def build_config(args: argparse.Namespace) -> PipelineConfig:
    data: dict = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            data.update(json.load(fh))
    for fld in _CONFIG_FLAG_FIELDS:
        value = getattr(args, fld, None)
        if value is not None:
            data[fld] = value
    if args.doc_types is not None:
        data["doc_types"] = tuple(args.doc_types.split(","))
    if args.substitution_target_years is not None:
        data["substitution_target_years"] = tuple(
            int(y) for y in args.substitution_target_years.split(",")
        )
    for fld in ("validation_cohort_range", "talent_cohort_range", "top_percents"):
        value = getattr(args, fld, None)
        if value is not None:
            data[fld] = tuple(value)
    if args.skip_malformed:
        data["skip_malformed"] = True
    return config_from_dict(data)


def build_synth_config(args: argparse.Namespace, cfg: PipelineConfig) -> SynthConfig:
    data: dict = {}
    if getattr(args, "synth_config", None):
        with open(args.synth_config, "r", encoding="utf-8") as fh:
            data.update(json.load(fh))
    data.setdefault("seed", cfg.seed)
    data.setdefault("year_range", (cfg.first_year, cfg.last_year))
    for name in _SYNTH_FLAG_FIELDS:
        value = getattr(args, name, None)
        if value is not None:
            data[name] = value
    if getattr(args, "debut_year_range", None) is not None:
        data["debut_year_range"] = tuple(args.debut_year_range)
    for key in ("year_range", "debut_year_range"):
        if data.get(key) is not None:
            data[key] = tuple(data[key])
    config = SynthConfig(**data)
    config.validate()
    return config


def _add_synth_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--synth-config", type=Path, help="JSON file with generator settings")
    defaults = SynthConfig()
    for name in _SYNTH_FLAG_FIELDS:
        p.add_argument(_flag(name), type=type(getattr(defaults, name)), default=None)
    p.add_argument("--debut-year-range", nargs=2, type=int, default=None, metavar=("FIRST", "LAST"))


def _stage(name: str, fn, *args):
    try:
        return fn(*args)
    except pl.StageError:
        raise
    except Exception as exc:
        raise pl.StageError(name, exc) from exc


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_corpus(args, cfg: PipelineConfig, outdir: Path):
    path = args.corpus if getattr(args, "corpus", None) else outdir / pl.CORPUS_FILE
    return pl.load_corpus(path, cfg)


def cmd_ingest(args) -> None:
    cfg = build_config(args)
    outdir = _outdir(args)
    _, stats = _stage("ingest", pl.stage_ingest, args.input, cfg, outdir)
    print(f"ingest: read={stats.records_read} kept={stats.records_kept} dropped={stats.records_dropped}")


def cmd_percentiles(args) -> None:
    cfg = build_config(args)
    outdir = _outdir(args)
    corpus = _stage("percentiles", _load_corpus, args, cfg, outdir)
    rows = _stage("percentiles", pl.stage_percentiles, corpus, outdir)
    print(f"percentiles: observations={len(rows)}")


def cmd_quartiles(args) -> None:
    cfg = build_config(args)
    outdir = _outdir(args)
    corpus = _stage("quartiles", _load_corpus, args, cfg, outdir)
    rows = _stage("quartiles", read_percentiles_csv, args.percentiles or outdir / pl.PERCENTILES_FILE)
    quartile_rows = _stage("quartiles", pl.stage_quartiles, corpus, rows, cfg, outdir)
    print(f"quartiles: journal_years={len(quartile_rows)}")


def cmd_indicators(args) -> None:
    cfg = build_config(args)
    outdir = _outdir(args)
    corpus = _stage("indicators", _load_corpus, args, cfg, outdir)
    quartile_rows = _stage("indicators", read_quartiles_csv, args.quartiles or outdir / pl.QUARTILES_FILE)
    entries = _stage("indicators", pl.stage_indicators, corpus, quartile_rows, cfg, outdir)
    print(f"indicators: entries={len(entries)}")


def cmd_cohorts(args) -> None:
    cfg = build_config(args)
    outdir = _outdir(args)
    corpus = _stage("cohorts", _load_corpus, args, cfg, outdir)
    entries = _stage("cohorts", read_indicators_csv, args.indicators or outdir / pl.INDICATORS_FILE)
    cohort, thresholds, assignments = _stage("cohorts", pl.stage_cohorts, corpus, entries, cfg, outdir)
    print(f"cohorts: authors={len(cohort)} assignments={len(assignments)}")


def cmd_validate(args) -> None:
    cfg = build_config(args)
    outdir = _outdir(args)
    corpus = _stage("validate", _load_corpus, args, cfg, outdir)
    rows = _stage("validate", read_percentiles_csv, args.percentiles or outdir / pl.PERCENTILES_FILE)
    assignments = _stage("validate", read_assignments_csv, args.cohorts or outdir / pl.COHORTS_FILE)
    summary = _stage("validate", pl.stage_validate, corpus, rows, assignments, cfg, outdir)
    from .validation import rank_combinations

    ranking = rank_combinations(summary)
    print(f"validate: best_combination={ranking[0] if ranking else 'none'}")


def cmd_export(args) -> None:
    cfg = build_config(args)
    outdir = _outdir(args)
    corpus = _stage("export", _load_corpus, args, cfg, outdir)
    entries = _stage("export", read_indicators_csv, args.indicators or outdir / pl.INDICATORS_FILE)
    rows, per_year = _stage("export", pl.stage_export, corpus, entries, cfg, outdir)
    print(f"export: talent_rows={len(rows)} per_first_year={per_year}")


def cmd_synth(args) -> None:
    cfg = build_config(args)
    synth_cfg = _stage("synth", build_synth_config, args, cfg)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    n = _stage("synth", write_synthetic_jsonl, synth_cfg, out)
    print(f"synth: records={n} path={out}")


def cmd_run(args) -> None:
    cfg = build_config(args)
    if bool(args.synthetic) == bool(args.input):
        raise pl.StageError("run", ValueError("give either --input or --synthetic"))
    synth_cfg = build_synth_config(args, cfg) if args.synthetic else None
    result = pl.run_pipeline(cfg, args.out, input_paths=args.input or None, synth_config=synth_cfg)
    print(f"run: wrote {len(result.created_files)} files to {result.outdir}")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scitalent", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="filter raw records into a corpus artifact")
    _add_config_flags(p)
    p.add_argument("--input", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("percentiles", help="compute field-year Hazen percentiles")
    _add_config_flags(p)
    p.add_argument("--corpus", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_percentiles)

    p = sub.add_parser("quartiles", help="assign journal-year Q1 flags")
    _add_config_flags(p)
    p.add_argument("--corpus", default=None)
    p.add_argument("--percentiles", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_quartiles)

    p = sub.add_parser("indicators", help="compute author O/Q1/C window indicators")
    _add_config_flags(p)
    p.add_argument("--corpus", default=None)
    p.add_argument("--quartiles", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_indicators)

    p = sub.add_parser("cohorts", help="select talent and control groups")
    _add_config_flags(p)
    p.add_argument("--corpus", default=None)
    p.add_argument("--indicators", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cohorts)

    p = sub.add_parser("validate", help="compute post-window reports")
    _add_config_flags(p)
    p.add_argument("--corpus", default=None)
    p.add_argument("--percentiles", default=None)
    p.add_argument("--cohorts", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("export", help="export the talent dataset")
    _add_config_flags(p)
    p.add_argument("--corpus", default=None)
    p.add_argument("--indicators", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("synth", help="generate a synthetic corpus file")
    _add_config_flags(p)
    _add_synth_flags(p)
    p.add_argument("--out", required=True, help="output JSONL path")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("run", help="run the full pipeline")
    _add_config_flags(p)
    _add_synth_flags(p)
    p.add_argument("--input", nargs="+", default=None)
    p.add_argument("--synthetic", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_run)

    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        args.func(args)
    except pl.StageError as exc:
        print(f"scitalent: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"scitalent: stage '{args.command}' failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
