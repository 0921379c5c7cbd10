"""Pipeline configuration with the study's default parameterization."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

from .cohorts import COMBINATION_NAMES
from .corpus import ALLOWED_DOC_TYPES


@dataclass(frozen=True)
class PipelineConfig:
    """End-to-end pipeline parameters; the defaults match the study."""

    first_year: int = 1999
    last_year: int = 2020
    doc_types: tuple[str, ...] = ALLOWED_DOC_TYPES
    window_length: int = 10
    q1_threshold: float = 75.0
    substitution_target_years: tuple[int, ...] = (2019, 2020)
    substitution_source_year: int = 2018
    validation_cohort_range: tuple[int, int] = (1999, 2003)
    talent_cohort_range: tuple[int, int] = (2007, 2011)
    top_percents: tuple[float, ...] = (1, 5, 10)
    export_combination: str = "OxQ1"
    post_window_end_year: int = 2018
    skip_malformed: bool = False
    seed: int = 0

    def validate(self) -> None:
        if self.first_year > self.last_year:
            raise ValueError("first_year must not exceed last_year")
        if self.window_length < 1:
            raise ValueError("window_length must be at least 1")
        if not self.doc_types:
            raise ValueError("doc_types must be non-empty")
        if len(self.top_percents) != 3:
            raise ValueError("top_percents needs exactly three values (talent, upper, lower)")
        if self.export_combination not in COMBINATION_NAMES:
            raise ValueError(f"unknown combination {self.export_combination!r}")
        if self.substitution_source_year in self.substitution_target_years:
            raise ValueError("substitution_source_year must not be a target year")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


_TUPLE_FIELDS = {
    "doc_types",
    "substitution_target_years",
    "validation_cohort_range",
    "talent_cohort_range",
    "top_percents",
}


def config_from_dict(data: dict) -> PipelineConfig:
    known = {f.name for f in dataclasses.fields(PipelineConfig)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    coerced = {k: tuple(v) if k in _TUPLE_FIELDS else v for k, v in data.items()}
    cfg = PipelineConfig(**coerced)
    cfg.validate()
    return cfg


def load_config(path) -> PipelineConfig:
    """Read a JSON config file holding PipelineConfig fields."""
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))
