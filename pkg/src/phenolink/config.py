"""Declarative pipeline configuration (TOML) with CLI flag overrides.

One file pins every stage's hyperparameters so a run is reproducible
from the config plus a single global seed; per-stage seeds are derived
deterministically from that seed, never drawn from global state.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

import numpy as np

from . import PhenolinkError
from .embed import EdgeOperator, SkipGramConfig, WalkConfig
from .ingest import ColumnSpec
from .models import ForestConfig, GbdtConfig, LogisticConfig, MlpConfig
from .sampling import SamplingConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

MODEL_NAMES = ("logistic", "forest", "mlp", "gbdt-level", "gbdt-leaf")

_SEED_MASK = 0xFFFFFFFF
_STAGE_CODES = {"sample": 1, "walks": 2, "skipgram": 3, "train": 4}


class ConfigError(PhenolinkError):
    """Invalid configuration or usage; maps to exit code 2."""


def stage_seed(global_seed: int, stage: str, extra: int = 0) -> int:
    """Deterministic per-stage seed derived from the global seed."""
    seq = np.random.SeedSequence([global_seed & _SEED_MASK, _STAGE_CODES[stage], extra])
    return int(seq.generate_state(1)[0])


@dataclass
class ModelSpec:
    name: str
    options: dict = field(default_factory=dict)

    def build(self):
        """Instantiate the family's train config with option overrides."""
        if self.name == "logistic":
            return _build(LogisticConfig, self.options)
        if self.name == "mlp":
            opts = dict(self.options)
            if "hidden" in opts:
                opts["hidden"] = tuple(int(h) for h in opts["hidden"])
            return _build(MlpConfig, opts)
        if self.name == "forest":
            return _build(ForestConfig, self.options)
        if self.name == "gbdt-level":
            return _build(GbdtConfig, {"growth": "level", **self.options})
        if self.name == "gbdt-leaf":
            return _build(GbdtConfig, {"growth": "leaf", **self.options})
        raise ConfigError(f"unknown model {self.name!r}; choose from {MODEL_NAMES}")


def _build(cls, options: dict):
    allowed = {f.name for f in fields(cls)}
    unknown = set(options) - allowed
    if unknown:
        raise ConfigError(
            f"unknown option(s) {sorted(unknown)} for {cls.__name__}; allowed: {sorted(allowed)}"
        )
    try:
        return cls(**options)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {cls.__name__}: {exc}") from exc


@dataclass
class PipelineConfig:
    input_path: Path
    column_spec: ColumnSpec = ColumnSpec()
    source_kind: str = "HPO"
    target_kind: str = "GENE"
    sampling: SamplingConfig = SamplingConfig()
    train_fraction: float = 0.8
    stratified: bool = True
    walks: WalkConfig = WalkConfig()
    skipgram: SkipGramConfig = SkipGramConfig()
    operator: EdgeOperator = EdgeOperator.HADAMARD
    models: list[ModelSpec] = field(default_factory=lambda: [ModelSpec("gbdt-leaf")])
    threshold: float = 0.5
    out_dir: Path = Path("runs/out")
    seed: int = 0
    workers: int = 1
    render_figures: bool = True

    def __post_init__(self) -> None:
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError("train_fraction must be in (0, 1)")
        if not self.models:
            raise ConfigError("at least one model must be configured")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def to_dict(self) -> dict:
        """Config echo for the run manifest."""
        return {
            "input": {
                "path": str(self.input_path),
                "delimiter": self.column_spec.delimiter,
                "source_column": self.column_spec.source_column,
                "target_column": self.column_spec.target_column,
                "has_header": self.column_spec.has_header,
                "comment_prefix": self.column_spec.comment_prefix,
                "source_kind": self.source_kind,
                "target_kind": self.target_kind,
            },
            "sampling": {
                "positive_fraction": self.sampling.positive_fraction,
                "negative_count": self.sampling.negative_count,
                "max_connectivity_checks": self.sampling.max_connectivity_checks,
            },
            "split": {"train_fraction": self.train_fraction, "stratified": self.stratified},
            "walks": {
                "walk_length": self.walks.walk_length,
                "walks_per_node": self.walks.walks_per_node,
                "p": self.walks.p,
                "q": self.walks.q,
            },
            "embedding": {
                "dimensions": self.skipgram.dimensions,
                "window": self.skipgram.window,
                "negatives_per_positive": self.skipgram.negatives_per_positive,
                "epochs": self.skipgram.epochs,
                "initial_step_size": self.skipgram.initial_step_size,
                "noise_exponent": self.skipgram.noise_exponent,
            },
            "features": {"operator": self.operator.value},
            "models": {m.name: dict(m.options) for m in self.models},
            "evaluate": {"threshold": self.threshold},
            "run": {"seed": self.seed, "workers": self.workers, "out_dir": str(self.out_dir)},
        }


def _pop(table: dict, section: str) -> dict:
    value = table.pop(section, {})
    if not isinstance(value, dict):
        raise ConfigError(f"[{section}] must be a table")
    return value


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc

    inp = _pop(doc, "input")
    if "path" not in inp:
        raise ConfigError("[input] must set path")
    input_path = Path(inp.pop("path"))
    if not input_path.is_absolute():
        input_path = path.parent / input_path
    source_kind = inp.pop("source_kind", "HPO")
    target_kind = inp.pop("target_kind", "GENE")
    column_spec = _build(ColumnSpec, inp)

    sampling = _build(SamplingConfig, _pop(doc, "sampling"))
    split = _pop(doc, "split")
    train_fraction = float(split.pop("train_fraction", 0.8))
    stratified = bool(split.pop("stratified", True))
    if split:
        raise ConfigError(f"unknown [split] option(s): {sorted(split)}")
    walks = _build(WalkConfig, _pop(doc, "walks"))
    skipgram = _build(SkipGramConfig, _pop(doc, "embedding"))

    features = _pop(doc, "features")
    try:
        operator = EdgeOperator(features.pop("operator", "hadamard"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if features:
        raise ConfigError(f"unknown [features] option(s): {sorted(features)}")

    model_tables = _pop(doc, "models")
    models = [ModelSpec(name=name, options=dict(opts)) for name, opts in model_tables.items()]
    if not models:
        models = [ModelSpec("gbdt-leaf")]
    for spec in models:
        spec.build()  # validate early

    evaluate = _pop(doc, "evaluate")
    threshold = float(evaluate.pop("threshold", 0.5))
    if evaluate:
        raise ConfigError(f"unknown [evaluate] option(s): {sorted(evaluate)}")

    run = _pop(doc, "run")
    seed = int(run.pop("seed", 0))
    workers = int(run.pop("workers", 1))
    out_dir = Path(run.pop("out_dir", "runs/out"))
    render_figures = bool(run.pop("render_figures", True))
    if run:
        raise ConfigError(f"unknown [run] option(s): {sorted(run)}")
    if doc:
        raise ConfigError(f"unknown section(s): {sorted(doc)}")

    return PipelineConfig(
        input_path=input_path,
        column_spec=column_spec,
        source_kind=source_kind,
        target_kind=target_kind,
        sampling=sampling,
        train_fraction=train_fraction,
        stratified=stratified,
        walks=walks,
        skipgram=skipgram,
        operator=operator,
        models=models,
        threshold=threshold,
        out_dir=out_dir,
        seed=seed,
        workers=workers,
        render_figures=render_figures,
    )
