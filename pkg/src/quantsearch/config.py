"""Pipeline configuration: JSON file, env-var overrides, strict keys."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields

from .errors import ConfigError

ENV_PREFIX = "QUANTSEARCH_"


@dataclass
class PipelineConfig:
    bm25_k1: float = 1.2
    bm25_b: float = 0.75
    mining_k: int = 10
    mining_min_score: float | None = None
    evidence_window: int = 30
    terminators: str = "。.!?"
    skip_years: bool = True
    embedding_dim: int = 256
    embedding_buckets: int = 1 << 15
    margin: float = 0.5
    max_negatives: int = 5
    ranker_epochs: int = 10
    learning_rate: float = 0.05
    tagger_epochs: int = 15
    train_fraction: float = 0.7
    query_min_segments: int = 2
    query_min_sig_digits: int = 2
    eval_cutoff: int = 10
    seed: int = 0
    cors_origins: list = field(default_factory=lambda: ["*"])

    def validate(self) -> None:
        if self.bm25_k1 < 0 or not 0 <= self.bm25_b <= 1:
            raise ConfigError("bm25_k1 must be >= 0 and bm25_b in [0, 1]")
        if self.mining_k < 1:
            raise ConfigError("mining_k must be >= 1")
        if self.evidence_window < 0:
            raise ConfigError("evidence_window must be >= 0")
        if not 0 < self.margin <= 1:
            raise ConfigError("margin must be in (0, 1]")
        if self.max_negatives < 1:
            raise ConfigError("max_negatives must be >= 1")
        if not 0 < self.train_fraction < 1:
            raise ConfigError("train_fraction must be in (0, 1)")
        if self.eval_cutoff < 1:
            raise ConfigError("eval_cutoff must be >= 1")


_FIELD_TYPES = {f.name: f.type for f in fields(PipelineConfig)}


def _coerce(name: str, raw: str):
    kind = _FIELD_TYPES[name]
    if name == "cors_origins":
        return [o for o in raw.split(",") if o]
    if kind == "bool":
        return raw.strip().lower() in ("1", "true", "yes")
    if kind == "int":
        return int(raw)
    if kind in ("float", "float | None"):
        return float(raw)
    return raw


def load_config(path=None, env: dict | None = None) -> PipelineConfig:
    """Build the config from an optional JSON file plus env overrides.

    Unknown keys in the file are rejected.  Env vars use the field name
    uppercased with the QUANTSEARCH_ prefix, e.g. QUANTSEARCH_MINING_K=20.
    """
    values: dict = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        for key, value in data.items():
            if key not in _FIELD_TYPES:
                raise ConfigError(f"{path}: unknown config key {key!r}")
            values[key] = value
    env = os.environ if env is None else env
    for name in _FIELD_TYPES:
        raw = env.get(ENV_PREFIX + name.upper())
        if raw is not None:
            try:
                values[name] = _coerce(name, raw)
            except ValueError as exc:
                raise ConfigError(f"{ENV_PREFIX}{name.upper()}: {exc}") from exc
    config = PipelineConfig(**values)
    config.validate()
    return config
