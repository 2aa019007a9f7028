"""Run configuration: a flat key-value document with CLI overrides.

Precedence is CLI flag > config file > built-in default. The config file is
a flat JSON object; every command writes its fully resolved configuration
next to its outputs so a run can be reproduced from the artifacts alone.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError


@dataclass
class RunConfig:
    # dataset
    interactions: str = ""
    catalog: str = ""
    separator: str = ","
    user_col: int = 0
    item_col: int = 1
    rating_col: int = 2
    timestamp_col: int = 3
    catalog_separator: str = "::"
    catalog_item_col: int = 0
    catalog_title_col: int = 1
    label_threshold: float = 3.0
    train_ratio: float = 0.8
    valid_ratio: float = 0.1
    test_ratio: float = 0.1
    min_user: int = 3
    min_item: int = 3
    # model / training
    d: int = 32
    learning_rate: float = 1e-3
    batch_size: int = 1024
    max_epochs: int = 100
    patience: int = 5
    momentum: float = 0.9
    tau: float | None = None  # None -> sqrt(d)
    seed: int = 42
    # codes / corpus
    code_format: str = "binary"
    corpus_mode: str = "both"  # text_only | full | both
    corpus_partitions: str = "train,valid,test"
    history_len: int = 10
    # evaluation
    scorer: str = "binmf"
    dump_scores: bool = False
    # output
    out_dir: str = "out"

    def validate(self) -> None:
        ratios = (self.train_ratio, self.valid_ratio, self.test_ratio)
        if min(ratios) <= 0 or abs(sum(ratios) - 1.0) > 1e-9:
            raise ConfigError(f"split ratios must be positive and sum to 1, got {ratios}")
        if self.d <= 0:
            raise ConfigError("d must be positive")
        if self.code_format not in ("binary", "dot_decimal"):
            raise ConfigError(f"unknown code_format: {self.code_format!r}")
        if self.corpus_mode not in ("text_only", "full", "both"):
            raise ConfigError(f"unknown corpus_mode: {self.corpus_mode!r}")
        if self.scorer not in ("mf", "binmf", "bit_and"):
            raise ConfigError(f"unknown scorer: {self.scorer!r}")
        for name in ("learning_rate", "batch_size", "patience", "history_len"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.max_epochs < 0:
            raise ConfigError("max_epochs must be >= 0")
        if self.tau is not None and self.tau <= 0:
            raise ConfigError("tau must be positive")
        for name in ("min_user", "min_item"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        parts = self.partitions()
        if not parts or any(p not in ("train", "valid", "test") for p in parts):
            raise ConfigError(f"bad corpus_partitions: {self.corpus_partitions!r}")

    def partitions(self) -> list[str]:
        return [p.strip() for p in self.corpus_partitions.split(",") if p.strip()]

    def resolved_tau(self) -> float:
        import math

        return self.tau if self.tau is not None else math.sqrt(self.d)

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True) + "\n"


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}


def _coerce(name: str, value):
    if name not in _FIELDS:
        raise ConfigError(f"unknown config key: {name!r}")
    if value is None:
        return None
    target = _FIELDS[name].type
    try:
        if target == "bool" or isinstance(getattr(RunConfig(), name), bool):
            if isinstance(value, bool):
                return value
            if str(value).lower() in ("1", "true", "yes"):
                return True
            if str(value).lower() in ("0", "false", "no"):
                return False
            raise ValueError(value)
        if target == "int":
            return int(value)
        if target in ("float", "float | None"):
            return float(value)
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"bad value for config key {name!r}: {value!r}") from None


def load_config(path: str | Path | None, overrides: dict | None = None) -> RunConfig:
    """Build a RunConfig from defaults, an optional JSON file, and overrides."""
    values: dict = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError(f"config file {path} must hold a flat JSON object")
        for key, value in doc.items():
            values[key] = _coerce(key, value)
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = _coerce(key, value)
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def write_resolved(cfg: RunConfig, out_dir: str | Path, command: str) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{command}.config.json"
    path.write_text(cfg.to_json(), encoding="utf-8")
    return path
