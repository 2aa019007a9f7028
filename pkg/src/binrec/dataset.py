"""Interaction-log ingestion, label binarization, chronological splitting,
warm/cold tagging, and item-catalog loading.

Input files are delimited text. Two presets cover the common public datasets:
comma-separated rows ("1,1193,5,978300760") and "::"-separated rows
("1::1193::5::978300760"). Labels are binarized with a strict-inequality
threshold (label = 1 iff rating > threshold). Splitting is global and
chronological, with ties broken by input order, so the train partition never
contains an interaction later than any validation or test interaction.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Interaction:
    """One (user, item, rating, timestamp) event."""

    user_id: str
    item_id: str
    rating: float
    timestamp: int

    def __post_init__(self):
        if not self.user_id or not self.item_id:
            raise ValueError("user_id and item_id must be nonempty")
        if self.timestamp < 0:
            raise ValueError("timestamp must be >= 0")


@dataclass(frozen=True)
class LabeledInteraction(Interaction):
    label: int = 0

    def __post_init__(self):
        super().__post_init__()
        if self.label not in (0, 1):
            raise ValueError("label must be 0 or 1")


class Segment(str, Enum):
    WARM = "warm"
    COLD = "cold"


@dataclass(frozen=True)
class TableSchema:
    """Column layout of a delimited interaction file."""

    separator: str = ","
    user_col: int = 0
    item_col: int = 1
    rating_col: int = 2
    timestamp_col: int = 3

    @classmethod
    def preset(cls, name: str) -> "TableSchema":
        if name == "csv":
            return cls(separator=",")
        if name == "double_colon":
            return cls(separator="::")
        raise ValueError(f"unknown schema preset: {name!r}")


@dataclass(frozen=True)
class CatalogSchema:
    """Column layout of a delimited item-catalog file."""

    separator: str = "::"
    item_col: int = 0
    title_col: int = 1


@dataclass(frozen=True)
class SplitSet:
    """Chronological train/valid/test partitions plus dense index maps.

    The index maps assign contiguous integers starting at 0, by order of
    first appearance in the time-sorted stream (train first, then valid,
    then test), so every identifier seen anywhere is mapped.
    """

    train: tuple[LabeledInteraction, ...]
    valid: tuple[LabeledInteraction, ...]
    test: tuple[LabeledInteraction, ...]
    user_index: dict[str, int] = field(repr=False)
    item_index: dict[str, int] = field(repr=False)

    @property
    def n_users(self) -> int:
        return len(self.user_index)

    @property
    def n_items(self) -> int:
        return len(self.item_index)

    def partition(self, name: str) -> tuple[LabeledInteraction, ...]:
        if name not in ("train", "valid", "test"):
            raise ValueError(f"unknown partition: {name!r}")
        return getattr(self, name)


def ingest_interactions(path: str | Path, schema: TableSchema) -> list[Interaction]:
    """Parse a delimited interaction file into Interaction records, input order kept.

    Raises FileNotFoundError for a missing file and DataError (with the line
    number) for rows whose rating or timestamp does not parse.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"interaction file not found: {path}")
    rows: list[Interaction] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            parts = line.split(schema.separator)
            needed = max(schema.user_col, schema.item_col, schema.rating_col, schema.timestamp_col)
            if len(parts) <= needed:
                raise DataError(f"{path}:{lineno}: expected at least {needed + 1} columns, got {len(parts)}")
            try:
                rating = float(parts[schema.rating_col])
                timestamp = int(float(parts[schema.timestamp_col]))
            except ValueError:
                raise DataError(f"{path}:{lineno}: unparsable rating/timestamp in row {line!r}") from None
            try:
                rows.append(
                    Interaction(
                        user_id=parts[schema.user_col].strip(),
                        item_id=parts[schema.item_col].strip(),
                        rating=rating,
                        timestamp=timestamp,
                    )
                )
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
    return rows


def binarize_labels(
    interactions: Iterable[Interaction], positive_threshold: float = 3.0
) -> list[LabeledInteraction]:
    """Attach binary labels: label = 1 iff rating > positive_threshold."""
    return [
        LabeledInteraction(
            user_id=r.user_id,
            item_id=r.item_id,
            rating=r.rating,
            timestamp=r.timestamp,
            label=1 if r.rating > positive_threshold else 0,
        )
        for r in interactions
    ]


def chronological_split(
    labeled: Sequence[LabeledInteraction],
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
) -> SplitSet:
    """Sort by timestamp (stable in input order) and cut at the ratio boundaries."""
    if not labeled:
        raise DataError("cannot split an empty interaction list")
    if min(ratios) <= 0 or abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must be positive and sum to 1, got {ratios}")
    order = sorted(range(len(labeled)), key=lambda k: (labeled[k].timestamp, k))
    rows = [labeled[k] for k in order]
    n = len(rows)
    n_train = int(n * ratios[0])
    n_valid = int(n * (ratios[0] + ratios[1])) - n_train
    train = tuple(rows[:n_train])
    valid = tuple(rows[n_train : n_train + n_valid])
    test = tuple(rows[n_train + n_valid :])

    user_index: dict[str, int] = {}
    item_index: dict[str, int] = {}
    for r in rows:
        if r.user_id not in user_index:
            user_index[r.user_id] = len(user_index)
        if r.item_id not in item_index:
            item_index[r.item_id] = len(item_index)
    return SplitSet(train=train, valid=valid, test=test, user_index=user_index, item_index=item_index)


def chronological_split_counts(
    labeled: Sequence[LabeledInteraction],
    counts: tuple[int, int, int],
) -> SplitSet:
    """Chronological split with explicit partition sizes instead of ratios."""
    if not labeled:
        raise DataError("cannot split an empty interaction list")
    if min(counts) <= 0 or sum(counts) != len(labeled):
        raise ValueError(f"counts {counts} must be positive and sum to {len(labeled)}")
    order = sorted(range(len(labeled)), key=lambda k: (labeled[k].timestamp, k))
    rows = [labeled[k] for k in order]
    n_train, n_valid, _ = counts
    user_index: dict[str, int] = {}
    item_index: dict[str, int] = {}
    for r in rows:
        if r.user_id not in user_index:
            user_index[r.user_id] = len(user_index)
        if r.item_id not in item_index:
            item_index[r.item_id] = len(item_index)
    return SplitSet(
        train=tuple(rows[:n_train]),
        valid=tuple(rows[n_train : n_train + n_valid]),
        test=tuple(rows[n_train + n_valid :]),
        user_index=user_index,
        item_index=item_index,
    )


def partition_warm_cold(split: SplitSet, min_user: int = 3, min_item: int = 3) -> list[Segment]:
    """Tag each test interaction warm or cold from training interaction counts.

    A test row is warm iff its user has at least min_user and its item at
    least min_item training interactions; otherwise cold. Returns one tag per
    test row, in test order.
    """
    user_counts: dict[str, int] = {}
    item_counts: dict[str, int] = {}
    for r in split.train:
        user_counts[r.user_id] = user_counts.get(r.user_id, 0) + 1
        item_counts[r.item_id] = item_counts.get(r.item_id, 0) + 1
    tags = []
    for r in split.test:
        warm = user_counts.get(r.user_id, 0) >= min_user and item_counts.get(r.item_id, 0) >= min_item
        tags.append(Segment.WARM if warm else Segment.COLD)
    return tags


def load_item_catalog(path: str | Path, schema: CatalogSchema = CatalogSchema()) -> dict[str, str]:
    """Load an item_id -> title map from a delimited catalog file.

    Duplicate ids keep the last occurrence; rows with an empty title after
    trimming are skipped. Both cases log a warning.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"catalog file not found: {path}")
    catalog: dict[str, str] = {}
    with open(path, "r", encoding="utf-8", errors="replace") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            parts = line.split(schema.separator)
            if len(parts) <= max(schema.item_col, schema.title_col):
                raise DataError(f"{path}:{lineno}: too few columns in catalog row {line!r}")
            item_id = parts[schema.item_col].strip()
            title = parts[schema.title_col].strip()
            if not title:
                log.warning("%s:%d: empty title for item %s, row skipped", path, lineno, item_id)
                continue
            if item_id in catalog:
                log.warning("%s:%d: duplicate item %s, keeping the later title", path, lineno, item_id)
            catalog[item_id] = title
    return catalog


def index_arrays(
    split: SplitSet, partition: str
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Dense (user_indices, item_indices, labels) arrays for one partition."""
    rows = split.partition(partition)
    u = np.array([split.user_index[r.user_id] for r in rows], dtype=np.int64)
    i = np.array([split.item_index[r.item_id] for r in rows], dtype=np.int64)
    t = np.array([r.label for r in rows], dtype=np.float64)
    return u, i, t


# ---------------------------------------------------------------------------
# Persistence: split partitions as TSV plus a JSON manifest.

def file_sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def save_split(split: SplitSet, out_dir: str | Path, manifest_extra: dict | None = None) -> Path:
    """Write train/valid/test TSV files and a manifest; returns the manifest path.

    Row format: user_id <TAB> item_id <TAB> rating <TAB> timestamp <TAB> label.
    The index maps are not persisted; they are rebuilt deterministically on
    load by first appearance over train, then valid, then test.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in ("train", "valid", "test"):
        with open(out_dir / f"split.{name}.tsv", "w", encoding="utf-8", newline="\n") as fh:
            for r in split.partition(name):
                fh.write(f"{r.user_id}\t{r.item_id}\t{r.rating!r}\t{r.timestamp}\t{r.label}\n")
    manifest = {
        "row_counts": {name: len(split.partition(name)) for name in ("train", "valid", "test")},
        "n_users": split.n_users,
        "n_items": split.n_items,
    }
    if manifest_extra:
        manifest.update(manifest_extra)
    manifest_path = out_dir / "manifest.json"
    with open(manifest_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest_path


def load_split(out_dir: str | Path) -> SplitSet:
    """Reload a SplitSet persisted by save_split."""
    out_dir = Path(out_dir)
    parts: dict[str, tuple[LabeledInteraction, ...]] = {}
    for name in ("train", "valid", "test"):
        path = out_dir / f"split.{name}.tsv"
        if not path.is_file():
            raise FileNotFoundError(f"split file not found: {path}")
        rows = []
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                fields = line.split("\t")
                if len(fields) != 5:
                    raise DataError(f"{path}:{lineno}: expected 5 tab-separated fields")
                try:
                    rows.append(
                        LabeledInteraction(
                            user_id=fields[0],
                            item_id=fields[1],
                            rating=float(fields[2]),
                            timestamp=int(fields[3]),
                            label=int(fields[4]),
                        )
                    )
                except ValueError as exc:
                    raise DataError(f"{path}:{lineno}: {exc}") from None
        parts[name] = tuple(rows)
    user_index: dict[str, int] = {}
    item_index: dict[str, int] = {}
    for name in ("train", "valid", "test"):
        for r in parts[name]:
            if r.user_id not in user_index:
                user_index[r.user_id] = len(user_index)
            if r.item_id not in item_index:
                item_index[r.item_id] = len(item_index)
    return SplitSet(
        train=parts["train"], valid=parts["valid"], test=parts["test"],
        user_index=user_index, item_index=item_index,
    )
