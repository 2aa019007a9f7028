"""Desk-scale MovieLens-1M reproduction recipe.

The reference results were reported on a pre-processed MovieLens-1M slice of
51,623 interactions (33,891 / 10,401 / 7,331 train/valid/test, 839 users,
3,256 items). The exact upstream selection rules are not public, so this
module declares a reproducible stand-in: keep the chronologically most recent
51,623 interactions of the raw 1M log, binarize with rating > 3, and cut at
the published partition sizes. Resulting user/item counts are reported by the
caller against the published targets rather than enforced.

The raw dataset (ratings.dat, "::"-separated) is not redistributable here;
download it from the GroupLens MovieLens site and point BINREC_ML1M at it.
"""

from __future__ import annotations

from pathlib import Path

from .dataset import (
    SplitSet,
    TableSchema,
    binarize_labels,
    chronological_split_counts,
    ingest_interactions,
)
from .errors import DataError

ML1M_COUNTS = (33891, 10401, 7331)
ML1M_TOTAL = sum(ML1M_COUNTS)
ML1M_TARGET_USERS = 839
ML1M_TARGET_ITEMS = 3256


def prepare_ml1m(ratings_path: str | Path, label_threshold: float = 3.0) -> SplitSet:
    """Build the desk-reproduction split from a raw ratings.dat file."""
    rows = ingest_interactions(ratings_path, TableSchema.preset("double_colon"))
    if len(rows) < ML1M_TOTAL:
        raise DataError(
            f"{ratings_path} has {len(rows)} rows; the recipe needs at least {ML1M_TOTAL} "
            "(is this the full MovieLens-1M ratings.dat?)"
        )
    labeled = binarize_labels(rows, label_threshold)
    order = sorted(range(len(labeled)), key=lambda k: (labeled[k].timestamp, k))
    recent = [labeled[k] for k in order[-ML1M_TOTAL:]]
    return chronological_split_counts(recent, ML1M_COUNTS)
