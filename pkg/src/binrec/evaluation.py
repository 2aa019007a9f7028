"""AUC/UAUC metrics over all/warm/cold segments, with pluggable scorers.

AUC is computed rank-based with average ranks for ties, which matters here
because binary-code scorers emit small-integer scores with many ties. UAUC is
the unweighted mean of per-user AUC over users that have both label classes;
single-class users are excluded and counted in the report. The bitwise-AND
scorer (popcount of code AND code) is a diagnostic for whether codes carry
usable preference signal through plain bit operations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .dataset import Segment, SplitSet, index_arrays
from .errors import UndefinedMetricError

SCORERS = ("mf", "binmf", "bit_and")


@dataclass(frozen=True)
class ScoredExample:
    user_id: str
    item_id: str
    score: float
    label: int
    segment: str | None


@dataclass
class SegmentMetrics:
    auc: float | None
    uauc: float | None
    n_examples: int
    n_users_counted: int
    error: str | None = None


@dataclass
class MetricsReport:
    scorer: str
    segments: dict[str, SegmentMetrics]

    def to_json(self) -> str:
        doc = {
            "scorer": self.scorer,
            "segments": {
                name: {
                    "auc": m.auc,
                    "uauc": m.uauc,
                    "n_examples": m.n_examples,
                    "n_users_counted": m.n_users_counted,
                    "error": m.error,
                }
                for name, m in self.segments.items()
            },
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    def format_table(self) -> str:
        header = f"{'segment':<8} {'auc':>8} {'uauc':>8} {'examples':>9} {'users':>6}"
        lines = [header, "-" * len(header)]
        for name, m in self.segments.items():
            auc = f"{m.auc:.4f}" if m.auc is not None else "n/a"
            uauc = f"{m.uauc:.4f}" if m.uauc is not None else "n/a"
            lines.append(f"{name:<8} {auc:>8} {uauc:>8} {m.n_examples:>9} {m.n_users_counted:>6}")
        return "\n".join(lines)


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with tied values receiving the mean of their positions."""
    order = np.argsort(values, kind="mergesort")
    sorted_values = values[order]
    ranks = np.empty(len(values), dtype=np.float64)
    boundaries = np.flatnonzero(np.r_[True, sorted_values[1:] != sorted_values[:-1], True])
    for lo, hi in zip(boundaries[:-1], boundaries[1:]):
        ranks[order[lo:hi]] = 0.5 * (lo + hi + 1)
    return ranks


def auc(scores: Sequence[float] | np.ndarray, labels: Sequence[int] | np.ndarray) -> float:
    """Rank-based AUC: (sum of positive ranks - n_pos(n_pos+1)/2) / (n_pos * n_neg)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError("scores and labels must be 1-D and the same length")
    if not np.isfinite(scores).all():
        raise ValueError("scores must be finite")
    n_pos = int(np.sum(labels == 1))
    n_neg = int(np.sum(labels == 0))
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError(f"AUC undefined: {n_pos} positives, {n_neg} negatives")
    ranks = _average_ranks(scores)
    pos_rank_sum = float(ranks[labels == 1].sum())
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def _per_user_aucs(
    scores: np.ndarray, labels: np.ndarray, user_ids: Sequence[str]
) -> tuple[list[float], int]:
    """Per-user AUC for users with both classes; also counts excluded users."""
    by_user: dict[str, list[int]] = {}
    for k, uid in enumerate(user_ids):
        by_user.setdefault(uid, []).append(k)
    aucs = []
    excluded = 0
    for uid, idx in by_user.items():
        user_labels = labels[idx]
        if 0 < user_labels.sum() < len(user_labels):
            aucs.append(auc(scores[idx], user_labels))
        else:
            excluded += 1
    return aucs, excluded


def uauc(
    scores: Sequence[float] | np.ndarray,
    labels: Sequence[int] | np.ndarray,
    user_ids: Sequence[str],
) -> float:
    """Unweighted mean of per-user AUC over users having both label classes."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    aucs, _ = _per_user_aucs(scores, labels, user_ids)
    if not aucs:
        raise UndefinedMetricError("UAUC undefined: no user has both label classes")
    return float(np.mean(aucs))


def bitwise_and_score(code_u: np.ndarray, code_i: np.ndarray) -> int:
    """Population count of the bitwise AND of two equal-length {0,1} codes."""
    code_u = np.asarray(code_u)
    code_i = np.asarray(code_i)
    if code_u.shape != code_i.shape:
        raise ValueError(f"code length mismatch: {code_u.shape} vs {code_i.shape}")
    return int(np.sum((code_u == 1) & (code_i == 1)))


def score_examples(
    scorer: str,
    split: SplitSet,
    segments: Sequence[Segment | str] | None = None,
    *,
    model=None,
    head=None,
    tau: float | None = None,
    user_codes: np.ndarray | None = None,
    item_codes: np.ndarray | None = None,
) -> list[ScoredExample]:
    """Score every test interaction with the named scorer.

    mf needs model; binmf needs model + head (tau defaults to sqrt(d));
    bit_and needs the code tables (row-indexed like the split's index maps).
    """
    from . import collab  # deferred: collab imports auc from this module

    if scorer not in SCORERS:
        raise ValueError(f"unknown scorer {scorer!r}, expected one of {SCORERS}")
    u_idx, i_idx, labels = index_arrays(split, "test")
    if scorer == "mf":
        if model is None:
            raise ValueError("mf scorer requires a model")
        scores = collab.score_mf_batch(model.user_table[u_idx], model.item_table[i_idx])
    elif scorer == "binmf":
        if model is None or head is None:
            raise ValueError("binmf scorer requires model and head")
        if tau is None:
            tau = float(np.sqrt(model.d))
        hu = collab.binarize_batch(head, model.user_table[u_idx])
        hi = collab.binarize_batch(head, model.item_table[i_idx])
        scores = collab.score_binmf_batch(hu, hi, tau)
    else:
        if user_codes is None or item_codes is None:
            raise ValueError("bit_and scorer requires user_codes and item_codes")
        hu = user_codes[u_idx].astype(np.int64)
        hi = item_codes[i_idx].astype(np.int64)
        scores = np.sum((hu == 1) & (hi == 1), axis=1).astype(np.float64)

    tags: list[str | None]
    if segments is None:
        tags = [None] * len(labels)
    else:
        if len(segments) != len(labels):
            raise ValueError("segments must align with the test partition")
        tags = [Segment(s).value for s in segments]
    return [
        ScoredExample(
            user_id=r.user_id,
            item_id=r.item_id,
            score=float(scores[k]),
            label=int(labels[k]),
            segment=tags[k],
        )
        for k, r in enumerate(split.test)
    ]


def metrics_for(examples: Sequence[ScoredExample]) -> SegmentMetrics:
    """AUC/UAUC over one group of scored examples; errors recorded, not raised."""
    scores = np.array([e.score for e in examples], dtype=np.float64)
    labels = np.array([e.label for e in examples], dtype=np.int64)
    users = [e.user_id for e in examples]
    m = SegmentMetrics(auc=None, uauc=None, n_examples=len(examples), n_users_counted=0)
    try:
        m.auc = auc(scores, labels)
    except UndefinedMetricError as exc:
        m.error = str(exc)
    try:
        aucs, _ = _per_user_aucs(scores, labels, users)
        m.n_users_counted = len(aucs)
        if aucs:
            m.uauc = float(np.mean(aucs))
        else:
            raise UndefinedMetricError("UAUC undefined: no user has both label classes")
    except UndefinedMetricError as exc:
        m.error = str(exc) if m.error is None else f"{m.error}; {exc}"
    return m


def evaluate(
    scorer: str,
    split: SplitSet,
    segments: Sequence[Segment | str] | None = None,
    **scorer_params,
) -> tuple[MetricsReport, list[ScoredExample]]:
    """Score the test partition and report metrics for all/warm/cold segments.

    An undefined metric in one segment is recorded in that segment's entry
    and never aborts the others.
    """
    examples = score_examples(scorer, split, segments, **scorer_params)
    groups: dict[str, list[ScoredExample]] = {"all": list(examples)}
    if segments is not None:
        for name in (Segment.WARM.value, Segment.COLD.value):
            groups[name] = [e for e in examples if e.segment == name]
    report = MetricsReport(scorer=scorer, segments={})
    for name, group in groups.items():
        if group:
            report.segments[name] = metrics_for(group)
        else:
            report.segments[name] = SegmentMetrics(
                auc=None, uauc=None, n_examples=0, n_users_counted=0, error="empty segment"
            )
    return report, examples


def write_score_dump(examples: Sequence[ScoredExample], path: str | Path) -> None:
    """Per-example score dump, one JSON object per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for e in examples:
            row = {
                "user_id": e.user_id,
                "item_id": e.item_id,
                "score": e.score,
                "label": e.label,
                "segment": e.segment,
            }
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
