import numpy as np
import pytest

from binrec.dataset import LabeledInteraction, SplitSet, chronological_split


def make_labeled(rows):
    """rows: iterable of (user, item, rating, ts, label) tuples."""
    return [
        LabeledInteraction(user_id=u, item_id=i, rating=float(r), timestamp=ts, label=lab)
        for u, i, r, ts, lab in rows
    ]


@pytest.fixture
def tiny_split() -> SplitSet:
    """Ten interactions over 3 users / 4 items, chronological, 8/1/1."""
    rows = make_labeled([
        ("u1", "i1", 5, 100, 1),
        ("u2", "i2", 2, 110, 0),
        ("u1", "i2", 4, 120, 1),
        ("u3", "i1", 1, 130, 0),
        ("u2", "i3", 5, 140, 1),
        ("u1", "i3", 3, 150, 0),
        ("u3", "i2", 4, 160, 1),
        ("u2", "i1", 5, 170, 1),
        ("u1", "i4", 4, 180, 1),
        ("u3", "i3", 2, 190, 0),
    ])
    return chronological_split(rows, (0.8, 0.1, 0.1))


def brute_force_auc(scores, labels) -> float:
    """O(n^2) pairwise oracle: positives above negatives, ties worth 0.5."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    total = 0.0
    for sp in pos:
        for sn in neg:
            if sp > sn:
                total += 1.0
            elif sp == sn:
                total += 0.5
    return total / (len(pos) * len(neg))
