"""Synthetic planted-code task: labels generated from hidden +/-1 codes.

Each user and item gets a random +/-1 code of width d; a pair is labeled
positive iff the code dot product is strictly positive. A trainer that
recovers the planted structure separates positives from negatives almost
perfectly, so held-out AUC on this task is a direct recovery check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PlantedTask:
    user_codes: np.ndarray  # (n_users, d) in {-1, +1}
    item_codes: np.ndarray  # (n_items, d) in {-1, +1}
    train: tuple[np.ndarray, np.ndarray, np.ndarray]
    valid: tuple[np.ndarray, np.ndarray, np.ndarray]
    test: tuple[np.ndarray, np.ndarray, np.ndarray]


def planted_code_task(
    n_users: int = 500,
    n_items: int = 500,
    d: int = 32,
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
    seed: int = 0,
) -> PlantedTask:
    """All n_users x n_items pairs, labeled by the planted-code rule, shuffled
    and cut into train/valid/test index triples."""
    rng = np.random.default_rng(seed)
    user_codes = rng.choice((-1.0, 1.0), size=(n_users, d))
    item_codes = rng.choice((-1.0, 1.0), size=(n_items, d))
    u, i = np.meshgrid(np.arange(n_users), np.arange(n_items), indexing="ij")
    u = u.ravel()
    i = i.ravel()
    labels = (np.einsum("ud,ud->u", user_codes[u], item_codes[i]) > 0).astype(np.float64)
    perm = rng.permutation(len(u))
    n = len(perm)
    n_train = int(n * ratios[0])
    n_valid = int(n * (ratios[0] + ratios[1])) - n_train
    cuts = {
        "train": perm[:n_train],
        "valid": perm[n_train : n_train + n_valid],
        "test": perm[n_train + n_valid :],
    }
    parts = {name: (u[sel], i[sel], labels[sel]) for name, sel in cuts.items()}
    return PlantedTask(
        user_codes=user_codes,
        item_codes=item_codes,
        train=parts["train"],
        valid=parts["valid"],
        test=parts["test"],
    )


def toy_interaction_file(
    path,
    n_users: int = 20,
    n_items: int = 15,
    n_rows: int = 100,
    seed: int = 0,
    separator: str = ",",
) -> None:
    """Write a small random interaction file (user,item,rating,timestamp)."""
    rng = np.random.default_rng(seed)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for k in range(n_rows):
            user = rng.integers(1, n_users + 1)
            item = rng.integers(1, n_items + 1)
            rating = rng.integers(1, 6)
            fh.write(f"u{user}{separator}i{item}{separator}{rating}{separator}{1000 + k}\n")


def toy_catalog_file(path, n_items: int = 15, separator: str = "::") -> None:
    """Write a matching toy item catalog (item,title)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for k in range(1, n_items + 1):
            fh.write(f"i{k}{separator}Book No. {k}\n")
