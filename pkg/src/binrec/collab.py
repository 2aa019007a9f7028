"""Matrix-factorization embeddings with a binarization head, trained end to end
on binary-code scores via straight-through gradients.

The forward path per entity is: embedding e -> z = W e + b -> a = tanh(z)
-> bit = 1 if a > 0 else 0. During training the bits are remapped {0,1} ->
{-1,+1}, the user/item code inner product s (in [-d, d]) is squashed through
a logistic with temperature tau, and binary cross-entropy against the click
label is minimized. The sign step has zero gradient almost everywhere, so the
backward pass treats it as identity (straight-through); tanh and the affine
map use their exact analytic gradients.

Temperature: applying the logistic directly to s saturates for d = 32, so
scores are scaled by tau (default sqrt(d)) before the logistic. The logistic
is monotone, so tau never changes any ranking, only gradient magnitudes; set
tau = 1 for the unscaled form.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
import numpy as np

from .errors import DataError
from .evaluation import auc


@dataclass
class CollabModel:
    """Dense user/item embedding tables."""

    user_table: np.ndarray  # (n_users, d)
    item_table: np.ndarray  # (n_items, d)

    @property
    def n_users(self) -> int:
        return self.user_table.shape[0]

    @property
    def n_items(self) -> int:
        return self.item_table.shape[0]

    @property
    def d(self) -> int:
        return self.user_table.shape[1]


@dataclass
class BinarizationHead:
    """Shared fully connected layer feeding tanh + sign."""

    W: np.ndarray  # (d, d)
    b: np.ndarray  # (d,)


@dataclass
class TrainConfig:
    learning_rate: float = 1e-3
    batch_size: int = 1024
    max_epochs: int = 100
    early_stop_patience: int = 5
    tau: float | None = None  # None -> sqrt(d)
    momentum: float = 0.9
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0 or self.batch_size <= 0:
            raise ValueError("learning_rate and batch_size must be positive")
        if self.max_epochs < 0 or self.early_stop_patience <= 0:
            raise ValueError("max_epochs must be >= 0 and patience positive")
        if self.tau is not None and self.tau <= 0:
            raise ValueError("tau must be positive")
        if not 0 <= self.momentum < 1:
            raise ValueError("momentum must be in [0, 1)")


def init_model(n_users: int, n_items: int, d: int = 32, seed: int = 0) -> tuple[CollabModel, BinarizationHead]:
    """Deterministic initialization: small zero-mean embeddings, near-orthogonal
    W (so early codes are diverse rather than constant), zero bias."""
    if n_users <= 0 or n_items <= 0 or d <= 0:
        raise ValueError(f"n_users, n_items, d must be positive, got {(n_users, n_items, d)}")
    rng = np.random.default_rng(seed)
    user_table = rng.normal(0.0, 0.01, size=(n_users, d))
    item_table = rng.normal(0.0, 0.01, size=(n_items, d))
    q, r = np.linalg.qr(rng.normal(0.0, 1.0, size=(d, d)))
    W = q * np.sign(np.diag(r))  # sign-fixed so the factorization is unique
    b = np.zeros(d)
    return CollabModel(user_table=user_table, item_table=item_table), BinarizationHead(W=W, b=b)


def embed(model: CollabModel, index: int, kind: str) -> np.ndarray:
    """Row lookup in the user or item table."""
    if kind == "user":
        table = model.user_table
    elif kind == "item":
        table = model.item_table
    else:
        raise ValueError(f"kind must be 'user' or 'item', got {kind!r}")
    if not 0 <= index < table.shape[0]:
        raise IndexError(f"{kind} index {index} out of range [0, {table.shape[0]})")
    return table[index]


def binarize(head: BinarizationHead, e: np.ndarray) -> np.ndarray:
    """Map one embedding to its {0,1} code: bit_j = 1 iff tanh(W e + b)_j > 0.

    An activation of exactly 0 maps to bit 0.
    """
    e = np.asarray(e, dtype=np.float64)
    if not np.isfinite(e).all():
        raise ValueError("embedding must be finite")
    a = np.tanh(head.W @ e + head.b)
    return (a > 0).astype(np.uint8)


def binarize_batch(head: BinarizationHead, E: np.ndarray) -> np.ndarray:
    """Row-wise binarize for a (n, d) block of embeddings."""
    A = np.tanh(E @ head.W.T + head.b)
    return (A > 0).astype(np.uint8)


def to_signed(code: np.ndarray) -> np.ndarray:
    """{0,1} bits to the {-1,+1} values used by the training-time score."""
    return 2.0 * np.asarray(code, dtype=np.float64) - 1.0


def score_binmf(code_u: np.ndarray, code_i: np.ndarray, tau: float = 1.0) -> float:
    """Likelihood from two codes: logistic of the {-1,+1} inner product / tau."""
    code_u = np.asarray(code_u)
    code_i = np.asarray(code_i)
    if code_u.shape != code_i.shape:
        raise ValueError(f"code length mismatch: {code_u.shape} vs {code_i.shape}")
    s = float(np.dot(to_signed(code_u), to_signed(code_i)))
    return float(1.0 / (1.0 + math.exp(-s / tau)))


def score_binmf_batch(codes_u: np.ndarray, codes_i: np.ndarray, tau: float = 1.0) -> np.ndarray:
    s = np.sum(to_signed(codes_u) * to_signed(codes_i), axis=1)
    return 1.0 / (1.0 + np.exp(-s / tau))


def score_mf(e_u: np.ndarray, e_i: np.ndarray) -> float:
    """Plain matrix-factorization likelihood: logistic of the embedding dot product."""
    e_u = np.asarray(e_u, dtype=np.float64)
    e_i = np.asarray(e_i, dtype=np.float64)
    if e_u.shape != e_i.shape:
        raise ValueError(f"embedding width mismatch: {e_u.shape} vs {e_i.shape}")
    return float(1.0 / (1.0 + np.exp(-np.dot(e_u, e_i))))


def score_mf_batch(E_u: np.ndarray, E_i: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.sum(E_u * E_i, axis=1)))


def ste_backward(upstream_gradient: np.ndarray) -> np.ndarray:
    """Identity backward for the sign step: the output gradient is used directly
    as the input gradient."""
    return np.asarray(upstream_gradient)


def batch_loss_and_grads(
    model: CollabModel,
    head: BinarizationHead,
    u_idx: np.ndarray,
    i_idx: np.ndarray,
    labels: np.ndarray,
    tau: float,
    use_sign: bool = True,
) -> tuple[float, tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]]:
    """Mean BCE over one batch plus gradients for (user_table, item_table, W, b).

    With use_sign=True this is the training network: codes are the +/-1 images
    of the sign bits and the sign backward is the straight-through identity.
    With use_sign=False the sign step is dropped entirely (tanh outputs feed
    the score), which makes the network differentiable end to end; this
    surrogate is what finite-difference gradient checks run against, and the
    two modes share every other line of the backward pass.
    """
    U, V, W, b = model.user_table, model.item_table, head.W, head.b
    Eu = U[u_idx]
    Ei = V[i_idx]
    Zu = Eu @ W.T + b
    Zi = Ei @ W.T + b
    Au = np.tanh(Zu)
    Ai = np.tanh(Zi)
    if use_sign:
        Cu = np.where(Au > 0, 1.0, -1.0)
        Ci = np.where(Ai > 0, 1.0, -1.0)
    else:
        Cu, Ci = Au, Ai
    s = np.sum(Cu * Ci, axis=1)
    p = 1.0 / (1.0 + np.exp(-s / tau))
    p_safe = np.clip(p, 1e-12, 1.0 - 1e-12)
    loss = float(-np.mean(labels * np.log(p_safe) + (1.0 - labels) * np.log(1.0 - p_safe)))

    g_s = (p - labels) / (tau * len(labels))  # d(mean BCE)/ds through the logistic
    dCu = g_s[:, None] * Ci
    dCi = g_s[:, None] * Cu
    dAu = ste_backward(dCu) if use_sign else dCu
    dAi = ste_backward(dCi) if use_sign else dCi
    dZu = dAu * (1.0 - Au**2)
    dZi = dAi * (1.0 - Ai**2)
    dW = dZu.T @ Eu + dZi.T @ Ei
    db = dZu.sum(axis=0) + dZi.sum(axis=0)
    dU = np.zeros_like(U)
    dV = np.zeros_like(V)
    np.add.at(dU, u_idx, dZu @ W)
    np.add.at(dV, i_idx, dZi @ W)
    return loss, (dU, dV, dW, db)


def _valid_auc(model: CollabModel, head: BinarizationHead, valid, tau: float) -> float:
    u_idx, i_idx, labels = valid
    hu = binarize_batch(head, model.user_table[u_idx])
    hi = binarize_batch(head, model.item_table[i_idx])
    return auc(score_binmf_batch(hu, hi, tau), labels.astype(np.int64))


def train_binmf(
    model: CollabModel,
    head: BinarizationHead,
    train: tuple[np.ndarray, np.ndarray, np.ndarray],
    valid: tuple[np.ndarray, np.ndarray, np.ndarray],
    cfg: TrainConfig,
) -> tuple[CollabModel, BinarizationHead, list[dict]]:
    """Minibatch momentum descent on the straight-through binary-code objective.

    train/valid are (user_indices, item_indices, labels) triples of aligned
    arrays. Inputs are not mutated; the returned model/head hold the
    parameters of the best-validation-AUC epoch. The log has one row per
    completed epoch: {"epoch", "train_loss", "valid_auc"}.
    """
    u_tr, i_tr, t_tr = (np.asarray(a) for a in train)
    u_va, i_va, t_va = (np.asarray(a) for a in valid)
    if len(t_tr) == 0 or len(t_va) == 0:
        raise DataError("train and valid sets must be nonempty")
    if u_tr.max(initial=-1) >= model.n_users or i_tr.max(initial=-1) >= model.n_items:
        raise IndexError("training indices out of table bounds")
    n_pos = int(np.sum(t_tr == 1))
    if n_pos == 0 or n_pos == len(t_tr):
        raise DataError(
            f"degenerate training labels (all {'positive' if n_pos else 'negative'}): "
            "binary cross-entropy cannot be optimized"
        )
    tau = cfg.tau if cfg.tau is not None else math.sqrt(model.d)

    model = CollabModel(model.user_table.copy(), model.item_table.copy())
    head = BinarizationHead(head.W.copy(), head.b.copy())
    best_model = copy.deepcopy(model)
    best_head = copy.deepcopy(head)
    best_auc = -np.inf
    bad_epochs = 0
    log_rows: list[dict] = []
    rng = np.random.default_rng(cfg.seed)
    velocity = [np.zeros_like(model.user_table), np.zeros_like(model.item_table),
                np.zeros_like(head.W), np.zeros_like(head.b)]
    params = [model.user_table, model.item_table, head.W, head.b]

    for epoch in range(cfg.max_epochs):
        perm = rng.permutation(len(t_tr))
        loss_sum = 0.0
        for start in range(0, len(perm), cfg.batch_size):
            sel = perm[start : start + cfg.batch_size]
            loss, grads = batch_loss_and_grads(model, head, u_tr[sel], i_tr[sel], t_tr[sel], tau)
            loss_sum += loss * len(sel)
            for vel, param, grad in zip(velocity, params, grads):
                vel *= cfg.momentum
                vel -= cfg.learning_rate * grad
                param += vel
        valid_auc = _valid_auc(model, head, (u_va, i_va, t_va), tau)
        log_rows.append({
            "epoch": epoch,
            "train_loss": loss_sum / len(perm),
            "valid_auc": valid_auc,
        })
        if valid_auc > best_auc:
            best_auc = valid_auc
            best_model = copy.deepcopy(model)
            best_head = copy.deepcopy(head)
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= cfg.early_stop_patience:
                break
    return best_model, best_head, log_rows


def train_mf(
    model: CollabModel,
    train: tuple[np.ndarray, np.ndarray, np.ndarray],
    valid: tuple[np.ndarray, np.ndarray, np.ndarray],
    cfg: TrainConfig,
) -> tuple[CollabModel, list[dict]]:
    """Baseline trainer: BCE on logistic(e_u . e_i), no binarization head.

    Same loop shape and early stopping as train_binmf.
    """
    u_tr, i_tr, t_tr = (np.asarray(a) for a in train)
    u_va, i_va, t_va = (np.asarray(a) for a in valid)
    if len(t_tr) == 0 or len(t_va) == 0:
        raise DataError("train and valid sets must be nonempty")
    n_pos = int(np.sum(t_tr == 1))
    if n_pos == 0 or n_pos == len(t_tr):
        raise DataError("degenerate training labels: binary cross-entropy cannot be optimized")

    model = CollabModel(model.user_table.copy(), model.item_table.copy())
    best_model = copy.deepcopy(model)
    best_auc = -np.inf
    bad_epochs = 0
    log_rows: list[dict] = []
    rng = np.random.default_rng(cfg.seed)
    velocity = [np.zeros_like(model.user_table), np.zeros_like(model.item_table)]

    for epoch in range(cfg.max_epochs):
        perm = rng.permutation(len(t_tr))
        loss_sum = 0.0
        for start in range(0, len(perm), cfg.batch_size):
            sel = perm[start : start + cfg.batch_size]
            Eu = model.user_table[u_tr[sel]]
            Ei = model.item_table[i_tr[sel]]
            p = 1.0 / (1.0 + np.exp(-np.sum(Eu * Ei, axis=1)))
            p_safe = np.clip(p, 1e-12, 1.0 - 1e-12)
            t = t_tr[sel]
            loss_sum += float(-np.mean(t * np.log(p_safe) + (1 - t) * np.log(1 - p_safe))) * len(sel)
            g = (p - t)[:, None] / len(sel)
            dU = np.zeros_like(model.user_table)
            dV = np.zeros_like(model.item_table)
            np.add.at(dU, u_tr[sel], g * Ei)
            np.add.at(dV, i_tr[sel], g * Eu)
            for vel, param, grad in zip(velocity, [model.user_table, model.item_table], [dU, dV]):
                vel *= cfg.momentum
                vel -= cfg.learning_rate * grad
                param += vel
        valid_auc = auc(score_mf_batch(model.user_table[u_va], model.item_table[i_va]),
                        t_va.astype(np.int64))
        log_rows.append({"epoch": epoch, "train_loss": loss_sum / len(perm), "valid_auc": valid_auc})
        if valid_auc > best_auc:
            best_auc = valid_auc
            best_model = copy.deepcopy(model)
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= cfg.early_stop_patience:
                break
    return best_model, log_rows


@dataclass(frozen=True)
class CodeTable:
    """Binary codes for every user and item, row-indexed like the model tables."""

    user_codes: np.ndarray = field(repr=False)  # (n_users, d) uint8
    item_codes: np.ndarray = field(repr=False)  # (n_items, d) uint8

    @property
    def d(self) -> int:
        return self.user_codes.shape[1]

    @property
    def cardinality(self) -> int:
        return self.user_codes.shape[0] + self.item_codes.shape[0]

    def user(self, index: int) -> np.ndarray:
        return self.user_codes[index]

    def item(self, index: int) -> np.ndarray:
        return self.item_codes[index]


def encode_all(model: CollabModel, head: BinarizationHead) -> CodeTable:
    """Binarize every user and item embedding in one deterministic sweep."""
    return CodeTable(
        user_codes=binarize_batch(head, model.user_table),
        item_codes=binarize_batch(head, model.item_table),
    )
