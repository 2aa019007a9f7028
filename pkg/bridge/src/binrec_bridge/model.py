"""Base causal language models for the bridge.

The default is a tiny GPT-2-architecture model constructed locally with
random weights: large enough to validate the tuning mechanism, small enough
to train on a laptop CPU in seconds, and buildable with no network access.
A pretrained checkpoint name or path can be supplied instead where one is
available; the tuning and prediction code paths are identical either way.
"""

from __future__ import annotations

import hashlib

import torch
from transformers import AutoModelForCausalLM, GPT2Config, GPT2LMHeadModel


def build_tiny_causal_lm(
    vocab_size: int,
    n_positions: int = 1024,
    n_embd: int = 64,
    n_layer: int = 2,
    n_head: int = 2,
    seed: int = 0,
) -> GPT2LMHeadModel:
    torch.manual_seed(seed)
    config = GPT2Config(
        vocab_size=vocab_size,
        n_positions=n_positions,
        n_embd=n_embd,
        n_layer=n_layer,
        n_head=n_head,
    )
    return GPT2LMHeadModel(config)


def load_base_model(spec: str | None, vocab_size: int, seed: int = 0):
    """spec=None builds the local tiny model; otherwise a HF name or path."""
    if spec is None or spec == "tiny":
        return build_tiny_causal_lm(vocab_size, seed=seed)
    return AutoModelForCausalLM.from_pretrained(spec)


def _canonical_name(name: str) -> str:
    # adapter wrappers rename base parameters ("base_model.model." prefix,
    # ".base_layer" infix); strip both so hashes compare across wrapping
    if name.startswith("base_model.model."):
        name = name[len("base_model.model."):]
    return name.replace(".base_layer", "")


def weights_hash(model: torch.nn.Module, include_adapter: bool = False) -> str:
    """SHA-256 over (canonical name, bytes) of parameters, sorted by name.

    include_adapter=False hashes only base weights (names without "lora_"),
    which is how the frozen-base invariant is checked; include_adapter=True
    hashes only the adapter weights. Canonical names make the hash invariant
    to adapter wrapping, so a bare model and its wrapped version agree.
    """
    h = hashlib.sha256()
    entries = []
    for name, param in model.named_parameters():
        is_adapter = "lora_" in name
        if include_adapter != is_adapter:
            continue
        entries.append((_canonical_name(name), param))
    for name, param in sorted(entries):
        h.update(name.encode())
        h.update(param.detach().cpu().to(torch.float32).numpy().tobytes())
    return h.hexdigest()
