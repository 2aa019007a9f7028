"""Low-rank adapter fine-tuning with the one-step and two-step schedules.

Only the adapter parameters ever receive gradients; the base model stays
frozen (verifiable by hashing its weights before and after). Two-step tuning
trains stage one on a text-only corpus, then stage two continues from the
stage-one adapter on the full corpus, so the model learns the textual task
before it ever sees the code features. The loss is computed on completion
tokens only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import torch
from peft import LoraConfig, PeftModel, get_peft_model

from .corpus import CorpusRow, load_corpus
from .tokenizer import CharTokenizer

STAGES = ("stage1_text_only", "stage2_full", "single_stage")


@dataclass
class TuneConfig:
    learning_rate: float = 5e-3
    steps: int = 30
    batch_size: int = 16
    max_length: int = 640
    lora_rank: int = 8
    lora_alpha: int = 16
    seed: int = 0

    def __post_init__(self):
        if self.steps < 0 or self.batch_size <= 0 or self.learning_rate <= 0:
            raise ValueError("steps must be >= 0, batch_size and learning_rate positive")


@dataclass
class TuningStage:
    stage: str
    corpus_path: str | Path
    adapter_out: str | Path
    adapter_in: str | Path | None = None

    def __post_init__(self):
        if self.stage not in STAGES:
            raise ValueError(f"stage must be one of {STAGES}, got {self.stage!r}")
        if self.stage == "stage2_full" and self.adapter_in is None:
            raise ValueError("stage2_full requires the stage-1 adapter (adapter_in)")
        if self.stage in ("stage1_text_only", "single_stage") and self.adapter_in is not None:
            raise ValueError(f"{self.stage} starts from scratch; adapter_in must be None")


def attach_adapter(base_model, cfg: TuneConfig, adapter_in: str | Path | None = None):
    """Wrap the base model with a LoRA adapter: fresh or loaded from disk."""
    if adapter_in is not None:
        return PeftModel.from_pretrained(base_model, str(adapter_in), is_trainable=True)
    torch.manual_seed(cfg.seed)
    lora = LoraConfig(
        r=cfg.lora_rank,
        lora_alpha=cfg.lora_alpha,
        target_modules=["c_attn"],
        task_type="CAUSAL_LM",
    )
    return get_peft_model(base_model, lora)


def encode_example(tokenizer: CharTokenizer, row: CorpusRow, max_length: int):
    """(input_ids, labels) with the prompt part masked out of the loss."""
    prompt_ids = tokenizer.encode(row.prompt)
    completion_ids = tokenizer.encode(row.completion)
    input_ids = prompt_ids + completion_ids
    labels = [-100] * len(prompt_ids) + completion_ids
    if len(input_ids) > max_length:  # keep the tail: the answer cue must survive
        input_ids = input_ids[-max_length:]
        labels = labels[-max_length:]
    return input_ids, labels


def _batch_tensors(tokenizer, rows, max_length):
    encoded = [encode_example(tokenizer, r, max_length) for r in rows]
    width = max(len(ids) for ids, _ in encoded)
    pad = tokenizer.pad_id
    input_ids = torch.full((len(encoded), width), pad, dtype=torch.long)
    attention = torch.zeros((len(encoded), width), dtype=torch.long)
    labels = torch.full((len(encoded), width), -100, dtype=torch.long)
    for k, (ids, labs) in enumerate(encoded):
        input_ids[k, : len(ids)] = torch.tensor(ids)
        attention[k, : len(ids)] = 1
        labels[k, : len(labs)] = torch.tensor(labs)
    return input_ids, attention, labels


def finetune(
    stage: TuningStage,
    base_model,
    tokenizer: CharTokenizer,
    cfg: TuneConfig | None = None,
):
    """Train the adapter for cfg.steps minibatch steps and persist it.

    Returns (peft_model, loss_curve); loss_curve[k] is the forward loss of
    step k before its update, so loss_curve[0] is the untrained starting
    point. The curve is saved as loss_curve.json inside adapter_out, next to
    the adapter weights and the tokenizer.
    """
    cfg = cfg or TuneConfig()
    rows = load_corpus(stage.corpus_path)
    if not rows:
        raise ValueError(f"corpus {stage.corpus_path} is empty")
    model = attach_adapter(base_model, cfg, stage.adapter_in)
    model.train()
    trainable = [p for p in model.parameters() if p.requires_grad]
    optimizer = torch.optim.AdamW(trainable, lr=cfg.learning_rate)

    generator = torch.Generator().manual_seed(cfg.seed)
    order = torch.randperm(len(rows), generator=generator).tolist()
    cursor = 0
    loss_curve: list[float] = []
    for _step in range(cfg.steps):
        batch_rows = []
        for _ in range(min(cfg.batch_size, len(rows))):
            if cursor == len(order):
                order = torch.randperm(len(rows), generator=generator).tolist()
                cursor = 0
            batch_rows.append(rows[order[cursor]])
            cursor += 1
        input_ids, attention, labels = _batch_tensors(tokenizer, batch_rows, cfg.max_length)
        out = model(input_ids=input_ids, attention_mask=attention, labels=labels)
        loss_curve.append(float(out.loss.detach()))
        optimizer.zero_grad()
        out.loss.backward()
        optimizer.step()

    out_dir = Path(stage.adapter_out)
    out_dir.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(str(out_dir))
    tokenizer.save(out_dir / "tokenizer.json")
    with open(out_dir / "loss_curve.json", "w", encoding="utf-8") as fh:
        json.dump({"stage": stage.stage, "losses": loss_curve}, fh, indent=2)
    return model, loss_curve


def run_two_step(
    base_model,
    tokenizer: CharTokenizer,
    text_only_corpus: str | Path,
    full_corpus: str | Path,
    out_dir: str | Path,
    cfg: TuneConfig | None = None,
):
    """Stage 1 on the text-only corpus, stage 2 on the full corpus.

    Returns (final_model, stage1_curve, stage2_curve, stage1_dir, stage2_dir).
    """
    out_dir = Path(out_dir)
    stage1 = TuningStage("stage1_text_only", text_only_corpus, out_dir / "stage1")
    model1, curve1 = finetune(stage1, base_model, tokenizer, cfg)
    base = model1.unload()  # drop adapter wrapper, base weights untouched
    stage2 = TuningStage(
        "stage2_full", full_corpus, out_dir / "stage2", adapter_in=out_dir / "stage1"
    )
    model2, curve2 = finetune(stage2, base, tokenizer, cfg)
    return model2, curve1, curve2, out_dir / "stage1", out_dir / "stage2"
