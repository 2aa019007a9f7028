"""Yes/No prediction from the next-token distribution.

p_yes is the two-way renormalized probability of the "Yes" continuation
against "No": softmax over exactly the two first-token logits at the answer
position. Scoring is greedy and deterministic for fixed weights.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import torch

from .corpus import CorpusRow
from .tokenizer import CharTokenizer

ANSWER_CUE = "\n#Answer:"


@dataclass(frozen=True)
class Prediction:
    prompt: str
    p_yes: float


@torch.no_grad()
def predict(model, tokenizer: CharTokenizer, prompt: str, max_length: int = 1024) -> Prediction:
    if not prompt.endswith(ANSWER_CUE):
        raise ValueError(f"prompt must end with the answer cue {ANSWER_CUE!r}")
    model.eval()
    ids = tokenizer.encode(prompt)[-max_length:]
    input_ids = torch.tensor([ids], dtype=torch.long)
    logits = model(input_ids=input_ids).logits[0, -1]
    yes_id = tokenizer.token_id("Y")
    no_id = tokenizer.token_id("N")
    pair = torch.softmax(torch.stack([logits[yes_id], logits[no_id]]), dim=0)
    return Prediction(prompt=prompt, p_yes=float(pair[0]))


@torch.no_grad()
def score_rows(
    model, tokenizer: CharTokenizer, rows: Sequence[CorpusRow], max_length: int = 1024
) -> list[dict]:
    """Score corpus rows into the evaluation dump row format."""
    out = []
    for row in rows:
        pred = predict(model, tokenizer, row.prompt, max_length)
        out.append(
            {
                "user_id": row.user_id,
                "item_id": row.item_id,
                "score": pred.p_yes,
                "label": row.label,
                "segment": row.segment,
            }
        )
    return out


def write_score_dump(rows: Iterable[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
