"""Deterministic character-level tokenizer.

Built from the corpus text plus printable ASCII so that "Y" and "N" (the
first characters of the two completions) always have stable ids. No
downloaded vocabulary files, so it works fully offline.
"""

from __future__ import annotations

import json
import string
from pathlib import Path
from typing import Iterable

PAD_TOKEN = "<pad>"
UNK_TOKEN = "<unk>"


class CharTokenizer:
    def __init__(self, alphabet: Iterable[str]):
        chars = sorted(set(alphabet))
        if any(len(c) != 1 for c in chars):
            raise ValueError("alphabet entries must be single characters")
        self.itos = [PAD_TOKEN, UNK_TOKEN] + chars
        self.stoi = {tok: k for k, tok in enumerate(self.itos)}

    @classmethod
    def from_texts(cls, texts: Iterable[str]) -> "CharTokenizer":
        alphabet = set(string.printable)
        for text in texts:
            alphabet.update(text)
        return cls(alphabet)

    @property
    def vocab_size(self) -> int:
        return len(self.itos)

    @property
    def pad_id(self) -> int:
        return 0

    @property
    def unk_id(self) -> int:
        return 1

    def token_id(self, char: str) -> int:
        return self.stoi.get(char, self.unk_id)

    def encode(self, text: str) -> list[int]:
        return [self.token_id(c) for c in text]

    def decode(self, ids: Iterable[int]) -> str:
        out = []
        for k in ids:
            tok = self.itos[k]
            if tok not in (PAD_TOKEN, UNK_TOKEN):
                out.append(tok)
        return "".join(out)

    def save(self, path: str | Path) -> None:
        doc = {"alphabet": self.itos[2:]}
        Path(path).write_text(json.dumps(doc, ensure_ascii=False), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "CharTokenizer":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(doc["alphabet"])
