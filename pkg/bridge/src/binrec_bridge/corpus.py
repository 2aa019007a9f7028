"""Reader for the prompt-corpus interchange format.

One JSON object per line with keys "prompt", "completion", "user_id",
"item_id", "segment"; completions are restricted to "Yes"/"No". This is the
only coupling to the corpus producer: files, not imports.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

COMPLETIONS = ("Yes", "No")


class CorpusError(Exception):
    pass


@dataclass(frozen=True)
class CorpusRow:
    prompt: str
    completion: str
    user_id: str
    item_id: str
    segment: str | None = None

    @property
    def label(self) -> int:
        return 1 if self.completion == "Yes" else 0


def load_corpus(path: str | Path) -> list[CorpusRow]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"corpus file not found: {path}")
    rows: list[CorpusRow] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: not valid JSON ({exc})") from None
            try:
                row = CorpusRow(
                    prompt=doc["prompt"],
                    completion=doc["completion"],
                    user_id=str(doc["user_id"]),
                    item_id=str(doc["item_id"]),
                    segment=doc.get("segment"),
                )
            except KeyError as exc:
                raise CorpusError(f"{path}:{lineno}: missing key {exc}") from None
            if row.completion not in COMPLETIONS:
                raise CorpusError(
                    f"{path}:{lineno}: completion must be 'Yes' or 'No', got {row.completion!r}"
                )
            rows.append(row)
    return rows
