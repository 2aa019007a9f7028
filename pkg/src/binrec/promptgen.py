"""Prompt-template rendering and instruction-tuning corpus generation.

The default template asks for a Yes/No judgement given the user's positively
rated history (a text field) and the user/item feature codes (ID fields). The
text-only mode, used as stage one of two-step tuning, removes the ID-field
sentences entirely so the prompt carries no collaborative code at all.

Every corpus record's history is restricted to the user's strictly earlier
positively labeled interactions (earlier in the global chronological order;
ties fall back to input order, matching the split's tie rule) and never
contains the record's own target item.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Mapping, Sequence

from .codec import CodeText
from .dataset import Segment, SplitSet
from .errors import DataError

DEFAULT_TEMPLATE_TEXT = (
    "#Question: A user has given high ratings to the following books: <ItemTitleList>. "
    "Additionally, we have information about the user's preferences encoded in the feature "
    "<UserID>. Using all available information, make a prediction about whether the user "
    "would enjoy the book titled <TargetItemTitle> with the feature <TargetItemID>? "
    'Answer with "Yes" or "No". \n#Answer:'
)

TEXT_FIELDS = ("<ItemTitleList>", "<TargetItemTitle>")
ID_FIELDS = ("<UserID>", "<TargetItemID>")
PLACEHOLDERS = TEXT_FIELDS + ID_FIELDS
_PLACEHOLDER_RE = re.compile(r"<[A-Za-z][A-Za-z0-9]*>")
EMPTY_HISTORY_TOKEN = "None"


class CorpusMode(str, Enum):
    TEXT_ONLY = "text_only"
    FULL = "full"


@dataclass(frozen=True)
class PromptTemplate:
    """A template whose four placeholders each appear exactly once."""

    text: str = DEFAULT_TEMPLATE_TEXT

    def __post_init__(self):
        for ph in PLACEHOLDERS:
            if self.text.count(ph) != 1:
                raise ValueError(f"template must contain {ph} exactly once")
        unknown = set(_PLACEHOLDER_RE.findall(self.text)) - set(PLACEHOLDERS)
        if unknown:
            raise ValueError(f"template has unknown placeholders: {sorted(unknown)}")

    def text_for_mode(self, mode: CorpusMode | str) -> str:
        if CorpusMode(mode) is CorpusMode.FULL:
            return self.text
        return strip_id_fields(self.text)


def strip_id_fields(template_text: str) -> str:
    """Drop the ID-field sentences from a template, leaving a text-only prompt.

    The sentence containing <UserID> is removed whole; the clause attaching
    <TargetItemID> to the target-item sentence is removed, falling back to
    deleting the bare placeholder if no clause pattern matches.
    """
    out = re.sub(r"\s*[^.?!]*<UserID>[^.?!]*[.?!]", "", template_text, count=1)
    out = re.sub(r",?\s*\b(?:with|encoded in|using)\b[^.?!,<]*<TargetItemID>", "", out, count=1)
    out = out.replace("<TargetItemID>", "")
    for ph in ID_FIELDS:
        if ph in out:
            raise ValueError(f"could not remove ID field {ph} from template")
    return out


@dataclass(frozen=True)
class PromptRecord:
    prompt: str
    completion: str
    user_id: str
    item_id: str
    segment: str | None = None


def completion_for_label(label: int) -> str:
    if label == 1:
        return "Yes"
    if label == 0:
        return "No"
    raise ValueError(f"label must be 0 or 1, got {label!r}")


def format_title_list(titles: Sequence[str]) -> str:
    """Comma-joined double-quoted titles, oldest first; 'None' when empty."""
    if not titles:
        return EMPTY_HISTORY_TOKEN
    return ", ".join(f'"{t}"' for t in titles)


def render_prompt(
    template: PromptTemplate,
    history_titles: Sequence[str],
    codes: tuple[CodeText | str, CodeText | str] | None,
    target_title: str,
    mode: CorpusMode | str = CorpusMode.FULL,
    max_history: int | None = 10,
) -> str:
    """Substitute the template fields once each and return the prompt string.

    history_titles is chronological (most recent last) and is truncated to
    its newest max_history entries. In full mode both the user and item code
    texts must be given; in text_only mode codes are ignored.
    """
    mode = CorpusMode(mode)
    text = template.text_for_mode(mode)
    if max_history is not None:
        history_titles = list(history_titles)[-max_history:]
    text = text.replace("<ItemTitleList>", format_title_list(history_titles))
    text = text.replace("<TargetItemTitle>", target_title)
    if mode is CorpusMode.FULL:
        if codes is None or codes[0] is None or codes[1] is None:
            raise ValueError("full mode requires both user and item code texts")
        text = text.replace("<UserID>", str(codes[0]))
        text = text.replace("<TargetItemID>", str(codes[1]))
    return text


def build_corpus(
    split: SplitSet,
    catalog: Mapping[str, str],
    codes: Mapping[tuple[str, str], CodeText | str] | None,
    mode: CorpusMode | str = CorpusMode.FULL,
    partition: str = "train",
    history_len: int = 10,
    template: PromptTemplate | None = None,
    segments: Sequence[Segment | str] | None = None,
) -> list[PromptRecord]:
    """One PromptRecord per interaction of the chosen partition, in split order.

    codes maps ("user", user_id) / ("item", item_id) to rendered code text and
    must cover every referenced entity in full mode. segments, if given, must
    align with the test partition and fills the record tag; other partitions
    carry segment=None.
    """
    mode = CorpusMode(mode)
    template = template or PromptTemplate()
    rows = split.partition(partition)
    if partition == "test" and segments is not None and len(segments) != len(rows):
        raise ValueError("segments must align with the test partition")

    def title_of(item_id: str) -> str:
        try:
            return catalog[item_id]
        except KeyError:
            raise DataError(f"no title for item {item_id!r}") from None

    def code_of(kind: str, entity_id: str):
        assert codes is not None
        try:
            return codes[(kind, entity_id)]
        except KeyError:
            raise DataError(f"no code for {kind} {entity_id!r}") from None

    # Global chronological order is train + valid + test concatenated; an
    # emitted record may only look at positives strictly before its position.
    offsets = {"train": 0, "valid": len(split.train), "test": len(split.train) + len(split.valid)}
    history: dict[str, list[tuple[int, str]]] = {}
    for name in ("train", "valid", "test"):
        base = offsets[name]
        for k, r in enumerate(split.partition(name)):
            if r.label == 1:
                history.setdefault(r.user_id, []).append((base + k, r.item_id))

    records = []
    base = offsets[partition]
    for k, r in enumerate(rows):
        position = base + k
        earlier = [iid for pos, iid in history.get(r.user_id, []) if pos < position and iid != r.item_id]
        titles = [title_of(iid) for iid in earlier[-history_len:]]
        code_pair = None
        if mode is CorpusMode.FULL:
            code_pair = (code_of("user", r.user_id), code_of("item", r.item_id))
        prompt = render_prompt(
            template, titles, code_pair, title_of(r.item_id), mode, max_history=history_len
        )
        tag = None
        if partition == "test" and segments is not None:
            tag = Segment(segments[k]).value
        records.append(
            PromptRecord(
                prompt=prompt,
                completion=completion_for_label(r.label),
                user_id=r.user_id,
                item_id=r.item_id,
                segment=tag,
            )
        )
    return records


def code_text_map(
    split: SplitSet, code_table, fmt
) -> dict[tuple[str, str], CodeText]:
    """Render a CodeTable into the (kind, external id) -> CodeText map that
    build_corpus consumes."""
    from .codec import render_code

    out: dict[tuple[str, str], CodeText] = {}
    for user_id, idx in split.user_index.items():
        out[("user", user_id)] = render_code(code_table.user(idx), fmt)
    for item_id, idx in split.item_index.items():
        out[("item", item_id)] = render_code(code_table.item(idx), fmt)
    return out


def write_corpus(records: Sequence[PromptRecord], path: str | Path) -> None:
    """JSON Lines, UTF-8, LF newlines, one record object per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            row = {
                "prompt": r.prompt,
                "completion": r.completion,
                "user_id": r.user_id,
                "item_id": r.item_id,
                "segment": r.segment,
            }
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def read_corpus(path: str | Path) -> list[PromptRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
                records.append(
                    PromptRecord(
                        prompt=row["prompt"],
                        completion=row["completion"],
                        user_id=row["user_id"],
                        item_id=row["item_id"],
                        segment=row.get("segment"),
                    )
                )
            except (json.JSONDecodeError, KeyError) as exc:
                raise DataError(f"{path}:{lineno}: bad corpus row ({exc})") from None
    return records
