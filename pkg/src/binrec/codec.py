"""Bit-exact conversion between binary codes, 0/1 strings, and dot-decimal text.

A *binary code* is a 1-D array over {0, 1}. Its text renderings are either the
plain 0/1 string ("10101100...") or the dot-decimal compression, where every
8-bit group becomes its decimal byte value joined by ".", like an IPv4 address
("172.16.254.1"). Compression requires a bit width divisible by 8; widths are
never padded, since padding would make decompression ambiguous.

Dot-decimal output is canonical (no leading zeros inside a group), so text
equality coincides with code equality. The parser is lenient and accepts
leading zeros ("016" -> 16).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

BINARY_PATTERN = re.compile(r"^[01]+$")
DOT_DECIMAL_PATTERN = re.compile(r"^\d{1,3}(\.\d{1,3})*$")


class CodeFormat(str, Enum):
    BINARY = "binary"
    DOT_DECIMAL = "dot_decimal"


@dataclass(frozen=True)
class CodeText:
    """A code rendered as text, tagged with the format it is in."""

    text: str
    format: CodeFormat

    def __post_init__(self):
        fmt = CodeFormat(self.format)
        object.__setattr__(self, "format", fmt)
        if fmt is CodeFormat.BINARY:
            if not BINARY_PATTERN.match(self.text):
                raise ValueError(f"not a binary code string: {self.text!r}")
        else:
            if not DOT_DECIMAL_PATTERN.match(self.text):
                raise ValueError(f"not a dot-decimal code string: {self.text!r}")

    def __str__(self) -> str:
        return self.text


def _as_bits(code: Sequence[int] | np.ndarray) -> np.ndarray:
    bits = np.asarray(code)
    if bits.ndim != 1 or bits.size == 0:
        raise ValueError("code must be a nonempty 1-D sequence")
    if not np.isin(bits, (0, 1)).all():
        raise ValueError("code bits must all be 0 or 1")
    return bits.astype(np.uint8)


def code_to_binary_string(code: Sequence[int] | np.ndarray) -> str:
    """Render a bit code as a 0/1 string, one character per bit, in code order."""
    bits = _as_bits(code)
    return "".join("1" if b else "0" for b in bits)


def binary_string_to_code(text: str) -> np.ndarray:
    """Inverse of code_to_binary_string: parse a 0/1 string into a uint8 bit array."""
    if not BINARY_PATTERN.match(text):
        raise ValueError(f"not a binary code string: {text!r}")
    return np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")


def compress_dot_decimal(binary: str) -> str:
    """Compress a 0/1 string into dot-decimal text, 8 bits per decimal group.

    The bit order is most-significant-first within each byte, so
    "10101100..." begins with the group "172".
    """
    if not BINARY_PATTERN.match(binary):
        raise ValueError(f"not a binary code string: {binary!r}")
    if len(binary) % 8 != 0:
        raise ValueError(f"binary length {len(binary)} is not divisible by 8")
    groups = [str(int(binary[k : k + 8], 2)) for k in range(0, len(binary), 8)]
    return ".".join(groups)


def decompress_dot_decimal(text: str) -> str:
    """Expand dot-decimal text back into its 0/1 string, 8 bits per group."""
    bits = []
    for group in text.split("."):
        if group == "":
            raise ValueError(f"empty group in dot-decimal string: {text!r}")
        if not group.isdigit():
            raise ValueError(f"non-digit group {group!r} in dot-decimal string: {text!r}")
        value = int(group)
        if value > 255:
            raise ValueError(f"group {group!r} out of byte range in: {text!r}")
        bits.append(format(value, "08b"))
    return "".join(bits)


def render_code(code: Sequence[int] | np.ndarray, fmt: CodeFormat | str) -> CodeText:
    """Render a bit code in the requested format.

    Dot-decimal rendering requires the code width to be divisible by 8.
    """
    fmt = CodeFormat(fmt)
    binary = code_to_binary_string(code)
    if fmt is CodeFormat.BINARY:
        return CodeText(binary, CodeFormat.BINARY)
    return CodeText(compress_dot_decimal(binary), CodeFormat.DOT_DECIMAL)


def parse_code_text(text: CodeText | str, fmt: CodeFormat | str | None = None) -> np.ndarray:
    """Parse rendered code text back into a uint8 bit array."""
    if isinstance(text, CodeText):
        fmt = text.format
        text = text.text
    elif fmt is None:
        raise ValueError("format required when parsing a plain string")
    fmt = CodeFormat(fmt)
    if fmt is CodeFormat.BINARY:
        return binary_string_to_code(text)
    return binary_string_to_code(decompress_dot_decimal(text))


def compression_stats(binary_strings: Iterable[str]) -> dict:
    """Mean per-code character-count reduction of dot-decimal vs. 0/1 rendering.

    Reported both ways: counting only the decimal digits (dots ignored) and
    counting the full compressed string including dots.
    """
    ratios_no_dots = []
    ratios_with_dots = []
    for binary in binary_strings:
        compressed = compress_dot_decimal(binary)
        n_digits = len(compressed) - compressed.count(".")
        ratios_no_dots.append(len(binary) / n_digits)
        ratios_with_dots.append(len(binary) / len(compressed))
    if not ratios_no_dots:
        raise ValueError("no codes given")
    return {
        "n_codes": len(ratios_no_dots),
        "mean_ratio_ignoring_dots": float(np.mean(ratios_no_dots)),
        "mean_ratio_with_dots": float(np.mean(ratios_with_dots)),
    }


def write_code_dump(
    path: str | Path,
    entries: Iterable[tuple[str, str, CodeText]],
    d: int,
) -> None:
    """Write a code-dump file: header line with d and format, then one
    "kind<TAB>id<TAB>code_text" line per entity."""
    entries = list(entries)
    if not entries:
        raise ValueError("no entries to write")
    fmt = entries[0][2].format
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# d={d} format={fmt.value}\n")
        for kind, entity_id, code_text in entries:
            if kind not in ("user", "item"):
                raise ValueError(f"unknown entity kind: {kind!r}")
            if code_text.format is not fmt:
                raise ValueError("mixed code formats in one dump")
            fh.write(f"{kind}\t{entity_id}\t{code_text.text}\n")


def read_code_dump(path: str | Path) -> tuple[int, CodeFormat, dict[tuple[str, str], CodeText]]:
    """Read a code-dump file back into (d, format, {(kind, id): CodeText})."""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        m = re.match(r"^# d=(\d+) format=(\w+)$", header)
        if not m:
            raise ValueError(f"bad code-dump header in {path}: {header!r}")
        d = int(m.group(1))
        fmt = CodeFormat(m.group(2))
        codes: dict[tuple[str, str], CodeText] = {}
        for lineno, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 3:
                raise ValueError(f"bad code-dump row at {path}:{lineno}")
            kind, entity_id, text = parts
            codes[(kind, entity_id)] = CodeText(text, fmt)
    return d, fmt, codes
