"""Shared text format for persisted models.

A model file is UTF-8 text: a version header, a ``kind = <tag>`` line, then
``key = value`` lines. Floats are written with 17 significant digits so a
load(save(model)) round trip reproduces bit-identical predictions.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ParseError

FORMAT_HEADER = "qcreg-model 1"


def format_float(value: float) -> str:
    return f"{float(value):.17g}"


def format_array(values) -> str:
    return " ".join(format_float(v) for v in np.asarray(values, dtype=float).ravel())


def parse_array(text: str, where: str) -> np.ndarray:
    if not text.strip():
        return np.zeros(0)
    try:
        values = np.array([float(tok) for tok in text.split()], dtype=float)
    except ValueError:
        raise ParseError(f"{where}: bad numeric array") from None
    if not np.all(np.isfinite(values)):
        raise ParseError(f"{where}: non-finite array entry")
    return values


def parse_float(text: str, where: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"{where}: bad number {text!r}") from None
    if not math.isfinite(value):
        raise ParseError(f"{where}: non-finite number")
    return value


def parse_int(text: str, where: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"{where}: bad integer {text!r}") from None


def render(kind: str, entries: list[tuple[str, str]]) -> str:
    lines = [FORMAT_HEADER, f"kind = {kind}"]
    lines += [f"{key} = {value}" for key, value in entries]
    return "\n".join(lines) + "\n"


def parse(text: str, source: str = "<model>") -> tuple[str, dict[str, str]]:
    """Return (kind, key->value). Raises ParseError with line numbers."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != FORMAT_HEADER:
        raise ParseError(f"{source}: line 1: expected header {FORMAT_HEADER!r}")
    entries: dict[str, str] = {}
    for line_no, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParseError(f"{source}: line {line_no}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key in entries:
            raise ParseError(f"{source}: line {line_no}: duplicate key {key!r}")
        entries[key] = value
    kind = entries.pop("kind", None)
    if kind is None:
        raise ParseError(f"{source}: missing 'kind' line")
    return kind, entries


def require(entries: dict[str, str], key: str, source: str) -> str:
    if key not in entries:
        raise ParseError(f"{source}: missing key {key!r}")
    return entries[key]


def peek_kind(path: str) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        kind, _ = parse(handle.read(), source=path)
    return kind
