"""File output helpers: atomic text writes, stable JSON."""

from __future__ import annotations

import json
import os


def atomic_write_text(path: str, text: str):
    """Write-temp-then-rename so readers never observe a partial file."""
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    os.replace(tmp, path)


def stable_json(payload) -> str:
    """UTF-8 JSON with sorted keys and a trailing newline."""
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"
