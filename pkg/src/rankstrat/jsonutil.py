"""Deterministic JSON emission and atomic file writes.

Every artifact this package writes must be byte-identical across runs for
identical input. Keys keep insertion order, floats are printed with a
fixed six-decimal format, and files are written to a temp path then
renamed so failures never leave partial output behind.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any


def format_float(value: float) -> str:
    if not math.isfinite(value):
        raise ValueError(f"non-finite number in JSON output: {value!r}")
    if value == 0.0:
        value = 0.0  # normalize -0.0
    return format(value, ".6f")


def _encode(value: Any, out: list[str], indent: int | None, level: int) -> None:
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(format_float(value))
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, dict):
        _encode_items(
            [(json.dumps(str(k), ensure_ascii=False), v) for k, v in value.items()],
            out, indent, level, "{", "}",
        )
    elif isinstance(value, (list, tuple)):
        _encode_items([(None, v) for v in value], out, indent, level, "[", "]")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__} to JSON")


def _encode_items(items, out, indent, level, open_ch, close_ch) -> None:
    if not items:
        out.append(open_ch + close_ch)
        return
    out.append(open_ch)
    if indent is None:
        for i, (key, item) in enumerate(items):
            if i:
                out.append(", ")
            if key is not None:
                out.append(key + ": ")
            _encode(item, out, indent, level)
        out.append(close_ch)
        return
    pad = " " * (indent * (level + 1))
    for i, (key, item) in enumerate(items):
        out.append("," if i else "")
        out.append("\n" + pad)
        if key is not None:
            out.append(key + ": ")
        _encode(item, out, indent, level + 1)
    out.append("\n" + " " * (indent * level) + close_ch)


def dumps(value: Any, indent: int | None = 2) -> str:
    """Serialize to deterministic JSON text (no trailing newline)."""
    out: list[str] = []
    _encode(value, out, indent, 0)
    return "".join(out)


def atomic_write_bytes(path: Path | str, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def atomic_write_text(path: Path | str, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def write_json(path: Path | str, value: Any) -> None:
    atomic_write_text(path, dumps(value, indent=2) + "\n")
