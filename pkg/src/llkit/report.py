"""Structured text reports for the command-line tools.

A report is one JSON-compatible object written to stdout or a file.
Every float is printed with 17 significant digits so reruns are
byte-identical and values round-trip exactly. The optional timestamp is
the only field that varies between identical invocations; commands
accept ``--no-timestamp`` to suppress it.
"""

from __future__ import annotations

import json
import math
import time

__all__ = ["build_report", "render_report"]

SCHEMA_VERSION = "1"


def build_report(command: str, seed, results: dict,
                 timestamp: bool = True) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "command": command}
    if timestamp:
        doc["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    if seed is not None:
        doc["seed"] = int(seed)
    doc["results"] = results
    return doc


def _fmt(value, indent: int) -> str:
    pad = "  " * indent
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "NaN"
        if math.isinf(value):
            return "Infinity" if value > 0 else "-Infinity"
        return format(value, ".17g")
    if isinstance(value, str):
        return json.dumps(value)
    if value is None:
        return "null"
    if isinstance(value, dict):
        if not value:
            return "{}"
        inner = ",\n".join(
            f'{pad}  {json.dumps(str(k))}: {_fmt(v, indent + 1)}'
            for k, v in value.items())
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        inner = ",\n".join(f"{pad}  {_fmt(v, indent + 1)}" for v in value)
        return "[\n" + inner + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def render_report(doc: dict) -> str:
    return _fmt(doc, 0) + "\n"
