"""Configuration files (JSON, format version 1) and CSV.

Floats are stored as shortest round-trip decimal strings, so
``load(dump(X))`` reproduces every coordinate bit for bit.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from pointline.geometry import Configuration

FORMAT_VERSION = 1


class FileFormatError(ValueError):
    pass


def _num(v) -> str:
    return repr(float(v))


def _parse_num(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (str, int, float)):
        raise FileFormatError(f"{where}: expected a decimal string, got {v!r}")
    try:
        return float(v)
    except ValueError:
        raise FileFormatError(f"{where}: not a number: {v!r}") from None


def dumps(X: Configuration, include_labels: bool = False) -> str:
    head = {
        "format_version": FORMAT_VERSION,
        "provenance": X.provenance,
        "claimed_delta": None if X.claimed_delta is None else _num(X.claimed_delta),
    }
    lines = ["{"]
    for key, val in head.items():
        lines.append(f"  {json.dumps(key)}: {json.dumps(val)},")
    rows = [json.dumps([_num(a), _num(b), _num(c)]) for a, b, c in X.coords.tolist()]
    with_labels = include_labels and X.labels is not None
    lines.append('  "elements": [')
    lines.extend(f"    {r}," for r in rows[:-1])
    if rows:
        lines.append(f"    {rows[-1]}")
    lines.append("  ]" + ("," if with_labels else ""))
    if with_labels:
        labs = [json.dumps(r) for r in X.labels.tolist()]
        lines.append('  "labels": [')
        lines.extend(f"    {r}," for r in labs[:-1])
        if labs:
            lines.append(f"    {labs[-1]}")
        lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> Configuration:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"not JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise FileFormatError("top level must be an object")
    if doc.get("format_version") != FORMAT_VERSION:
        raise FileFormatError(f"unsupported format_version {doc.get('format_version')!r}")
    elems = doc.get("elements")
    if not isinstance(elems, list):
        raise FileFormatError("missing elements list")
    coords = np.empty((len(elems), 3))
    for i, e in enumerate(elems):
        if not isinstance(e, list) or len(e) != 3:
            raise FileFormatError(f"element {i}: expected [x, y, theta]")
        coords[i] = [_parse_num(v, f"element {i}") for v in e]
    claim = doc.get("claimed_delta")
    claim = None if claim is None else _parse_num(claim, "claimed_delta")
    labels = doc.get("labels")
    if labels is not None:
        try:
            labels = np.array(labels, dtype=np.int64).reshape(-1, 3)
        except (ValueError, TypeError):
            raise FileFormatError("labels must be integer triples") from None
    return Configuration(coords, claimed_delta=claim, provenance=str(doc.get("provenance", "")),
                         labels=labels)


def save(X: Configuration, path, include_labels: bool = False) -> None:
    Path(path).write_text(dumps(X, include_labels), encoding="utf-8")


def load(path) -> Configuration:
    return loads(Path(path).read_text(encoding="utf-8"))


def to_csv(X: Configuration) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "theta"])
    for row in X.coords.tolist():
        w.writerow([_num(v) for v in row])
    return buf.getvalue()


def from_csv(text: str, **kwargs) -> Configuration:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [h.strip() for h in rows[0]] != ["x", "y", "theta"]:
        raise FileFormatError("CSV header must be x,y,theta")
    body = [r for r in rows[1:] if r]
    coords = np.array([[_parse_num(v, f"row {i + 1}") for v in r] for i, r in enumerate(body)],
                      dtype=np.float64).reshape(-1, 3)
    return Configuration(coords, **kwargs)
