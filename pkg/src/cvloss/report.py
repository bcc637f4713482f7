"""Deterministic CSV/JSON emission.

Identical inputs must produce byte-identical files, so everything is written
through one float formatter (17 significant digits), dictionary keys keep
insertion order, and newlines are always "\\n".
"""

import numpy as np


def format_float(x):
    x = float(x)
    if x != x:
        return "NaN"
    if x in (float("inf"), float("-inf")):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def _json_chunks(obj, indent, level):
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if obj is None:
        yield "null"
    elif obj is True:
        yield "true"
    elif obj is False:
        yield "false"
    elif isinstance(obj, str):
        yield '"' + obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'
    elif isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        yield str(int(obj))
    elif isinstance(obj, (float, np.floating)):
        yield format_float(obj)
    elif isinstance(obj, np.ndarray):
        yield from _json_chunks(obj.tolist(), indent, level)
    elif isinstance(obj, (list, tuple)):
        if not obj:
            yield "[]"
            return
        yield "[\n"
        for i, item in enumerate(obj):
            yield pad_in
            yield from _json_chunks(item, indent, level + 1)
            yield ",\n" if i + 1 < len(obj) else "\n"
        yield pad + "]"
    elif isinstance(obj, dict):
        if not obj:
            yield "{}"
            return
        yield "{\n"
        items = list(obj.items())
        for i, (key, value) in enumerate(items):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            yield pad_in + '"' + key + '": '
            yield from _json_chunks(value, indent, level + 1)
            yield ",\n" if i + 1 < len(items) else "\n"
        yield pad + "}"
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj, indent=2):
    return "".join(_json_chunks(obj, indent, 0)) + "\n"


def write_json(path, obj):
    with open(path, "w", newline="\n") as fh:
        fh.write(dumps_json(obj))


def format_cell(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return str(value)


def write_csv(path, header, rows):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_cell(v) for v in row) + "\n")


def matrix_payload(M):
    """Nested-list form of a matrix for JSON records."""
    return [[float(x) for x in row] for row in np.asarray(M)]
