"""Instance file formats: MatrixMarket coordinate and a small JSON schema.

MatrixMarket files must start with a ``%%MatrixMarket matrix coordinate
real general`` banner (``integer`` values are accepted too), use 1-based
indices, and imply ``b = c = 1``. JSON instances look like::

    {"rows": 2, "cols": 2, "entries": [[0, 0, 1], [0, 1, 2]], "b": [1, 1], "c": [1, 1]}

with 0-based indices; ``b`` and ``c`` default to all-ones.
"""

from __future__ import annotations

import json
import os

from .errors import ParseError
from .instance import RawInstance, build_raw

__all__ = ["parse_instance", "parse_matrix_market", "parse_json_instance", "infer_format"]

_FIELDS = {"real", "integer"}


def infer_format(path: str | os.PathLike) -> str:
    ext = os.path.splitext(os.fspath(path))[1].lower()
    if ext == ".json":
        return "json"
    if ext in (".mtx", ".mm"):
        return "mtx"
    raise ParseError(f"cannot infer format from extension {ext!r}; pass --format")


def parse_matrix_market(text: str) -> RawInstance:
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty file", line=1)
    banner = lines[0].split()
    if len(banner) != 5 or banner[0].lower() != "%%matrixmarket":
        raise ParseError("missing %%MatrixMarket banner", line=1)
    obj, fmt, field, symmetry = (tok.lower() for tok in banner[1:])
    if obj != "matrix" or fmt != "coordinate" or field not in _FIELDS or symmetry != "general":
        raise ParseError(
            f"unsupported header {' '.join(banner[1:])!r}; expected 'matrix coordinate real general'",
            line=1,
        )

    size = None
    entries = []
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        parts = line.split()
        if size is None:
            try:
                m, n, nnz = (int(p) for p in parts)
            except ValueError:
                raise ParseError(f"bad size line {line!r}", line=lineno) from None
            if m < 1 or n < 1 or nnz < 0:
                raise ParseError(f"bad dimensions {m} x {n} with {nnz} entries", line=lineno)
            size = (m, n, nnz)
            continue
        if len(parts) != 3:
            raise ParseError(f"expected 'row col value', got {line!r}", line=lineno)
        try:
            i, j, v = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise ParseError(f"bad entry {line!r}", line=lineno) from None
        if not (1 <= i <= size[0] and 1 <= j <= size[1]):
            raise ParseError(f"index ({i}, {j}) outside {size[0]} x {size[1]}", line=lineno)
        entries.append((i - 1, j - 1, v))

    if size is None:
        raise ParseError("missing size line", line=len(lines))
    if len(entries) != size[2]:
        raise ParseError(f"header declares {size[2]} entries, found {len(entries)}")
    m, n, _ = size
    return build_raw(entries, [1.0] * m, [1.0] * n, shape=(m, n))


def _index(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{what} must be an integer, got {value!r}")
    return value


def parse_json_instance(text: str) -> RawInstance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(data, dict):
        raise ParseError("top level must be an object")
    for key in ("rows", "cols", "entries"):
        if key not in data:
            raise ParseError(f"missing key {key!r}")
    m = _index(data["rows"], "rows")
    n = _index(data["cols"], "cols")
    if m < 1 or n < 1:
        raise ParseError(f"bad dimensions {m} x {n}")
    if not isinstance(data["entries"], list):
        raise ParseError("'entries' must be a list")
    entries = []
    for pos, item in enumerate(data["entries"]):
        if not isinstance(item, list) or len(item) != 3:
            raise ParseError(f"entries[{pos}] must be [row, col, value]")
        i = _index(item[0], f"entries[{pos}] row")
        j = _index(item[1], f"entries[{pos}] col")
        v = item[2]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParseError(f"entries[{pos}] value must be a number")
        entries.append((i, j, float(v)))
    b = data.get("b", [1.0] * m)
    c = data.get("c", [1.0] * n)
    for name, vec in (("b", b), ("c", c)):
        if not isinstance(vec, list) or any(
            isinstance(t, bool) or not isinstance(t, (int, float)) for t in vec
        ):
            raise ParseError(f"{name!r} must be a list of numbers")
    return build_raw(entries, b, c, shape=(m, n))


def parse_instance(path: str | os.PathLike, fmt: str | None = None) -> RawInstance:
    """Read an instance file; ``fmt`` is ``"mtx"``, ``"json"`` or inferred."""
    fmt = fmt or infer_format(path)
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if fmt == "mtx":
        return parse_matrix_market(text)
    if fmt == "json":
        return parse_json_instance(text)
    raise ParseError(f"unknown format {fmt!r}")
