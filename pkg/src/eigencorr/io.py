"""CSV writing with a fixed numeric format so reruns are byte-identical."""

from __future__ import annotations

import hashlib
from pathlib import Path


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    if hasattr(x, "dtype") and x.dtype.kind in "iu":
        return str(int(x))
    x = float(x)
    if x != x:
        return ""
    out = f"{x:.12g}"
    return "0" if out == "-0" else out


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    lines.extend(",".join(fmt(x) for x in row) for row in rows)
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
