"""Plain-text matrix files.

    # optional comments
    k n
    <k lines of n digits in 0..3, separated by spaces>
"""

from __future__ import annotations

import re

from .charmatrix import GenMatrix


class MatrixFileError(ValueError):
    def __init__(self, msg: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {msg}")
        self.line = line
        self.column = column


def parse_matrix(text: str) -> GenMatrix:
    lines = [(i, ln) for i, ln in enumerate(text.splitlines(), 1)
             if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise MatrixFileError("missing 'k n' header", 1)
    hline, header = lines[0]
    parts = header.split()
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise MatrixFileError(f"header must be 'k n', got {header.strip()!r}", hline)
    k, n = int(parts[0]), int(parts[1])
    if k < 1 or n < 1:
        raise MatrixFileError("k and n must be positive", hline)
    body = lines[1:]
    if len(body) != k:
        at = body[k][0] if len(body) > k else (body[-1][0] + 1 if body else hline + 1)
        raise MatrixFileError(f"expected {k} matrix rows, found {len(body)}", at)
    rows = []
    for lineno, ln in body:
        row = []
        for m in re.finditer(r"\S+", ln):
            if m.group() not in ("0", "1", "2", "3"):
                raise MatrixFileError(f"entry must be a digit 0-3, got {m.group()!r}",
                                      lineno, m.start() + 1)
            row.append(int(m.group()))
        if len(row) != n:
            raise MatrixFileError(f"expected {n} entries, found {len(row)}", lineno,
                                  len(ln.rstrip()) + 1)
        rows.append(tuple(row))
    return GenMatrix(tuple(rows))


def serialize_matrix(A: GenMatrix) -> str:
    return f"{A.k} {A.n}\n" + "".join(" ".join(map(str, r)) + "\n" for r in A.rows)
