"""
Plain-text matrix family files.

::

    # Example: the 2x2 family with entries x_i^2
    4 2 2
    w: 1 1 1 1
    vars: x
    x1^2 - x2^2 ; x3^2 + x4^2
    x3^2 - x4^2 ; x1^2 + x2^2

The header line gives ``N m n``.  ``w:`` (default all ones) and ``vars:``
(``x`` or ``u``, default ``x``) may follow in any order; then come m rows of
n ``;``-separated polynomials.  ``#`` starts a comment.
"""

from __future__ import annotations

from pathlib import Path

from detcert.errors import DetcertError, PolySyntaxError
from detcert.matrix_family import MatrixFamily
from detcert.poly import as_weights, default_names, parse, unit_weights


class FamilyFileError(DetcertError, ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


def loads(text: str) -> MatrixFamily:
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0]
        if content.strip():
            lines.append((number, content))
    if not lines:
        raise FamilyFileError("empty family file")
    number, header = lines[0]
    try:
        N, m, n = (int(tok) for tok in header.split())
    except ValueError:
        raise FamilyFileError("header must be three integers 'N m n'", number) from None
    if min(N, m, n) < 1:
        raise FamilyFileError("N, m and n must be positive", number)
    weights = unit_weights(N)
    letter = "x"
    body = []
    for number, content in lines[1:]:
        key, sep, value = content.partition(":")
        key = key.strip()
        if sep and key in ("w", "vars"):
            if body:
                raise FamilyFileError(f"'{key}:' after the matrix rows", number)
            if key == "w":
                try:
                    weights = as_weights((int(tok) for tok in value.split()), N)
                except ValueError as exc:
                    raise FamilyFileError(f"bad weights: {exc}", number) from None
            else:
                letter = value.strip()
                if letter not in ("x", "u"):
                    raise FamilyFileError(f"vars must be 'x' or 'u', got {letter!r}", number)
        else:
            body.append((number, content))
    if len(body) != m:
        raise FamilyFileError(f"expected {m} matrix rows, found {len(body)}")
    names = default_names(N, letter)
    rows = []
    for number, content in body:
        cells = content.split(";")
        if len(cells) != n:
            raise FamilyFileError(f"expected {n} entries, found {len(cells)}", number)
        row = []
        offset = 0
        for cell in cells:
            try:
                row.append(parse(cell, names))
            except PolySyntaxError as exc:
                raise FamilyFileError(str(exc), number, offset + exc.position + 1) from None
            offset += len(cell) + 1
        rows.append(tuple(row))
    return MatrixFamily(tuple(rows), weights, letter)


def load(path: str | Path) -> MatrixFamily:
    return loads(Path(path).read_text(encoding="utf-8"))


def dumps(F: MatrixFamily, comment: str | None = None) -> str:
    out = []
    if comment:
        out += [f"# {line}" for line in comment.splitlines()]
    out.append(f"{F.N} {F.m} {F.n}")
    out.append("w: " + " ".join(str(x) for x in F.weights))
    out.append(f"vars: {F.letter}")
    out += [" ; ".join(row) for row in F.to_strings()]
    return "\n".join(out) + "\n"


def fixture_path(name: str) -> Path:
    """Path of a bundled fixture; ``name`` may omit the ``.fam`` suffix."""
    from importlib import resources

    if not name.endswith(".fam"):
        name += ".fam"
    path = Path(str(resources.files("detcert").joinpath("fixtures", name)))
    if not path.exists():
        raise FileNotFoundError(name)
    return path


def load_fixture(name: str) -> MatrixFamily:
    return load(fixture_path(name))
