"""Versioned CSV persistence.

Every file starts with a ``# <schema> v<version>`` line followed by a CSV
header. Readers reject other schemas, versions and headers; writers go
through a temporary file in the target directory and an atomic rename.
"""

from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence, Type, TypeVar

from pydantic import BaseModel, ValidationError

from .errors import SchemaError
from .schemas import (
    CoefficientRow,
    CountingRow,
    EigenvalueRow,
    FourierCoefficients,
    LengthSpectrumEntry,
    LValueRow,
    SpectralPoint,
    WindingRow,
)

Row = TypeVar("Row", bound=BaseModel)

EIGENVALUES = ("hs-eig", 1, ("r", "lambda", "symmetry", "M", "residual_two_height", "residual_hecke"))
COEFFICIENTS = ("hs-coef", 1, ("n", "a_n"))
LENGTHS = ("hs-len", 1, ("ell", "ell0", "mult"))
COUNTING = ("hs-weyl", 1, ("lambda", "N", "M", "main", "D", "fit_c", "fit_residual"))
WINDING = ("hs-wind", 1, ("lambda", "M", "error"))
LVALUES = ("hs-lval", 1, ("s_re", "s_im", "L_re", "L_im", "Lambda_re", "Lambda_im", "tail_bound"))


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render(schema: tuple, rows: Iterable[BaseModel]) -> str:
    """CSV text of ``rows`` under ``schema``, version line included."""

    name, version, columns = schema
    buffer = io.StringIO()
    buffer.write(f"# {name} v{version}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        data = row.model_dump(by_alias=True)
        writer.writerow([_format(data[column]) for column in columns])
    return buffer.getvalue()


def write_table(path: Path, schema: tuple, rows: Iterable[BaseModel]) -> None:
    atomic_write_text(path, render(schema, rows))


def _read(path: Path, schema: tuple, model: Type[Row]) -> list[Row]:
    name, version, columns = schema
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    lines = text.splitlines()
    expected = f"# {name} v{version}"
    if not lines or lines[0].strip() != expected:
        found = lines[0].strip() if lines else "<empty file>"
        raise SchemaError(f"{path}: expected '{expected}', found '{found}'")
    reader = csv.reader(lines[1:])
    header = next(reader, None)
    if header is None or tuple(header) != columns:
        raise SchemaError(f"{path}: header {header} does not match {list(columns)}")
    rows = []
    for lineno, record in enumerate(reader, start=3):
        if not record:
            continue
        data = {column: (cell if cell != "" else None) for column, cell in zip(columns, record)}
        try:
            rows.append(model.model_validate(data))
        except ValidationError as exc:
            raise SchemaError(f"{path}:{lineno}: {exc}") from exc
    return rows


def coefficients_path(path: Path) -> Path:
    path = Path(path)
    return path.with_name(f"{path.stem}.coeffs.csv")


def write_eigenvalues(path: Path, points: Sequence[SpectralPoint]) -> None:
    """Eigenvalue table plus the sibling coefficient file.

    Coefficient blocks appear in row order; each block restarts at n = 1.
    """

    write_table(path, EIGENVALUES, (EigenvalueRow.from_point(p) for p in points))
    coefficient_rows = (
        CoefficientRow(n=n, a_n=float(a))
        for point in points
        for n, a in enumerate(point.coefficients.a, start=1)
    )
    write_table(coefficients_path(path), COEFFICIENTS, coefficient_rows)


def read_eigenvalue_rows(path: Path) -> list[EigenvalueRow]:
    return _read(path, EIGENVALUES, EigenvalueRow)


def read_spectral_points(path: Path) -> list[SpectralPoint]:
    """Eigenvalue rows joined with their coefficient blocks."""

    rows = read_eigenvalue_rows(path)
    coefficient_rows = _read(coefficients_path(path), COEFFICIENTS, CoefficientRow)
    blocks: list[list[float]] = []
    for row in coefficient_rows:
        if row.n == 1:
            blocks.append([])
        elif not blocks or row.n != len(blocks[-1]) + 1:
            raise SchemaError(f"{coefficients_path(path)}: coefficient indices out of sequence at n = {row.n}")
        blocks[-1].append(row.a_n)
    if len(blocks) != len(rows):
        raise SchemaError(f"{path}: {len(rows)} eigenvalues but {len(blocks)} coefficient blocks")
    points = []
    for row, block in zip(rows, blocks):
        coeffs = FourierCoefficients(row.symmetry, row.r, block)
        points.append(
            SpectralPoint(
                r=row.r,
                symmetry=row.symmetry,
                coefficients=coeffs,
                residual_two_height=row.residual_two_height,
                residual_hecke=row.residual_hecke,
                truncation=row.M,
            )
        )
    return points


def write_lengths(path: Path, entries: Sequence[LengthSpectrumEntry]) -> None:
    write_table(path, LENGTHS, entries)


def read_lengths(path: Path) -> list[LengthSpectrumEntry]:
    return _read(path, LENGTHS, LengthSpectrumEntry)


def write_winding(path: Path, rows: Sequence[WindingRow]) -> None:
    write_table(path, WINDING, rows)


def read_winding(path: Path) -> list[WindingRow]:
    return _read(path, WINDING, WindingRow)


def write_counting(path: Path, rows: Sequence[CountingRow]) -> None:
    write_table(path, COUNTING, rows)


def read_counting(path: Path) -> list[CountingRow]:
    return _read(path, COUNTING, CountingRow)


def write_lvalues(path: Path, rows: Sequence[LValueRow]) -> None:
    write_table(path, LVALUES, rows)


def read_lvalues(path: Path) -> list[LValueRow]:
    return _read(path, LVALUES, LValueRow)
