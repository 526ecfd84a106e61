"""Plain-text formats for matrices, circulant vectors and complex witnesses.

Real matrix::

    3
    0 0.5 0.5
    0.5 0 0.5
    0.5 0.5 0

Circulant vector: a line with ``d`` followed by one line of ``d`` reals.
Complex matrix: ``d`` lines of ``d`` whitespace-separated ``re,im`` pairs.
Reals are written with ``%.17g`` so a round trip is exact.
"""
from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .core import BistochasticMatrix, CirculantVector, EPS_BISTO
from .errors import ShapeError


def _fmt(x: float) -> str:
    return "%.17g" % x


def _lines(path) -> list[str]:
    text = Path(path).read_text()
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def format_matrix(m) -> str:
    a = np.asarray(m, dtype=float)
    rows = [" ".join(_fmt(x) for x in row) for row in a]
    return f"{a.shape[0]}\n" + "\n".join(rows) + "\n"


def parse_matrix(text: str) -> np.ndarray:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ShapeError("empty matrix file")
    d = int(lines[0])
    if len(lines) - 1 != d:
        raise ShapeError(f"header says d={d} but found {len(lines) - 1} rows")
    rows = [[float(tok) for tok in ln.split()] for ln in lines[1:]]
    if any(len(r) != d for r in rows):
        raise ShapeError(f"every row must have {d} entries")
    return np.array(rows, dtype=float)


def write_matrix(path: str | os.PathLike, m) -> None:
    Path(path).write_text(format_matrix(m))


def read_matrix_array(path: str | os.PathLike) -> np.ndarray:
    return parse_matrix(Path(path).read_text())


def read_matrix(path: str | os.PathLike, tolerance: float = EPS_BISTO) -> BistochasticMatrix:
    return BistochasticMatrix(read_matrix_array(path), tolerance=tolerance)


def write_circulant(path: str | os.PathLike, c: CirculantVector) -> None:
    Path(path).write_text(f"{c.dim}\n" + " ".join(_fmt(x) for x in c.alpha) + "\n")


def read_circulant(path: str | os.PathLike, tolerance: float = EPS_BISTO) -> CirculantVector:
    lines = _lines(path)
    d = int(lines[0])
    alpha = [float(tok) for tok in lines[1].split()]
    if len(alpha) != d:
        raise ShapeError(f"header says d={d} but found {len(alpha)} coefficients")
    return CirculantVector(alpha, tolerance=tolerance)


def format_complex_matrix(m) -> str:
    a = np.asarray(m, dtype=complex)
    rows = [" ".join(f"{_fmt(z.real)},{_fmt(z.imag)}" for z in row) for row in a]
    return "\n".join(rows) + "\n"


def write_complex_matrix(path: str | os.PathLike, m) -> None:
    Path(path).write_text(format_complex_matrix(m))


def parse_complex_matrix(text: str) -> np.ndarray:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    rows = []
    for ln in lines:
        row = []
        for pair in ln.split():
            re_, im_ = pair.split(",")
            row.append(complex(float(re_), float(im_)))
        rows.append(row)
    d = len(rows)
    if any(len(r) != d for r in rows):
        raise ShapeError("complex matrix must be square")
    return np.array(rows, dtype=complex)


def read_complex_matrix(path: str | os.PathLike) -> np.ndarray:
    return parse_complex_matrix(Path(path).read_text())
