"""Bracelet conditions and the algebra of elementary / factorisable matrices.

Two nonnegative vectors ``p, q`` satisfy the bracelet condition when the
segments ``s_j = sqrt(p_j q_j)`` can close into a polygon, i.e. when the
largest segment is no longer than the sum of the others.  A bistochastic
matrix is a bracelet matrix when every pair of its columns and every pair of
its rows passes.  Margins are signed: ``sum(s) - 2 * max(s)``, so a boundary
case scores exactly zero and counts as passing.

Indices are zero-based throughout.
"""
from __future__ import annotations

import functools
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import (
    EPS_BRACELET,
    BistochasticMatrix,
    as_rng,
    flat_matrix,
    identity,
    sinkhorn_sample,
)
from .errors import DimMismatch, LengthMismatch, NegativeEntry, RangeError, ValidationError


@dataclass(frozen=True, slots=True)
class ElementaryFactor:
    """T-transform mixing coordinates ``i`` and ``j`` with weight ``t``.

    As a matrix: ``E[i,i] = E[j,j] = t``, ``E[i,j] = E[j,i] = 1 - t`` and the
    identity elsewhere.
    """

    dim: int
    i: int
    j: int
    t: float

    def __post_init__(self):
        if not (0 <= self.i < self.dim and 0 <= self.j < self.dim):
            raise RangeError(f"indices ({self.i}, {self.j}) out of range for d={self.dim}")
        if self.i == self.j:
            raise ValidationError("elementary factor needs two distinct indices")
        if not 0.0 <= self.t <= 1.0:
            raise RangeError(f"mixing parameter t={self.t} outside [0, 1]")


@dataclass(frozen=True)
class Violation:
    axis: str  # "row" or "column"
    k: int
    l: int
    j: int  # index of the longest segment


@dataclass(frozen=True)
class BraceletReport:
    holds: bool
    worst_margin: float
    violation: Violation | None = None

    def csv_row(self) -> str:
        """``holds,worst_margin,axis,k,l`` with empty fields when no violation."""
        v = self.violation
        tail = f"{v.axis},{v.k},{v.l}" if v else ",,"
        return f"{str(self.holds).lower()},{self.worst_margin!r},{tail}"

    def to_dict(self) -> dict:
        out = {"holds": self.holds, "worst_margin": self.worst_margin}
        if self.violation:
            v = self.violation
            out["violation"] = {"axis": v.axis, "k": v.k, "l": v.l, "j": v.j}
        return out


BRACELET_CSV_HEADER = "holds,worst_margin,axis,k,l"


def bracelet_pair(p, q, tolerance: float = EPS_BRACELET) -> tuple[bool, float]:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise LengthMismatch(f"vectors of shapes {p.shape} and {q.shape}")
    if np.any(p < 0) or np.any(q < 0):
        raise NegativeEntry("bracelet vectors must be nonnegative")
    if p.size == 0:
        return True, 0.0
    s = np.sqrt(p * q)
    margin = float(s.sum() - 2.0 * s.max())
    return margin >= -tolerance, margin


@functools.lru_cache(maxsize=None)
def _pairs(d: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(d, 1)


def _pair_margins(a: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Margins for all column pairs ``k < l`` of ``a``.

    Returns ``(pairs, margins, argmax_j)`` with ``pairs`` of shape ``(n, 2)``.
    """
    k, l = _pairs(a.shape[0])
    seg = np.sqrt(a[:, k] * a[:, l])  # shape (d, n_pairs)
    margins = seg.sum(axis=0) - 2.0 * seg.max(axis=0, initial=0.0)
    return np.stack([k, l], axis=1), margins, seg.argmax(axis=0)


def is_bracelet(b: BistochasticMatrix, tolerance: float = EPS_BRACELET) -> BraceletReport:
    """Check all column-pair and row-pair bracelet conditions.

    Columns are scanned before rows; the reported violation is the first
    failing pair in that order, while ``worst_margin`` is the global minimum.
    """
    a = np.asarray(b, dtype=float)
    if a.shape[0] < 2:
        return BraceletReport(True, math.inf)
    worst = math.inf
    first: Violation | None = None
    for axis, m in (("column", a), ("row", a.T)):
        pairs, margins, jmax = _pair_margins(m)
        worst = min(worst, float(margins.min()))
        if first is None:
            bad = np.flatnonzero(margins < -tolerance)
            if len(bad):
                i = bad[0]
                first = Violation(axis, int(pairs[i, 0]), int(pairs[i, 1]), int(jmax[i]))
    return BraceletReport(first is None, worst, first)


def bracelet_margin(b) -> float:
    """Worst margin only; cheaper than building a full report."""
    a = np.asarray(b, dtype=float)
    if a.shape[0] < 2:
        return math.inf
    return float(min(_pair_margins(a)[1].min(), _pair_margins(a.T)[1].min()))


def bracelet_margins(stack) -> np.ndarray:
    """Worst margin of each matrix in a stack of shape ``(n, d, d)``."""
    a = np.maximum(np.asarray(stack, dtype=float), 0.0)
    if a.shape[-1] < 2:
        return np.full(a.shape[0], math.inf)
    k, l = _pairs(a.shape[-1])
    worst = None
    for m in (a, np.swapaxes(a, 1, 2)):
        seg = np.sqrt(m[:, :, k] * m[:, :, l])  # (n, d, n_pairs)
        margins = (seg.sum(axis=1) - 2.0 * seg.max(axis=1)).min(axis=1)
        worst = margins if worst is None else np.minimum(worst, margins)
    return worst


# --- elementary and factorisable matrices ----------------------------------


def elementary_array(e: ElementaryFactor) -> np.ndarray:
    a = np.eye(e.dim)
    a[e.i, e.i] = a[e.j, e.j] = e.t
    a[e.i, e.j] = a[e.j, e.i] = 1.0 - e.t
    return a


def elementary_to_matrix(e: ElementaryFactor) -> BistochasticMatrix:
    return BistochasticMatrix(elementary_array(e))


def compose_factors(factors: Sequence[ElementaryFactor], dim: int | None = None) -> BistochasticMatrix:
    """Product ``factors[0] @ factors[1] @ ...``; the empty product is the identity.

    Each factor only mixes two columns, so the product is accumulated by
    column operations on plain Python lists, which keeps sequences with
    hundreds of thousands of factors fast.
    """
    if not factors:
        if dim is None:
            raise ValueError("dim is required for an empty factor sequence")
        return identity(dim)
    d = factors[0].dim
    if dim is not None and dim != d:
        raise DimMismatch(f"expected dimension {dim}, factors have {d}")
    rows = [[1.0 if r == c else 0.0 for c in range(d)] for r in range(d)]
    for e in factors:
        if e.dim != d:
            raise DimMismatch(f"factor of dimension {e.dim} in a sequence of dimension {d}")
        i, j, t = e.i, e.j, e.t
        s = 1.0 - t
        for row in rows:
            x, y = row[i], row[j]
            row[i] = t * x + s * y
            row[j] = s * x + t * y
    return BistochasticMatrix(np.array(rows))


def random_elementary_factor(d: int, rng) -> ElementaryFactor:
    rng = as_rng(rng)
    i = int(rng.integers(d))
    j = (i + int(rng.integers(1, d))) % d  # uniform over the other coordinates
    return ElementaryFactor(d, i, j, float(rng.uniform()))


def random_factorisable(d: int, rng, max_factors: int = 30) -> tuple[list[ElementaryFactor], BistochasticMatrix]:
    """Product of between 1 and ``max_factors`` random elementary factors."""
    if max_factors < 1:
        raise RangeError("max_factors must be at least 1")
    rng = as_rng(rng)
    n = int(rng.integers(1, max_factors + 1))
    factors = [random_elementary_factor(d, rng) for _ in range(n)]
    return factors, compose_factors(factors)


# --- the ray from the identity to the flat matrix ---------------------------


def center_ray(d: int, lam: float) -> BistochasticMatrix:
    """``(1 - lam) * 1_d + lam * W_d``."""
    if not 0.0 <= lam <= 1.0:
        raise RangeError(f"lambda={lam} outside [0, 1]")
    return BistochasticMatrix((1.0 - lam) * np.eye(d) + lam * np.full((d, d), 1.0 / d))


def _ray_factors(idx: tuple[int, ...], d: int, t: float, steps: int) -> list[ElementaryFactor]:
    """Factors approximating ``exp(t G)`` on the coordinates ``idx``.

    ``G = W - 1`` restricted to ``idx``.  Two coordinates are handled exactly;
    larger blocks use ``G_n = (n-1)/((n-2) n) * sum_k G_{n-1} (+) 0`` (the sum runs
    over the n ways to leave one coordinate out) and a first-order Lie-Trotter
    split with ``steps`` slices.
    """
    n = len(idx)
    if n < 2:
        return []
    if n == 2:
        lam = -math.expm1(-t)
        return [ElementaryFactor(d, idx[0], idx[1], 1.0 - lam / 2.0)]
    sub_t = t * (n - 1) / ((n - 2) * n) / steps
    one_slice: list[ElementaryFactor] = []
    for k in range(n):
        sub = idx[:k] + idx[k + 1:]
        one_slice.extend(_ray_factors(sub, d, sub_t, steps))
    return one_slice * steps


def trotter_factorise_center_ray(d: int, lam: float, steps: int) -> list[ElementaryFactor]:
    """Elementary factors whose product approximates ``center_ray(d, lam)``.

    ``lam = 1`` would need an infinite generator time and is rejected; use a
    value just below one instead.  The sequence has ``d!/2 * steps**(d-2)``
    factors, so keep ``d`` small.
    """
    if not 0.0 <= lam < 1.0:
        raise RangeError(f"lambda={lam} must lie in [0, 1)")
    if steps < 1:
        raise RangeError("steps must be positive")
    if d < 2:
        return []
    t = -math.log1p(-lam)
    return _ray_factors(tuple(range(d)), d, t, steps)


def star_ray_scan(
    b: BistochasticMatrix, lambdas: Iterable[float], tolerance: float = EPS_BRACELET
) -> list[BraceletReport]:
    """Bracelet reports along ``(1 - lam) * B + lam * W_d``."""
    a = b.entries
    w = flat_matrix(b.dim).entries
    reports = []
    for lam in lambdas:
        if not 0.0 <= lam <= 1.0:
            raise RangeError(f"lambda={lam} outside [0, 1]")
        reports.append(is_bracelet(BistochasticMatrix((1.0 - lam) * a + lam * w), tolerance))
    return reports


def tensor(b1: BistochasticMatrix, b2: BistochasticMatrix) -> BistochasticMatrix:
    """Kronecker product; index ``(j, k)`` maps to ``j * d2 + k``."""
    return BistochasticMatrix(np.kron(b1.entries, b2.entries))


def random_bracelet(d: int, rng, tolerance: float = EPS_BRACELET) -> BistochasticMatrix:
    """Sinkhorn sample pulled toward ``W_d`` just far enough to be bracelet.

    The pull uses the smallest ``lam`` on a 0.01 grid; star-shapedness about the
    flat matrix guarantees ``lam = 1`` always works.
    """
    b = sinkhorn_sample(d, as_rng(rng))
    if bracelet_margin(b) >= -tolerance:
        return b
    a = b.entries
    w = np.full((d, d), 1.0 / d)
    for step in range(1, 101):
        lam = step / 100.0
        cand = (1.0 - lam) * a + lam * w
        if bracelet_margin(cand) >= -tolerance:
            return BistochasticMatrix(cand)
    raise AssertionError("unreachable: W_d is bracelet")


# --- factor sequence text format --------------------------------------------


def format_factors(factors: Sequence[ElementaryFactor], dim: int | None = None) -> str:
    d = factors[0].dim if factors else dim
    if d is None:
        raise ValueError("dim is required for an empty factor sequence")
    lines = [f"{len(factors)} {d}"]
    lines += [f"{e.i} {e.j} {e.t!r}" for e in factors]
    return "\n".join(lines) + "\n"


def write_factors(path: str | os.PathLike, factors: Sequence[ElementaryFactor], dim: int | None = None) -> None:
    Path(path).write_text(format_factors(factors, dim))


def read_factors(path: str | os.PathLike) -> tuple[int, list[ElementaryFactor]]:
    lines = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip()]
    n, d = int(lines[0][0]), int(lines[0][1])
    factors = [ElementaryFactor(d, int(i), int(j), float(t)) for i, j, t in lines[1:]]
    if len(factors) != n:
        raise ValueError(f"header announces {n} factors, file has {len(factors)}")
    return d, factors
