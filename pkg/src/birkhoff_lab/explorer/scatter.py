"""Eigenvalues of bracelet circulant matrices on a simplex grid, against ``H_d``."""
from __future__ import annotations

import csv
import itertools
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..bracelet import bracelet_margins
from ..core import EPS_BRACELET
from ..errors import RangeError, StepTooSmall
from ..spectra import HypocycloidRegion, boundary_points

ENUMERATION_CAP = 2_000_000
BOUNDARY_POINTS = 1000


def simplex_grid(d: int, step: float, cap: int = ENUMERATION_CAP) -> np.ndarray:
    """All points of the simplex whose coordinates are multiples of ``step``.

    ``step`` must divide 1 to within 1e-9.  The rows are the compositions of
    ``n = round(1/step)`` into ``d`` nonnegative parts, divided by ``n``.
    """
    if d < 1:
        raise RangeError("d must be positive")
    if not step > 0:
        raise RangeError("step must be positive")
    n = round(1.0 / step)
    if n < 1 or abs(n * step - 1.0) > 1e-9:
        raise RangeError(f"step={step} does not divide 1")
    count = math.comb(n + d - 1, d - 1)
    if count > cap:
        raise StepTooSmall(f"{count} grid points exceed the cap of {cap}")
    # stars and bars: choose d-1 bar positions among n+d-1 slots
    bars = np.array(list(itertools.combinations(range(n + d - 1), d - 1)), dtype=int).reshape(count, d - 1)
    edges = np.concatenate([np.full((count, 1), -1), bars, np.full((count, 1), n + d - 1)], axis=1)
    parts = np.diff(edges, axis=1) - 1
    return parts / n


def circulant_stack(rows: np.ndarray) -> np.ndarray:
    d = rows.shape[1]
    idx = (np.arange(d)[None, :] - np.arange(d)[:, None]) % d
    return rows[:, idx]


def boundary_sample_count(d: int, minimum: int = BOUNDARY_POINTS) -> int:
    """Smallest multiple of ``2d`` that is at least ``minimum``.

    A multiple of ``2d`` puts samples exactly on every cusp and every
    mid-arc point ``theta = pi/d``.
    """
    return 2 * d * math.ceil(minimum / (2 * d))


@dataclass
class ScatterResult:
    d: int
    step: float
    alphas: np.ndarray  # first rows of the bracelet circulants kept
    eigenvalues: np.ndarray  # (n_kept, d) complex
    boundary_theta: np.ndarray
    boundary: np.ndarray
    excess: np.ndarray  # (n_kept, d) membership excess of each eigenvalue
    tolerance: float

    @property
    def failures(self) -> int:
        return int(np.count_nonzero(self.excess > self.tolerance))

    @property
    def worst_excess(self) -> float:
        return float(self.excess.max()) if self.excess.size else -math.inf

    @property
    def experimental(self) -> bool:
        return self.d not in (3, 4)


def eigenvalue_scatter(
    d: int, grid_step: float, tolerance: float = 1e-9, cap: int = ENUMERATION_CAP
) -> ScatterResult:
    """Spectra of every bracelet circulant on the simplex grid, with the ``H_d`` boundary.

    The grid protocol is meant for d in {3, 4}; other sizes run but the
    result is flagged ``experimental``.
    """
    alphas = simplex_grid(d, grid_step, cap)
    keep = bracelet_margins(circulant_stack(alphas)) >= -EPS_BRACELET
    alphas = alphas[keep]
    # eigenvalues b_m = sum_k alpha_k omega^{mk}
    omega = np.exp(2j * math.pi * np.outer(np.arange(d), np.arange(d)) / d)
    eig = alphas @ omega.T
    region = HypocycloidRegion(d)
    excess = region.excess(eig.ravel()).reshape(eig.shape) if eig.size else np.zeros(eig.shape)
    theta, pts = boundary_points(region, boundary_sample_count(d))
    return ScatterResult(d, grid_step, alphas, eig, theta, pts, excess, tolerance)


def write_scatter(prefix: str | os.PathLike, result: ScatterResult) -> tuple[Path, Path]:
    """``<prefix>_points.csv`` (``re,im``) and ``<prefix>_boundary.csv`` (``re,im,theta``)."""
    prefix = str(prefix)
    points, boundary = Path(prefix + "_points.csv"), Path(prefix + "_boundary.csv")
    with open(points, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["re", "im"])
        for z in result.eigenvalues.ravel():
            w.writerow(["%.17g" % z.real, "%.17g" % z.imag])
    with open(boundary, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["re", "im", "theta"])
        for th, z in zip(result.boundary_theta, result.boundary):
            w.writerow(["%.17g" % z.real, "%.17g" % z.imag, "%.17g" % th])
    return points, boundary


def read_points_csv(path: str | os.PathLike) -> tuple[np.ndarray, np.ndarray | None]:
    """Complex points and, when present, the ``theta`` column."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    z = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
    theta = np.array([float(r["theta"]) for r in rows]) if rows and "theta" in rows[0] else None
    return z, theta


__all__ = [
    "ScatterResult",
    "boundary_sample_count",
    "circulant_stack",
    "eigenvalue_scatter",
    "read_points_csv",
    "simplex_grid",
    "write_scatter",
]
