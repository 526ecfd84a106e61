"""Two-dimensional slices of the Birkhoff polytope rendered as class rasters.

A slice is an affine chart ``M(s, t) = P0 + s u + t v`` with an orthonormal
frame ``(u, v)`` in the entrywise (Frobenius) inner product.  Pixel ``(i, j)``
sits at ``s_i = (i - N//2) * 2E/N`` and ``t_j = (j - N//2) * 2E/N``, so the
origin ``P0`` always falls exactly on a pixel.  Arrays are indexed
``[j, i]`` with ``t`` increasing with ``j``; images are written top row first,
so ``t`` increases upward on screen.
"""
from __future__ import annotations

import csv
import enum
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ..bracelet import bracelet_margins
from ..core import EPS_BISTO, EPS_BRACELET, BistochasticMatrix, CirculantVector
from ..errors import CollinearAnchors, InvalidPlane
from ..unistochastic import Verdict, certify, witness_d4_circulant

COLLINEAR_TOL = 1e-10


class PixelClass(enum.IntEnum):
    OUTSIDE = 0
    BISTO_ONLY = 1
    BRACELET = 2
    UNISTOCHASTIC = 3


PALETTE = {
    PixelClass.OUTSIDE: (255, 255, 255),
    PixelClass.BISTO_ONLY: (255, 0, 0),
    PixelClass.BRACELET: (255, 255, 0),
    PixelClass.UNISTOCHASTIC: (0, 170, 0),
}
EDGE_COLOUR = (0, 0, 255)


@dataclass(frozen=True)
class CrossSectionSpec:
    anchors: tuple[BistochasticMatrix, BistochasticMatrix, BistochasticMatrix]
    resolution: int = 256
    extent: float = 1.0
    heuristic: bool = False
    heuristic_budget: dict = field(default_factory=lambda: {"restarts": 3, "max_iters": 500})

    def __post_init__(self):
        if len(self.anchors) != 3:
            raise ValueError("a cross-section needs exactly three anchors")
        dims = {a.dim for a in self.anchors}
        if len(dims) != 1:
            raise ValueError(f"anchors of different dimensions {sorted(dims)}")
        if self.resolution < 1 or self.extent <= 0:
            raise ValueError("resolution and extent must be positive")


@dataclass
class Raster:
    """Per-pixel classes of one planar slice."""

    classes: np.ndarray  # (N, N) of PixelClass values, indexed [j, i]
    s: np.ndarray
    t: np.ndarray
    origin: np.ndarray  # P0 (a d x d matrix or a 4-vector of weights)
    frame: tuple[np.ndarray, np.ndarray]
    edges: np.ndarray | None = None  # boolean mask, same shape as classes

    @property
    def resolution(self) -> int:
        return self.classes.shape[0]

    @property
    def pitch(self) -> float:
        return float(self.s[1] - self.s[0]) if self.s.size > 1 else 1.0

    def coordinates_of(self, point) -> tuple[float, float, float]:
        """Chart coordinates ``(s, t)`` of ``point`` and its distance to the plane."""
        diff = np.asarray(point, dtype=float) - self.origin
        u, v = self.frame
        s, t = float(np.sum(diff * u)), float(np.sum(diff * v))
        off = float(np.linalg.norm(diff - s * u - t * v))
        return s, t, off

    def pixel_of(self, point) -> tuple[int, int]:
        """Nearest pixel ``(i, j)`` to a point lying in the plane."""
        s, t, off = self.coordinates_of(point)
        if off > COLLINEAR_TOL:
            raise ValueError(f"point lies {off:.3g} away from the slice plane")
        n = self.resolution
        return int(round(s / self.pitch)) + n // 2, int(round(t / self.pitch)) + n // 2

    def matrices_at(self, s, t) -> np.ndarray:
        """Stack of matrices at chart coordinates; weight vectors become circulants."""
        u, v = self.frame
        s, t = np.atleast_1d(s), np.atleast_1d(t)
        pts = self.origin[None] + s.reshape((-1,) + (1,) * u.ndim) * u + t.reshape((-1,) + (1,) * u.ndim) * v
        if pts.ndim == 2:
            d = pts.shape[1]
            idx = (np.arange(d)[None, :] - np.arange(d)[:, None]) % d
            pts = pts[:, idx]
        return pts

    def counts(self) -> dict[str, int]:
        return {c.name: int(np.count_nonzero(self.classes == c)) for c in PixelClass}


def _frame(p0: np.ndarray, p1: np.ndarray, p2: np.ndarray, error=CollinearAnchors):
    """Gram-Schmidt on ``(p1 - p0, p2 - p0)``."""
    e1 = p1 - p0
    n1 = np.linalg.norm(e1)
    if n1 <= COLLINEAR_TOL:
        raise error("first two anchors coincide")
    u = e1 / n1
    e2 = p2 - p0
    e2 = e2 - np.sum(e2 * u) * u
    n2 = np.linalg.norm(e2)
    if n2 <= COLLINEAR_TOL:
        raise error("anchors are collinear")
    return u, e2 / n2


def _grid(resolution: int, extent: float) -> np.ndarray:
    return (np.arange(resolution) - resolution // 2) * (2.0 * extent / resolution)


def _classify_cross_section_row(args) -> np.ndarray:
    """Classes of one pixel row ``t = t_j``; module-level so workers can pickle it."""
    p0, u, v, s, t, heuristic, budget = args
    mats = p0[None] + s[:, None, None] * u[None] + t * v[None]
    out = np.full(s.size, PixelClass.OUTSIDE, dtype=np.uint8)
    inside = np.all(mats >= -EPS_BISTO, axis=(1, 2))
    if not inside.any():
        return out
    idx = np.flatnonzero(inside)
    margins = bracelet_margins(mats[idx])
    for k, m in zip(idx, margins):
        if m < -EPS_BRACELET:
            out[k] = PixelClass.BISTO_ONLY
            continue
        cert = certify(BistochasticMatrix(mats[k]), heuristic=heuristic, **budget)
        ok = cert is not None and cert.verdict is Verdict.UNISTOCHASTIC
        out[k] = PixelClass.UNISTOCHASTIC if ok else PixelClass.BRACELET
    return out


def raster_cross_section(spec: CrossSectionSpec, workers: int | None = None) -> Raster:
    """Classify every pixel of the slice through the three anchors.

    Classes: OUTSIDE (some entry below ``-EPS_BISTO``), BISTO_ONLY (bracelet
    fails), BRACELET (bracelet holds but no unistochastic certificate) and
    UNISTOCHASTIC.  Only exact certificates are attempted unless
    ``spec.heuristic`` is set.
    """
    from .parallel import map_tasks

    p0, p1, p2 = (np.asarray(a, dtype=float) for a in spec.anchors)
    u, v = _frame(p0, p1, p2)
    s = _grid(spec.resolution, spec.extent)
    t = _grid(spec.resolution, spec.extent)
    tasks = [(p0, u, v, s, float(tj), spec.heuristic, dict(spec.heuristic_budget)) for tj in t]
    rows = map_tasks(_classify_cross_section_row, tasks, workers)
    return Raster(np.stack(rows), s, t, p0, (u, v))


# --- circulant 4x4 tetrahedron --------------------------------------------------

COMPLEMENTARY_EDGES = ((0, 2), (1, 3))  # 1-Pi^2 and Pi-Pi^3


@dataclass(frozen=True)
class TetraPlaneSpec:
    """Plane through three points of the simplex of weights on ``(1, Pi, Pi^2, Pi^3)``."""

    points: tuple[Sequence[float], Sequence[float], Sequence[float]]
    resolution: int = 256
    extent: float = 1.0

    def __post_init__(self):
        if len(self.points) != 3:
            raise InvalidPlane("a plane needs three points")
        for p in self.points:
            w = np.asarray(p, dtype=float)
            if w.shape != (4,):
                raise InvalidPlane(f"plane points are 4-vectors of weights, got shape {w.shape}")
            if np.any(w < -EPS_BISTO) or abs(w.sum() - 1.0) > 4 * EPS_BISTO:
                raise InvalidPlane(f"{w.tolist()} is not a point of the simplex")
        if self.resolution < 1 or self.extent <= 0:
            raise InvalidPlane("resolution and extent must be positive")


def classify_circulant_d4(alpha) -> PixelClass:
    w = np.asarray(alpha, dtype=float)
    if np.any(w < -EPS_BISTO):
        return PixelClass.OUTSIDE
    cert = witness_d4_circulant(CirculantVector(w))
    if cert.verdict is Verdict.UNISTOCHASTIC:
        return PixelClass.UNISTOCHASTIC
    if cert.verdict is Verdict.NOT_UNISTOCHASTIC:
        return PixelClass.BISTO_ONLY
    return PixelClass.BRACELET


def _segment_distance(x: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distances from the rows of ``x`` to the segment ``[a, b]``."""
    ab = b - a
    h = np.clip((x - a) @ ab / (ab @ ab), 0.0, 1.0)
    return np.linalg.norm(x - a - h[:, None] * ab, axis=1)


def _classify_tetra_row(args) -> tuple[np.ndarray, np.ndarray]:
    q0, u, v, s, t = args
    pts = q0[None] + s[:, None] * u[None] + t * v[None]
    classes = np.array([classify_circulant_d4(p) for p in pts], dtype=np.uint8)
    pitch = float(s[1] - s[0]) if s.size > 1 else 1.0
    vertices = np.eye(4)
    edge = np.zeros(s.size, dtype=bool)
    for a, b in COMPLEMENTARY_EDGES:
        edge |= _segment_distance(pts, vertices[a], vertices[b]) <= 0.5 * pitch
    return classes, edge


def raster_tetrahedron_slice(plane: TetraPlaneSpec, workers: int | None = None) -> Raster:
    """Classify a planar slice of the circulant 4x4 tetrahedron.

    Every simplex point is decided exactly by the circulant 4x4 construction.
    Pixels within half a pitch of the complementary-permutation edges
    ``1-Pi^2`` and ``Pi-Pi^3`` are flagged in ``Raster.edges``.
    """
    from .parallel import map_tasks

    q0, q1, q2 = (np.asarray(p, dtype=float) for p in plane.points)
    u, v = _frame(q0, q1, q2, error=InvalidPlane)
    s = _grid(plane.resolution, plane.extent)
    t = _grid(plane.resolution, plane.extent)
    rows = map_tasks(_classify_tetra_row, [(q0, u, v, s, float(tj)) for tj in t], workers)
    classes = np.stack([r[0] for r in rows])
    edges = np.stack([r[1] for r in rows])
    return Raster(classes, s, t, q0, (u, v), edges)


# --- star-shape check -----------------------------------------------------------


def discrete_ray(start: tuple[int, int], end: tuple[int, int]) -> np.ndarray:
    """Pixels on the segment from ``start`` to ``end`` (both included), shape ``(n, 2)``."""
    (i0, j0), (i1, j1) = start, end
    n = max(abs(i1 - i0), abs(j1 - j0))
    if n == 0:
        return np.array([[i0, j0]])
    h = np.arange(n + 1) / n
    return np.rint(np.stack([i0 + h * (i1 - i0), j0 + h * (j1 - j0)], axis=1)).astype(int)


@dataclass(frozen=True)
class StarCheck:
    """Outcome of the discrete star-shape test.

    ``failures`` are genuine: some exact point of the segment toward the
    centre fails the bracelet test.  ``artifacts`` are pixels whose rounded
    ray touches a non-bracelet pixel although the exact segment point behind
    that pixel passes; they occur at cusps thinner than one pixel.
    """

    checked: int
    failures: list[tuple[int, int]]
    artifacts: list[tuple[int, int]]

    @property
    def holds(self) -> bool:
        return not self.failures


def star_shape_check(raster: Raster, center: tuple[int, int]) -> StarCheck:
    """Walk the discrete ray from every bracelet pixel to ``center``.

    A pixel counts as bracelet when its class is BRACELET or UNISTOCHASTIC.
    """
    good = raster.classes >= PixelClass.BRACELET
    ci, cj = center
    n = raster.resolution
    failures, artifacts = [], []
    js, is_ = np.nonzero(good)
    for j, i in zip(js, is_):
        i, j = int(i), int(j)
        ray = discrete_ray((i, j), center)
        bad = ~good[ray[:, 1], ray[:, 0]]
        if not bad.any():
            continue
        # exact points on the segment at the parameters of the offending pixels
        steps = max(abs(ci - i), abs(cj - j))
        h = np.flatnonzero(bad) / steps
        si = (i + h * (ci - i) - n // 2) * raster.pitch
        tj = (j + h * (cj - j) - n // 2) * raster.pitch
        if np.all(bracelet_margins(raster.matrices_at(si, tj)) >= -EPS_BRACELET):
            artifacts.append((i, j))
        else:
            failures.append((i, j))
    return StarCheck(len(js), failures, artifacts)


# --- output ---------------------------------------------------------------------


def raster_rgb(raster: Raster) -> np.ndarray:
    """``(N, N, 3)`` uint8 image, top row is the largest ``t``."""
    lut = np.array([PALETTE[c] for c in PixelClass], dtype=np.uint8)
    img = lut[raster.classes]
    if raster.edges is not None:
        img[raster.edges] = EDGE_COLOUR
    return img[::-1]


def write_ppm(path: str | os.PathLike, raster: Raster) -> None:
    img = raster_rgb(raster)
    h, w, _ = img.shape
    Path(path).write_bytes(f"P6\n{w} {h}\n255\n".encode("ascii") + img.tobytes())


def read_ppm(path: str | os.PathLike) -> np.ndarray:
    data = Path(path).read_bytes()
    magic, dims, maxval, body = data.split(b"\n", 3)
    if magic != b"P6" or maxval != b"255":
        raise ValueError("not an 8-bit binary PPM")
    w, h = (int(x) for x in dims.split())
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w, 3)


def write_raster_csv(path: str | os.PathLike, raster: Raster) -> None:
    """RFC 4180 CSV with one row per pixel: ``s,t,class`` (plus ``edge`` when marked)."""
    header = ["s", "t", "class"] + (["edge"] if raster.edges is not None else [])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for j, tj in enumerate(raster.t):
            for i, si in enumerate(raster.s):
                row = ["%.17g" % si, "%.17g" % tj, PixelClass(raster.classes[j, i]).name]
                if raster.edges is not None:
                    row.append(int(raster.edges[j, i]))
                w.writerow(row)


def write_raster(prefix: str | os.PathLike, raster: Raster) -> tuple[Path, Path]:
    prefix = str(prefix)
    ppm, csv_path = Path(prefix + ".ppm"), Path(prefix + ".csv")
    write_ppm(ppm, raster)
    write_raster_csv(csv_path, raster)
    return ppm, csv_path


def default_extent(anchors: Sequence[BistochasticMatrix]) -> float:
    """Half-width that fits every anchor with a 10% border."""
    p0 = np.asarray(anchors[0], dtype=float)
    far = max(np.linalg.norm(np.asarray(a, dtype=float) - p0) for a in anchors)
    return 1.1 * far if far > 0 else 1.0


__all__ = [
    "CrossSectionSpec",
    "EDGE_COLOUR",
    "PALETTE",
    "PixelClass",
    "Raster",
    "TetraPlaneSpec",
    "classify_circulant_d4",
    "default_extent",
    "discrete_ray",
    "raster_cross_section",
    "raster_tetrahedron_slice",
    "read_ppm",
    "StarCheck",
    "star_shape_check",
    "write_ppm",
    "write_raster",
    "write_raster_csv",
]
