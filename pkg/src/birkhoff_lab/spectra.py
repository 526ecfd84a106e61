"""Hypocycloid geometry and spectra of circulant bistochastic matrices.

The unit d-hypocycloid ``H_d`` is the star-shaped region whose boundary is
traced by

    x(t) = (d-1)/d cos t + 1/d cos((d-1) t)
    y(t) = (d-1)/d sin t - 1/d sin((d-1) t)

It has d cusps on the unit circle at the d-th roots of unity.  Within one arc
between neighbouring cusps the polar angle of the boundary point increases
monotonically with ``t``, which is what membership tests rely on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CirculantVector, as_rng, circulant_eigenvalues
from .errors import CuspSingularity

BISECTION_STEPS = 100


@dataclass(frozen=True)
class HypocycloidRegion:
    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("a hypocycloid needs d >= 1")

    @property
    def arc(self) -> float:
        """Angular width of one arc between cusps."""
        return 2 * math.pi / self.d

    def x(self, theta):
        d = self.d
        return (d - 1) / d * np.cos(theta) + np.cos((d - 1) * np.asarray(theta)) / d

    def y(self, theta):
        d = self.d
        return (d - 1) / d * np.sin(theta) - np.sin((d - 1) * np.asarray(theta)) / d

    def point(self, theta):
        return self.x(theta) + 1j * self.y(theta)

    def radius(self, theta):
        """Closed-form ``|boundary(theta)|``."""
        d = self.d
        val = (2 + (d - 2) * d + 2 * (d - 1) * np.cos(d * np.asarray(theta))) / d**2
        return np.sqrt(np.maximum(val, 0.0))

    def phi(self, theta):
        """Polar angle of the boundary point, for ``theta`` within the first arc."""
        return np.arctan2(self.y(theta), self.x(theta))

    def dphi_dtheta(self, theta):
        d = self.d
        theta = np.asarray(theta)
        num = 2 * (d - 2) * (d - 1) * np.sin(d * theta / 2) ** 2
        den = 2 + (d - 2) * d + 2 * (d - 1) * np.cos(d * theta)
        return num / den

    def theta_of_phi(self, psi):
        """Invert ``phi`` on the first arc by bisection; ``psi`` in ``[0, arc]``.

        The comparison ``phi(mid) < psi`` is done with the sign of a cross
        product, which is valid because one arc spans less than pi for d >= 3.
        """
        psi = np.asarray(psi, dtype=float)
        sp, cp = np.sin(psi), np.cos(psi)
        lo = np.zeros_like(psi)
        hi = np.full_like(psi, self.arc)
        d = self.d
        for _ in range(BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            if not np.any((mid > lo) & (mid < hi)):
                break  # interval exhausted at double precision
            e1 = np.exp(1j * mid)
            z = (d - 1) / d * e1 + np.conj(e1 ** (d - 1)) / d
            below = z.real * sp - z.imag * cp > 0
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)

    def boundary_radius(self, angle):
        """Distance from the origin to the boundary in direction ``angle`` (d >= 3)."""
        if self.d < 3:
            raise ValueError("boundary_radius is only defined for d >= 3")
        psi = np.mod(np.asarray(angle, dtype=float), self.arc)
        r = self.radius(self.theta_of_phi(psi))
        # cusp directions: the boundary reaches the unit circle
        return np.where(psi == 0.0, 1.0, r)

    def excess(self, z):
        """Signed distance-like quantity, ``<= 0`` exactly on ``H_d``.

        ``|z| - boundary_radius(arg z)`` for d >= 3; for the degenerate cases,
        the distance to the segment [-1, 1] (d = 2) or to the point 1 (d = 1).
        """
        z = np.asarray(z, dtype=complex)
        if self.d == 1:
            return np.abs(z - 1.0)
        if self.d == 2:
            return np.maximum(np.abs(z.imag), np.abs(z.real) - 1.0)
        out = np.abs(z) - self.boundary_radius(np.angle(z))
        return np.where(z == 0, -self.radius(math.pi / self.d), out)

    def contains_many(self, z, tolerance: float = 0.0) -> np.ndarray:
        return self.excess(z) <= tolerance

    def contains(self, z, tolerance: float = 0.0) -> bool:
        return bool(self.contains_many(complex(z), tolerance))


def boundary_points(region: HypocycloidRegion, n: int) -> tuple[np.ndarray, np.ndarray]:
    """``n`` boundary points at uniformly spaced parameters ``theta`` in ``[0, 2 pi)``.

    Returns ``(theta, points)``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    theta = 2 * math.pi * np.arange(n) / n
    return theta, region.point(theta)


def contains(region: HypocycloidRegion, z, tolerance: float = 0.0) -> bool:
    return region.contains(z, tolerance)


def spectrum_in_hypocycloid(c: CirculantVector, tolerance: float = 1e-9) -> tuple[bool, float]:
    """Whether every eigenvalue of the circulant matrix lies in ``H_d``.

    Returns ``(all_inside, worst_excess)``.
    """
    values = circulant_eigenvalues(c).values
    excess = HypocycloidRegion(c.dim).excess(values)
    worst = float(np.max(excess))
    return worst <= tolerance, worst


def neg_log_r_second_derivative(region: HypocycloidRegion, theta: float) -> float:
    """Closed form of ``d^2(-log r)/d phi^2`` at boundary parameter ``theta``.

    Diverges at the cusps, where :class:`CuspSingularity` is raised.
    """
    d = region.d
    if d < 3:
        raise ValueError("defined for d >= 3 only")
    s = math.sin(d * theta / 2)
    if abs(s) < 1e-12:
        raise CuspSingularity(f"theta={theta} is a cusp of the {d}-hypocycloid")
    num = d**2 * (2 + (d - 2) * d + 2 * (d - 1) * math.cos(d * theta))
    return -num / (4 * (d - 2) ** 2 * (d - 1) * s**4)


def sample_inside(region: HypocycloidRegion, n: int, rng) -> np.ndarray:
    """``n`` points of ``H_d`` by rejection from the uniform unit disk."""
    rng = as_rng(rng)
    if region.d == 1:
        return np.ones(n, dtype=complex)
    if region.d == 2:
        return rng.uniform(-1.0, 1.0, size=n).astype(complex)
    out: list[np.ndarray] = []
    have = 0
    while have < n:
        m = max(2 * (n - have), 64)
        r = np.sqrt(rng.uniform(size=m))
        z = r * np.exp(2j * math.pi * rng.uniform(size=m))
        z = z[region.contains_many(z)]
        out.append(z)
        have += z.size
    return np.concatenate(out)[:n]


def minkowski_closure_sample(
    d: int, n_pairs: int, rng_seed=None, tolerance: float = 1e-9
) -> tuple[int, float]:
    """Multiply random pairs of points of ``H_d`` and count products outside it.

    Returns ``(violations, worst_excess)``.  Closure predicts zero violations.
    """
    region = HypocycloidRegion(d)
    rng = as_rng(rng_seed)
    if n_pairs == 0:
        return 0, -math.inf
    z1 = sample_inside(region, n_pairs, rng)
    z2 = sample_inside(region, n_pairs, rng)
    excess = region.excess(z1 * z2)
    return int(np.count_nonzero(excess > tolerance)), float(excess.max())
