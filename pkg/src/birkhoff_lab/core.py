"""Validated small-matrix types and the basic constructions built on them.

Everything here works on dense ``numpy`` arrays of order ``d <= 8`` or so.
Matrices are immutable once constructed: the underlying arrays are flagged
read-only, so the objects may be shared freely between threads.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConvergenceError,
    DimMismatch,
    ShapeError,
    SingularInput,
    ValidationError,
)

EPS_BISTO = 1e-12
EPS_UNITARY = 1e-9
EPS_WITNESS = 1e-10
EPS_SPEC = 1e-10
EPS_BRACELET = 1e-12


@dataclass(frozen=True)
class Tolerances:
    """Bundle of the numerical tolerances used across the package."""

    bisto: float = EPS_BISTO
    unitary: float = EPS_UNITARY
    witness: float = EPS_WITNESS
    spectrum: float = EPS_SPEC
    bracelet: float = EPS_BRACELET


DEFAULT_TOLERANCES = Tolerances()


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


def as_rng(seed) -> np.random.Generator:
    """Accept an int seed, a SeedSequence or an existing Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


class BistochasticMatrix:
    """A d x d nonnegative matrix whose rows and columns sum to one.

    Entries in ``[-tolerance, 0)`` are clamped to zero; anything more negative,
    or any row/column sum further than ``tolerance * d`` from one, is rejected
    with :class:`ValidationError`.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries, *, tolerance: float = EPS_BISTO):
        a = np.asarray(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ShapeError(f"expected a non-empty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValidationError("matrix contains non-finite entries")
        d = a.shape[0]
        neg = np.argwhere(a < -tolerance)
        if len(neg):
            j, k = neg[0]
            raise ValidationError(f"entry ({j}, {k}) = {float(a[j, k])!r} is negative")
        a = np.where(a < 0.0, 0.0, a)
        slack = tolerance * d
        for axis, name in ((1, "row"), (0, "column")):
            sums = a.sum(axis=axis)
            bad = np.flatnonzero(np.abs(sums - 1.0) > slack)
            if len(bad):
                i = bad[0]
                raise ValidationError(f"{name} {i} sums to {float(sums[i])!r}, not 1")
        self._entries = _readonly(a)

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def dim(self) -> int:
        return self._entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._entries
        return self._entries.astype(dtype)

    def __repr__(self):
        return f"BistochasticMatrix(dim={self.dim}, entries={self._entries.tolist()!r})"

    def __eq__(self, other):
        if not isinstance(other, BistochasticMatrix):
            return NotImplemented
        return np.array_equal(self._entries, other._entries)

    def __hash__(self):
        return hash(self._entries.tobytes())

    @property
    def T(self) -> "BistochasticMatrix":
        return BistochasticMatrix(self._entries.T)

    def allclose(self, other, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self._entries, np.asarray(other, dtype=float), rtol=0.0, atol=atol))


class CirculantVector:
    """Probability vector ``alpha`` defining ``sum_k alpha[k] * Pi^k``."""

    __slots__ = ("_alpha",)

    def __init__(self, alpha, *, tolerance: float = EPS_BISTO):
        a = np.asarray(alpha, dtype=float)
        if a.ndim != 1 or a.size == 0:
            raise ShapeError(f"expected a non-empty vector, got shape {a.shape}")
        if np.any(a < -tolerance):
            k = int(np.flatnonzero(a < -tolerance)[0])
            raise ValidationError(f"alpha[{k}] = {float(a[k])!r} is negative")
        a = np.where(a < 0.0, 0.0, a)
        if abs(a.sum() - 1.0) > tolerance * a.size:
            raise ValidationError(f"alpha sums to {float(a.sum())!r}, not 1")
        self._alpha = _readonly(a)

    @property
    def alpha(self) -> np.ndarray:
        return self._alpha

    @property
    def dim(self) -> int:
        return self._alpha.size

    def __repr__(self):
        return f"CirculantVector({self._alpha.tolist()!r})"


@dataclass(frozen=True)
class SpectrumSet:
    values: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.values)


def unitarity_residual(u: np.ndarray) -> float:
    """Frobenius norm of ``U U^dagger - 1``."""
    u = np.asarray(u)
    return float(np.linalg.norm(u @ u.conj().T - np.eye(u.shape[0])))


@dataclass(frozen=True)
class UnitaryWitness:
    """A complex matrix whose squared moduli reproduce ``target``.

    ``unitarity_residual`` is always recomputed from ``matrix``; it is never
    taken on trust from the construction that produced the witness.
    """

    matrix: np.ndarray
    target: BistochasticMatrix
    unitarity_residual: float = field(init=False)

    def __post_init__(self):
        m = _readonly(np.asarray(self.matrix, dtype=complex))
        if m.shape != self.target.entries.shape:
            raise DimMismatch(f"witness shape {m.shape} does not match target {self.target.entries.shape}")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "unitarity_residual", unitarity_residual(m))

    @property
    def moduli_error(self) -> float:
        return float(np.max(np.abs(np.abs(self.matrix) ** 2 - self.target.entries)))

    def is_certified(self, eps_unitary: float = EPS_UNITARY, eps_witness: float = EPS_WITNESS) -> bool:
        return self.unitarity_residual <= eps_unitary and self.moduli_error <= eps_witness

    @property
    def certified(self) -> bool:
        return self.is_certified()


# --- constructors -----------------------------------------------------------


def make_bistochastic(raw, tolerance: float = EPS_BISTO) -> BistochasticMatrix:
    return BistochasticMatrix(raw, tolerance=tolerance)


def identity(d: int) -> BistochasticMatrix:
    return BistochasticMatrix(np.eye(d))


def flat_matrix(d: int) -> BistochasticMatrix:
    """The van der Waerden matrix W_d with every entry equal to 1/d."""
    if d < 1:
        raise ValueError("d must be positive")
    return BistochasticMatrix(np.full((d, d), 1.0 / d))


def _cyclic_array(d: int, power: int) -> np.ndarray:
    p = power % d
    a = np.zeros((d, d))
    a[np.arange(d), (np.arange(d) + p) % d] = 1.0
    return a


def cyclic_permutation(d: int, power: int = 1) -> BistochasticMatrix:
    """``Pi_d ** power`` where ``Pi_d`` has ones at ``(j, j+1 mod d)``."""
    if d < 1:
        raise ValueError("d must be positive")
    return BistochasticMatrix(_cyclic_array(d, power))


def circulant_array(first_row) -> np.ndarray:
    """Circulant matrix whose k-th row is ``first_row`` shifted right by k.

    Works for real or complex rows; entry ``(j, k)`` is ``first_row[(k - j) % d]``.
    """
    r = np.asarray(first_row)
    d = r.size
    idx = (np.arange(d)[None, :] - np.arange(d)[:, None]) % d
    return r[idx]


def circulant_to_matrix(c: CirculantVector) -> BistochasticMatrix:
    return BistochasticMatrix(circulant_array(c.alpha))


def is_circulant(m, tolerance: float = 1e-12) -> bool:
    a = np.asarray(m)
    return bool(np.max(np.abs(a - circulant_array(a[0])), initial=0.0) <= tolerance)


def first_row(b: BistochasticMatrix) -> CirculantVector:
    return CirculantVector(b.entries[0])


# --- sampling ---------------------------------------------------------------


def sinkhorn_normalize(
    a: np.ndarray, max_iters: int = 10_000, tolerance: float = 1e-14
) -> tuple[np.ndarray, int]:
    """Alternate row and column scaling until every sum is within ``tolerance`` of 1.

    Returns the scaled array and the number of sweeps performed.  A sweep is
    one row normalisation followed by one column normalisation.
    """
    a = np.array(a, dtype=float)
    for sweep in range(1, max_iters + 1):
        a /= a.sum(axis=1, keepdims=True)
        a /= a.sum(axis=0, keepdims=True)
        # columns are exact after the last step; only rows can be off
        if np.max(np.abs(a.sum(axis=1) - 1.0)) <= tolerance:
            return a, sweep
    raise ConvergenceError(f"Sinkhorn did not reach tolerance {tolerance} in {max_iters} sweeps")


def sinkhorn_sample(
    d: int, rng_seed=None, max_iters: int = 10_000, tolerance: float = 1e-14
) -> BistochasticMatrix:
    """Random bistochastic matrix from Sinkhorn scaling of uniform(0, 1) entries.

    The induced measure is not uniform on the Birkhoff polytope.
    """
    if d < 1:
        raise ValueError("d must be positive")
    rng = as_rng(rng_seed)
    start = rng.uniform(0.0, 1.0, size=(d, d))
    # uniform(0,1) can return exactly 0.0; keep the start strictly positive
    start = np.where(start == 0.0, np.finfo(float).tiny, start)
    a, _ = sinkhorn_normalize(start, max_iters=max_iters, tolerance=tolerance)
    return BistochasticMatrix(a)


# --- algebra ----------------------------------------------------------------


def multiply(a: BistochasticMatrix, b: BistochasticMatrix) -> BistochasticMatrix:
    if a.dim != b.dim:
        raise DimMismatch(f"cannot multiply {a.dim}x{a.dim} by {b.dim}x{b.dim}")
    return BistochasticMatrix(a.entries @ b.entries)


def circulant_eigenvalues(c: CirculantVector) -> SpectrumSet:
    """Eigenvalues ``b_j = sum_k alpha_k omega^(k j)`` by direct summation."""
    d = c.dim
    alpha = c.alpha
    values = np.empty(d, dtype=complex)
    for j in range(d):
        s = 0j
        for k in range(d):
            s += alpha[k] * cmath.exp(2j * math.pi * ((k * j) % d) / d)
        values[j] = s
    return SpectrumSet(values)


def dft_matrix(d: int) -> np.ndarray:
    """Unitary Fourier matrix ``F_jk = omega^(jk) / sqrt(d)`` built entry by entry."""
    f = np.empty((d, d), dtype=complex)
    for j in range(d):
        for k in range(d):
            f[j, k] = cmath.exp(2j * math.pi * ((j * k) % d) / d) / math.sqrt(d)
    return f


def polar_unitary_factor(a, max_iters: int = 100, tolerance: float = 1e-12) -> np.ndarray:
    """Unitary polar factor of a nonsingular matrix by Newton iteration.

    Iterates ``X <- (X + X^{-dagger}) / 2`` from ``X = A`` until
    ``||X X^dagger - 1||_F <= tolerance``.  The result is the unitary closest to
    ``A`` in Frobenius norm.

    Raises
    ------
    SingularInput
        If an iterate cannot be inverted or the iteration blows up.
    ConvergenceError
        If the tolerance is not met within ``max_iters`` steps.
    """
    x = np.array(a, dtype=complex)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {x.shape}")
    eye = np.eye(x.shape[0])
    scale0 = np.linalg.norm(x)
    if not np.isfinite(scale0) or scale0 == 0.0:
        raise SingularInput("input is zero or non-finite")
    for _ in range(max_iters + 1):
        if np.linalg.norm(x @ x.conj().T - eye) <= tolerance:
            return x
        try:
            inv = np.linalg.inv(x)
        except np.linalg.LinAlgError as exc:
            raise SingularInput("iterate is singular") from exc
        x = 0.5 * (x + inv.conj().T)
        n = np.linalg.norm(x)
        if not np.isfinite(n) or n > 1e14 * max(scale0, 1.0):
            raise SingularInput("Newton iteration diverged; input is numerically singular")
    raise ConvergenceError(f"polar iteration did not converge in {max_iters} steps")
