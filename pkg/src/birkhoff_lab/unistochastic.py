"""Unistochasticity certificates.

A bistochastic ``B`` is unistochastic when ``B = |U|**2`` entrywise for some
unitary ``U``.  This module produces machine-checkable evidence either way:

* a unitary witness (exact constructions for d = 2, d = 3 and circulant
  d = 4; alternating projections otherwise),
* a bracelet violation, which rules unistochasticity out, or
* ``unknown`` when the heuristic search runs out of budget.  An unknown
  verdict is never a proof of anything.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .bracelet import BraceletReport, is_bracelet
from .core import (
    EPS_BRACELET,
    EPS_UNITARY,
    EPS_WITNESS,
    BistochasticMatrix,
    CirculantVector,
    UnitaryWitness,
    as_rng,
    circulant_array,
    circulant_to_matrix,
    is_circulant,
    polar_unitary_factor,
    unitarity_residual,
)
from .errors import (
    ConvergenceError,
    DegenerateDenominator,
    DimError,
    InternalError,
    SingularInput,
)

EPS_ROOT = 1e-12
EPS_MOD = 1e-8
BISECTION_CAP = 200


class Verdict(str, enum.Enum):
    UNISTOCHASTIC = "unistochastic"
    NOT_UNISTOCHASTIC = "not_unistochastic"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class CirculantPhaseSolution:
    """Phases of the circulant unitary built for a 4x4 circulant matrix.

    The unitary's first row is ``(sqrt(a), e^{i alpha} sqrt(b), e^{i beta} sqrt(c),
    e^{i gamma} sqrt(d))`` for the (possibly row-shifted) first row ``(a, b, c, d)``.
    ``rows_shifted`` records that the input had ``ac > bd`` and was replaced by
    ``Pi @ B`` (first row ``(d, a, b, c)``) before solving.
    """

    alpha: float
    beta: float
    gamma: float
    eta: float
    beta_bracket: tuple[float, float]
    rows_shifted: bool
    root_residual: float


@dataclass(frozen=True)
class Certificate:
    verdict: Verdict
    target: BistochasticMatrix
    witness: UnitaryWitness | None = None
    report: BraceletReport | None = None
    best_residual: float | None = None
    restarts_used: int | None = None
    method: str = ""
    phases: CirculantPhaseSolution | None = None

    @property
    def residual(self) -> float:
        """Single number summarising the evidence.

        Witness residual for a unistochastic verdict, bracelet deficit
        (``-worst_margin``) for a rejected matrix, best residual for unknown.
        """
        if self.verdict is Verdict.UNISTOCHASTIC:
            return self.witness.unitarity_residual
        if self.verdict is Verdict.NOT_UNISTOCHASTIC:
            return -self.report.worst_margin
        return self.best_residual

    def to_json(self, witness_file: str | None = None) -> dict:
        out: dict = {"verdict": self.verdict.value, "residual": self.residual}
        if witness_file is not None:
            out["witness_file"] = str(witness_file)
        if self.report is not None and self.report.violation is not None:
            v = self.report.violation
            out["violation"] = {"axis": v.axis, "k": v.k, "l": v.l, "j": v.j}
        if self.verdict is Verdict.UNKNOWN:
            out["restarts_used"] = self.restarts_used
        if self.method:
            out["method"] = self.method
        return out


def _unistochastic(b, matrix, method, phases=None) -> Certificate:
    return Certificate(Verdict.UNISTOCHASTIC, b, witness=UnitaryWitness(matrix, b), method=method, phases=phases)


def _rejected(b, report, method) -> Certificate:
    return Certificate(Verdict.NOT_UNISTOCHASTIC, b, report=report, method=method)


# --- d = 2 -------------------------------------------------------------------


def witness_d2(b: BistochasticMatrix) -> UnitaryWitness:
    """``[[i sqrt(a), sqrt(1-a)], [sqrt(1-a), i sqrt(a)]]`` with ``a = B[0, 0]``."""
    if b.dim != 2:
        raise DimError(f"witness_d2 needs d=2, got d={b.dim}")
    a = min(max(b.entries[0, 0], 0.0), 1.0)
    p, q = math.sqrt(a), math.sqrt(1.0 - a)
    return UnitaryWitness(np.array([[1j * p, q], [q, 1j * p]]), b)


# --- d = 3 -------------------------------------------------------------------


def close_triangle(s0: float, s1: float, s2: float, sign: float = 1.0) -> tuple[float, float]:
    """Angles ``A, B`` with ``s0 + s1 e^{iA} + s2 e^{iB} = 0``.

    Requires the triangle inequality up to rounding.  Zero-length segments get
    angle 0 when their direction is irrelevant or unconstrained.
    """
    if s0 > 0.0 and s1 > 0.0:
        cos_a = (s2 * s2 - s0 * s0 - s1 * s1) / (2.0 * s0 * s1)
        a = sign * math.acos(min(1.0, max(-1.0, cos_a)))
    else:
        a = 0.0
    v = s0 + s1 * complex(math.cos(a), math.sin(a))
    b = math.atan2(-v.imag, -v.real) if abs(v) > 0.0 else 0.0
    return a, b


def _dephased_candidates_d3(a: np.ndarray):
    """The four sign branches of the dephased 3x3 witness for ``a``."""
    r = np.sqrt(a)
    seg1 = r[:, 0] * r[:, 1]
    seg2 = r[:, 0] * r[:, 2]
    for s1, s2 in itertools.product((1.0, -1.0), repeat=2):
        p11, p21 = close_triangle(seg1[0], seg1[1], seg1[2], s1)
        p12, p22 = close_triangle(seg2[0], seg2[1], seg2[2], s2)
        phase = np.array([[0.0, 0.0, 0.0], [0.0, p11, p12], [0.0, p21, p22]])
        yield r * np.exp(1j * phase)


def _arrangements_d3(a: np.ndarray):
    """Row/column permutations and transposition, best-conditioned first.

    The identity arrangement always comes first.  The rest are ordered by the
    smallest entry in the first row and column, since the triangle closures
    divide by those.
    """
    ident = (0, 1, 2)
    yield False, ident, ident
    perms = list(itertools.permutations(range(3)))
    cands = []
    for transpose in (False, True):
        m = a.T if transpose else a
        for rp in perms:
            for cp in perms:
                if not transpose and rp == ident and cp == ident:
                    continue
                arr = m[np.ix_(rp, cp)]
                cands.append((-min(arr[0].min(), arr[:, 0].min()), transpose, rp, cp))
    cands.sort(key=lambda c: c[0])
    for _, transpose, rp, cp in cands:
        yield transpose, rp, cp


def witness_d3(
    b: BistochasticMatrix,
    eps_unitary: float = EPS_UNITARY,
    eps_bracelet: float = EPS_BRACELET,
) -> Certificate:
    """Exact 3x3 certificate: bracelet violation or a dephased unitary witness.

    For d = 3 the bracelet conditions are sufficient, so a bracelet input that
    fails every branch raises :class:`InternalError`.
    """
    if b.dim != 3:
        raise DimError(f"witness_d3 needs d=3, got d={b.dim}")
    report = is_bracelet(b, eps_bracelet)
    if not report.holds:
        return _rejected(b, report, "d3")
    a = b.entries
    best = math.inf
    for transpose, rp, cp in _arrangements_d3(a):
        m = a.T if transpose else a
        arr = m[np.ix_(rp, cp)]
        for u in _dephased_candidates_d3(arr):
            res = unitarity_residual(u)
            best = min(best, res)
            if res <= eps_unitary:
                w = np.empty_like(u)
                w[np.ix_(rp, cp)] = u
                if transpose:
                    w = w.T
                return _unistochastic(b, w, "d3")
    raise InternalError(
        f"no 3x3 branch certified a bracelet matrix (best residual {best:.3e}, "
        f"worst margin {report.worst_margin:.3e}): {a.tolist()!r}"
    )


def _dephase(u: np.ndarray) -> np.ndarray:
    """Multiply rows and columns by phases so row 0 and column 0 are real >= 0."""
    u = np.array(u, dtype=complex)
    col = np.where(np.abs(u[:, 0]) > 0, np.exp(-1j * np.angle(u[:, 0])), 1.0)
    u = col[:, None] * u
    row = np.where(np.abs(u[0]) > 0, np.exp(-1j * np.angle(u[0])), 1.0)
    return u * row[None, :]


def _direct_circulant_d3(alpha: np.ndarray) -> np.ndarray:
    """Circulant 3x3 unitary from the single closure condition on its rows."""
    a, b, c = alpha
    # off-diagonal of V V^dagger: sqrt(ab) e^{i p1} + sqrt(bc) e^{i p2} + sqrt(ca) e^{i p3},
    # p1 = t0 - t1, p2 = t1 - t2, p3 = t2 - t0, so p1 + p2 + p3 = 0
    t = (math.sqrt(a * b), math.sqrt(b * c), math.sqrt(c * a))
    order = sorted(range(3), key=lambda i: -t[i])
    d1, d2 = close_triangle(t[order[0]], t[order[1]], t[order[2]])
    delta = [0.0] * 3
    delta[order[1]], delta[order[2]] = d1, d2
    rho = -sum(delta) / 3.0
    p = [x + rho for x in delta]
    th0 = 0.0
    th1 = th0 - p[0]
    th2 = th1 - p[1]
    row = np.sqrt(alpha) * np.exp(1j * np.array([th0, th1, th2]))
    return circulant_array(row)


def witness_d3_circulant(c: CirculantVector, eps_unitary: float = EPS_UNITARY) -> Certificate:
    """Circulant unitary witness for a 3x3 circulant matrix with first row ``(a, b, c)``.

    From a dephased witness with ``x = arg U[1,1]`` and ``y = arg U[2,1]`` the
    circulant matrix with first row
    ``(e^{2ix/3} sqrt a, e^{i(x-y)/3} sqrt b, e^{iy/3} sqrt c)`` is unitary.
    Degenerate inputs, where the dephased witness is not unique, fall back to
    solving the circulant closure condition directly.
    """
    if c.dim != 3:
        raise DimError(f"witness_d3_circulant needs d=3, got d={c.dim}")
    b = circulant_to_matrix(c)
    cert = witness_d3(b, eps_unitary)
    if cert.verdict is not Verdict.UNISTOCHASTIC:
        return cert
    u = _dephase(cert.witness.matrix)
    x, y = float(np.angle(u[1, 1])), float(np.angle(u[2, 1]))
    r = np.sqrt(c.alpha)
    for xs, ys in ((x, y), (-x, -y)):
        row = r * np.exp(1j * np.array([2 * xs / 3, (xs - ys) / 3, ys / 3]))
        v = circulant_array(row)
        if unitarity_residual(v) <= eps_unitary:
            return _unistochastic(b, v, "d3-circulant")
    v = _direct_circulant_d3(c.alpha)
    if unitarity_residual(v) <= eps_unitary:
        return _unistochastic(b, v, "d3-circulant")
    raise InternalError(f"no circulant witness for bracelet circulant {c.alpha.tolist()!r}")


# --- circulant d = 4 ------------------------------------------------------------


def _f(beta: float, eta: float) -> float:
    return math.acos(min(1.0, max(-1.0, eta * math.cos(beta))))


def _g_of_f(beta: float, eta: float, sab: float, scd: float, sbc: float, sad: float) -> float:
    f = _f(beta, eta)
    x, y = beta + f, beta - f
    return abs(sab + complex(math.cos(x), math.sin(x)) * scd) - abs(sbc + complex(math.cos(y), math.sin(y)) * sad)


def _d4_row(a, b, c, d, alpha, beta, gamma) -> np.ndarray:
    ph = np.exp(1j * np.array([0.0, alpha, beta, gamma]))
    return np.sqrt(np.array([a, b, c, d])) * ph


def witness_d4_circulant(
    c: CirculantVector,
    eps_unitary: float = EPS_UNITARY,
    eps_root: float = EPS_ROOT,
    eps_mod: float = EPS_MOD,
    eps_bracelet: float = EPS_BRACELET,
) -> Certificate:
    """Circulant unitary witness for every bracelet 4x4 circulant matrix.

    With first row ``(a, b, c, d)`` and ``ac <= bd`` (otherwise the rows are
    shifted cyclically, which swaps the two products), the phases of
    ``(sqrt a, e^{i alpha} sqrt b, e^{i beta} sqrt c, e^{i gamma} sqrt d)`` are found by

    1. bisection on ``beta`` in ``[pi/2, 3pi/2]`` for ``G(F(beta)) = 0``, where
       ``f(beta) = arccos(eta cos beta)``, ``eta = -sqrt(ac/bd)``,
       ``F(x) = (x + f(x), x - f(x))`` and
       ``G(x, y) = |sqrt(ab) + e^{ix} sqrt(cd)| - |sqrt(bc) + e^{iy} sqrt(ad)|``;
    2. ``e^{2i gamma} = -(e^{-if} sqrt(ab) + e^{i beta} sqrt(cd)) / (e^{i(f - beta)} sqrt(bc) + sqrt(ad))``;
    3. ``alpha = gamma + f(beta)``.
    """
    if c.dim != 4:
        raise DimError(f"witness_d4_circulant needs d=4, got d={c.dim}")
    b_mat = circulant_to_matrix(c)
    report = is_bracelet(b_mat, eps_bracelet)
    if not report.holds:
        return _rejected(b_mat, report, "d4-circulant")

    a, b, cc, dd = (float(x) for x in c.alpha)
    if a * cc == 0.0 and b * dd == 0.0:
        # bracelet forces a single nonzero coefficient: a cyclic permutation
        return _unistochastic(b_mat, circulant_array(np.sqrt(c.alpha).astype(complex)), "d4-circulant")

    shifted = a * cc > b * dd
    if shifted:
        a, b, cc, dd = dd, a, b, cc
    eta = -math.sqrt(a * cc / (b * dd))
    sab, scd, sbc, sad = math.sqrt(a * b), math.sqrt(cc * dd), math.sqrt(b * cc), math.sqrt(a * dd)

    def h(beta):
        return _g_of_f(beta, eta, sab, scd, sbc, sad)

    lo, hi = math.pi / 2, 3 * math.pi / 2
    h_lo, h_hi = h(lo), h(hi)
    slack = 10 * eps_root + 4 * eps_bracelet
    if h_lo > slack or h_hi < -slack:
        raise InternalError(
            f"root bracket violated for bracelet circulant {c.alpha.tolist()!r}: "
            f"G(F(pi/2))={h_lo:.3e}, G(F(3pi/2))={h_hi:.3e}"
        )

    beta = _bisect(h, lo, hi, h_lo, h_hi, eps_root)
    for trial_beta in (beta, beta + 10 * eps_root, beta - 10 * eps_root):
        trial_beta = min(hi, max(lo, trial_beta))
        f = _f(trial_beta, eta)
        num = -(complex(math.cos(-f), math.sin(-f)) * sab + complex(math.cos(trial_beta), math.sin(trial_beta)) * scd)
        den = complex(math.cos(f - trial_beta), math.sin(f - trial_beta)) * sbc + sad
        if abs(den) < 1e-12:
            if abs(num) >= 1e-12:
                continue
            # both sides vanish and gamma is unconstrained by m = 0
            gammas = [0.0, math.pi]
        else:
            rhs = num / den
            if abs(abs(rhs) - 1.0) > eps_mod:
                continue
            g0 = 0.5 * math.atan2(rhs.imag, rhs.real)
            gammas = [g0, g0 + math.pi]
        for gamma in gammas:
            alpha = gamma + f
            row = _d4_row(a, b, cc, dd, alpha, trial_beta, gamma)
            m = circulant_array(row)
            if shifted:
                m = np.roll(m, 1, axis=0)
            if unitarity_residual(m) <= eps_unitary:
                sol = CirculantPhaseSolution(
                    alpha=alpha % (2 * math.pi),
                    beta=trial_beta % (2 * math.pi),
                    gamma=gamma % (2 * math.pi),
                    eta=eta,
                    beta_bracket=(lo, hi),
                    rows_shifted=shifted,
                    root_residual=abs(h(trial_beta)),
                )
                return _unistochastic(b_mat, m, "d4-circulant", sol)
    if abs(den) < 1e-12:
        raise DegenerateDenominator(f"gamma equation degenerate for {c.alpha.tolist()!r}")
    raise InternalError(
        f"circulant 4x4 construction failed to certify {c.alpha.tolist()!r} "
        f"(|G(F(beta))|={abs(h(beta)):.3e})"
    )


def _bisect(h, lo, hi, h_lo, h_hi, eps_root):
    if abs(h_lo) <= eps_root:
        return lo
    if abs(h_hi) <= eps_root:
        return hi
    for _ in range(BISECTION_CAP):
        mid = 0.5 * (lo + hi)
        h_mid = h(mid)
        if abs(h_mid) <= eps_root or mid in (lo, hi):
            return mid
        if h_mid < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def root_bracket_values(c: CirculantVector) -> tuple[float, float]:
    """``G(F(pi/2))`` and ``G(F(3pi/2))`` after the ``ac <= bd`` normalisation."""
    a, b, cc, dd = (float(x) for x in c.alpha)
    if a * cc > b * dd:
        a, b, cc, dd = dd, a, b, cc
    if b * dd == 0.0:
        raise ValueError("bracket undefined when ac = bd = 0")
    eta = -math.sqrt(a * cc / (b * dd))
    args = (eta, math.sqrt(a * b), math.sqrt(cc * dd), math.sqrt(b * cc), math.sqrt(a * dd))
    return _g_of_f(math.pi / 2, *args), _g_of_f(3 * math.pi / 2, *args)


# --- heuristic search --------------------------------------------------------------


def _polish(amp: np.ndarray, phases: np.ndarray) -> np.ndarray:
    """Refine phases by least squares on the off-diagonal of ``U U^dagger``."""
    d = amp.shape[0]
    iu = np.triu_indices(d, 1)

    def resid(theta):
        u = amp * np.exp(1j * theta.reshape(d, d))
        g = (u @ u.conj().T)[iu]
        return np.concatenate([g.real, g.imag])

    sol = least_squares(resid, phases.ravel(), method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200)
    return amp * np.exp(1j * sol.x.reshape(d, d))


def heuristic_witness(
    b: BistochasticMatrix,
    restarts: int = 100,
    max_iters: int = 2000,
    tol: float = 1e-8,
    seed: int = 0,
    eps_unitary: float = EPS_UNITARY,
    eps_witness: float = EPS_WITNESS,
    polish_below: float = 1e-3,
    stall_window: int = 200,
) -> Certificate:
    """Alternating projections between the unitary group and the moduli ``sqrt(B)``.

    Each restart draws i.i.d. uniform phases from a generator seeded with
    ``(seed, restart)``.  An iteration projects onto the unitaries with
    :func:`polar_unitary_factor` and then restores the prescribed moduli.  Once
    the residual drops below ``polish_below`` the phases are refined by least
    squares.  A restart is abandoned when ``stall_window`` iterations fail to
    improve its best residual by 1%.

    Acceptance needs the moduli-exact iterate to have unitarity residual at most
    ``min(tol, eps_unitary)``.  Otherwise the verdict is ``unknown``.
    """
    report = is_bracelet(b)
    if not report.holds:
        return _rejected(b, report, "heuristic")
    amp = np.sqrt(b.entries)
    accept = min(tol, eps_unitary)
    best_overall = math.inf
    for restart in range(restarts):
        rng = as_rng(np.random.SeedSequence([seed, restart]))
        x = amp * np.exp(1j * rng.uniform(0.0, 2 * math.pi, size=amp.shape))
        best = math.inf
        last_gain = 0
        polished = False
        for it in range(max_iters):
            res = unitarity_residual(x)
            if res <= accept:
                w = UnitaryWitness(x, b)
                if w.moduli_error <= eps_witness:
                    return Certificate(Verdict.UNISTOCHASTIC, b, witness=w, restarts_used=restart + 1, method="heuristic")
            if res < polish_below and not polished:
                polished = True
                y = _polish(amp, np.angle(x))
                if unitarity_residual(y) < res:
                    x = y
                    continue
            if res < 0.99 * best:
                best, last_gain = res, it
            elif it - last_gain > stall_window:
                break
            try:
                u = polar_unitary_factor(x, max_iters=100, tolerance=1e-13)
            except (SingularInput, ConvergenceError):
                break
            x = amp * np.exp(1j * np.angle(u))
        best_overall = min(best_overall, best, unitarity_residual(x))
    return Certificate(Verdict.UNKNOWN, b, best_residual=best_overall, restarts_used=restarts, method="heuristic")


# --- dispatch ----------------------------------------------------------------------


def exact_certificate(b: BistochasticMatrix) -> Certificate | None:
    """Certificate from an exact construction, or ``None`` when none applies.

    Non-bracelet inputs are always decided (the bracelet check is exact).
    """
    d = b.dim
    if d == 1:
        return _unistochastic(b, np.ones((1, 1), dtype=complex), "d1")
    if d == 2:
        return Certificate(Verdict.UNISTOCHASTIC, b, witness=witness_d2(b), method="d2")
    if d == 3:
        if is_circulant(b.entries):
            return witness_d3_circulant(CirculantVector(b.entries[0]))
        return witness_d3(b)
    if d == 4 and is_circulant(b.entries):
        return witness_d4_circulant(CirculantVector(b.entries[0]))
    report = is_bracelet(b)
    if not report.holds:
        return _rejected(b, report, "bracelet")
    return None


def certify(b: BistochasticMatrix, *, heuristic: bool = True, **heuristic_kwargs) -> Certificate | None:
    """Exact certificate when one exists, else the heuristic search.

    With ``heuristic=False`` the result is ``None`` for inputs that only the
    heuristic could decide.
    """
    cert = exact_certificate(b)
    if cert is not None or not heuristic:
        return cert
    return heuristic_witness(b, **heuristic_kwargs)
