"""Canonical regression fixtures with known or expected verdicts.

* ``Q``: the 3x3 matrix with zero diagonal and 1/2 elsewhere fails the
  bracelet test, so it is certainly not unistochastic.
* ``B``: a 4x4 unistochastic matrix found by the heuristic search.
* ``B^2``: its square is expected to be non-unistochastic.  The search can
  only fail to find a witness, so ``unknown`` is the consistent outcome and
  a witness would be a finding worth reporting loudly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import BistochasticMatrix
from ..unistochastic import Certificate, Verdict, certify, exact_certificate

Q_MATRIX = 0.5 * np.array([[0, 1, 1], [1, 0, 1], [1, 1, 0]], dtype=float)

B_MATRIX = (
    np.array(
        [
            [24, 16, 35, 25],
            [38, 21, 12, 29],
            [23, 24, 14, 39],
            [15, 39, 39, 7],
        ],
        dtype=float,
    )
    / 100.0
)

B_RESIDUAL_BOUND = 1e-8


@dataclass(frozen=True)
class FixtureResult:
    name: str
    passed: bool
    status: str
    certificate: Certificate

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.status}"


def q_fixture() -> FixtureResult:
    cert = exact_certificate(BistochasticMatrix(Q_MATRIX))
    ok = cert is not None and cert.verdict is Verdict.NOT_UNISTOCHASTIC
    v = cert.report.violation if ok else None
    status = f"not unistochastic ({v.axis} pair ({v.k}, {v.l}) fails)" if v else f"unexpected {cert.verdict.value}"
    return FixtureResult("Q", ok, status, cert)


def b_fixture(restarts: int = 100, seed: int = 0) -> FixtureResult:
    cert = certify(BistochasticMatrix(B_MATRIX), restarts=restarts, seed=seed)
    ok = cert.verdict is Verdict.UNISTOCHASTIC and cert.residual < B_RESIDUAL_BOUND
    status = f"{cert.verdict.value}, residual {cert.residual:.3g}, restarts {cert.restarts_used}"
    return FixtureResult("B", ok, status, cert)


def b_squared_fixture(restarts: int = 100, seed: int = 0) -> FixtureResult:
    b2 = BistochasticMatrix(B_MATRIX @ B_MATRIX)
    cert = certify(b2, restarts=restarts, seed=seed)
    if cert.verdict is Verdict.UNKNOWN:
        status = f"unknown (no witness found, as expected), best residual {cert.residual:.3g} after {cert.restarts_used} restarts"
        return FixtureResult("B^2", True, status, cert)
    if cert.verdict is Verdict.UNISTOCHASTIC:
        status = f"FINDING: witness found for B^2 with residual {cert.residual:.3g}; this contradicts the expected verdict"
        return FixtureResult("B^2", False, status, cert)
    return FixtureResult("B^2", False, f"unexpected {cert.verdict.value}", cert)


def regression_fixtures(restarts: int = 100, seed: int = 0) -> list[FixtureResult]:
    return [q_fixture(), b_fixture(restarts, seed), b_squared_fixture(restarts, seed)]
