"""Counterexample search for closure of bracelet matrices under multiplication.

Each trial draws two bracelet matrices from a generator seeded with
``(seed, trial)``, multiplies them and checks the product.  A failing trial is
written to a JSON file holding both factors and the product, so the
counterexample can be re-checked later without rerunning the search.
"""
from __future__ import annotations

import json
import os
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..bracelet import bracelet_margin, is_bracelet, random_bracelet
from ..core import EPS_BRACELET, BistochasticMatrix, as_rng
from ..errors import RangeError
from .parallel import chunk_ranges, map_tasks, worker_count

DEFAULT_SEED = 7


@dataclass
class FuzzReport:
    d: int
    trials: int
    seed: int
    violations: list[Path] = field(default_factory=list)
    worst_margin: float = float("inf")
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "trials": self.trials,
            "seed": self.seed,
            "violations": [str(p) for p in self.violations],
            "worst_margin": self.worst_margin,
            "wall_time": self.wall_time,
        }


def _trial_pair(d: int, seed: int, trial: int) -> tuple[BistochasticMatrix, BistochasticMatrix]:
    rng = as_rng(np.random.SeedSequence([seed, trial]))
    return random_bracelet(d, rng), random_bracelet(d, rng)


def _run_chunk(args) -> tuple[list[int], float]:
    """Failing trial indices and the worst product margin over ``[start, stop)``.

    A trial fails when both factors pass at ``tolerance`` and the product does
    not, which is exactly what :func:`revalidate_violation` re-checks.
    """
    d, seed, start, stop, tolerance = args
    bad, worst = [], float("inf")
    for trial in range(start, stop):
        a, b = _trial_pair(d, seed, trial)
        m = bracelet_margin(a.entries @ b.entries)
        worst = min(worst, m)
        if m < -tolerance and min(bracelet_margin(a.entries), bracelet_margin(b.entries)) >= -tolerance:
            bad.append(trial)
    return bad, worst


def write_violation(path: str | os.PathLike, a: BistochasticMatrix, b: BistochasticMatrix, meta: dict) -> Path:
    product = a.entries @ b.entries
    report = is_bracelet(BistochasticMatrix(product))
    payload = dict(meta)
    payload.update(
        {
            "left": a.entries.tolist(),
            "right": b.entries.tolist(),
            "product": product.tolist(),
            "report": report.to_dict(),
        }
    )
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2))
    return path


def revalidate_violation(path: str | os.PathLike, tolerance: float | None = None) -> bool:
    """Reload a violation file and confirm both factors pass and the product fails.

    The tolerance defaults to the one recorded in the file.
    """
    data = json.loads(Path(path).read_text())
    if tolerance is None:
        tolerance = data.get("tolerance", EPS_BRACELET)
    a = BistochasticMatrix(data["left"])
    b = BistochasticMatrix(data["right"])
    if not (is_bracelet(a, tolerance).holds and is_bracelet(b, tolerance).holds):
        return False
    return not is_bracelet(BistochasticMatrix(a.entries @ b.entries), tolerance).holds


def fuzz_monoid_conjecture(
    d: int,
    trials: int,
    seed: int = DEFAULT_SEED,
    out_dir: str | os.PathLike | None = None,
    tolerance: float = EPS_BRACELET,
    workers: int | None = None,
) -> FuzzReport:
    """Search for a pair of bracelet matrices whose product is not bracelet.

    Reports evidence only; a clean run does not prove closure.  Violations are
    written to ``out_dir`` (a fresh temporary directory when omitted).
    """
    if d < 3:
        raise RangeError("the search is meant for d >= 3")
    if trials < 0:
        raise RangeError("trials must be nonnegative")
    start = time.perf_counter()
    workers = worker_count() if workers is None else workers
    chunks = chunk_ranges(trials, max(1, workers) * 4) if trials else []
    results = map_tasks(_run_chunk, [(d, seed, a, b, tolerance) for a, b in chunks], workers)
    bad = sorted(t for r in results for t in r[0])
    worst = min((r[1] for r in results), default=float("inf"))
    report = FuzzReport(d, trials, seed, worst_margin=worst)
    if bad:
        target = Path(out_dir) if out_dir is not None else Path(tempfile.mkdtemp(prefix="bracelet-fuzz-"))
        target.mkdir(parents=True, exist_ok=True)
        for trial in bad:
            a, b = _trial_pair(d, seed, trial)
            meta = {"d": d, "seed": seed, "trial": trial, "tolerance": tolerance}
            report.violations.append(write_violation(target / f"violation_d{d}_s{seed}_t{trial}.json", a, b, meta))
    report.wall_time = time.perf_counter() - start
    return report
