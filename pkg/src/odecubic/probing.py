"""Seeded randomized probing: zero tests, constancy tests, rational snapping.

The coefficient grammar (exp, ln, fractional powers) admits no decidable
canonical zero test, so the "identically zero" and "is a constant"
predicates are decided numerically on a deterministic sample drawn from a
seeded RNG inside a rectangle where the expression is defined.  Candidate
points that trigger a domain error anywhere in the expression DAG are
discarded and replaced from the same stream, so two runs with equal seeds
produce bitwise-identical verdicts.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .backend import run_program
from .expr import Expr, K_CONST, differentiate
from .program import Program, cached_program

DEFAULT_BOX = (0.3, 2.7, 0.3, 2.7)


class ProbeExhausted(RuntimeError):
    """No admissible sample points were found inside the box."""


@dataclass(frozen=True)
class Probe:
    """Deterministic evaluation context for probabilistic identity testing."""

    seed: int = 0
    box: tuple[float, float, float, float] = DEFAULT_BOX  # x0, x1, y0, y1
    npoints: int = 12
    atol: float = 1e-9
    rtol: float = 1e-7
    maxresample: int = 200

    def candidates(self) -> np.ndarray:
        """All candidate (x, y, p, q) points, in draw order.

        p is drawn from the x-range and q from the y-range; both matter only
        while an equation is being normalised.
        """
        x0, x1, y0, y1 = self.box
        rng = random.Random(self.seed)
        pts = np.empty((self.maxresample, 4), dtype=np.float64)
        for i in range(self.maxresample):
            pts[i, 0] = rng.uniform(x0, x1)
            pts[i, 1] = rng.uniform(y0, y1)
            pts[i, 2] = rng.uniform(x0, x1)
            pts[i, 3] = rng.uniform(y0, y1)
        return pts


def _accepted_values(prog: Program, probe: Probe,
                     watch: np.ndarray | None = None
                     ) -> tuple[np.ndarray, np.ndarray]:
    """Values and cancellation scales of the watched slots at the first
    ``npoints`` admissible points.

    Candidates are evaluated in draw order in growing chunks; chunking never
    changes which points are accepted.
    """
    candidates = probe.candidates()
    rows: list[np.ndarray] = []
    scales: list[np.ndarray] = []
    taken = 0
    offset = 0
    chunk = max(2 * probe.npoints, 16)
    while offset < len(candidates) and taken < probe.npoints:
        batch = candidates[offset:offset + chunk]
        out, sc, err = run_program(prog, batch, probe.atol, watch)
        for i in range(len(batch)):
            if err[i] == 0:
                rows.append(out[i])
                scales.append(sc[i])
                taken += 1
                if taken == probe.npoints:
                    break
        offset += chunk
        chunk *= 2
    if taken < probe.npoints:
        raise ProbeExhausted(
            f"only {taken}/{probe.npoints} admissible points in box {probe.box} "
            f"after {probe.maxresample} draws")
    return np.vstack(rows), np.vstack(scales)


def is_identically_zero(e: Expr, probe: Probe) -> bool:
    """True iff ``e`` vanishes at every admissible probe point.

    The comparison is |e| <= atol * (1 + scale) where scale is the local
    cancellation magnitude: the kernel's first-order bound on accumulated
    rounding error in units of machine epsilon (for a plain sum this is the
    sum of the additive terms' magnitudes).  Cancellation of huge terms is
    therefore not mistaken for a nonzero residual, however deep inside the
    DAG it happens.  Points are accepted only when every subexpression
    evaluates without a domain error.
    """
    if e.kind == K_CONST:
        return e.payload == 0
    values, scales = _accepted_values(cached_program(e), probe)
    for v, s in zip(values[:, 0], scales[:, 0]):
        if abs(v) > probe.atol * (1.0 + s):
            return False
    return True


def constant_value(e: Expr, probe: Probe) -> Optional[float]:
    """Mean probed value if ``e`` is constant on the box, else None.

    Requires both the value spread to be within rtol and both partial
    derivatives to pass :func:`is_identically_zero`.
    """
    if e.kind == K_CONST:
        return float(e.payload)
    values, _ = _accepted_values(cached_program(e), probe)
    values = values[:, 0]
    mean = float(np.mean(values))
    spread = float(np.max(values) - np.min(values))
    if spread > probe.rtol * (1.0 + abs(mean)):
        return None
    if not is_identically_zero(differentiate(e, "x"), probe):
        return None
    if not is_identically_zero(differentiate(e, "y"), probe):
        return None
    return mean


def snap_rational(v: float, maxden: int = 10000,
                  rtol: float = 1e-7) -> Optional[Fraction]:
    """Best rational with denominator <= maxden if within rtol, else None.

    Display sugar only; classification decisions never depend on it.
    """
    if maxden < 1:
        raise ValueError("maxden must be >= 1")
    if not np.isfinite(v):
        return None
    r = Fraction(v).limit_denominator(maxden)
    if abs(v - float(r)) <= rtol * (1.0 + abs(v)):
        return r
    return None
