"""Kernel backend selection and point evaluation.

At import time the compiled extension is preferred; the pure-Python
interpreter is used when the extension is missing or when the environment
variable ``ODECUBIC_PURE_PYTHON`` is set to a non-empty value.
"""

from __future__ import annotations

import os
from fractions import Fraction

import numpy as np

from .expr import Expr, bind_params
from .program import (ERROR_MESSAGES, Program, cached_program, compile_program)

if os.environ.get("ODECUBIC_PURE_PYTHON"):
    from . import _kernel_py as _kernel
    BACKEND = "python"
else:
    try:
        from . import _kernel  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        from . import _kernel_py as _kernel
        BACKEND = "python"


class DomainError(ArithmeticError):
    """Evaluation hit a point outside an expression's domain."""

    def __init__(self, code: int, point=None):
        self.code = code
        self.point = point
        msg = ERROR_MESSAGES.get(code, f"kernel error {code}")
        if point is not None:
            msg += f" at {tuple(point)}"
        super().__init__(msg)


def backend_name() -> str:
    return BACKEND


def run_program(prog: Program, points: np.ndarray, atol: float,
                watch: np.ndarray | None = None
                ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Evaluate ``prog`` at each row of ``points``.

    Returns (values, scales, err): values/scales have one column per watched
    slot (defaults to the program roots); scales are accumulated rounding
    error bounds in units of machine epsilon; rows with err != 0 are
    unspecified.
    """
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 4:
        raise ValueError("points must have shape (n, 4)")
    if watch is None:
        watch = prog.roots
    out = np.zeros((len(pts), len(watch)), dtype=np.float64)
    scale = np.zeros((len(pts), len(watch)), dtype=np.float64)
    err = np.zeros(len(pts), dtype=np.int32)
    _kernel.run(prog.ops, prog.arg1, prog.arg2, prog.consts,
                np.ascontiguousarray(watch, dtype=np.int32), pts,
                float(atol), out, err, scale)
    return out, scale, err


def evaluate(e: Expr, point, bindings: dict[str, Fraction] | None = None,
             atol: float = 1e-9) -> float:
    """IEEE double value of ``e`` at ``point`` = (x, y[, p[, q]]).

    Raises :class:`DomainError` for ln/sqrt of non-positive arguments,
    (near-)zero denominators, zero raised to a negative power and non-finite
    intermediates.
    """
    if bindings:
        e = bind_params(e, bindings)
    coords = list(point) + [0.0] * (4 - len(point))
    prog = cached_program(e) if not bindings else compile_program([e])
    pts = np.array([coords], dtype=np.float64)
    out, _, err = run_program(prog, pts, atol)
    if err[0]:
        raise DomainError(int(err[0]), coords)
    return float(out[0, 0])
