"""Program compilation and compiled-vs-pure-Python kernel equivalence."""

import math
import os

import numpy as np
import pytest

from odecubic import parse_expression
from odecubic.backend import backend_name, run_program
from odecubic.program import compile_program
from odecubic import _kernel_py

try:
    from odecubic import _kernel  # type: ignore[attr-defined]
    HAVE_COMPILED = True
except ImportError:
    HAVE_COMPILED = False


def _run_with(kernel, prog, pts, atol=1e-9):
    watch = prog.roots
    out = np.zeros((len(pts), len(watch)), dtype=np.float64)
    scale = np.zeros_like(out)
    err = np.zeros(len(pts), dtype=np.int32)
    kernel.run(prog.ops, prog.arg1, prog.arg2, prog.consts,
               np.ascontiguousarray(watch, dtype=np.int32),
               np.ascontiguousarray(pts, dtype=np.float64),
               atol, out, err, scale)
    return out, scale, err


SAMPLES = [
    ("x + y*2", lambda x, y: x + 2 * y),
    ("x*y - x/y", lambda x, y: x * y - x / y),
    ("exp(x)*ln(y)", lambda x, y: math.exp(x) * math.log(y)),
    ("y^(3/2) + x^3", lambda x, y: y ** 1.5 + x ** 3),
    ("root5(x - 2)", lambda x, y: math.copysign(abs(x - 2) ** 0.2, x - 2)),
    ("sqrt(x*y)", lambda x, y: math.sqrt(x * y)),
    ("1/(x + y)", lambda x, y: 1 / (x + y)),
]


@pytest.mark.parametrize("text,ref", SAMPLES)
def test_python_kernel_matches_direct_math(text, ref):
    prog = compile_program([parse_expression(text)])
    pts = np.array([[0.7, 1.3, 0, 0], [2.1, 0.4, 0, 0], [1.0, 1.0, 0, 0]])
    out, _, err = _run_with(_kernel_py, prog, pts)
    assert not err.any()
    for row, (x, y, _, _) in zip(out[:, 0], pts):
        assert row == pytest.approx(ref(x, y), rel=1e-14)


def test_python_kernel_error_codes():
    pr = 1e-9
    cases = [
        ("1/(x - 1)", [1.0, 2.0], 1),
        ("ln(x - 2)", [1.0, 2.0], 2),
        ("(x - 2)^(1/2)", [1.0, 2.0], 3),
        ("exp(x*10^6)", [5.0, 1.0], 4),
    ]
    for text, point, code in cases:
        prog = compile_program([parse_expression(text)])
        pts = np.array([point + [0.0, 0.0]])
        _, _, err = _run_with(_kernel_py, prog, pts, atol=pr)
        assert err[0] == code, text


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled kernel not built")
def test_backends_agree_bitwise():
    rngpts = np.random.default_rng(3).uniform(0.3, 2.7, size=(64, 4))
    texts = [t for t, _ in SAMPLES] + [
        "exp(y)/(15*(x + y))", "(x^2 - y^2)/(x - y) - (x + y)",
        "root5((x - y)^3)/x^4",
    ]
    prog = compile_program([parse_expression(t) for t in texts])
    out_c, scale_c, err_c = _run_with(_kernel, prog, rngpts)
    out_p, scale_p, err_p = _run_with(_kernel_py, prog, rngpts)
    assert np.array_equal(err_c, err_p)
    ok = err_c == 0
    assert np.array_equal(out_c[ok], out_p[ok])
    assert np.allclose(scale_c[ok], scale_p[ok], rtol=1e-12)


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled kernel not built")
def test_backend_selected():
    if os.environ.get("ODECUBIC_PURE_PYTHON"):
        assert backend_name() == "python"
    else:
        assert backend_name() == "compiled"


def test_run_program_shape_checks():
    prog = compile_program([parse_expression("x + y")])
    with pytest.raises(ValueError):
        run_program(prog, np.zeros((3, 2)), 1e-9)
