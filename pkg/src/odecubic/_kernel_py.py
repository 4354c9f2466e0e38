"""Pure-Python interpreter for evaluation programs.

Semantics are identical to the compiled kernel in ``_kernel.pyx``; this
module is the import-time fallback when the extension is unavailable (or
when ``ODECUBIC_PURE_PYTHON`` is set).

Besides the value, every slot carries a first-order bound on the
accumulated floating-point error.  The zero/constancy predicates use the
bound (divided by machine epsilon) as the local cancellation scale, so an
identically-zero expression whose additive parts are huge is still
recognised, however deep the cancellation happens in the DAG.
"""

from __future__ import annotations

import math

EPS = 2.220446049250313e-16


def run(ops, arg1, arg2, consts, watch, points, atol, out, err, scale):
    """Evaluate a program at each point; fill ``out``/``scale``/``err``.

    points: (n, 4) float64 array of (x, y, p, q) coordinates.
    out:    (n, len(watch)) float64 array of watched slot values.
    scale:  (n, len(watch)) float64 array of error bounds / EPS.
    err:    (n,) int32 array of kernel error codes (0 = ok).
    """
    n_instr = len(ops)
    vals = [0.0] * n_instr
    errs = [0.0] * n_instr
    exp = math.exp
    log = math.log
    pw = math.pow
    isfinite = math.isfinite
    copysign = math.copysign

    for ip in range(len(points)):
        x, y, p, q = points[ip]
        code = 0
        for k in range(n_instr):
            op = ops[k]
            a = arg1[k]
            if op == 2:  # ADD
                va, vb = vals[a], vals[arg2[k]]
                v = va + vb
                e = errs[a] + errs[arg2[k]] + EPS * abs(v)
            elif op == 4:  # MUL
                va, vb = vals[a], vals[arg2[k]]
                v = va * vb
                e = errs[a] * abs(vb) + abs(va) * errs[arg2[k]] + EPS * abs(v)
            elif op == 3:  # SUB
                va, vb = vals[a], vals[arg2[k]]
                v = va - vb
                e = errs[a] + errs[arg2[k]] + EPS * abs(v)
            elif op == 5:  # DIV
                den = vals[arg2[k]]
                if abs(den) < atol:
                    code = 1
                    break
                v = vals[a] / den
                e = (errs[a] + abs(v) * errs[arg2[k]]) / abs(den) + EPS * abs(v)
            elif op == 0:  # CONST
                v = consts[a]
                e = 0.0
            elif op == 1:  # VAR
                v = x if a == 0 else y if a == 1 else p if a == 2 else q
                e = EPS * abs(v)
            elif op == 6:  # NEG
                v = -vals[a]
                e = errs[a]
            elif op == 10:  # POWI
                base = vals[a]
                ie = arg2[k]
                if ie < 0 and abs(base) < atol:
                    code = 1
                    break
                try:
                    v = pw(base, float(ie))
                except (OverflowError, ValueError):
                    code = 4
                    break
                if base != 0.0:
                    e = abs(ie) * abs(v) / abs(base) * errs[a] + EPS * abs(v)
                else:
                    e = errs[a] if ie == 1 else 0.0
            elif op == 11:  # POWF
                base = vals[a]
                fe = consts[arg2[k]]
                if base < 0.0:
                    code = 3
                    break
                if base == 0.0 and fe < 0.0:
                    code = 3
                    break
                if fe < 0.0 and base < atol:
                    code = 1
                    break
                try:
                    v = pw(base, fe)
                except (OverflowError, ValueError):
                    code = 4
                    break
                if base > 0.0:
                    e = abs(fe) * abs(v) / base * errs[a] + EPS * abs(v)
                else:
                    e = 0.0
            elif op == 7:  # EXP
                try:
                    v = exp(vals[a])
                except OverflowError:
                    code = 4
                    break
                e = abs(v) * errs[a] + EPS * abs(v)
            elif op == 8:  # LN
                u = vals[a]
                if u <= 0.0:
                    code = 2
                    break
                v = log(u)
                e = errs[a] / u + EPS * abs(v)
            elif op == 9:  # ROOT5
                u = vals[a]
                v = copysign(pw(abs(u), 0.2), u)
                if u != 0.0:
                    e = abs(v) * errs[a] / (5.0 * abs(u)) + EPS * abs(v)
                else:
                    e = pw(errs[a], 0.2)
            else:
                raise AssertionError(f"bad opcode {op}")
            if not isfinite(v):
                code = 4
                break
            vals[k] = v
            errs[k] = e
        err[ip] = code
        if code == 0:
            for iw in range(len(watch)):
                w = watch[iw]
                out[ip, iw] = vals[w]
                scale[ip, iw] = errs[w] / EPS
