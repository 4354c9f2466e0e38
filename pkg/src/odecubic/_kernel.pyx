# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled interpreter for evaluation programs (hot kernel).

Must stay semantically identical to ``_kernel_py.run``; both are exercised
by the backend-equivalence tests.  Each slot carries its value and a
first-order bound on accumulated floating-point error; the bound (in units
of machine epsilon) is reported as the local cancellation scale.
"""

from libc.math cimport exp, log, pow, fabs, copysign, isfinite

cdef double EPS = 2.220446049250313e-16


def run(int[::1] ops, int[::1] arg1, int[::1] arg2, double[::1] consts,
        int[::1] watch, double[:, ::1] points, double atol,
        double[:, ::1] out, int[::1] err, double[:, ::1] scale):
    cdef Py_ssize_t n_instr = ops.shape[0]
    cdef Py_ssize_t n_pts = points.shape[0]
    cdef Py_ssize_t n_watch = watch.shape[0]
    cdef Py_ssize_t ip, k, iw
    cdef int op, a, b, code, ie
    cdef double x, y, p, q, v, e, va, vb, den, base, fe, u
    cdef double[::1] vals
    cdef double[::1] errs

    import numpy as np
    vals_arr = np.empty(n_instr if n_instr else 1, dtype=np.float64)
    errs_arr = np.empty(n_instr if n_instr else 1, dtype=np.float64)
    vals = vals_arr
    errs = errs_arr

    for ip in range(n_pts):
        x = points[ip, 0]
        y = points[ip, 1]
        p = points[ip, 2]
        q = points[ip, 3]
        code = 0
        for k in range(n_instr):
            op = ops[k]
            a = arg1[k]
            if op == 2:  # ADD
                b = arg2[k]
                v = vals[a] + vals[b]
                e = errs[a] + errs[b] + EPS * fabs(v)
            elif op == 4:  # MUL
                b = arg2[k]
                va = vals[a]
                vb = vals[b]
                v = va * vb
                e = errs[a] * fabs(vb) + fabs(va) * errs[b] + EPS * fabs(v)
            elif op == 3:  # SUB
                b = arg2[k]
                v = vals[a] - vals[b]
                e = errs[a] + errs[b] + EPS * fabs(v)
            elif op == 5:  # DIV
                b = arg2[k]
                den = vals[b]
                if fabs(den) < atol:
                    code = 1
                    break
                v = vals[a] / den
                e = (errs[a] + fabs(v) * errs[b]) / fabs(den) + EPS * fabs(v)
            elif op == 0:  # CONST
                v = consts[a]
                e = 0.0
            elif op == 1:  # VAR
                v = x if a == 0 else (y if a == 1 else (p if a == 2 else q))
                e = EPS * fabs(v)
            elif op == 6:  # NEG
                v = -vals[a]
                e = errs[a]
            elif op == 10:  # POWI
                base = vals[a]
                ie = arg2[k]
                if ie < 0 and fabs(base) < atol:
                    code = 1
                    break
                v = pow(base, <double>ie)
                if base != 0.0:
                    e = fabs(<double>ie) * fabs(v) / fabs(base) * errs[a] + EPS * fabs(v)
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
                v = pow(base, fe)
                if base > 0.0:
                    e = fabs(fe) * fabs(v) / base * errs[a] + EPS * fabs(v)
                else:
                    e = 0.0
            elif op == 7:  # EXP
                v = exp(vals[a])
                e = fabs(v) * errs[a] + EPS * fabs(v)
            elif op == 8:  # LN
                u = vals[a]
                if u <= 0.0:
                    code = 2
                    break
                v = log(u)
                e = errs[a] / u + EPS * fabs(v)
            elif op == 9:  # ROOT5
                u = vals[a]
                v = copysign(pow(fabs(u), 0.2), u)
                if u != 0.0:
                    e = fabs(v) * errs[a] / (5.0 * fabs(u)) + EPS * fabs(v)
                else:
                    e = pow(errs[a], 0.2)
            else:
                raise AssertionError("bad opcode")
            if not isfinite(v):
                code = 4
                break
            vals[k] = v
            errs[k] = e
        err[ip] = code
        if code == 0:
            for iw in range(n_watch):
                out[ip, iw] = vals[watch[iw]]
                scale[ip, iw] = errs[watch[iw]] / EPS
