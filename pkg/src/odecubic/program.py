"""Flattening of expression DAGs into straight-line evaluation programs.

A program is a triple of parallel int32 arrays (opcode, first argument,
second argument), one instruction per unique DAG node in topological order,
plus a float64 constant pool.  Instruction ``k`` writes slot ``k``; leaf
instructions read the constant pool or the evaluation point.  Both the
compiled kernel and the pure-Python fallback interpret this format.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .expr import (Expr, K_ADD, K_CONST, K_DIV, K_EXP, K_LN, K_MUL, K_NEG,
                   K_PARAM, K_POW, K_ROOT5, K_SUB, K_VAR, VAR_INDEX)

OP_CONST = 0
OP_VAR = 1
OP_ADD = 2
OP_SUB = 3
OP_MUL = 4
OP_DIV = 5
OP_NEG = 6
OP_EXP = 7
OP_LN = 8
OP_ROOT5 = 9
OP_POWI = 10
OP_POWF = 11

# Kernel error codes.
ERR_OK = 0
ERR_DIV_NEAR_ZERO = 1
ERR_LOG_DOMAIN = 2
ERR_POW_DOMAIN = 3
ERR_NOT_FINITE = 4

ERROR_MESSAGES = {
    ERR_DIV_NEAR_ZERO: "division by (near-)zero denominator",
    ERR_LOG_DOMAIN: "ln of a non-positive argument",
    ERR_POW_DOMAIN: "fractional power of a negative or zero base",
    ERR_NOT_FINITE: "non-finite intermediate value",
}

_MAX_INT_EXP = 1 << 30


class CompileError(ValueError):
    pass


@dataclass
class Program:
    ops: np.ndarray
    arg1: np.ndarray
    arg2: np.ndarray
    consts: np.ndarray
    roots: np.ndarray
    slot_by_id: dict[int, int] = field(repr=False)
    # Keeps the root expressions (hence all slots) alive so that id-keyed
    # slot lookups stay valid.
    exprs: tuple[Expr, ...] = field(repr=False, default=())

    @property
    def n_instructions(self) -> int:
        return len(self.ops)

    def slots_of(self, nodes) -> np.ndarray:
        try:
            return np.array([self.slot_by_id[id(n)] for n in nodes], dtype=np.int32)
        except KeyError:
            raise CompileError("node is not part of this program")


def compile_program(roots: list[Expr]) -> Program:
    """Compile one or more expressions sharing a DAG into a program."""
    slot_by_id: dict[int, int] = {}
    ops: list[int] = []
    arg1: list[int] = []
    arg2: list[int] = []
    consts: list[float] = []
    const_index: dict[float, int] = {}

    def const_slot(v: float) -> int:
        idx = const_index.get(v)
        if idx is None:
            idx = len(consts)
            consts.append(v)
            const_index[v] = idx
        return idx

    stack: list[Expr] = list(roots)
    while stack:
        n = stack[-1]
        if id(n) in slot_by_id:
            stack.pop()
            continue
        pending = False
        for c in (n.a, n.b):
            if c is not None and id(c) not in slot_by_id:
                stack.append(c)
                pending = True
        if pending:
            continue
        stack.pop()
        k = n.kind
        if k == K_CONST:
            op, a, b = OP_CONST, const_slot(float(n.payload)), 0
        elif k == K_VAR:
            op, a, b = OP_VAR, VAR_INDEX[n.payload], 0
        elif k == K_PARAM:
            raise CompileError(f"unbound parameter {n.payload!r}")
        elif k == K_ADD:
            op, a, b = OP_ADD, slot_by_id[id(n.a)], slot_by_id[id(n.b)]
        elif k == K_SUB:
            op, a, b = OP_SUB, slot_by_id[id(n.a)], slot_by_id[id(n.b)]
        elif k == K_MUL:
            op, a, b = OP_MUL, slot_by_id[id(n.a)], slot_by_id[id(n.b)]
        elif k == K_DIV:
            op, a, b = OP_DIV, slot_by_id[id(n.a)], slot_by_id[id(n.b)]
        elif k == K_NEG:
            op, a, b = OP_NEG, slot_by_id[id(n.a)], 0
        elif k == K_EXP:
            op, a, b = OP_EXP, slot_by_id[id(n.a)], 0
        elif k == K_LN:
            op, a, b = OP_LN, slot_by_id[id(n.a)], 0
        elif k == K_ROOT5:
            op, a, b = OP_ROOT5, slot_by_id[id(n.a)], 0
        elif k == K_POW:
            e = n.payload
            if e.denominator == 1 and abs(e.numerator) <= _MAX_INT_EXP:
                op, a, b = OP_POWI, slot_by_id[id(n.a)], e.numerator
            else:
                op, a, b = OP_POWF, slot_by_id[id(n.a)], const_slot(float(e))
        else:
            raise AssertionError(f"unhandled node kind {k}")
        slot_by_id[id(n)] = len(ops)
        ops.append(op)
        arg1.append(a)
        arg2.append(b)

    return Program(
        ops=np.asarray(ops, dtype=np.int32),
        arg1=np.asarray(arg1, dtype=np.int32),
        arg2=np.asarray(arg2, dtype=np.int32),
        consts=np.asarray(consts if consts else [0.0], dtype=np.float64),
        roots=np.asarray([slot_by_id[id(r)] for r in roots], dtype=np.int32),
        slot_by_id=slot_by_id,
        exprs=tuple(roots),
    )


def cached_program(e: Expr) -> Program:
    """Program for a single expression, memoised on the node."""
    prog = e._prog
    if prog is None:
        prog = compile_program([e])
        e._prog = prog
    return prog
