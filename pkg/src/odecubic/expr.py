"""Immutable symbolic expression trees over the plane variables x, y.

Nodes are built through smart constructors that perform exactly three
bounded simplifications: rational constant folding, 0/1 absorption and
rational-exponent normalisation.  No general rewriting is attempted; the
invariant cascade produces large expressions and the numeric probing layer
does not need small forms.  Shared subtrees are kept shared (differentiation
memoises per node), so downstream consumers treat an expression as a DAG.

Variables: ``x`` and ``y`` are the plane coordinates; ``p`` stands for y'
and ``q`` for y'' while an equation is being normalised.  Exponents of power
nodes are always rational numbers in lowest terms.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator, Optional, Union

# Node kinds.
K_CONST = 0
K_VAR = 1
K_PARAM = 2
K_ADD = 3
K_SUB = 4
K_MUL = 5
K_DIV = 6
K_POW = 7
K_NEG = 8
K_EXP = 9
K_LN = 10
K_ROOT5 = 11

KIND_NAMES = {
    K_CONST: "const", K_VAR: "var", K_PARAM: "param", K_ADD: "+", K_SUB: "-",
    K_MUL: "*", K_DIV: "/", K_POW: "^", K_NEG: "neg", K_EXP: "exp",
    K_LN: "ln", K_ROOT5: "root5",
}

VARIABLES = ("x", "y", "p", "q")
VAR_INDEX = {name: i for i, name in enumerate(VARIABLES)}

Number = Union[int, Fraction]


class Expr:
    """One immutable node of an expression DAG.

    ``payload`` holds the rational value of a constant, the name of a
    variable/parameter, or the rational exponent of a power node.  ``a`` and
    ``b`` are the child nodes (``b`` only for binary operations).
    """

    __slots__ = ("kind", "a", "b", "payload", "_deriv", "_prog", "_hash")

    def __init__(self, kind: int, a: "Expr | None" = None,
                 b: "Expr | None" = None, payload=None):
        self.kind = kind
        self.a = a
        self.b = b
        self.payload = payload
        self._deriv = None
        self._prog = None
        self._hash = None

    # -- structural identity ------------------------------------------------

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Expr):
            return NotImplemented
        stack = [(self, other)]
        while stack:
            u, v = stack.pop()
            if u is v:
                continue
            if u.kind != v.kind or u.payload != v.payload:
                return False
            if (u.a is None) != (v.a is None) or (u.b is None) != (v.b is None):
                return False
            if u.a is not None:
                stack.append((u.a, v.a))
            if u.b is not None:
                stack.append((u.b, v.b))
        return True

    def __hash__(self) -> int:
        if self._hash is not None:
            return self._hash
        # Two-phase post-order so deep trees do not recurse and shared
        # subtrees hash before every parent.
        stack: list[Expr] = [self]
        while stack:
            n = stack[-1]
            if n._hash is not None:
                stack.pop()
                continue
            pending = [c for c in (n.a, n.b)
                       if c is not None and c._hash is None]
            if pending:
                stack.extend(pending)
                continue
            stack.pop()
            ha = n.a._hash if n.a is not None else 0
            hb = n.b._hash if n.b is not None else 0
            n._hash = hash((n.kind, n.payload, ha, hb))
        return self._hash

    def __repr__(self) -> str:
        s = to_string(self)
        if len(s) > 120:
            s = s[:117] + "..."
        return f"Expr({s})"

    def __str__(self) -> str:
        return to_string(self)

    # -- operator sugar (coerces ints and Fractions) ------------------------

    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __pow__(self, other):
        return pow_(self, other)

    def __neg__(self):
        return neg(self)


def as_expr(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, Fraction)):
        return const(v)
    raise TypeError(f"cannot coerce {type(v).__name__} to Expr (use exact rationals)")


# -- leaf constructors ------------------------------------------------------

_CONST_CACHE: dict[Fraction, Expr] = {}


def const(v: Number) -> Expr:
    f = v if isinstance(v, Fraction) else Fraction(v)
    node = _CONST_CACHE.get(f)
    if node is None:
        node = Expr(K_CONST, payload=f)
        if len(_CONST_CACHE) < 4096:
            _CONST_CACHE[f] = node
    return node


ZERO = const(0)
ONE = const(1)

_VAR_CACHE = {name: Expr(K_VAR, payload=name) for name in VARIABLES}


def var(name: str) -> Expr:
    try:
        return _VAR_CACHE[name]
    except KeyError:
        raise ValueError(f"unknown variable {name!r}; expected one of {VARIABLES}")


X = var("x")
Y = var("y")
P = var("p")
Q_VAR = var("q")


def param(name: str) -> Expr:
    return Expr(K_PARAM, payload=name)


# -- smart constructors -----------------------------------------------------

def _is_const(e: Expr, value=None) -> bool:
    if e.kind != K_CONST:
        return False
    return value is None or e.payload == value


def add(a: Expr, b: Expr) -> Expr:
    if a.kind == K_CONST and b.kind == K_CONST:
        return const(a.payload + b.payload)
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    return Expr(K_ADD, a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if a.kind == K_CONST and b.kind == K_CONST:
        return const(a.payload - b.payload)
    if _is_const(b, 0):
        return a
    if _is_const(a, 0):
        return neg(b)
    return Expr(K_SUB, a, b)


def neg(a: Expr) -> Expr:
    if a.kind == K_CONST:
        return const(-a.payload)
    if a.kind == K_NEG:
        return a.a
    return Expr(K_NEG, a)


def _coef_split(e: Expr) -> tuple[Fraction, Optional[Expr]]:
    """Split ``e`` into (rational coefficient, residual factor or None)."""
    if e.kind == K_CONST:
        return e.payload, None
    if e.kind == K_NEG:
        c, r = _coef_split(e.a)
        return -c, r
    if e.kind == K_MUL and e.a.kind == K_CONST:
        return e.a.payload, e.b
    return Fraction(1), e


def mul(a: Expr, b: Expr) -> Expr:
    ca, ra = _coef_split(a)
    cb, rb = _coef_split(b)
    c = ca * cb
    if ra is None and rb is None:
        return const(c)
    if c == 0:
        return ZERO
    if ra is None:
        r = rb
    elif rb is None:
        r = ra
    else:
        r = Expr(K_MUL, ra, rb)
    if c == 1:
        return r
    if c == -1:
        return Expr(K_NEG, r)
    return Expr(K_MUL, const(c), r)


def div(a: Expr, b: Expr) -> Expr:
    if b.kind == K_CONST and b.payload != 0:
        return mul(const(Fraction(1) / b.payload), a)
    if _is_const(a, 0):
        return ZERO
    return Expr(K_DIV, a, b)


def _exact_root(c: Fraction, n: int) -> Optional[Fraction]:
    """Exact positive n-th root of a non-negative rational, or None."""
    if c < 0:
        return None

    def iroot(m: int) -> Optional[int]:
        if m in (0, 1):
            return m
        r = round(m ** (1.0 / n))
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand ** n == m:
                return cand
        return None

    num = iroot(c.numerator)
    den = iroot(c.denominator)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def pow_(base: Expr, exponent) -> Expr:
    e = exponent if isinstance(exponent, Fraction) else Fraction(exponent)
    if e == 0:
        return ONE
    if e == 1:
        return base
    if base.kind == K_CONST:
        c = base.payload
        if e.denominator == 1:
            if c != 0 or e > 0:
                return const(c ** e.numerator)
        else:
            root = _exact_root(c, e.denominator)
            if root is not None and (root != 0 or e > 0):
                return const(root ** e.numerator)
    if base.kind == K_POW and e.denominator == 1:
        return pow_(base.a, base.payload * e)
    return Expr(K_POW, base, payload=e)


def sqrt_(a: Expr) -> Expr:
    return pow_(a, Fraction(1, 2))


def exp_(a: Expr) -> Expr:
    if _is_const(a, 0):
        return ONE
    return Expr(K_EXP, a)


def ln_(a: Expr) -> Expr:
    if _is_const(a, 1):
        return ZERO
    return Expr(K_LN, a)


def root5(a: Expr) -> Expr:
    if a.kind == K_CONST:
        c = a.payload
        r = _exact_root(abs(c), 5)
        if r is not None:
            return const(r if c >= 0 else -r)
    return Expr(K_ROOT5, a)


_FUNCTIONS = {"exp": exp_, "ln": ln_, "sqrt": sqrt_, "root5": root5}


# -- differentiation --------------------------------------------------------

def differentiate(e: Expr, varname: str) -> Expr:
    """Exact symbolic partial derivative with respect to ``varname``.

    Results are memoised on the nodes, so repeated mixed partials over a
    shared DAG cost one visit per unique node.
    """
    if varname not in VAR_INDEX:
        raise ValueError(f"cannot differentiate with respect to {varname!r}")
    stack = [e]
    while stack:
        n = stack[-1]
        if n._deriv is not None and varname in n._deriv:
            stack.pop()
            continue
        pending = False
        for c in (n.a, n.b):
            if c is not None and (c._deriv is None or varname not in c._deriv):
                stack.append(c)
                pending = True
        if pending:
            continue
        stack.pop()
        if n._deriv is None:
            n._deriv = {}
        n._deriv[varname] = _diff_node(n, varname)
    return e._deriv[varname]


def _diff_node(n: Expr, v: str) -> Expr:
    k = n.kind
    if k == K_CONST or k == K_PARAM:
        return ZERO
    if k == K_VAR:
        return ONE if n.payload == v else ZERO
    da = n.a._deriv[v] if n.a is not None else None
    db = n.b._deriv[v] if n.b is not None else None
    if k == K_ADD:
        return add(da, db)
    if k == K_SUB:
        return sub(da, db)
    if k == K_MUL:
        return add(mul(da, n.b), mul(n.a, db))
    if k == K_DIV:
        return div(sub(mul(da, n.b), mul(n.a, db)), pow_(n.b, 2))
    if k == K_POW:
        r = n.payload
        return mul(const(r), mul(pow_(n.a, r - 1), da))
    if k == K_NEG:
        return neg(da)
    if k == K_EXP:
        return mul(n, da)
    if k == K_LN:
        return div(da, n.a)
    if k == K_ROOT5:
        return div(da, mul(const(5), pow_(n, 4)))
    raise AssertionError(f"unhandled node kind {k}")


def mixed_partial(e: Expr, i: int, j: int) -> Expr:
    """i-fold x-derivative composed with j-fold y-derivative."""
    out = e
    for _ in range(i):
        out = differentiate(out, "x")
    for _ in range(j):
        out = differentiate(out, "y")
    return out


# -- substitution -----------------------------------------------------------

def substitute(e: Expr, mapping: dict[str, Expr]) -> Expr:
    """Simultaneously replace variables/parameters by expressions.

    Rebuilds through the smart constructors, so binding parameters to
    rationals folds constants on the way up.  Untouched subtrees are reused.
    """
    memo: dict[int, Expr] = {}
    stack = [e]
    while stack:
        n = stack[-1]
        if id(n) in memo:
            stack.pop()
            continue
        k = n.kind
        if k in (K_VAR, K_PARAM):
            memo[id(n)] = mapping.get(n.payload, n)
            stack.pop()
            continue
        if k == K_CONST:
            memo[id(n)] = n
            stack.pop()
            continue
        pending = False
        for c in (n.a, n.b):
            if c is not None and id(c) not in memo:
                stack.append(c)
                pending = True
        if pending:
            continue
        stack.pop()
        na = memo[id(n.a)] if n.a is not None else None
        nb = memo[id(n.b)] if n.b is not None else None
        if na is n.a and nb is n.b:
            memo[id(n)] = n
            continue
        if k == K_ADD:
            out = add(na, nb)
        elif k == K_SUB:
            out = sub(na, nb)
        elif k == K_MUL:
            out = mul(na, nb)
        elif k == K_DIV:
            out = div(na, nb)
        elif k == K_POW:
            out = pow_(na, n.payload)
        elif k == K_NEG:
            out = neg(na)
        elif k == K_EXP:
            out = exp_(na)
        elif k == K_LN:
            out = ln_(na)
        elif k == K_ROOT5:
            out = root5(na)
        else:
            raise AssertionError(f"unhandled node kind {k}")
        memo[id(n)] = out
    return memo[id(e)]


def bind_params(e: Expr, bindings: dict[str, Fraction]) -> Expr:
    if not bindings:
        return e
    return substitute(e, {name: const(v) for name, v in bindings.items()})


# -- inspection helpers -----------------------------------------------------

def iter_unique_nodes(e: Expr) -> Iterator[Expr]:
    seen: set[int] = set()
    stack = [e]
    while stack:
        n = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        yield n
        if n.a is not None:
            stack.append(n.a)
        if n.b is not None:
            stack.append(n.b)


def node_count(e: Expr) -> int:
    return sum(1 for _ in iter_unique_nodes(e))


def contains_name(e: Expr, name: str) -> bool:
    return any(n.kind in (K_VAR, K_PARAM) and n.payload == name
               for n in iter_unique_nodes(e))


def polynomial_degree(e: Expr, name: str) -> Optional[int]:
    """Conservative degree of ``e`` as a polynomial in variable ``name``.

    None means "not structurally polynomial" (the variable occurs inside a
    function, a fractional power or a denominator).  Cancellations are not
    detected, so the result may overestimate the true degree.
    """
    memo: dict[int, Optional[int]] = {}
    stack = [e]
    while stack:
        n = stack[-1]
        if id(n) in memo:
            stack.pop()
            continue
        k = n.kind
        if k == K_CONST:
            memo[id(n)] = 0
            stack.pop()
            continue
        if k in (K_VAR, K_PARAM):
            memo[id(n)] = 1 if n.payload == name else 0
            stack.pop()
            continue
        pending = [c for c in (n.a, n.b) if c is not None and id(c) not in memo]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        da = memo[id(n.a)]
        db = memo[id(n.b)] if n.b is not None else 0
        if da is None or db is None:
            memo[id(n)] = None
            continue
        if k in (K_ADD, K_SUB):
            memo[id(n)] = max(da, db)
        elif k == K_MUL:
            memo[id(n)] = da + db
        elif k == K_DIV:
            memo[id(n)] = da if db == 0 else None
        elif k == K_NEG:
            memo[id(n)] = da
        elif k == K_POW:
            r = n.payload
            if da == 0:
                memo[id(n)] = 0
            elif r.denominator == 1 and r >= 0:
                memo[id(n)] = da * r.numerator
            else:
                memo[id(n)] = None
        else:  # EXP, LN, ROOT5
            memo[id(n)] = 0 if da == 0 else None
    return memo[id(e)]


# -- printing ---------------------------------------------------------------

_PREC_ADD = 1
_PREC_MUL = 2
_PREC_POW = 3
_PREC_ATOM = 4


def _fmt_exponent(e: Fraction) -> str:
    if e.denominator == 1 and e >= 0:
        return str(e.numerator)
    return f"({e})"


def to_string(e: Expr) -> str:
    """Render to the documented grammar; ``parse(to_string(e)) == e``."""
    out: dict[int, tuple[str, int]] = {}
    stack = [e]
    while stack:
        n = stack[-1]
        if id(n) in out:
            stack.pop()
            continue
        k = n.kind
        if k == K_CONST:
            s = str(n.payload)
            prec = _PREC_ATOM
            if "/" in s:
                prec = _PREC_MUL
            if s.startswith("-"):
                prec = 0
            out[id(n)] = (s, prec)
            stack.pop()
            continue
        if k in (K_VAR, K_PARAM):
            out[id(n)] = (n.payload, _PREC_ATOM)
            stack.pop()
            continue
        pending = False
        for c in (n.a, n.b):
            if c is not None and id(c) not in out:
                stack.append(c)
                pending = True
        if pending:
            continue
        stack.pop()
        sa, pa = out[id(n.a)]
        sb, pb = out[id(n.b)] if n.b is not None else ("", 0)
        # right operands of same-precedence chains are parenthesised so the
        # (left-associative) parser rebuilds exactly this tree
        if k == K_ADD:
            left = f"({sa})" if pa < _PREC_ADD else sa
            right = f"({sb})" if pb <= _PREC_ADD else sb
            out[id(n)] = (f"{left} + {right}", _PREC_ADD)
        elif k == K_SUB:
            left = f"({sa})" if pa < _PREC_ADD else sa
            right = f"({sb})" if pb <= _PREC_ADD else sb
            out[id(n)] = (f"{left} - {right}", _PREC_ADD)
        elif k == K_MUL:
            left = f"({sa})" if pa < _PREC_MUL else sa
            right = f"({sb})" if pb <= _PREC_MUL else sb
            out[id(n)] = (f"{left}*{right}", _PREC_MUL)
        elif k == K_DIV:
            left = f"({sa})" if pa < _PREC_MUL else sa
            right = f"({sb})" if pb <= _PREC_MUL else sb
            out[id(n)] = (f"{left}/{right}", _PREC_MUL)
        elif k == K_POW:
            base = f"({sa})" if pa < _PREC_ATOM else sa
            out[id(n)] = (f"{base}^{_fmt_exponent(n.payload)}", _PREC_POW)
        elif k == K_NEG:
            operand = f"({sa})" if pa <= _PREC_MUL else sa
            out[id(n)] = (f"-{operand}", _PREC_ADD)
        elif k == K_EXP:
            out[id(n)] = (f"exp({sa})", _PREC_ATOM)
        elif k == K_LN:
            out[id(n)] = (f"ln({sa})", _PREC_ATOM)
        elif k == K_ROOT5:
            out[id(n)] = (f"root5({sa})", _PREC_ATOM)
        else:
            raise AssertionError(f"unhandled node kind {k}")
    return out[id(e)][0]
