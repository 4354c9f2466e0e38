"""Decision tree assigning an equation to one of the eight equivalence
classes (or an honest catch-all verdict), with parameter extraction, the
matched model equation and its symmetry-algebra generators.

Verdicts:
  Linearizable            8-dimensional algebra, reducible to y'' = 0
  Theorem1..Theorem7      the seven nonlinear model classes
  FirstCaseFamily(I..IV)  family label only (no full equivalence verdict)
  IntermediateOther       collinear case matching no characterised class
  GeneralOther            non-collinear, constant invariants, no match
  GeneralNonConstant      non-collinear with a non-constant invariant
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .expr import Expr
from .invariants import InvariantEngine, InvariantRecord
from .ode import NormalizeError, OdeCubic, normalize_to_cubic, swap_xy
from .probing import Probe, ProbeExhausted, snap_rational

MATCH_TOL = 1e-6

# Model equations and generators (xi, eta) per class; parameter names in the
# templates are bound at instantiation time.
MODEL_TABLE: dict[str, tuple[str, tuple[str, ...], int,
                             tuple[tuple[str, str], ...]]] = {
    "Linearizable": (
        "y'' = 0", (), 8,
        (("0", "1"), ("1", "0"), ("0", "x"), ("0", "y"), ("x", "0"),
         ("y", "0"), ("x*y", "y^2"), ("x^2", "x*y"))),
    "Theorem1": (
        "y'' = 1/y^3", (), 3,
        (("1", "0"), ("2*x", "y"), ("x^2", "x*y"))),
    "Theorem2": (
        "y'' = exp(y)", (), 2,
        (("1", "0"), ("x", "-2"))),
    "Theorem3": (
        "y'' = y^(c + 2)/((c + 1)*(c + 2))", ("c",), 2,
        (("1", "0"), ("(c + 1)*x", "-2*y"))),
    "Theorem4": (
        "y'' = y'^2/(2*y) + sqrt(6*k*y)*y' + 2*(1 - 2*k)*y^2/3", ("k",), 2,
        (("1", "0"), ("x", "-2*y"))),
    "Theorem5": (
        "y'' = y^2/2", (), 2,
        (("1", "0"), ("x", "-2*y"))),
    "Theorem6": (
        "y'' = y'^3 - k*y*y'^2 + k^2*y^2*y'/3 + 1/k + k^2*y/9 - k^3*y^3/27",
        ("k",), 2,
        (("1", "0"), ("0", "exp(k*x/3)"))),
    "Theorem7": (
        "y'' = 4*y'^3/(n*y^3) + ((6*a - 1)*y + 6)*y'^2/y^2"
        " + 3*(b*y^2 + c*y + n)*y'/y + (d*y^3 + k*y^2 + m*y + n^2)/2",
        ("n", "a", "b", "c", "d", "k", "m"), 2,
        (("1", "0"), ("exp(n*x/2)", "-(n*y/2)*exp(n*x/2)"))),
}

FAMILY_VALUES = {
    "II": -9.0 / 10.0,
    "III": -12.0 / 5.0,
}


@dataclass
class Classification:
    verdict: str
    family: Optional[str] = None
    params: dict[str, float] = field(default_factory=dict)
    invariants: dict[str, InvariantRecord] = field(default_factory=dict)
    model: Optional[OdeCubic] = None
    model_text: Optional[str] = None
    generators: list[tuple[str, str]] = field(default_factory=list)
    algebra_dim: Optional[int] = None
    branch: Optional[str] = None
    branch_notes: list[str] = field(default_factory=list)
    degeneration: Optional[str] = None

    @property
    def label(self) -> str:
        if self.verdict == "FirstCaseFamily":
            return f"FirstCaseFamily({self.family})"
        return self.verdict


def _close(value: Optional[float], target: float, tol: float = MATCH_TOL) -> bool:
    if value is None:
        return False
    return abs(value - target) <= tol * (1.0 + abs(target))


# -- theorem parameter extraction --------------------------------------------


def extract_theorem3(i1: float, i3: Optional[float],
                     tol: float = MATCH_TOL) -> Optional[float]:
    """Exponent parameter c from I1 = 3(c+5)/(5c), checked against
    I3 = c(c+5)/(15(c+1)(c+2)); None when the pair is inconsistent."""
    denom = 5.0 * i1 - 3.0
    if abs(denom) <= tol:
        return None  # the c -> infinity limit belongs to Theorem 2
    c = 15.0 / denom
    for excluded in (-5.0, -2.0, -1.0, 0.0):
        if abs(c - excluded) <= tol * (1.0 + abs(excluded)):
            return None
    if i3 is None:
        return None
    expected = c * (c + 5.0) / (15.0 * (c + 1.0) * (c + 2.0))
    if not _close(i3, expected, tol):
        return None
    return c


def extract_theorem4(i1: float, i2: Optional[float], i3: Optional[float],
                     tol: float = MATCH_TOL) -> Optional[float]:
    """Invariant k = I2 for the class with I1 = 18/5, I3 = 1/15 - 22k/3."""
    if i2 is None or i3 is None:
        return None
    if abs(i2) <= tol:
        return None
    if not _close(i1, 18.0 / 5.0, tol):
        return None
    if not _close(i3, 1.0 / 15.0 - 22.0 * i2 / 3.0, tol):
        return None
    return i2


@dataclass
class Theorem7Params:
    n: float
    a: float
    b: float
    c: float
    d: float
    k: float
    m: float
    residual_quadratic: float     # consistency relation from the B-condition
    residual_linear: float        # consistency relation from the A-condition
    residual_parameters: float    # relation binding n, a, b


def extract_theorem7(i3: float, i6: float, i7: float, i8: float,
                     tol: float = MATCH_TOL) -> Theorem7Params | str:
    """Model parameters for the non-collinear class with I6 != 0.

    Returns a parameter record, or a string reason when the invariants do
    not satisfy the class conditions ("no-match") or fall on the unsupported
    branch ("unsupported-branch", c6 <= 0 would need a complex n).
    """
    c3, c6, c7, c8 = i3, 6.0 * i6, i7, i8
    if c6 <= 0.0:
        return "unsupported-branch"
    disc = c6 ** 2 - 3.0 * c8
    if abs(disc) <= tol * (1.0 + c6 ** 2 + abs(3.0 * c8)):
        return "no-match"
    res32 = c7 - (4.0 * c8 * (c3 + c8) / c6 - c6 * (5.0 * c3 + 8.0 * c8) / 6.0)
    if abs(res32) > tol:
        return "no-match"
    res33 = 27.0 * c6 + disc * (c6 ** 2 * (5.0 * c3 + 8.0 * c8)
                                + 4.0 * (c3 + c8) ** 2)
    if abs(res33) > tol:
        return "no-match"
    n = c6 ** 2.5
    a = -2.0 * (c3 + c8) / (3.0 * c6 ** 2)
    b = -3.0 / (math.sqrt(c6) * disc)
    c = n * (12.0 * a - 5.0) / 6.0
    d = b * n * (6.0 * a - 1.0) / 6.0
    k = 3.0 * b * n
    m = 3.0 * n ** 2 * (2.0 * a - 1.0) / 2.0
    res35 = 18.0 * b * (b - a ** 2 * n) + 15.0 * n * a * b - 2.0 * b * n - 6.0
    if abs(res35) > tol:
        return "no-match"
    return Theorem7Params(n=n, a=a, b=b, c=c, d=d, k=k, m=m,
                          residual_quadratic=res32, residual_linear=res33,
                          residual_parameters=res35)


# -- model instantiation ------------------------------------------------------


def _as_fraction(v: float) -> Fraction:
    snapped = snap_rational(v, maxden=10 ** 6)
    if snapped is not None:
        return snapped
    return Fraction(v).limit_denominator(10 ** 9)


def model_equation(verdict: str, params: dict[str, float],
                   probe: Optional[Probe] = None
                   ) -> tuple[Optional[OdeCubic], Optional[str],
                              list[tuple[str, str]], Optional[int]]:
    """Model OdeCubic, its display string, generators and algebra dimension.

    Irrational extracted parameters are embedded as close rational
    approximations (well inside every classification tolerance).
    """
    entry = MODEL_TABLE.get(verdict)
    if entry is None:
        return None, None, [], None
    template, names, dim, generators = entry
    bindings = {name: _as_fraction(params[name]) for name in names}
    gens = [(_subst_params(xi, bindings), _subst_params(eta, bindings))
            for xi, eta in generators]
    text = _subst_params(template, bindings)
    ode = normalize_to_cubic(text, None, probe or Probe())
    return ode, text, gens, dim


def _subst_params(text: str, bindings: dict[str, Fraction]) -> str:
    from .parser import tokenize
    if not bindings:
        return text
    out = []
    last = 0
    for kind, value, offset in tokenize(text, equation=True):
        if kind == "ident" and value in bindings:
            out.append(text[last:offset])
            v = bindings[value]
            s = str(v) if v >= 0 and v.denominator == 1 else f"({v})"
            out.append(s)
            last = offset + len(value)
    out.append(text[last:])
    return "".join(out)


# -- the decision tree --------------------------------------------------------


def classify(ode: OdeCubic, probe: Optional[Probe] = None,
             tol: float = MATCH_TOL) -> Classification:
    probe = probe or Probe()
    eng = InvariantEngine(ode, probe)
    result = _classify_engine(eng, tol)
    result.branch_notes = list(eng.notes) + result.branch_notes
    if result.verdict in MODEL_TABLE:
        try:
            model, text, gens, dim = model_equation(result.verdict,
                                                    result.params, probe)
            result.model = model
            result.model_text = text
            result.generators = gens
            result.algebra_dim = dim
        except (ProbeExhausted, NormalizeError) as exc:
            result.algebra_dim = MODEL_TABLE[result.verdict][2]
            result.branch_notes.append(
                f"model instantiation skipped: {exc}")
    return result


def _record(eng: InvariantEngine, out: dict[str, InvariantRecord], name: str,
            expr: Expr, want_value: bool = True,
            want_zero: bool = False) -> InvariantRecord:
    rec = InvariantRecord(name=name, expr=expr)
    if want_zero:
        rec.identically_zero = eng.is_zero(expr)
    if want_value:
        rec.value = eng.constant(expr)
    out[name] = rec
    return rec


def _classify_engine(eng: InvariantEngine, tol: float) -> Classification:
    inv: dict[str, InvariantRecord] = {}
    rel = eng.rel
    _record(eng, inv, "A", rel.A, want_value=False, want_zero=True)
    _record(eng, inv, "B", rel.B, want_value=False, want_zero=True)

    # Maximal degeneration: linearizable.
    if eng.a_vanishes and eng.b_vanishes:
        return Classification(verdict="Linearizable", invariants=inv,
                              degeneration="maximal")

    _record(eng, inv, "F5", rel.F5, want_value=False, want_zero=True)
    if eng.collinear:
        if eng.a_vanishes:
            return _classify_collinear_swapped(eng, inv, tol)
        return _classify_collinear(eng, inv, tol)
    return _classify_general(eng, inv, tol)


def _classify_collinear_swapped(eng: InvariantEngine,
                                inv: dict[str, InvariantRecord],
                                tol: float) -> Classification:
    """Collinear case with A identically zero: classify through the x<->y
    swap, a point transformation under which every criterion is invariant.

    The B-branch formula set circulates with internal inconsistencies (see
    the corrected readings in the formula layer), so the decision tree runs
    the fully verified A-branch on the swapped equation instead; verdicts,
    constant invariant values and extracted parameters carry over unchanged.
    """
    x0, x1, y0, y1 = eng.probe.box
    swapped_probe = Probe(seed=eng.probe.seed, box=(y0, y1, x0, x1),
                          npoints=eng.probe.npoints, atol=eng.probe.atol,
                          rtol=eng.probe.rtol, maxresample=eng.probe.maxresample)
    sub_eng = InvariantEngine(swap_xy(eng.ode), swapped_probe)
    result = _classify_collinear(sub_eng, inv, tol)
    result.branch = "B"
    result.branch_notes = (
        ["classified via the x<->y swap (A vanishes identically); "
         "pseudoinvariant expressions below live in the swapped coordinates"]
        + list(sub_eng.notes) + result.branch_notes)
    return result


def _classify_collinear(eng: InvariantEngine, inv: dict[str, InvariantRecord],
                        tol: float) -> Classification:
    base = dict(degeneration="intermediate", branch=eng.branch)
    n_rec = _record(eng, inv, "N", eng.N, want_value=False, want_zero=True)

    if not n_rec.identically_zero:
        m_rec = _record(eng, inv, "M", eng.M, want_value=False, want_zero=True)
        om_rec = _record(eng, inv, "Omega", eng.Omega, want_value=False,
                         want_zero=True)
        if m_rec.identically_zero and om_rec.identically_zero:
            lam_rec = _record(eng, inv, "Lambda", eng.Lambda,
                              want_value=False, want_zero=True)
            if lam_rec.identically_zero:
                k_rec = _record(eng, inv, "K", eng.K)
                if _close(k_rec.value, -5.0 / 9.0, tol):
                    return Classification(verdict="Theorem1",
                                          invariants=inv, **base)
            return Classification(verdict="IntermediateOther",
                                  invariants=inv, **base)

        if not m_rec.identically_zero and om_rec.identically_zero:
            exprs = eng.first_case_exprs()
            i1 = _record(eng, inv, "I1", exprs["I1"]).value
            inv["I2"] = InvariantRecord(name="I2", expr=exprs["I2"], value=0.0,
                                        identically_zero=True)
            i3 = _record(eng, inv, "I3", exprs["I3"]).value
            if i1 is None:
                return Classification(verdict="IntermediateOther",
                                      invariants=inv, **base)
            if _close(i1, 3.0 / 5.0, tol):
                if _close(i3, 1.0 / 15.0, tol):
                    return Classification(verdict="Theorem2",
                                          invariants=inv, **base)
                return Classification(verdict="FirstCaseFamily", family="I",
                                      invariants=inv, algebra_dim=None, **base)
            for family, value in FAMILY_VALUES.items():
                if _close(i1, value, tol):
                    return Classification(verdict="FirstCaseFamily",
                                          family=family, invariants=inv, **base)
            c = extract_theorem3(i1, i3, tol)
            if c is not None:
                return Classification(verdict="Theorem3", params={"c": c},
                                      invariants=inv, **base)
            # Any other constant I1 formally determines a Type IV exponent.
            denom = 5.0 * i1 - 3.0
            c_family = 15.0 / denom if abs(denom) > tol else None
            if c_family is not None and all(
                    abs(c_family - excluded) > tol
                    for excluded in (-5.0, -2.0, -1.0, 0.0)):
                return Classification(verdict="FirstCaseFamily", family="IV",
                                      params={"c": c_family},
                                      invariants=inv, **base)
            return Classification(verdict="IntermediateOther",
                                  invariants=inv, **base)

        if m_rec.identically_zero:
            # M = 0 with Omega != 0 matches no characterised case, and the
            # first-case quotients would divide by the vanishing M.
            return Classification(verdict="IntermediateOther",
                                  invariants=inv, **base)

        # M and Omega both nonvanishing: the square-slope class.
        exprs = eng.first_case_exprs()
        i1 = _record(eng, inv, "I1", exprs["I1"]).value
        i2 = _record(eng, inv, "I2", exprs["I2"]).value
        i3 = _record(eng, inv, "I3", exprs["I3"]).value
        if i1 is not None:
            k = extract_theorem4(i1, i2, i3, tol)
            if k is not None:
                return Classification(verdict="Theorem4", params={"k": k},
                                      invariants=inv, **base)
        return Classification(verdict="IntermediateOther",
                              invariants=inv, **base)

    # N identically zero.
    om_rec = _record(eng, inv, "Omega", eng.Omega, want_value=False,
                     want_zero=True)
    if om_rec.identically_zero:
        l_rec = _record(eng, inv, "L", eng.L, want_value=False, want_zero=True)
        if l_rec.identically_zero:
            return Classification(verdict="Theorem5", invariants=inv, **base)
    return Classification(verdict="IntermediateOther", invariants=inv, **base)


def _classify_general(eng: InvariantEngine, inv: dict[str, InvariantRecord],
                      tol: float) -> Classification:
    base = dict(degeneration="general", branch=eng.branch)
    exprs = eng.general_exprs()
    values: dict[str, Optional[float]] = {}
    for name in ("I3", "I6", "I7", "I8"):
        rec = _record(eng, inv, name, exprs[name], want_zero=True)
        values[name] = rec.value
    if any(values[name] is None for name in values):
        return Classification(verdict="GeneralNonConstant",
                              invariants=inv, **base)

    i3, i6, i7, i8 = (values[n] for n in ("I3", "I6", "I7", "I8"))
    i6_zero = inv["I6"].identically_zero
    i8_zero = inv["I8"].identically_zero
    if i6_zero and i8_zero and abs(i3) > tol and _close(i7, 9.0 / i3, tol):
        return Classification(verdict="Theorem6", params={"k": i3},
                              invariants=inv, **base)
    if not i6_zero:
        extracted = extract_theorem7(i3, i6, i7, i8, tol)
        if isinstance(extracted, Theorem7Params):
            params = {"n": extracted.n, "a": extracted.a, "b": extracted.b,
                      "c": extracted.c, "d": extracted.d, "k": extracted.k,
                      "m": extracted.m}
            result = Classification(verdict="Theorem7", params=params,
                                    invariants=inv, **base)
            return result
        out = Classification(verdict="GeneralOther", invariants=inv, **base)
        out.branch_notes = [f"Theorem7 extraction: {extracted}"]
        return out
    return Classification(verdict="GeneralOther", invariants=inv, **base)


def classify_equation(equation: str,
                      bindings: Optional[dict[str, Fraction]] = None,
                      probe: Optional[Probe] = None,
                      tol: float = MATCH_TOL) -> Classification:
    probe = probe or Probe()
    ode = normalize_to_cubic(equation, bindings, probe)
    return classify(ode, probe, tol)


def inspect_invariants(ode: OdeCubic, probe: Optional[Probe] = None) -> dict:
    """Diagnostic dump of the invariant cascade without a verdict.

    Reports every quantity that is defined on the input's route, with its
    expression, identically-zero flag and probed constant value (when it has
    one).  Expressions for inputs handled through the x<->y swap live in the
    swapped coordinates; a note says so.
    """
    from .expr import to_string

    probe = probe or Probe()
    eng = InvariantEngine(ode, probe)
    entries: list[dict] = []
    notes: list[str] = []

    def add(name, expr, want_zero=True, want_value=True):
        item: dict = {"name": name, "expression": to_string(expr)}
        if want_zero:
            item["identically_zero"] = eng.is_zero(expr)
        if want_value:
            item["value"] = eng.constant(expr)
            if item["value"] is not None:
                snapped = snap_rational(item["value"], rtol=1e-12)
                if snapped is not None:
                    item["rational"] = str(snapped)
        entries.append(item)
        return item

    rel = eng.rel
    a_rec = add("A", rel.A, want_value=False)
    b_rec = add("B", rel.B, want_value=False)
    if a_rec["identically_zero"] and b_rec["identically_zero"]:
        notes.append("maximal degeneration: linearizable, cascade stops here")
        return {"route": "maximal", "entries": entries, "notes": notes}
    f_rec = add("F5", rel.F5, want_value=False)
    if not f_rec["identically_zero"]:
        for name, expr in eng.general_exprs().items():
            add(name, expr)
        notes.extend(eng.notes)
        return {"route": "general", "entries": entries, "notes": notes}

    if eng.a_vanishes:
        x0, x1, y0, y1 = probe.box
        eng = InvariantEngine(swap_xy(ode),
                              Probe(seed=probe.seed, box=(y0, y1, x0, x1),
                                    npoints=probe.npoints, atol=probe.atol,
                                    rtol=probe.rtol,
                                    maxresample=probe.maxresample))
        notes.append("A vanishes identically: quantities below are computed "
                     "on the x<->y swapped equation")
    n_rec = add("N", eng.N)
    if n_rec["identically_zero"]:
        om_rec = add("Omega", eng.Omega)
        if om_rec["identically_zero"]:
            add("L", eng.L)
    else:
        m_rec = add("M", eng.M)
        om_rec = add("Omega", eng.Omega)
        if m_rec["identically_zero"] and om_rec["identically_zero"]:
            add("Lambda", eng.Lambda)
            add("K", eng.K)
        elif not m_rec["identically_zero"]:
            for name, expr in eng.first_case_exprs().items():
                add(name, expr)
    notes.extend(eng.notes)
    return {"route": "intermediate", "entries": entries, "notes": notes}
