"""Corpus file format, batch runner and machine-readable reports.

Line format (UTF-8, ``#`` starts a comment, empty fields allowed):

    id | equation | name=value,... | expected_verdict | inv:name=value@tol,...

The third field holds exact rational parameter bindings; the reserved key
``box=x0:x1:y0:y1`` overrides the probe rectangle for that record.  The
fifth field lists value assertions checked against the invariant table
first and the extracted parameters second; ``@tol`` defaults to 1e-6.

Per-record probe seeds are derived as sha256(seed, id), so record order and
concurrency never affect results.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Optional

from .backend import backend_name
from .classifier import Classification, classify
from .ode import NormalizeError, normalize_to_cubic
from .parser import ParseError
from .probing import Probe, ProbeExhausted, snap_rational

DEFAULT_CHECK_TOL = 1e-6

# Report keys that vary between byte-identical reruns; stripped by
# stable_report_text / compare mode.
VOLATILE_KEYS = ("generated_at", "wall_ms")


class CorpusFormatError(ValueError):
    def __init__(self, message: str, lineno: int):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass
class Expectation:
    name: str
    value: float
    tol: float = DEFAULT_CHECK_TOL


@dataclass
class CorpusRecord:
    id: str
    equation: str
    params: dict[str, Fraction] = field(default_factory=dict)
    box: Optional[tuple[float, float, float, float]] = None
    expected_verdict: Optional[str] = None
    expectations: list[Expectation] = field(default_factory=list)


def parse_rational(text: str) -> Fraction:
    """Exact rational from '3', '-5/3' or decimal/float notation.

    Floats are snapped to a close rational (denominator <= 10^6)."""
    text = text.strip()
    try:
        return Fraction(text)
    except ValueError:
        pass
    value = float(text)
    snapped = snap_rational(value, maxden=10 ** 6, rtol=1e-9)
    return snapped if snapped is not None else Fraction(value).limit_denominator(10 ** 6)


def _parse_number(text: str) -> float:
    text = text.strip()
    if "/" in text:
        return float(Fraction(text))
    return float(text)


def parse_corpus(text: str) -> list[CorpusRecord]:
    records: list[CorpusRecord] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split("|")]
        if len(fields) < 2:
            raise CorpusFormatError("expected 'id | equation | ...'", lineno)
        fields += [""] * (5 - len(fields))
        rid, equation, params_field, expected, checks_field = fields[:5]
        if not rid:
            raise CorpusFormatError("empty record id", lineno)
        if rid in seen:
            raise CorpusFormatError(f"duplicate record id {rid!r}", lineno)
        seen.add(rid)
        record = CorpusRecord(id=rid, equation=equation)
        if params_field:
            for item in params_field.split(","):
                item = item.strip()
                if not item:
                    continue
                if "=" not in item:
                    raise CorpusFormatError(f"bad parameter {item!r}", lineno)
                name, value = (s.strip() for s in item.split("=", 1))
                if name == "box":
                    parts = value.split(":")
                    if len(parts) != 4:
                        raise CorpusFormatError("box needs x0:x1:y0:y1", lineno)
                    record.box = tuple(float(v) for v in parts)
                else:
                    record.params[name] = parse_rational(value)
        if expected:
            record.expected_verdict = expected
        if checks_field:
            for item in checks_field.split(","):
                item = item.strip()
                if not item:
                    continue
                if not item.startswith("inv:"):
                    raise CorpusFormatError(f"bad assertion {item!r}", lineno)
                body = item[4:]
                if "=" not in body:
                    raise CorpusFormatError(f"bad assertion {item!r}", lineno)
                name, rest = body.split("=", 1)
                tol = DEFAULT_CHECK_TOL
                if "@" in rest:
                    rest, tol_text = rest.split("@", 1)
                    tol = float(tol_text)
                record.expectations.append(
                    Expectation(name=name.strip(), value=_parse_number(rest), tol=tol))
        records.append(record)
    return records


def load_corpus_file(path: str) -> list[CorpusRecord]:
    with open(path, encoding="utf-8") as fh:
        return parse_corpus(fh.read())


def bundled_corpus_text() -> str:
    return resources.files("odecubic.data").joinpath("kamke.corpus").read_text("utf-8")


def load_bundled_corpus() -> list[CorpusRecord]:
    return parse_corpus(bundled_corpus_text())


def derive_seed(seed: int, record_id: str) -> int:
    digest = hashlib.sha256(f"{seed}:{record_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def record_probe(record: CorpusRecord, seed: int, base: Probe) -> Probe:
    return Probe(seed=derive_seed(seed, record.id),
                 box=record.box or base.box, npoints=base.npoints,
                 atol=base.atol, rtol=base.rtol, maxresample=base.maxresample)


# -- running ------------------------------------------------------------------


def classification_payload(result: Classification) -> dict:
    invariants = []
    for name, rec in result.invariants.items():
        entry: dict = {"name": name}
        if rec.identically_zero is not None:
            entry["identically_zero"] = rec.identically_zero
        if rec.value is not None:
            entry["value"] = rec.value
            # display snapping is stricter than the probe tolerance so that
            # irrational constants are not dressed up as nearby fractions
            snapped = snap_rational(rec.value, rtol=1e-12)
            if snapped is not None:
                entry["rational"] = str(snapped)
        elif rec.identically_zero is None:
            entry["value"] = None
        invariants.append(entry)
    return {
        "verdict": result.label,
        "degeneration": result.degeneration,
        "algebra_dim": result.algebra_dim,
        "branch": result.branch,
        "params": {k: v for k, v in result.params.items()},
        "invariants": invariants,
        "model": result.model_text,
        "generators": [list(g) for g in result.generators],
        "branch_notes": result.branch_notes,
    }


def _lookup_check_value(name: str, result: Classification) -> Optional[float]:
    rec = result.invariants.get(name)
    if rec is not None and rec.value is not None:
        return rec.value
    if rec is not None and rec.identically_zero:
        return 0.0
    if name in result.params:
        return result.params[name]
    return None


def run_record(record: CorpusRecord, seed: int, base_probe: Probe,
               tol: float = DEFAULT_CHECK_TOL) -> dict:
    started = time.perf_counter()
    probe = record_probe(record, seed, base_probe)
    payload: dict = {"id": record.id, "equation": record.equation,
                     "params": {k: str(v) for k, v in record.params.items()},
                     "status": "ok", "error": None}
    checks: list[dict] = []
    passed = True
    try:
        ode = normalize_to_cubic(record.equation, record.params, probe)
        result = classify(ode, probe, tol)
        payload.update(classification_payload(result))
        if record.expected_verdict is not None:
            ok = result.label == record.expected_verdict
            checks.append({"name": "verdict", "expected": record.expected_verdict,
                           "actual": result.label, "ok": ok})
            passed &= ok
        for exp in record.expectations:
            actual = _lookup_check_value(exp.name, result)
            ok = (actual is not None
                  and abs(actual - exp.value) <= exp.tol * (1.0 + abs(exp.value)))
            checks.append({"name": exp.name, "expected": exp.value,
                           "tol": exp.tol, "actual": actual, "ok": ok})
            passed &= ok
    except (ParseError, NormalizeError, ProbeExhausted, CorpusFormatError) as exc:
        payload["status"] = "error"
        payload["error"] = {"type": type(exc).__name__, "message": str(exc)}
        passed = False
    payload["checks"] = checks
    payload["passed"] = passed
    payload["wall_ms"] = round((time.perf_counter() - started) * 1000.0, 3)
    return payload


def run_corpus(records: list[CorpusRecord], seed: int = 0,
               base_probe: Optional[Probe] = None,
               tol: float = DEFAULT_CHECK_TOL) -> dict:
    base_probe = base_probe or Probe()
    results = [run_record(r, seed, base_probe, tol) for r in records]
    n_passed = sum(1 for r in results if r["passed"])
    return {
        "schema": "odecubic-report/1",
        "generated_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "seed": seed,
        "backend": backend_name(),
        "records": results,
        "summary": {"total": len(results), "passed": n_passed,
                    "failed": len(results) - n_passed},
    }


def report_text(report: dict) -> str:
    lines = []
    for rec in report["records"]:
        status = "PASS" if rec["passed"] else "FAIL"
        verdict = rec.get("verdict", rec["status"])
        extras = []
        for inv in rec.get("invariants", ()):
            if inv.get("value") is not None:
                shown = inv.get("rational") or f"{inv['value']:.9g}"
                extras.append(f"{inv['name']}={shown}")
        for name, value in rec.get("params", {}).items():
            if isinstance(value, float):
                extras.append(f"{name}={value:.9g}")
        if rec["status"] == "error":
            extras = [rec["error"]["message"]]
        lines.append(f"{status}  {rec['id']:<16} {verdict:<22} "
                     + ", ".join(extras))
    s = report["summary"]
    lines.append(f"{s['passed']}/{s['total']} records passed")
    return "\n".join(lines)


def _strip_volatile(obj):
    if isinstance(obj, dict):
        return {k: _strip_volatile(v) for k, v in obj.items()
                if k not in VOLATILE_KEYS}
    if isinstance(obj, list):
        return [_strip_volatile(v) for v in obj]
    return obj


def stable_report_text(report: dict) -> str:
    """JSON with timing fields removed; byte-identical across equal-seed runs."""
    return json.dumps(_strip_volatile(report), indent=2, sort_keys=False)


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False)
